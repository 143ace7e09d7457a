import { ReviewApi } from "./api.js";
import {
  bannerHtml,
  contextHtml,
  exportSummaryHtml,
  patternCardHtml,
  recordCardHtml,
} from "./render.js";
import { patternsByStatus, ReviewSession, visibleRecords } from "./state.js";
import type { Status } from "./types.js";

const api = new ReviewApi("");
const session = new ReviewSession(api);

let activeTab: Status = "proposed";

function $(selector: string): HTMLElement {
  const el = document.querySelector<HTMLElement>(selector);
  if (!el) {
    throw new Error(`missing element ${selector}`);
  }
  return el;
}

function renderAll(): void {
  $("#banner").innerHTML =
    bannerHtml(session.state.banner) + exportSummaryHtml(session.state.exportSummary);
  const patterns = patternsByStatus(session.state, activeTab);
  $("#patterns").innerHTML =
    patterns.map(patternCardHtml).join("") ||
    `<p class="empty">no ${activeTab} patterns</p>`;
  for (const tab of ["proposed", "approved", "rejected"] as const) {
    const el = $(`#tab-${tab}`);
    el.classList.toggle("active", tab === activeTab);
    el.textContent = `${tab} (${patternsByStatus(session.state, tab).length})`;
  }
  const records = visibleRecords(session.state);
  $("#records").innerHTML =
    records.map(recordCardHtml).join("") || `<p class="empty">no records</p>`;
  for (const record of records) {
    void loadExcerpt(record.id);
  }
}

async function loadExcerpt(recordId: string): Promise<void> {
  const slot = document.querySelector<HTMLElement>(
    `[data-excerpt-for="${CSS.escape(recordId)}"]`,
  );
  if (!slot) {
    return;
  }
  try {
    slot.innerHTML = contextHtml(await api.getExcerpt(recordId));
  } catch {
    slot.textContent = "context unavailable";
  }
}

async function onClick(event: Event): Promise<void> {
  const target = event.target as HTMLElement;
  const action = target.dataset.action;
  if (!action) {
    return;
  }
  const patternId = target.closest<HTMLElement>("[data-pattern-id]")?.dataset.patternId;
  const recordId = target.closest<HTMLElement>("[data-record-id]")?.dataset.recordId;
  if (action === "approve-pattern" && patternId) {
    await session.decidePattern(patternId, "APPROVE");
  } else if (action === "reject-pattern" && patternId) {
    await session.decidePattern(patternId, "REJECT");
  } else if (action === "approve-record" && recordId) {
    await session.decideRecord(recordId, "APPROVE");
  } else if (action === "reject-record" && recordId) {
    await session.decideRecord(recordId, "REJECT");
  } else if (action === "export") {
    await session.runExport();
  } else if (action === "tab") {
    activeTab = (target.dataset.tab ?? "proposed") as Status;
  }
  renderAll();
}

function onFilterChange(): void {
  const source = ($("#filter-source") as HTMLSelectElement).value;
  const matchType = ($("#filter-match-type") as HTMLSelectElement).value;
  session.setSourceFilter(source || null);
  session.setMatchTypeFilter(matchType ? Number(matchType) : null);
  renderAll();
}

async function boot(): Promise<void> {
  document.body.addEventListener("click", (e) => void onClick(e));
  $("#filter-source").addEventListener("change", onFilterChange);
  $("#filter-match-type").addEventListener("change", onFilterChange);
  try {
    await session.refresh();
  } catch (err) {
    session.state.banner = `cannot reach the review service: ${String(err)}`;
  }
  renderAll();
}

void boot();
