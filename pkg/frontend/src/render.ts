import type {
  ExcerptPayload,
  ExportSummary,
  PatternCard,
  PatternSample,
  RecordCard,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Highlight an excerpt purely from the span offsets the API supplied;
 * the rendered text content stays byte-identical to the payload. */
export function excerptHtml(sample: PatternSample): string {
  const spans = [...sample.spans].sort((a, b) => a.start - b.start);
  const parts: string[] = [];
  let cursor = 0;
  for (const span of spans) {
    if (span.start > cursor) {
      parts.push(escapeHtml(sample.text.slice(cursor, span.start)));
    }
    parts.push(
      `<mark class="span span-${span.type.toLowerCase()}" title="${span.type}">` +
        escapeHtml(sample.text.slice(span.start, span.end)) +
        "</mark>",
    );
    cursor = span.end;
  }
  parts.push(escapeHtml(sample.text.slice(cursor)));
  return `<span class="excerpt">${parts.join("")}</span>`;
}

export function contextHtml(payload: ExcerptPayload): string {
  if (payload.context === null || payload.highlight === null) {
    return `<span class="excerpt">${escapeHtml(payload.evidence)}</span>`;
  }
  const { start, end } = payload.highlight;
  return (
    `<span class="excerpt">` +
    escapeHtml(payload.context.slice(0, start)) +
    `<mark class="span span-name">${escapeHtml(payload.context.slice(start, end))}</mark>` +
    escapeHtml(payload.context.slice(end)) +
    "</span>"
  );
}

const TABLE1_ROWS: Record<number, [string, string, string]> = {
  1: ["○", "○", "○"],
  2: ["○", "○", "×"],
  3: ["×", "○", "○"],
  4: ["○", "×", "○"],
  5: ["×", "○", "×"],
  6: ["×", "×", "○"],
  7: ["○/×", "×", "×"],
};

const TABLE2_ROWS: Record<number, [string, string]> = {
  1: ["○", "○"],
  2: ["○", "×"],
  3: ["×", "○"],
  4: ["×", "×"],
};

/** The row of marks behind a match-type id, for the record badge. */
export function matchBadge(scheme: "TABLE1" | "TABLE2", matchType: number): string {
  if (scheme === "TABLE1") {
    const row = TABLE1_ROWS[matchType];
    return `dynasty ${row[0]} name ${row[1]} style ${row[2]}`;
  }
  const row = TABLE2_ROWS[matchType];
  return `name ${row[0]} style ${row[1]}`;
}

export function patternCardHtml(pattern: PatternCard): string {
  const samples = pattern.samples
    .slice(0, 5)
    .map((s) => `<li>${excerptHtml(s)} <span class="doc">${escapeHtml(s.doc_id)}</span></li>`)
    .join("");
  return `<article class="card pattern-card" data-pattern-id="${escapeHtml(pattern.id)}">
  <header>
    <code>${escapeHtml(pattern.sequence)}</code>
    <span class="support">support ${pattern.support}</span>
    <span class="status status-${pattern.status}">${pattern.status}</span>
  </header>
  <ul class="samples">${samples}</ul>
  <footer>
    <button data-action="approve-pattern">approve</button>
    <button data-action="reject-pattern">reject</button>
  </footer>
</article>`;
}

export function recordCardHtml(record: RecordCard): string {
  const badge = matchBadge(record.match_scheme, record.match_type);
  return `<article class="card record-card" data-record-id="${escapeHtml(record.id)}">
  <header>
    <strong>${escapeHtml(record.official_name)}</strong>
    <span class="style-name">${escapeHtml(record.style_name ?? "—")}</span>
    <span class="dynasty">${escapeHtml(record.dynasty ?? "?")}</span>
    <span class="badge">${escapeHtml(record.match_scheme)} type ${record.match_type}: ${badge}</span>
    <span class="source">${escapeHtml(record.source)}</span>
    <span class="status status-${record.status}">${record.status}</span>
  </header>
  <div class="evidence" data-excerpt-for="${escapeHtml(record.id)}">loading…</div>
  <footer>
    <button data-action="approve-record">approve</button>
    <button data-action="reject-record">reject</button>
  </footer>
</article>`;
}

export function bannerHtml(message: string | null): string {
  if (message === null) {
    return "";
  }
  return `<div class="banner error">${escapeHtml(message)}</div>`;
}

export function exportSummaryHtml(summary: ExportSummary | null): string {
  if (summary === null) {
    return "";
  }
  const records = summary.records_merged === 1
    ? "1 person record merged"
    : `${summary.records_merged} person records merged`;
  return `<div class="banner export">${records}, ` +
    `${summary.patterns_approved} patterns approved → ` +
    `${escapeHtml(summary.patterns_file)}</div>`;
}
