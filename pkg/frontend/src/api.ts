import type {
  ExcerptPayload,
  ExportSummary,
  PatternCard,
  RecordCard,
  Verdict,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.status = status;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (err) {
    throw new ApiError(0, `network failure: ${String(err)}`);
  }
  const body = await response.text();
  if (!response.ok) {
    let detail = body;
    try {
      detail = (JSON.parse(body) as { error?: string }).error ?? body;
    } catch {
      // non-JSON error body, keep raw text
    }
    throw new ApiError(response.status, detail);
  }
  return JSON.parse(body) as T;
}

/** Thin typed client over the review API; all state changes go through
 * decision and export endpoints, never anywhere else. */
export class ReviewApi {
  constructor(private readonly base: string) {}

  listPatterns(): Promise<PatternCard[]> {
    return request(`${this.base}/api/patterns`);
  }

  listRecords(status?: string): Promise<RecordCard[]> {
    const suffix = status ? `?status=${encodeURIComponent(status)}` : "";
    return request(`${this.base}/api/records${suffix}`);
  }

  getExcerpt(recordId: string): Promise<ExcerptPayload> {
    return request(`${this.base}/api/excerpts/${encodeURIComponent(recordId)}`);
  }

  decidePattern(id: string, verdict: Verdict, reviewer: string): Promise<void> {
    return request(`${this.base}/api/patterns/${encodeURIComponent(id)}/decision`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ verdict, reviewer }),
    });
  }

  decideRecord(id: string, verdict: Verdict, reviewer: string): Promise<void> {
    return request(`${this.base}/api/records/${encodeURIComponent(id)}/decision`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ verdict, reviewer }),
    });
  }

  exportApproved(): Promise<ExportSummary> {
    return request(`${this.base}/api/export`, { method: "POST" });
  }
}
