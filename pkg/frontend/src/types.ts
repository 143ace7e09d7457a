export type Status = "proposed" | "approved" | "rejected";
export type Verdict = "APPROVE" | "REJECT";

export interface SampleSpan {
  start: number;
  end: number;
  type: string;
}

export interface PatternSample {
  doc_id: string;
  start: number;
  end: number;
  text: string;
  spans: SampleSpan[];
}

export interface PatternCard {
  id: string;
  sequence: string;
  support: number;
  status: Status;
  samples: PatternSample[];
}

export interface RecordCard {
  id: string;
  dynasty: string | null;
  official_name: string;
  style_name: string | null;
  doc_id: string;
  name_start: number;
  source: string;
  status: Status;
  match_scheme: "TABLE1" | "TABLE2";
  match_type: number;
}

export interface ExcerptHighlight {
  start: number;
  end: number;
}

export interface ExcerptPayload {
  id: string;
  doc_id: string;
  status: Status;
  evidence: string;
  context: string | null;
  highlight: ExcerptHighlight | null;
}

export interface ExportSummary {
  records_merged: number;
  patterns_approved: number;
  entries_file: string;
  persons_file: string;
  patterns_file: string;
}

export interface RecordFilters {
  source: string | null;
  matchType: number | null;
}
