"""Curation state for patterns and candidate records.

Decisions are an append-only JSONL log; replaying the log reconstructs the
current status map, and the latest decision per target wins.  Export
materializes approved records as knowledge-base merge TSVs and approved
patterns as an extraction pattern file.
"""

from __future__ import annotations

import json
import threading
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

from .kb import KnowledgeBase, save_entries, save_persons
from .patterns import (APPROVED, CandidateRecord, FilterPattern, PROPOSED,
                       load_excerpt_samples, load_patterns, load_records,
                       save_patterns)

PATTERN = "PATTERN"
RECORD = "RECORD"
_VERDICTS = ("APPROVE", "REJECT")


class ReviewError(Exception):
    pass


@dataclass(frozen=True)
class ReviewDecision:
    target_kind: str  # PATTERN | RECORD
    target_id: str
    verdict: str      # APPROVE | REJECT
    reviewer: str
    timestamp: str    # ISO-8601

    def __post_init__(self) -> None:
        if self.target_kind not in (PATTERN, RECORD):
            raise ReviewError(f"unknown target kind {self.target_kind!r}")
        if self.verdict not in _VERDICTS:
            raise ReviewError(f"unknown verdict {self.verdict!r}")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class ReviewState:
    """Review data rooted in a state directory.

    Layout: patterns.tsv and records.tsv hold the proposals, decisions.jsonl
    the append-only log; export writes kb-merge-entries.tsv,
    kb-merge-persons.tsv, and approved-patterns.tsv.
    """

    def __init__(self, state_dir: str | Path):
        self.state_dir = Path(state_dir)
        self.state_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self.patterns: list[FilterPattern] = []
        self.records: list[CandidateRecord] = []
        self.pattern_samples: dict[str, list[dict]] = {}
        self._load_inputs()

    @property
    def decisions_path(self) -> Path:
        return self.state_dir / "decisions.jsonl"

    def _load_inputs(self) -> None:
        patterns_path = self.state_dir / "patterns.tsv"
        records_path = self.state_dir / "records.tsv"
        samples_path = self.state_dir / "samples.tsv"
        if patterns_path.exists():
            self.patterns = load_patterns(patterns_path)
        if records_path.exists():
            self.records = load_records(records_path)
        if samples_path.exists():
            self.pattern_samples = load_excerpt_samples(samples_path)

    # -- decisions ---------------------------------------------------------

    def decisions(self) -> list[ReviewDecision]:
        if not self.decisions_path.exists():
            return []
        out = []
        for line in self.decisions_path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                out.append(ReviewDecision(**json.loads(line)))
        return out

    def record_decision(self, target_kind: str, target_id: str, verdict: str,
                        reviewer: str = "anonymous") -> ReviewDecision:
        known = {p.id for p in self.patterns} if target_kind == PATTERN \
            else {r.record_id for r in self.records}
        if target_id not in known:
            raise ReviewError(f"unknown {target_kind.lower()} {target_id!r}")
        decision = ReviewDecision(target_kind=target_kind, target_id=target_id,
                                  verdict=verdict, reviewer=reviewer,
                                  timestamp=_now())
        with self._lock:
            with self.decisions_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(asdict(decision), ensure_ascii=False) + "\n")
        return decision

    def status_map(self, target_kind: str) -> dict[str, str]:
        """Latest decision per target, replayed from the log."""
        latest: dict[str, ReviewDecision] = {}
        for d in self.decisions():
            if d.target_kind != target_kind:
                continue
            prior = latest.get(d.target_id)
            if prior is None or d.timestamp >= prior.timestamp:
                latest[d.target_id] = d
        return {tid: ("approved" if d.verdict == "APPROVE" else "rejected")
                for tid, d in latest.items()}

    def patterns_with_status(self) -> list[FilterPattern]:
        overlay = self.status_map(PATTERN)
        out = []
        for p in self.patterns:
            status = overlay.get(p.id, p.status)
            out.append(FilterPattern(id=p.id, sequence=p.sequence,
                                     support=p.support, status=status))
        return out

    def records_with_status(self) -> list[tuple[CandidateRecord, str]]:
        overlay = self.status_map(RECORD)
        return [(r, overlay.get(r.record_id, PROPOSED)) for r in self.records]

    # -- export ------------------------------------------------------------

    def export(self, kb: KnowledgeBase | None = None) -> dict:
        """Write approved records and patterns to merge files.

        Returns a summary with counts and output paths.
        """
        approved_records = [r for r, status in self.records_with_status()
                            if status == APPROVED]
        approved_patterns = [p for p in self.patterns_with_status()
                             if p.status == APPROVED]
        base = kb or KnowledgeBase()
        merged = base.merge_records(approved_records)
        new_entries = KnowledgeBase(
            [e for e in merged.entries
             if base.entry(e.surface, e.type) != e],
            [p for p in merged.persons if p not in set(base.persons)])
        entries_path = self.state_dir / "kb-merge-entries.tsv"
        persons_path = self.state_dir / "kb-merge-persons.tsv"
        patterns_path = self.state_dir / "approved-patterns.tsv"
        save_entries(new_entries, entries_path)
        save_persons(new_entries, persons_path)
        save_patterns(approved_patterns, patterns_path)
        return {
            "records_merged": len(approved_records),
            "patterns_approved": len(approved_patterns),
            "entries_file": str(entries_path),
            "persons_file": str(persons_path),
            "patterns_file": str(patterns_path),
        }
