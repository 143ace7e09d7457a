"""Exhaustive lexicon labeling and dynasty-consistency filtering.

annotate() emits every lexicon hit, preferring longer surfaces: among
same-type matches starting at one position, only the longest match usable
for each dynasty survives (so 中書省都事 suppresses 中書省 for Yuan while
中書 still stands for Ming, which has no longer office there).

enforce_consistency() turns the raw span soup into per-dynasty readings:
for each candidate dynasty, spans whose dynasty sets disagree are removed,
overlaps among the survivors are resolved longest-first, and a run is cut
wherever a disagreeing dynasty-bearing label interrupts the context window.
Address, time, style, and surname labels never constrain the dynasty.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .corpus import Document
from .kb import DYNASTY_BEARING, KnowledgeBase, LabelType

_TYPE_ORDER = {t: i for i, t in enumerate(LabelType)}


class AnnotationError(Exception):
    pass


@dataclass(frozen=True)
class LabelSpan:
    doc_id: str
    start: int
    end: int
    type: LabelType
    surface: str
    dynasties: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.end - self.start != len(self.surface):
            raise AnnotationError(
                f"span [{self.start},{self.end}) does not fit surface "
                f"{self.surface!r}")

    @property
    def length(self) -> int:
        return self.end - self.start

    def overlaps(self, other: "LabelSpan") -> bool:
        return self.start < other.end and other.start < self.end


@dataclass(frozen=True)
class ConsistentSequence:
    doc_id: str
    dynasty: str
    spans: tuple[LabelSpan, ...]

    def types(self) -> tuple[LabelType, ...]:
        return tuple(s.type for s in self.spans)


def _span_sort_key(span: LabelSpan):
    return (span.start, -span.length, _TYPE_ORDER[span.type], span.surface)


def annotate(doc: Document, kb: KnowledgeBase) -> list[LabelSpan]:
    """All maximal lexicon matches over the document.

    For each position and label type, matches are grouped by the dynasties
    they can serve; per group only the longest match is kept.  Matches never
    cross ○ or the space placeholder.
    """
    spans: list[LabelSpan] = []
    for pos in range(doc.length):
        for label_type in LabelType:
            matches = kb.matches_at(doc.chars, pos, label_type)
            if not matches:
                continue
            # longest usable match per dynasty (None groups entries with no
            # dynasty semantics); matches_at returns shortest first, so a
            # later match overwrites a shorter one for the same group.
            per_dynasty: dict[str | None, tuple] = {}
            for entry, end in matches:
                for dyn in entry.dynasties or (None,):
                    per_dynasty[dyn] = (entry, end)
            emitted = set()
            for entry, end in per_dynasty.values():
                if (entry.surface, end) in emitted:
                    continue
                emitted.add((entry.surface, end))
                spans.append(LabelSpan(
                    doc_id=doc.id, start=pos, end=end, type=label_type,
                    surface=entry.surface, dynasties=entry.dynasties))
    spans.sort(key=_span_sort_key)
    return spans


def _compatible(span: LabelSpan, dynasty: str) -> bool:
    if span.type in DYNASTY_BEARING:
        return dynasty in span.dynasties
    return True


def _resolve_overlaps(spans: list[LabelSpan]) -> list[LabelSpan]:
    """Greedy longest-first selection of pairwise non-overlapping spans.

    Ties prefer dynasty-bearing spans (they carry the reading's evidence),
    then earlier start, then type order.
    """
    ranked = sorted(
        spans,
        key=lambda s: (-s.length, s.type not in DYNASTY_BEARING,
                       s.start, _TYPE_ORDER[s.type], s.surface))
    kept: list[LabelSpan] = []
    for span in ranked:
        if not any(span.overlaps(k) for k in kept):
            kept.append(span)
    kept.sort(key=_span_sort_key)
    return kept


def enforce_consistency(spans: list[LabelSpan],
                        window: int = 6) -> list[ConsistentSequence]:
    """Per-dynasty consistent readings of one document's span list.

    For each candidate dynasty the compatible spans form a reading (overlaps
    resolved longest-first).  A dynasty-bearing span that cannot serve the
    candidate and is not an alternative reading of text the candidate
    already covers falls inside any context window with its neighbors, so it
    ends the current run.  A reading whose span set is strictly contained in
    another reading's is context it fails to explain under its dynasty (the
    Qing reading of the 陳瑜 passage covers the office text under no label)
    and is dropped.
    """
    if window < 1:
        raise AnnotationError(f"window must be >= 1, got {window}")
    if any(spans[i].start > spans[i + 1].start for i in range(len(spans) - 1)):
        raise AnnotationError("spans must be sorted by start")
    doc_ids = {s.doc_id for s in spans}
    if len(doc_ids) > 1:
        raise AnnotationError("spans from multiple documents")

    dynasties = sorted({d for s in spans if s.type in DYNASTY_BEARING
                        for d in s.dynasties})
    candidates: list[ConsistentSequence] = []
    for dynasty in dynasties:
        compatible = [s for s in spans if _compatible(s, dynasty)]
        kept = _resolve_overlaps(compatible)
        blocking = [s for s in spans
                    if s.type in DYNASTY_BEARING
                    and not _compatible(s, dynasty)
                    and not any(s.overlaps(k) for k in kept)]
        events = sorted(
            [(s, False) for s in kept] + [(s, True) for s in blocking],
            key=lambda item: _span_sort_key(item[0]))
        run: list[LabelSpan] = []
        for span, is_blocking in events:
            if is_blocking:
                if any(s.type in DYNASTY_BEARING for s in run):
                    candidates.append(ConsistentSequence(
                        span.doc_id, dynasty, tuple(run)))
                run = []
            else:
                run.append(span)
        if any(s.type in DYNASTY_BEARING for s in run):
            candidates.append(ConsistentSequence(
                run[0].doc_id, dynasty, tuple(run)))

    span_sets = [frozenset(seq.spans) for seq in candidates]
    return [seq for seq, spanset in zip(candidates, span_sets)
            if not any(spanset < other for other in span_sets)]


def save_spans(spans: list[LabelSpan], path: str | Path) -> None:
    """Annotation dump, one TSV row per span."""
    lines = ["# doc_id\tstart\tend\ttype\tsurface\tdynasties"]
    for s in spans:
        lines.append("\t".join([
            s.doc_id, str(s.start), str(s.end), s.type.value, s.surface,
            ",".join(sorted(s.dynasties))]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_spans(path: str | Path) -> list[LabelSpan]:
    spans = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        doc_id, start, end, type_token, surface, dyn = (line.split("\t") + [""])[:6]
        spans.append(LabelSpan(
            doc_id=doc_id, start=int(start), end=int(end),
            type=LabelType(type_token), surface=surface,
            dynasties=frozenset(d for d in dyn.split(",") if d)))
    return spans
