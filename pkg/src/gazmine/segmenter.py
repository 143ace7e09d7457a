"""Paragraph-beginning detection and segmentation scoring.

Beginnings come from candidate records and from three positional patterns
over consistent sequences: name-address-人, name-address-address-人, and
name-nianhao-office (the last tolerating one unlabeled character, as in
楊嘉至正間教諭).  Consecutive beginnings act as clippers delimiting one
paragraph; the five scores X1..X3/Y1..Y2 measure how often they land on and
bracket gold paragraphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .annotator import ConsistentSequence, LabelSpan
from .corpus import Document, MARKER
from .kb import LabelType

PERSON_SUFFIX = "人"  # 人, post-marker for native places

_ORIGIN_RANK = {"RECORD": 0, "P8": 1, "P9": 2, "P10": 3}


class SegmentationError(Exception):
    pass


@dataclass(frozen=True)
class Beginning:
    doc_id: str
    position: int
    origin: str  # RECORD | P8 | P9 | P10


@dataclass(frozen=True)
class Paragraph:
    doc_id: str
    start: int
    end: int


@dataclass(frozen=True)
class BeginningPair:
    doc_id: str
    first: int
    second: int
    verifiable: bool = True


@dataclass(frozen=True)
class SegmentationScore:
    x1: float
    x2: float
    x3: float
    y1: float
    y2: float
    n_pairs: int
    n_excluded: int


def _skip_markers(doc: Document, i: int) -> int:
    while i < doc.length and doc.chars[i] == MARKER:
        i += 1
    return i


def _pattern_beginnings(doc: Document, seq: ConsistentSequence) -> list[Beginning]:
    spans = sorted(seq.spans, key=lambda s: s.start)
    at_start: dict[int, LabelSpan] = {s.start: s for s in spans}
    covered = set()
    for s in spans:
        covered.update(range(s.start, s.end))
    found = []

    def span_after(pos: int, label_type: LabelType) -> LabelSpan | None:
        nxt = at_start.get(_skip_markers(doc, pos))
        return nxt if nxt is not None and nxt.type == label_type else None

    for span in spans:
        if span.type != LabelType.NAME:
            continue
        addr1 = span_after(span.end, LabelType.ADDRESS)
        if addr1 is not None:
            i = _skip_markers(doc, addr1.end)
            if i < doc.length and doc.chars[i] == PERSON_SUFFIX:
                found.append(Beginning(doc.id, span.start, "P8"))
            addr2 = span_after(addr1.end, LabelType.ADDRESS)
            if addr2 is not None:
                i = _skip_markers(doc, addr2.end)
                if i < doc.length and doc.chars[i] == PERSON_SUFFIX:
                    found.append(Beginning(doc.id, span.start, "P9"))
        nianhao = span_after(span.end, LabelType.NIANHAO)
        if nianhao is not None:
            office = span_after(nianhao.end, LabelType.OFFICE)
            if office is None:
                # one unlabeled character may sit between the reign period
                # and the office
                i = _skip_markers(doc, nianhao.end)
                if i < doc.length and i not in covered and doc.chars[i] != MARKER:
                    office = span_after(i + 1, LabelType.OFFICE)
            if office is not None:
                found.append(Beginning(doc.id, span.start, "P10"))
    return found


def find_beginnings(doc: Document, records,
                    sequences: list[ConsistentSequence]) -> list[Beginning]:
    """Record starts plus pattern hits, sorted and deduplicated by position."""
    found = [Beginning(doc.id, r.name_start, "RECORD")
             for r in records if r.doc_id == doc.id]
    for seq in sequences:
        if seq.doc_id != doc.id:
            continue
        found.extend(_pattern_beginnings(doc, seq))
    best: dict[int, Beginning] = {}
    for b in found:
        prior = best.get(b.position)
        if prior is None or _ORIGIN_RANK[b.origin] < _ORIGIN_RANK[prior.origin]:
            best[b.position] = b
    return [best[p] for p in sorted(best)]


def segment(doc: Document, beginnings: list[Beginning]) -> list[Paragraph]:
    """Tile the document into paragraphs between consecutive beginnings.

    Text before the first beginning is preamble, not a paragraph.
    """
    positions = [b.position for b in beginnings]
    if positions != sorted(set(positions)):
        raise SegmentationError("beginnings must be sorted and unique")
    paragraphs = []
    for i, start in enumerate(positions):
        end = positions[i + 1] if i + 1 < len(positions) else doc.length
        paragraphs.append(Paragraph(doc.id, start, end))
    return paragraphs


def make_pairs(beginnings: list[Beginning]) -> list[BeginningPair]:
    """Consecutive-beginning pairs; a final beginning with no successor
    yields no pair."""
    return [BeginningPair(a.doc_id, a.position, b.position)
            for a, b in zip(beginnings, beginnings[1:])]


def score_segmentation(pairs: list[BeginningPair],
                       gold_boundaries: dict[str, set[int]],
                       gold_paragraphs: dict[str, set[tuple[int, int]]]
                       ) -> SegmentationScore:
    """X1/X2: how often the first/second beginning of a pair is a gold
    boundary; X3: both at once; Y1: how often the pair brackets exactly one
    gold paragraph; Y2: the same over the X3 subset only."""
    usable = [p for p in pairs if p.verifiable]
    n_excluded = len(pairs) - len(usable)
    if not usable:
        raise SegmentationError("no verifiable pairs to score")
    x1 = x2 = x3 = y1 = y2 = 0
    for p in usable:
        bounds = gold_boundaries.get(p.doc_id, set())
        paras = gold_paragraphs.get(p.doc_id, set())
        first_ok = p.first in bounds
        second_ok = p.second in bounds
        is_para = (p.first, p.second) in paras
        x1 += first_ok
        x2 += second_ok
        x3 += first_ok and second_ok
        y1 += is_para
        y2 += is_para and first_ok and second_ok
    n = len(usable)
    return SegmentationScore(
        x1=x1 / n, x2=x2 / n, x3=x3 / n, y1=y1 / n,
        y2=y2 / x3 if x3 else 0.0,
        n_pairs=n, n_excluded=n_excluded)


def save_beginnings(beginnings: list[Beginning], path: str | Path) -> None:
    lines = ["# doc_id\tposition\torigin"]
    for b in beginnings:
        lines.append(f"{b.doc_id}\t{b.position}\t{b.origin}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_gold_boundaries(path: str | Path) -> dict[str, set[int]]:
    """Gold boundary TSV: doc_id, position."""
    bounds: dict[str, set[int]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        doc_id, pos = line.split("\t")[:2]
        bounds.setdefault(doc_id, set()).add(int(pos))
    return bounds
