"""Frequent label-type pattern mining and candidate record extraction.

Mined patterns start life as proposals; extraction consumes only patterns a
reviewer approved.  Style names come from the 字-anchored layout inside
pattern-matched excerpts; circle pairs come straight from the raw stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .annotator import ConsistentSequence, LabelSpan
from .corpus import Corpus, Document, MARKER, PLACEHOLDER
from .kb import KnowledgeBase, LabelType

STYLE_MARK = "字"  # 字, introduces a style name

PROPOSED = "proposed"
APPROVED = "approved"
REJECTED = "rejected"
_STATUSES = (PROPOSED, APPROVED, REJECTED)


class PatternError(Exception):
    pass


@dataclass(frozen=True)
class FilterPattern:
    id: str
    sequence: tuple[LabelType, ...]
    support: int = 0
    status: str = PROPOSED

    def __post_init__(self) -> None:
        if len(self.sequence) < 2:
            raise PatternError("filter patterns need at least two labels")
        if self.support < 0:
            raise PatternError("negative support")
        if self.status not in _STATUSES:
            raise PatternError(f"unknown pattern status {self.status!r}")

    @property
    def token_string(self) -> str:
        return "-".join(t.value for t in self.sequence)


def pattern_from_tokens(tokens: str, support: int = 0,
                        status: str = PROPOSED) -> FilterPattern:
    seq = tuple(LabelType(tok) for tok in tokens.split("-"))
    return FilterPattern(id=tokens, sequence=seq, support=support, status=status)


@dataclass(frozen=True)
class Excerpt:
    doc_id: str
    dynasty: str
    pattern_id: str
    start: int
    end: int
    text: str
    spans: tuple[LabelSpan, ...]


@dataclass(frozen=True)
class CandidateRecord:
    official_name: str
    doc_id: str
    name_start: int
    source: str  # P5 | P6 | P7
    dynasty: str | None = None
    style_name: str | None = None
    evidence: str = ""
    score: float | None = None

    def __post_init__(self) -> None:
        if self.source in ("P6", "P7") and len(self.official_name) not in (2, 3):
            raise PatternError(
                f"circle-pair name {self.official_name!r} must have 2 or 3 chars")
        if self.style_name is not None and len(self.style_name) != 2:
            raise PatternError(
                f"style name {self.style_name!r} must have exactly 2 chars")

    @property
    def record_id(self) -> str:
        return f"{self.doc_id}:{self.name_start}:{self.source}:{self.dynasty or '-'}"


@dataclass(frozen=True)
class MatchType:
    scheme: str  # TABLE1 | TABLE2
    type_id: int


# -- mining -------------------------------------------------------------------


def mine_patterns(sequences: list[ConsistentSequence], n_min: int, n_max: int,
                  min_support: int) -> list[FilterPattern]:
    """Count label-type n-grams over sequences that contain a NAME label.

    An occurrence is one position in one sequence; the same stretch of text
    read under several dynasties counts once (occurrences are keyed by the
    covered span offsets).
    """
    if n_min > n_max:
        raise PatternError(f"n_min {n_min} exceeds n_max {n_max}")
    if n_min < 2:
        raise PatternError("n_min must be at least 2")
    occurrences: dict[tuple[LabelType, ...], set] = {}
    for seq in sequences:
        if not any(s.type == LabelType.NAME for s in seq.spans):
            continue
        types = seq.types()
        for n in range(n_min, n_max + 1):
            for i in range(len(types) - n + 1):
                gram = types[i:i + n]
                key = (seq.doc_id,
                       tuple((s.start, s.end) for s in seq.spans[i:i + n]))
                occurrences.setdefault(gram, set()).add(key)
    patterns = []
    for gram, occ in occurrences.items():
        if len(occ) >= min_support:
            tokens = "-".join(t.value for t in gram)
            patterns.append(FilterPattern(id=tokens, sequence=gram,
                                          support=len(occ), status=PROPOSED))
    patterns.sort(key=lambda p: (-p.support, p.token_string))
    return patterns


def match_filter_patterns(sequences: list[ConsistentSequence],
                          patterns: list[FilterPattern],
                          docs: Corpus) -> list[Excerpt]:
    """Excerpts for every occurrence of an approved pattern."""
    approved = [p for p in patterns if p.status == APPROVED]
    excerpts = []
    for seq in sequences:
        types = seq.types()
        doc = docs.get(seq.doc_id)
        for pattern in approved:
            n = len(pattern.sequence)
            for i in range(len(types) - n + 1):
                if types[i:i + n] != pattern.sequence:
                    continue
                window = seq.spans[i:i + n]
                start, end = window[0].start, window[-1].end
                excerpts.append(Excerpt(
                    doc_id=seq.doc_id, dynasty=seq.dynasty,
                    pattern_id=pattern.id, start=start, end=end,
                    text=doc.chars[start:end], spans=window))
    excerpts.sort(key=lambda e: (e.doc_id, e.start, e.end, e.dynasty, e.pattern_id))
    return excerpts


# -- record extraction --------------------------------------------------------


def _skip_markers(chars: str, i: int) -> int:
    while i < len(chars) and chars[i] == MARKER:
        i += 1
    return i


def extract_style_records(excerpts: list[Excerpt],
                          docs: Corpus) -> list[CandidateRecord]:
    """Records from excerpts whose layout is <name> 字 Z1 Z2 <address>.

    Z1 and Z2 must be unlabeled; layout circles between the pieces are
    skipped, spaces are not.
    """
    records = []
    seen = set()
    for ex in excerpts:
        doc = docs.get(ex.doc_id)
        chars = doc.chars
        covered = set()
        for span in ex.spans:
            covered.update(range(span.start, span.end))
        addr_starts = {s.start: s for s in ex.spans if s.type == LabelType.ADDRESS}
        for span in ex.spans:
            if span.type != LabelType.NAME:
                continue
            i = _skip_markers(chars, span.end)
            if i >= len(chars) or chars[i] != STYLE_MARK:
                continue
            i = _skip_markers(chars, i + 1)
            style_chars = []
            ok = True
            for _ in range(2):
                i = _skip_markers(chars, i)
                if (i >= len(chars) or i in covered
                        or chars[i] in (STYLE_MARK, PLACEHOLDER)):
                    ok = False
                    break
                style_chars.append(chars[i])
                i += 1
            if not ok:
                continue
            i = _skip_markers(chars, i)
            if i not in addr_starts:
                continue
            record = CandidateRecord(
                official_name=span.surface, doc_id=ex.doc_id,
                name_start=span.start, source="P5", dynasty=ex.dynasty,
                style_name="".join(style_chars), evidence=ex.text)
            if record.record_id in seen:
                continue
            seen.add(record.record_id)
            records.append(record)
    records.sort(key=lambda r: (r.doc_id, r.name_start, r.dynasty or ""))
    return records


def extract_circle_pairs(doc: Document) -> list[CandidateRecord]:
    """Name/style pairs anchored on layout circles: ○ C C (C) 字 Z Z.

    A single circle between the name block and 字 is skipped; the longer
    3-character form wins over the 2-character one at the same anchor.
    """
    chars = doc.chars
    forbidden = {MARKER, PLACEHOLDER, STYLE_MARK}
    records = []
    for anchor in range(len(chars)):
        if chars[anchor] != MARKER:
            continue
        for name_len in (3, 2):
            name = chars[anchor + 1:anchor + 1 + name_len]
            if len(name) < name_len or any(c in forbidden for c in name):
                continue
            i = anchor + 1 + name_len
            if i < len(chars) and chars[i] == MARKER:
                i += 1
            if i >= len(chars) or chars[i] != STYLE_MARK:
                continue
            style = chars[i + 1:i + 3]
            if len(style) < 2 or any(c in forbidden for c in style):
                continue
            records.append(CandidateRecord(
                official_name=name, doc_id=doc.id, name_start=anchor + 1,
                source="P6" if name_len == 3 else "P7",
                evidence=chars[anchor:i + 3], style_name=style))
            break
    return records


# -- record classification ----------------------------------------------------

_TABLE1_ROWS = {
    (True, True, True): 1,
    (True, True, False): 2,
    (False, True, True): 3,
    (True, False, True): 4,
    (False, True, False): 5,
    (False, False, True): 6,
    (True, False, False): 7,
    (False, False, False): 7,
}

_TABLE2_ROWS = {
    (True, True): 1,
    (True, False): 2,
    (False, True): 3,
    (False, False): 4,
}


def table1_type(dynasty_match: bool, name_match: bool, style_match: bool) -> int:
    return _TABLE1_ROWS[(dynasty_match, name_match, style_match)]


def table2_type(name_match: bool, style_match: bool) -> int:
    return _TABLE2_ROWS[(name_match, style_match)]


def classify_record(record: CandidateRecord, kb: KnowledgeBase,
                    scheme: str) -> MatchType:
    """Match a candidate record against known persons.

    TABLE1 judges dynasty, name, and (name, style) co-occurrence; TABLE2,
    used when no dynasty could be inferred, judges name and style membership
    independently.
    """
    if scheme == "TABLE1":
        if record.dynasty is None:
            raise PatternError("TABLE1 classification needs a dynasty")
        d = kb.has_person(record.official_name, record.dynasty)
        n = kb.has_person_name(record.official_name)
        s = kb.has_name_style(record.official_name, record.style_name)
        return MatchType("TABLE1", table1_type(d, n, s))
    if scheme == "TABLE2":
        n = kb.has_person_name(record.official_name)
        s = kb.has_style_name(record.style_name)
        return MatchType("TABLE2", table2_type(n, s))
    raise PatternError(f"unknown match scheme {scheme!r}")


# -- files --------------------------------------------------------------------


def save_patterns(patterns: list[FilterPattern], path: str | Path) -> None:
    lines = ["# id\tsequence\tsupport\tstatus"]
    for p in patterns:
        lines.append(f"{p.id}\t{p.token_string}\t{p.support}\t{p.status}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_patterns(path: str | Path) -> list[FilterPattern]:
    patterns = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        pid, tokens, support, status = line.split("\t")
        patterns.append(FilterPattern(
            id=pid, sequence=tuple(LabelType(t) for t in tokens.split("-")),
            support=int(support), status=status))
    return patterns


def save_excerpt_samples(excerpts: list[Excerpt], path: str | Path,
                         per_pattern: int = 5) -> None:
    """Up to per_pattern sample excerpts for each pattern, for review cards.

    Span offsets are stored relative to the excerpt start so a client can
    highlight without re-matching.
    """
    lines = ["# pattern_id\tdoc_id\tstart\tend\ttext\tspans"]
    seen: dict[str, int] = {}
    for ex in excerpts:
        if seen.get(ex.pattern_id, 0) >= per_pattern:
            continue
        seen[ex.pattern_id] = seen.get(ex.pattern_id, 0) + 1
        spans = ";".join(f"{s.start - ex.start}:{s.end - ex.start}:{s.type.value}"
                         for s in ex.spans)
        lines.append("\t".join([ex.pattern_id, ex.doc_id, str(ex.start),
                                str(ex.end), ex.text, spans]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_excerpt_samples(path: str | Path) -> dict[str, list[dict]]:
    """pattern_id -> sample payloads as stored by save_excerpt_samples."""
    samples: dict[str, list[dict]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        pattern_id, doc_id, start, end, text, spans = line.split("\t")
        parsed = []
        for chunk in spans.split(";"):
            if not chunk:
                continue
            s, e, t = chunk.split(":")
            parsed.append({"start": int(s), "end": int(e), "type": t})
        samples.setdefault(pattern_id, []).append({
            "doc_id": doc_id, "start": int(start), "end": int(end),
            "text": text, "spans": parsed})
    return samples


def save_records(records: list[CandidateRecord], path: str | Path,
                 classifications: dict[str, MatchType] | None = None) -> None:
    lines = ["# dynasty\tofficial_name\tstyle_name\tdoc_id\tname_start\t"
             "source\tmatch_scheme\tmatch_type"]
    for r in records:
        match = (classifications or {}).get(r.record_id)
        lines.append("\t".join([
            r.dynasty or "", r.official_name, r.style_name or "",
            r.doc_id, str(r.name_start), r.source,
            match.scheme if match else "", str(match.type_id) if match else ""]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_records(path: str | Path) -> list[CandidateRecord]:
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        cols = (line.split("\t") + [""] * 8)[:8]
        dynasty, name, style, doc_id, name_start, source = cols[:6]
        records.append(CandidateRecord(
            official_name=name, doc_id=doc_id, name_start=int(name_start),
            source=source, dynasty=dynasty or None, style_name=style or None))
    return records
