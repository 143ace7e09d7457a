"""Lexicon and biographical records backing annotation and feature extraction.

The lexicon holds surfaces of eight label types in a forward prefix index
(one trie per type) so the longest match starting at a stream position is a
single walk.  Matching never crosses the layout circle or the space
placeholder: lexicon surfaces contain neither, and a match spanning them
would fabricate a word out of page layout.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus, Document, MARKER, PLACEHOLDER


class LabelType(enum.Enum):
    NAME = "NAME"
    STYLE = "STYLE"
    ADDRESS = "ADDRESS"
    OFFICE = "OFFICE"
    ENTRY = "ENTRY"
    NIANHAO = "NIANHAO"
    TIME = "TIME"
    SURNAME = "SURNAME"


# Types whose dynasty sets participate in consistency checking.
DYNASTY_BEARING = frozenset(
    {LabelType.NAME, LabelType.OFFICE, LabelType.ENTRY, LabelType.NIANHAO})


class KBError(Exception):
    pass


@dataclass(frozen=True)
class KBEntry:
    surface: str
    type: LabelType
    dynasties: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.surface:
            raise KBError("empty lexicon surface")
        if MARKER in self.surface or PLACEHOLDER in self.surface:
            raise KBError(
                f"lexicon surface {self.surface!r} contains a layout mark")
        if self.type == LabelType.ADDRESS and self.dynasties:
            raise KBError(f"address {self.surface!r} must not carry "
                          f"dynasties; addresses never gate consistency")


@dataclass(frozen=True)
class PersonRecord:
    official_name: str
    style_name: str | None = None
    dynasty: str | None = None
    native_place: str | None = None

    def __post_init__(self) -> None:
        if not self.official_name:
            raise KBError("person record with empty official name")


class _TrieNode:
    __slots__ = ("children", "entry")

    def __init__(self) -> None:
        self.children: dict[str, _TrieNode] = {}
        self.entry: KBEntry | None = None


@dataclass(frozen=True)
class CharStats:
    """Per-codepoint counts feeding the usage-probability features."""

    total: dict[str, int] = field(default_factory=dict)
    in_person: dict[str, int] = field(default_factory=dict)
    in_location: dict[str, int] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.total)

    def person_prob(self, ch: str) -> float | None:
        n = self.total.get(ch, 0)
        return self.in_person.get(ch, 0) / n if n else None

    def location_prob(self, ch: str) -> float | None:
        n = self.total.get(ch, 0)
        return self.in_location.get(ch, 0) / n if n else None


class KnowledgeBase:
    """Lexicon entries, person records, and corpus character statistics.

    Treated as immutable after construction; merge_records returns a new
    instance.
    """

    def __init__(self, entries=(), persons=(), char_stats: CharStats | None = None):
        self._entries: dict[tuple[str, LabelType], KBEntry] = {}
        self._tries: dict[LabelType, _TrieNode] = {t: _TrieNode() for t in LabelType}
        self._persons: list[PersonRecord] = []
        self._person_keys: set[tuple] = set()
        self.char_stats = char_stats or CharStats()
        for e in entries:
            self._add_entry(e)
        for p in persons:
            self._add_person(p)

    # -- construction -----------------------------------------------------

    def _add_entry(self, entry: KBEntry) -> None:
        key = (entry.surface, entry.type)
        prior = self._entries.get(key)
        if prior is not None:
            entry = KBEntry(entry.surface, entry.type,
                            prior.dynasties | entry.dynasties)
        self._entries[key] = entry
        node = self._tries[entry.type]
        for ch in entry.surface:
            node = node.children.setdefault(ch, _TrieNode())
        node.entry = entry

    def _add_person(self, person: PersonRecord) -> None:
        key = (person.official_name, person.style_name,
               person.dynasty, person.native_place)
        if key in self._person_keys:
            return
        self._person_keys.add(key)
        self._persons.append(person)

    # -- access ------------------------------------------------------------

    @property
    def entries(self) -> list[KBEntry]:
        return sorted(self._entries.values(),
                      key=lambda e: (e.type.value, e.surface))

    @property
    def persons(self) -> list[PersonRecord]:
        return list(self._persons)

    def entry(self, surface: str, type: LabelType) -> KBEntry | None:
        return self._entries.get((surface, type))

    def has_person_name(self, name: str) -> bool:
        return any(p.official_name == name for p in self._persons)

    def has_person(self, name: str, dynasty: str) -> bool:
        return any(p.official_name == name and p.dynasty == dynasty
                   for p in self._persons)

    def has_name_style(self, name: str, style: str | None) -> bool:
        if style is None:
            return False
        return any(p.official_name == name and p.style_name == style
                   for p in self._persons)

    def has_style_name(self, style: str | None) -> bool:
        if style is None:
            return False
        return any(p.style_name == style for p in self._persons)

    def has_birthplace(self, name: str, place: str) -> bool:
        return any(p.official_name == name and p.native_place == place
                   for p in self._persons)

    # -- matching ----------------------------------------------------------

    def matches_at(self, chars: str, pos: int, type: LabelType) -> list[tuple[KBEntry, int]]:
        """All lexicon matches of a type starting at pos, shortest first.

        Walking stops at ○, at the space placeholder, or when the trie runs
        out of edges.
        """
        node = self._tries[type]
        found = []
        i = pos
        while i < len(chars):
            ch = chars[i]
            if ch == MARKER or ch == PLACEHOLDER:
                break
            node = node.children.get(ch)
            if node is None:
                break
            i += 1
            if node.entry is not None:
                found.append((node.entry, i))
        return found

    def lookup_longest(self, doc: Document, pos: int,
                       type: LabelType) -> tuple[KBEntry, int] | None:
        """Longest lexicon match of a type starting at pos, or None."""
        if not 0 <= pos < doc.length:
            raise IndexError(f"position {pos} out of range for {doc.id!r}")
        found = self.matches_at(doc.chars, pos, type)
        return found[-1] if found else None

    # -- merging -----------------------------------------------------------

    def merge_records(self, approved) -> "KnowledgeBase":
        """Fold approved candidate records back into the lexicon.

        Each record contributes a NAME entry (and a STYLE entry when it has
        a style name) carrying the record's dynasty, plus a person record.
        Re-merging the same records is a no-op.
        """
        new_entries = list(self._entries.values())
        new_persons = list(self._persons)
        for rec in approved:
            if not rec.official_name:
                raise KBError("cannot merge a record with an empty name")
            dyn = frozenset({rec.dynasty}) if rec.dynasty else frozenset()
            new_entries.append(KBEntry(rec.official_name, LabelType.NAME, dyn))
            if rec.style_name:
                new_entries.append(KBEntry(rec.style_name, LabelType.STYLE, dyn))
            new_persons.append(PersonRecord(
                official_name=rec.official_name,
                style_name=rec.style_name or None,
                dynasty=rec.dynasty,
            ))
        return KnowledgeBase(new_entries, new_persons, self.char_stats)

    def with_char_stats(self, stats: CharStats) -> "KnowledgeBase":
        return KnowledgeBase(self._entries.values(), self._persons, stats)


# -- file formats ------------------------------------------------------------


def _data_rows(path: Path):
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        yield lineno, line.split("\t")


def load_kb(entry_files=(), person_files=()) -> KnowledgeBase:
    """Load lexicon and person TSVs.

    Entry rows: surface, type token, comma-separated dynasty list (optional).
    Person rows: official_name, style_name, dynasty, native_place; trailing
    empties may be omitted.  Lines starting with '#' are comments.
    """
    entries = []
    for f in entry_files:
        path = Path(f)
        if not path.exists():
            raise KBError(f"entry file does not exist: {path}")
        for lineno, cols in _data_rows(path):
            if len(cols) < 2:
                raise KBError(f"{path}:{lineno}: expected at least "
                              f"surface and type, got {len(cols)} columns")
            surface, type_token = cols[0], cols[1]
            try:
                label_type = LabelType(type_token)
            except ValueError:
                raise KBError(
                    f"{path}:{lineno}: unknown label type {type_token!r}") from None
            dyn = frozenset(d for d in cols[2].split(",") if d) if len(cols) > 2 else frozenset()
            try:
                entries.append(KBEntry(surface, label_type, dyn))
            except KBError as exc:
                raise KBError(f"{path}:{lineno}: {exc}") from None
    persons = []
    for f in person_files:
        path = Path(f)
        if not path.exists():
            raise KBError(f"person file does not exist: {path}")
        for lineno, cols in _data_rows(path):
            if not cols[0]:
                raise KBError(f"{path}:{lineno}: empty official name")
            cols = cols + [""] * (4 - len(cols))
            persons.append(PersonRecord(
                official_name=cols[0],
                style_name=cols[1] or None,
                dynasty=cols[2] or None,
                native_place=cols[3] or None,
            ))
    return KnowledgeBase(entries, persons)


def save_entries(kb: KnowledgeBase, path: str | Path) -> None:
    lines = ["# surface\ttype\tdynasties"]
    for e in kb.entries:
        lines.append(f"{e.surface}\t{e.type.value}\t{','.join(sorted(e.dynasties))}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_persons(kb: KnowledgeBase, path: str | Path) -> None:
    lines = ["# official_name\tstyle_name\tdynasty\tnative_place"]
    for p in sorted(kb.persons, key=lambda p: (p.official_name, p.style_name or "",
                                               p.dynasty or "", p.native_place or "")):
        lines.append("\t".join([p.official_name, p.style_name or "",
                                p.dynasty or "", p.native_place or ""]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def default_data_files() -> list[Path]:
    """Bundled SURNAME and TIME lexicons (Hundred Family Names; sexagenary
    cycle plus month names)."""
    data_dir = Path(__file__).parent / "data"
    return [data_dir / "surnames.tsv", data_dir / "time_markers.tsv"]


# -- character statistics ------------------------------------------------------


def compute_char_stats(kb: KnowledgeBase, corpus: Corpus, gold) -> KnowledgeBase:
    """Count, per codepoint, total corpus occurrences and occurrences inside
    gold person / location spans.  Returns a new KB carrying the stats."""
    total: dict[str, int] = {}
    in_person: dict[str, int] = {}
    in_location: dict[str, int] = {}
    for doc in corpus:
        for ch in doc.chars:
            total[ch] = total.get(ch, 0) + 1
    for doc_id, doc_gold in gold.docs.items():
        doc = corpus.get(doc_id)
        for span in doc_gold.entities:
            if not 0 <= span.start < span.end <= doc.length:
                raise KBError(
                    f"gold span [{span.start},{span.end}) out of bounds in {doc_id!r}")
            bucket = in_person if span.kind == "PERSON" else in_location
            for ch in doc.chars[span.start:span.end]:
                bucket[ch] = bucket.get(ch, 0) + 1
    return kb.with_char_stats(CharStats(total, in_person, in_location))
