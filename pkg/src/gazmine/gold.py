"""Standoff gold annotations: entity spans, NE spans, paragraph boundaries.

File format, one block per document:

    #doc <doc_id>
    entity <start> <end> <PERSON|LOCATION>
    ne <start> <end> <office|entry|nianhao|time>
    boundary <position>
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path


class GoldError(Exception):
    pass


@dataclass(frozen=True)
class EntitySpan:
    start: int
    end: int
    kind: str  # PERSON | LOCATION


@dataclass(frozen=True)
class NeSpan:
    start: int
    end: int
    netype: str  # office | entry | nianhao | time


@dataclass
class DocGold:
    entities: list[EntitySpan] = field(default_factory=list)
    ne_spans: list[NeSpan] = field(default_factory=list)
    boundaries: list[int] = field(default_factory=list)


@dataclass
class GoldAnnotations:
    docs: dict[str, DocGold] = field(default_factory=dict)
    # candidate records planted by the synthetic generator; not serialized
    # with the standoff file (they live in the records TSV)
    planted_records: list = field(default_factory=list)

    def doc(self, doc_id: str) -> DocGold:
        return self.docs.setdefault(doc_id, DocGold())

    def entity_keys(self) -> set[tuple[str, int, int, str]]:
        return {(doc_id, e.start, e.end, e.kind)
                for doc_id, g in self.docs.items() for e in g.entities}

    def paragraphs(self, doc_id: str, doc_length: int) -> list[tuple[int, int]]:
        """Paragraph intervals tiled from boundaries, final one running to
        the end of the document."""
        bounds = sorted(set(self.docs[doc_id].boundaries))
        return [(b, bounds[i + 1] if i + 1 < len(bounds) else doc_length)
                for i, b in enumerate(bounds)]


def save_gold(gold: GoldAnnotations, path: str | Path) -> None:
    lines = []
    for doc_id in sorted(gold.docs):
        g = gold.docs[doc_id]
        lines.append(f"#doc {doc_id}")
        for e in sorted(g.entities, key=lambda e: (e.start, e.end)):
            lines.append(f"entity {e.start} {e.end} {e.kind}")
        for n in sorted(g.ne_spans, key=lambda n: (n.start, n.end)):
            lines.append(f"ne {n.start} {n.end} {n.netype}")
        for b in sorted(set(g.boundaries)):
            lines.append(f"boundary {b}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_gold(path: str | Path) -> GoldAnnotations:
    gold = GoldAnnotations()
    current: DocGold | None = None
    for lineno, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#doc "):
            current = gold.doc(line[len("#doc "):].strip())
            continue
        if current is None:
            raise GoldError(f"{path}:{lineno}: annotation before any #doc line")
        parts = line.split()
        kind = parts[0]
        if kind == "entity":
            current.entities.append(EntitySpan(int(parts[1]), int(parts[2]), parts[3]))
        elif kind == "ne":
            current.ne_spans.append(NeSpan(int(parts[1]), int(parts[2]), parts[3]))
        elif kind == "boundary":
            current.boundaries.append(int(parts[1]))
        else:
            raise GoldError(f"{path}:{lineno}: unknown annotation {kind!r}")
    return gold
