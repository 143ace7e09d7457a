"""Tag sequences versus entity spans.

Entities are maximal NB NI* NE (person) or AB AI* AE (location) runs; a run
that never closes yields nothing.  Entity confidence is the geometric mean
of the per-position posterior probability of the decoded tag.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..corpus import Document
from .model import Tag

PERSON = "PERSON"
LOCATION = "LOCATION"


class EntityError(Exception):
    pass


@dataclass(frozen=True)
class TaggedEntity:
    doc_id: str
    start: int
    end: int
    kind: str
    surface: str
    confidence: float = 1.0


_RUNS = {
    Tag.NB: (Tag.NI, Tag.NE, PERSON),
    Tag.AB: (Tag.AI, Tag.AE, LOCATION),
}


def extract_entities(tags, marg: np.ndarray, doc: Document) -> list[TaggedEntity]:
    if len(tags) != doc.length:
        raise EntityError(f"{len(tags)} tags for a document of length "
                          f"{doc.length}")
    entities = []
    i = 0
    n = len(tags)
    while i < n:
        run = _RUNS.get(tags[i])
        if run is None:
            i += 1
            continue
        inner, closer, kind = run
        j = i + 1
        while j < n and tags[j] == inner:
            j += 1
        if j < n and tags[j] == closer:
            conf = float(np.exp(np.mean(
                [np.log(marg[t, int(tags[t])]) for t in range(i, j + 1)])))
            entities.append(TaggedEntity(
                doc_id=doc.id, start=i, end=j + 1, kind=kind,
                surface=doc.chars[i:j + 1], confidence=conf))
            i = j + 1
        else:
            i = j
    return entities


def tags_from_spans(doc: Document, spans) -> list[Tag]:
    """Gold entity spans to a full tag sequence.

    Spans must be in bounds, non-overlapping, and at least two characters
    long; nothing in the tagset can encode a single-character entity.
    """
    tags = [Tag.O] * doc.length
    claimed = [False] * doc.length
    for span in spans:
        start, end, kind = span.start, span.end, span.kind
        if not 0 <= start < end <= doc.length:
            raise EntityError(f"span [{start},{end}) out of bounds in {doc.id!r}")
        if end - start < 2:
            raise EntityError(
                f"single-character entity at {start} in {doc.id!r}: the "
                f"tagset has no encoding for length-1 entities")
        if any(claimed[start:end]):
            raise EntityError(f"overlapping gold spans at {start} in {doc.id!r}")
        for p in range(start, end):
            claimed[p] = True
        begin, inner, closer = ((Tag.NB, Tag.NI, Tag.NE) if kind == PERSON
                                else (Tag.AB, Tag.AI, Tag.AE))
        tags[start] = begin
        for p in range(start + 1, end - 1):
            tags[p] = inner
        tags[end - 1] = closer
    return tags


def save_entities(entities: list[TaggedEntity], path: str | Path) -> None:
    lines = ["# doc_id\tstart\tend\tkind\tsurface\tconfidence"]
    for e in entities:
        lines.append(f"{e.doc_id}\t{e.start}\t{e.end}\t{e.kind}\t{e.surface}"
                     f"\t{e.confidence:.6f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_entities(path: str | Path) -> list[TaggedEntity]:
    entities = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        doc_id, start, end, kind, surface, confidence = line.split("\t")
        entities.append(TaggedEntity(doc_id=doc_id, start=int(start),
                                     end=int(end), kind=kind, surface=surface,
                                     confidence=float(confidence)))
    return entities
