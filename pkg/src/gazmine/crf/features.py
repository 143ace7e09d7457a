"""Per-character feature extraction for the tagger.

Six feature groups: the character itself, its neighbors within k positions,
distances to nearby office/entry/nianhao/time lexicon hits, binned
person/location usage probabilities, surname-list positions, and direct NE
tags.  When group 6 is active, a position inside an office/entry/nianhao/
time match carries only its ne= tag.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus import Document
from ..kb import KnowledgeBase, LabelType


class FeatureError(Exception):
    pass


NE_FEATURE_TYPES = (
    (LabelType.OFFICE, "office"),
    (LabelType.ENTRY, "entry"),
    (LabelType.NIANHAO, "nianhao"),
    (LabelType.TIME, "time"),
)

ALL_GROUPS = frozenset(range(1, 7))
DEFAULT_GROUPS = frozenset((1, 2, 4, 5, 6))


@dataclass(frozen=True)
class FeatureConfig:
    k: int = 5
    ne_window: int = 30
    bins: int = 5
    groups: frozenset[int] = DEFAULT_GROUPS

    def __post_init__(self) -> None:
        if self.k < 0:
            raise FeatureError("k must be >= 0")
        if self.ne_window < 1:
            raise FeatureError("ne_window must be >= 1")
        if self.bins != 5:
            raise FeatureError("usage probabilities are binned into 5 ranges")
        if not frozenset(self.groups) <= ALL_GROUPS:
            raise FeatureError(f"unknown feature groups: "
                               f"{sorted(set(self.groups) - ALL_GROUPS)}")
        object.__setattr__(self, "groups", frozenset(self.groups))


def usage_bin(p: float) -> int:
    """Bin index 1..5 for a probability, closed at the top (1.0 -> 5)."""
    if not 0.0 <= p <= 1.0:
        raise FeatureError(f"probability {p} outside [0, 1]")
    if p < 0.2:
        return 1
    if p < 0.4:
        return 2
    if p < 0.6:
        return 3
    if p < 0.8:
        return 4
    return 5


def _lexicon_spans(doc: Document, kb: KnowledgeBase,
                   types: list[tuple[LabelType, str]]) -> list[tuple[int, int, str]]:
    spans = []
    for label_type, token in types:
        for pos in range(doc.length):
            hit = kb.lookup_longest(doc, pos, label_type)
            if hit is not None:
                spans.append((pos, hit[1], token))
    return spans


def build_features(doc: Document, kb: KnowledgeBase,
                   cfg: FeatureConfig) -> list[tuple[str, ...]]:
    """One sorted feature tuple per stream position."""
    groups = cfg.groups
    if 4 in groups and not kb.char_stats:
        raise FeatureError("group 4 requires computed character statistics")

    ne_spans = ([] if not (groups & {3, 6})
                else _lexicon_spans(doc, kb, list(NE_FEATURE_TYPES)))
    # Group 6 coverage: longest covering span wins, then earliest, then the
    # office/entry/nianhao/time order.
    type_rank = {token: i for i, (_, token) in enumerate(NE_FEATURE_TYPES)}
    covered: dict[int, tuple] = {}
    if 6 in groups:
        for start, end, token in ne_spans:
            key = (-(end - start), start, type_rank[token])
            for pos in range(start, end):
                if pos not in covered or key < covered[pos][0]:
                    covered[pos] = (key, token)

    surname_positions: dict[int, set[int]] = {}
    if 5 in groups:
        for pos in range(doc.length):
            hit = kb.lookup_longest(doc, pos, LabelType.SURNAME)
            if hit is None:
                continue
            _, end = hit
            for offset in range(end - pos):
                surname_positions.setdefault(pos + offset, set()).add(offset + 1)

    chars = doc.chars
    vectors = []
    for pos in range(doc.length):
        if 6 in groups and pos in covered:
            vectors.append((f"ne={covered[pos][1]}",))
            continue
        feats = set()
        if 1 in groups:
            feats.add(f"char={chars[pos]}")
        if 2 in groups:
            for j in range(1, cfg.k + 1):
                if pos - j >= 0:
                    feats.add(f"left{j}={chars[pos - j]}")
                if pos + j < len(chars):
                    feats.add(f"right{j}={chars[pos + j]}")
        if 3 in groups:
            nearest: dict[tuple[str, str], int] = {}
            for start, end, token in ne_spans:
                if end <= pos:
                    d = pos - end
                    direction = "Left"
                elif start > pos:
                    d = start - pos - 1
                    direction = "Right"
                else:
                    continue  # span covers this position
                if d >= cfg.ne_window:
                    continue
                key = (token, direction)
                if key not in nearest or d < nearest[key]:
                    nearest[key] = d
            for (token, direction), d in nearest.items():
                feats.add(f"{token}{direction}@{d}")
        if 4 in groups:
            pp = kb.char_stats.person_prob(chars[pos])
            pl = kb.char_stats.location_prob(chars[pos])
            if pp is not None:
                feats.add(f"probPerson@{usage_bin(pp)}")
                feats.add(f"probLoc@{usage_bin(pl)}")
        if 5 in groups:
            for p in surname_positions.get(pos, ()):
                feats.add(f"surname@{p}")
        vectors.append(tuple(sorted(feats)))
    return vectors
