"""Measurement machinery: tag- and entity-level precision/recall/F1, zone
analysis with expected-count estimation, and person-location pairing.

Entity scoring is strict: a predicted span earns credit only on an exact
(start, end, kind) match; partial overlap scores nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from .corpus import Corpus, MARKER
from .crf.entities import LOCATION, PERSON, TaggedEntity
from .crf.model import Tag
from .gold import GoldAnnotations
from .kb import KnowledgeBase

BIRTHPLACE_MATCH = "BIRTHPLACE_MATCH"
PERSON_KNOWN = "PERSON_KNOWN"
NEW = "NEW"


class EvaluationError(Exception):
    pass


class Prf(NamedTuple):
    precision: float
    recall: float
    f1: float


def _prf(tp: int, n_pred: int, n_gold: int) -> Prf:
    p = tp / n_pred if n_pred else 0.0
    r = tp / n_gold if n_gold else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return Prf(p, r, f)


def label_prf(pred: list[list[Tag]], gold: list[list[Tag]]) -> dict[Tag, Prf]:
    """Per-tag precision/recall/F1 over parallel tag sequences; 0/0 -> 0."""
    if len(pred) != len(gold):
        raise EvaluationError(f"{len(pred)} predicted sequences vs "
                              f"{len(gold)} gold")
    tp = {t: 0 for t in Tag}
    n_pred = {t: 0 for t in Tag}
    n_gold = {t: 0 for t in Tag}
    for p_seq, g_seq in zip(pred, gold):
        if len(p_seq) != len(g_seq):
            raise EvaluationError("sequence length mismatch between "
                                  "prediction and gold")
        for p, g in zip(p_seq, g_seq):
            n_pred[p] += 1
            n_gold[g] += 1
            if p == g:
                tp[p] += 1
    return {t: _prf(tp[t], n_pred[t], n_gold[t]) for t in Tag}


def entity_prf(pred: list[TaggedEntity], gold: GoldAnnotations) -> dict[str, Prf]:
    """Exact-match entity scores per kind."""
    gold_keys = gold.entity_keys()
    results = {}
    for kind in (PERSON, LOCATION):
        pred_keys = {(e.doc_id, e.start, e.end, e.kind)
                     for e in pred if e.kind == kind}
        kind_gold = {k for k in gold_keys if k[3] == kind}
        results[kind] = _prf(len(pred_keys & kind_gold),
                             len(pred_keys), len(kind_gold))
    return results


# -- zone analysis --------------------------------------------------------------


@dataclass(frozen=True)
class ZoneRow:
    size: int
    sampled: int
    correct_in_sample: int
    proportion: float
    expected_correct: int


@dataclass(frozen=True)
class ZoneReport:
    zones: tuple[ZoneRow, ...]
    total_expected: int
    overall_rate: float


def zone_analysis(candidates, oracle, n_zones: int = 10,
                  sample_per_zone: int = 100, scores=None,
                  zone_sizes: list[int] | None = None) -> ZoneReport:
    """Rank candidates by score, split into zones, sample each zone's head,
    and extrapolate the verified proportion to the whole zone.

    Expected counts truncate (zone size x correct / sampled), computed in
    integer arithmetic so 1714 x 0.59 gives 1011, not 1012.
    """
    if not candidates:
        raise EvaluationError("no candidates to analyze")
    if scores is None:
        scores = [getattr(c, "score", None) if getattr(c, "score", None) is not None
                  else getattr(c, "confidence") for c in candidates]
    if len(scores) != len(candidates):
        raise EvaluationError("scores do not align with candidates")
    order = sorted(range(len(candidates)), key=lambda i: (-scores[i], i))
    ranked = [candidates[i] for i in order]

    n = len(ranked)
    if zone_sizes is None:
        head = -(-n // n_zones)  # ceil
        zone_sizes = []
        left = n
        while left > 0:
            size = min(head, left) if len(zone_sizes) < n_zones - 1 else left
            zone_sizes.append(size)
            left -= size
    if sum(zone_sizes) != n:
        raise EvaluationError(f"zone sizes sum to {sum(zone_sizes)}, "
                              f"expected {n}")
    if sample_per_zone > min(zone_sizes):
        raise EvaluationError(f"sample size {sample_per_zone} exceeds the "
                              f"smallest zone ({min(zone_sizes)})")

    rows = []
    offset = 0
    for size in zone_sizes:
        zone = ranked[offset:offset + size]
        offset += size
        sample = zone[:sample_per_zone]
        correct = sum(1 for item in sample if oracle(item))
        rows.append(ZoneRow(
            size=size, sampled=len(sample), correct_in_sample=correct,
            proportion=correct / len(sample),
            expected_correct=size * correct // len(sample)))
    total = sum(r.expected_correct for r in rows)
    return ZoneReport(zones=tuple(rows), total_expected=total,
                      overall_rate=total / n)


# -- person-location pairing -----------------------------------------------------


@dataclass(frozen=True)
class NamePair:
    person: TaggedEntity
    location: TaggedEntity
    gap: int
    kb_class: str  # BIRTHPLACE_MATCH | PERSON_KNOWN | NEW


def pair_names_addresses(entities: list[TaggedEntity], kb: KnowledgeBase,
                         corpus: Corpus, max_gap: int = 10) -> list[NamePair]:
    """Pair each person with every following location within the gap limit.

    The gap counts characters strictly between the two spans, layout circles
    excluded, which needs the document stream (entities alone cannot tell a
    circle from text).
    """
    pairs = []
    by_doc: dict[str, list[TaggedEntity]] = {}
    for e in entities:
        by_doc.setdefault(e.doc_id, []).append(e)
    for doc_id in sorted(by_doc):
        doc = corpus.get(doc_id)
        doc_entities = sorted(by_doc[doc_id], key=lambda e: (e.start, e.end))
        for i, person in enumerate(doc_entities):
            if person.kind != PERSON:
                continue
            for location in doc_entities[i + 1:]:
                if location.kind != LOCATION or location.start <= person.end:
                    continue
                between = doc.chars[person.end:location.start]
                gap = len(between) - between.count(MARKER)
                if gap > max_gap:
                    continue
                if kb.has_birthplace(person.surface, location.surface):
                    kb_class = BIRTHPLACE_MATCH
                elif kb.has_person_name(person.surface):
                    kb_class = PERSON_KNOWN
                else:
                    kb_class = NEW
                pairs.append(NamePair(person, location, gap, kb_class))
    return pairs


# -- report files ----------------------------------------------------------------


def save_prf_report(rows: dict, path: str | Path, label_header: str) -> None:
    lines = [f"# {label_header}\tprecision\trecall\tf1"]
    for key in rows:
        prf = rows[key]
        name = key.name if hasattr(key, "name") else str(key)
        lines.append(f"{name}\t{prf.precision:.4f}\t{prf.recall:.4f}\t"
                     f"{prf.f1:.4f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_zone_report(report: ZoneReport, path: str | Path) -> None:
    lines = ["# zone\tsize\tsampled\tcorrect\tproportion\texpected"]
    for i, row in enumerate(report.zones, 1):
        lines.append(f"{i}\t{row.size}\t{row.sampled}\t{row.correct_in_sample}"
                     f"\t{row.proportion:.4f}\t{row.expected_correct}")
    lines.append(f"# total_expected\t{report.total_expected}")
    lines.append(f"# overall_rate\t{report.overall_rate:.4f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_pairs(pairs: list[NamePair], path: str | Path) -> None:
    lines = ["# doc_id\tperson\tperson_start\tlocation\tlocation_start\t"
             "gap\tkb_class"]
    for p in pairs:
        lines.append("\t".join([
            p.person.doc_id, p.person.surface, str(p.person.start),
            p.location.surface, str(p.location.start), str(p.gap), p.kb_class]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
