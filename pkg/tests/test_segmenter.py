import random

import pytest

from gazmine.annotator import ConsistentSequence, LabelSpan
from gazmine.corpus import Document
from gazmine.kb import LabelType
from gazmine.patterns import CandidateRecord
from gazmine.segmenter import (Beginning, BeginningPair, SegmentationError,
                               find_beginnings, make_pairs, score_segmentation,
                               segment)


def seq_from_text(doc_id, dynasty, placed):
    """placed: list of (start, surface, type)."""
    spans = tuple(
        LabelSpan(doc_id=doc_id, start=start, end=start + len(surface),
                  type=label_type, surface=surface,
                  dynasties=frozenset({dynasty})
                  if label_type in (LabelType.NAME, LabelType.NIANHAO,
                                    LabelType.OFFICE, LabelType.ENTRY)
                  else frozenset())
        for start, surface, label_type in placed)
    return ConsistentSequence(doc_id=doc_id, dynasty=dynasty, spans=spans)


def test_p9_beginning_from_paper_shape():
    doc = Document(id="d", chars="葉溥浙江龍泉人也")
    seq = seq_from_text("d", "Ming", [
        (0, "葉溥", LabelType.NAME), (2, "浙江", LabelType.ADDRESS),
        (4, "龍泉", LabelType.ADDRESS)])
    beginnings = find_beginnings(doc, [], [seq])
    assert [(b.position, b.origin) for b in beginnings] == [(0, "P9")]


def test_p8_beginning():
    doc = Document(id="d", chars="葉溥浙江人")
    seq = seq_from_text("d", "Ming", [
        (0, "葉溥", LabelType.NAME), (2, "浙江", LabelType.ADDRESS)])
    beginnings = find_beginnings(doc, [], [seq])
    assert [(b.position, b.origin) for b in beginnings] == [(0, "P8")]


def test_p10_beginning_with_intervening_char():
    doc = Document(id="d", chars="楊嘉至正間教諭")
    seq = seq_from_text("d", "Yuan", [
        (0, "楊嘉", LabelType.NAME), (2, "至正", LabelType.NIANHAO),
        (5, "教諭", LabelType.OFFICE)])
    beginnings = find_beginnings(doc, [], [seq])
    assert [(b.position, b.origin) for b in beginnings] == [(0, "P10")]


def test_p10_beginning_adjacent_office():
    doc = Document(id="d", chars="楊嘉至正教諭")
    seq = seq_from_text("d", "Yuan", [
        (0, "楊嘉", LabelType.NAME), (2, "至正", LabelType.NIANHAO),
        (4, "教諭", LabelType.OFFICE)])
    assert [(b.position, b.origin) for b in find_beginnings(doc, [], [seq])] \
        == [(0, "P10")]


def test_record_beginnings_and_dedup():
    doc = Document(id="d", chars="葉溥浙江人")
    seq = seq_from_text("d", "Ming", [
        (0, "葉溥", LabelType.NAME), (2, "浙江", LabelType.ADDRESS)])
    record = CandidateRecord(official_name="葉溥", doc_id="d", name_start=0,
                             source="P7", style_name="甲乙")
    beginnings = find_beginnings(doc, [record], [seq])
    assert [(b.position, b.origin) for b in beginnings] == [(0, "RECORD")]


def test_no_hits_no_beginnings():
    doc = Document(id="d", chars="甲乙丙丁")
    assert find_beginnings(doc, [], []) == []


def test_pattern_monotonicity_records_only_vs_with_patterns():
    doc = Document(id="d", chars="葉溥浙江人某某楊嘉至正間教諭")
    seq = seq_from_text("d", "Yuan", [
        (0, "葉溥", LabelType.NAME), (2, "浙江", LabelType.ADDRESS),
        (7, "楊嘉", LabelType.NAME), (9, "至正", LabelType.NIANHAO),
        (12, "教諭", LabelType.OFFICE)])
    record = CandidateRecord(official_name="葉溥", doc_id="d", name_start=0,
                             source="P7", style_name="甲乙")
    records_only = find_beginnings(doc, [record], [])
    with_patterns = find_beginnings(doc, [record], [seq])
    assert {b.position for b in records_only} <= {b.position for b in with_patterns}
    assert len(with_patterns) >= len(records_only)


def test_segment_tiling():
    doc = Document(id="d", chars="x" * 100)
    paragraphs = segment(doc, [Beginning("d", 10, "RECORD"),
                               Beginning("d", 50, "RECORD")])
    assert [(p.start, p.end) for p in paragraphs] == [(10, 50), (50, 100)]


def test_segment_single_beginning_at_zero():
    doc = Document(id="d", chars="x" * 30)
    paragraphs = segment(doc, [Beginning("d", 0, "RECORD")])
    assert [(p.start, p.end) for p in paragraphs] == [(0, 30)]


def test_segment_empty():
    doc = Document(id="d", chars="x" * 30)
    assert segment(doc, []) == []


def test_make_pairs_drops_trailing_beginning():
    bs = [Beginning("d", 3, "RECORD"), Beginning("d", 9, "P8"),
          Beginning("d", 20, "P9")]
    pairs = make_pairs(bs)
    assert [(p.first, p.second) for p in pairs] == [(3, 9), (9, 20)]


def test_score_hand_fixture():
    # 2 pairs where both ends are boundaries and the interval is a gold
    # paragraph, 1 where only the first matches, 1 where neither does
    pairs = [BeginningPair("d", 0, 10), BeginningPair("d", 10, 20),
             BeginningPair("d", 30, 44), BeginningPair("d", 51, 60)]
    bounds = {"d": {0, 10, 20, 30}}
    paras = {"d": {(0, 10), (10, 20)}}
    score = score_segmentation(pairs, bounds, paras)
    assert score.x1 == 0.75
    assert score.x2 == 0.5
    assert score.x3 == 0.5
    assert score.y1 == 0.5
    assert score.y2 == 1.0
    assert score.n_pairs == 4 and score.n_excluded == 0


def test_score_perfect_bracketing():
    pairs = [BeginningPair("d", 0, 5), BeginningPair("d", 5, 9)]
    bounds = {"d": {0, 5, 9}}
    paras = {"d": {(0, 5), (5, 9)}}
    score = score_segmentation(pairs, bounds, paras)
    assert (score.x1, score.x2, score.x3, score.y1, score.y2) == (1, 1, 1, 1, 1)


def test_multi_paragraph_gap_counts_x3_not_y2():
    pairs = [BeginningPair("d", 0, 20)]
    bounds = {"d": {0, 10, 20}}
    paras = {"d": {(0, 10), (10, 20)}}
    score = score_segmentation(pairs, bounds, paras)
    assert score.x3 == 1.0
    assert score.y1 == 0.0 and score.y2 == 0.0


def test_unverifiable_pairs_excluded():
    pairs = [BeginningPair("d", 0, 10),
             BeginningPair("d", 10, 20, verifiable=False)]
    bounds = {"d": {0, 10}}
    paras = {"d": {(0, 10)}}
    score = score_segmentation(pairs, bounds, paras)
    assert score.n_pairs == 1 and score.n_excluded == 1
    assert score.x1 == 1.0


def test_zero_verifiable_pairs_error():
    with pytest.raises(SegmentationError):
        score_segmentation([BeginningPair("d", 0, 1, verifiable=False)], {}, {})


def test_x3_bounded_by_x1_x2_property():
    rng = random.Random(77)
    for _ in range(300):
        n = rng.randint(1, 12)
        pairs = []
        pos = 0
        for _ in range(n):
            first = pos + rng.randint(0, 5)
            second = first + rng.randint(1, 8)
            pairs.append(BeginningPair("d", first, second))
            pos = second
        bounds = {"d": {p for p in range(0, pos + 1) if rng.random() < 0.5}}
        paras = {"d": {(p.first, p.second) for p in pairs if rng.random() < 0.3}}
        score = score_segmentation(pairs, bounds, paras)
        assert score.x3 <= min(score.x1, score.x2) + 1e-12
        assert 0.0 <= score.y2 <= 1.0
