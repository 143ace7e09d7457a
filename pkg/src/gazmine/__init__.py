"""gazmine: biographical entity mining for unpunctuated literary-Chinese text."""

__version__ = "0.1.0"

from .annotator import ConsistentSequence, LabelSpan, annotate, enforce_consistency
from .corpus import Corpus, Document, MARKER, load_corpus
from .kb import (KBEntry, KnowledgeBase, LabelType, PersonRecord,
                 compute_char_stats, load_kb)
from .patterns import (CandidateRecord, Excerpt, FilterPattern, MatchType,
                       classify_record, extract_circle_pairs,
                       extract_style_records, match_filter_patterns,
                       mine_patterns)

__all__ = [
    "CandidateRecord", "ConsistentSequence", "Corpus", "Document", "Excerpt",
    "FilterPattern", "KBEntry", "KnowledgeBase", "LabelSpan", "LabelType",
    "MARKER", "MatchType", "PersonRecord", "annotate", "classify_record",
    "compute_char_stats", "enforce_consistency", "extract_circle_pairs",
    "extract_style_records", "load_corpus", "load_kb", "match_filter_patterns",
    "mine_patterns",
]
