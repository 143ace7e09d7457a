"""Command-line driver for the full pipeline.

Subcommands: ingest, annotate, mine, extract, train, tag, segment,
eval-labels, eval-entities, eval-zones, pairs, synth, serve.  Batch commands
write TSVs (and, for the evaluation reports, PNG charts) under --out; runs
are reproducible byte for byte given the same inputs and seeds.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .annotator import AnnotationError, annotate, enforce_consistency, save_spans
from .corpus import CorpusError, load_corpus, save_corpus
from .crf.entities import (EntityError, extract_entities, load_entities,
                           save_entities, tags_from_spans)
from .crf.features import DEFAULT_GROUPS, FeatureConfig, FeatureError, build_features
from .crf.model import CrfError, decode, load_model, marginals, save_model, train
from .evaluation import (EvaluationError, entity_prf, label_prf,
                         pair_names_addresses, save_pairs, save_prf_report,
                         save_zone_report, zone_analysis)
from .gold import GoldError, load_gold, save_gold
from .kb import KBError, compute_char_stats, default_data_files, load_kb, save_entries, save_persons
from .patterns import (PatternError, classify_record, extract_circle_pairs,
                       extract_style_records, load_patterns, load_records,
                       match_filter_patterns, mine_patterns,
                       save_excerpt_samples, save_patterns, save_records)
from .reports import (render_prf_chart, render_segmentation_chart,
                      render_zone_chart)
from .review import ReviewError, ReviewState
from .segmenter import (SegmentationError, find_beginnings,
                        load_gold_boundaries, make_pairs, save_beginnings,
                        score_segmentation, segment)
from .synthesis import SynthesisError, build_synthetic_kb, generate_synthetic

TABLE5_ZONE_SIZES = [1800] * 9 + [1714]
TABLE5_SAMPLE_CORRECT = [97, 88, 90, 81, 79, 70, 77, 69, 59, 59]


@dataclass
class PipelineConfig:
    """Defaults mirror the constants used throughout the pipeline."""
    consistency_window: int = 6
    n_min: int = 2
    n_max: int = 5
    min_support: int = 2
    k: int = 5
    ne_window: int = 30
    bins: int = 5
    groups: frozenset = DEFAULT_GROUPS
    l2_lambda: float = 1.0
    max_iter: int = 200
    tol: float = 1e-4
    n_zones: int = 10
    sample_per_zone: int = 100
    max_gap: int = 10


class CliError(Exception):
    pass


_DOMAIN_ERRORS = (CliError, AnnotationError, CorpusError, CrfError,
                  EntityError, EvaluationError, FeatureError, GoldError,
                  KBError, PatternError, ReviewError, SegmentationError,
                  SynthesisError)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_corpus(args):
    path = Path(args.corpus)
    if not path.exists():
        raise CliError(f"corpus path does not exist: {path}")
    return load_corpus(path)


def _load_kb(args):
    entry_files = list(args.kb_entries or [])
    person_files = list(args.kb_persons or [])
    if getattr(args, "default_lexicons", False):
        entry_files.extend(default_data_files())
    for f in entry_files + person_files:
        if not Path(f).exists():
            raise CliError(f"knowledge-base file does not exist: {f}")
    return load_kb(entry_files, person_files)


def _sequences(corpus, kb, window):
    sequences = []
    for doc in corpus:
        sequences.extend(enforce_consistency(annotate(doc, kb), window=window))
    return sequences


def _feature_config(args) -> FeatureConfig:
    groups = frozenset(int(g) for g in args.groups.split(",") if g)
    return FeatureConfig(k=args.k, ne_window=args.ne_window, groups=groups)


def _kb_with_model_stats(kb, model):
    if model.char_stats is not None:
        return kb.with_char_stats(model.char_stats)
    return kb


# -- subcommands ------------------------------------------------------------------


def cmd_ingest(args) -> int:
    corpus = _load_corpus(args)
    out = _out_dir(args)
    save_corpus(corpus, out / "normalized")
    lines = ["# doc_id\tsource\tlength"]
    for doc in corpus:
        lines.append(f"{doc.id}\t{corpus.source_manifest[doc.id]}\t{doc.length}")
    (out / "manifest.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"ingested {len(corpus)} documents into {out}")
    return 0


def cmd_annotate(args) -> int:
    corpus = _load_corpus(args)
    kb = _load_kb(args)
    spans = []
    for doc in corpus:
        spans.extend(annotate(doc, kb))
    out = _out_dir(args)
    save_spans(spans, out / "spans.tsv")
    print(f"wrote {len(spans)} spans to {out / 'spans.tsv'}")
    return 0


def cmd_mine(args) -> int:
    corpus = _load_corpus(args)
    kb = _load_kb(args)
    sequences = _sequences(corpus, kb, args.window)
    patterns = mine_patterns(sequences, args.n_min, args.n_max, args.min_support)
    if args.auto_approve_top:
        approved = []
        for i, p in enumerate(patterns):
            status = "approved" if i < args.auto_approve_top else p.status
            approved.append(type(p)(id=p.id, sequence=p.sequence,
                                    support=p.support, status=status))
        patterns = approved
    out = _out_dir(args)
    save_patterns(patterns, out / "patterns.tsv")
    # sample excerpts let a reviewer judge each proposal without re-running
    # the matcher; matching here is status-blind
    as_approved = [type(p)(id=p.id, sequence=p.sequence, support=p.support,
                           status="approved") for p in patterns]
    samples = match_filter_patterns(sequences, as_approved, corpus)
    save_excerpt_samples(samples, out / "samples.tsv", per_pattern=args.samples)
    print(f"mined {len(patterns)} patterns from {len(sequences)} sequences")
    return 0


def cmd_extract(args) -> int:
    corpus = _load_corpus(args)
    kb = _load_kb(args)
    patterns = load_patterns(args.patterns) if args.patterns else []
    sequences = _sequences(corpus, kb, args.window)
    excerpts = match_filter_patterns(sequences, patterns, corpus)
    records = extract_style_records(excerpts, corpus)
    if args.circles:
        for doc in corpus:
            records.extend(extract_circle_pairs(doc))
    classifications = {}
    for r in records:
        scheme = "TABLE1" if r.dynasty else "TABLE2"
        classifications[r.record_id] = classify_record(r, kb, scheme)
    out = _out_dir(args)
    save_records(records, out / "records.tsv", classifications)
    print(f"extracted {len(records)} records "
          f"({len(excerpts)} pattern excerpts)")
    return 0


def cmd_train(args) -> int:
    corpus = _load_corpus(args)
    kb = _load_kb(args)
    gold = load_gold(args.gold)
    cfg = _feature_config(args)
    if 4 in cfg.groups:
        kb = compute_char_stats(kb, corpus, gold)
    examples = []
    for doc in corpus:
        if doc.id not in gold.docs:
            continue
        x = build_features(doc, kb, cfg)
        y = tags_from_spans(doc, gold.docs[doc.id].entities)
        examples.append((x, y))
    if not examples:
        raise CliError("no documents with gold annotations to train on")
    model = train(examples, cfg, l2_lambda=args.l2, max_iter=args.max_iter,
                  tol=args.tol)
    model.char_stats = kb.char_stats if 4 in cfg.groups else None
    save_model(model, args.out)
    print(f"trained on {len(examples)} documents, "
          f"{model.n_features} features -> {args.out}")
    return 0


def cmd_tag(args) -> int:
    corpus = _load_corpus(args)
    kb = _load_kb(args)
    model = load_model(args.model)
    kb = _kb_with_model_stats(kb, model)
    entities = []
    for doc in corpus:
        if doc.length == 0:
            continue
        x = build_features(doc, kb, model.config)
        tags, _ = decode(model, x)
        entities.extend(extract_entities(tags, marginals(model, x), doc))
    out = _out_dir(args)
    save_entities(entities, out / "entities.tsv")
    print(f"tagged {len(corpus)} documents, {len(entities)} entities")
    return 0


def cmd_segment(args) -> int:
    corpus = _load_corpus(args)
    kb = _load_kb(args)
    records = load_records(args.records) if args.records else []
    out = _out_dir(args)
    all_beginnings = []
    paragraph_lines = ["# doc_id\tstart\tend"]
    all_pairs = []
    for doc in corpus:
        sequences = enforce_consistency(annotate(doc, kb), window=args.window)
        beginnings = find_beginnings(doc, records, sequences)
        all_beginnings.extend(beginnings)
        for p in segment(doc, beginnings):
            paragraph_lines.append(f"{p.doc_id}\t{p.start}\t{p.end}")
        all_pairs.extend(make_pairs(beginnings))
    save_beginnings(all_beginnings, out / "boundaries.tsv")
    (out / "paragraphs.tsv").write_text("\n".join(paragraph_lines) + "\n",
                                        encoding="utf-8")
    print(f"{len(all_beginnings)} beginnings, {len(all_pairs)} pairs")
    if args.gold_boundaries:
        bounds = load_gold_boundaries(args.gold_boundaries)
        paras = {doc_id: _paragraph_set(sorted(b), corpus.get(doc_id).length)
                 for doc_id, b in bounds.items() if doc_id in corpus}
        score = score_segmentation(all_pairs, bounds, paras)
        lines = ["# metric\tvalue",
                 f"X1\t{score.x1:.4f}", f"X2\t{score.x2:.4f}",
                 f"X3\t{score.x3:.4f}", f"Y1\t{score.y1:.4f}",
                 f"Y2\t{score.y2:.4f}", f"n_pairs\t{score.n_pairs}",
                 f"n_excluded\t{score.n_excluded}"]
        (out / "segmentation.tsv").write_text("\n".join(lines) + "\n",
                                              encoding="utf-8")
        render_segmentation_chart(score, out / "segmentation.png")
        print(f"X1={score.x1:.3f} X2={score.x2:.3f} X3={score.x3:.3f} "
              f"Y1={score.y1:.3f} Y2={score.y2:.3f}")
    return 0


def _paragraph_set(bounds: list[int], length: int) -> set[tuple[int, int]]:
    return {(b, bounds[i + 1] if i + 1 < len(bounds) else length)
            for i, b in enumerate(bounds)}


def _decode_corpus(corpus, kb, model):
    pred_tags = {}
    pred_entities = []
    for doc in corpus:
        if doc.length == 0:
            pred_tags[doc.id] = []
            continue
        x = build_features(doc, kb, model.config)
        tags, _ = decode(model, x)
        pred_tags[doc.id] = tags
        pred_entities.extend(extract_entities(tags, marginals(model, x), doc))
    return pred_tags, pred_entities


def cmd_eval_labels(args) -> int:
    corpus = _load_corpus(args)
    kb = _load_kb(args)
    model = load_model(args.model)
    kb = _kb_with_model_stats(kb, model)
    gold = load_gold(args.gold)
    pred_tags, _ = _decode_corpus(corpus, kb, model)
    pred, gold_seqs = [], []
    for doc in corpus:
        if doc.id not in gold.docs or doc.length == 0:
            continue
        pred.append(pred_tags[doc.id])
        gold_seqs.append(tags_from_spans(doc, gold.docs[doc.id].entities))
    result = label_prf(pred, gold_seqs)
    out = _out_dir(args)
    save_prf_report(result, out / "label-prf.tsv", "tag")
    render_prf_chart(result, out / "label-prf.png", "per-tag precision/recall/F1")
    for tag, prf in result.items():
        print(f"{tag.name}\tP={prf.precision:.3f}\tR={prf.recall:.3f}"
              f"\tF1={prf.f1:.3f}")
    return 0


def cmd_eval_entities(args) -> int:
    corpus = _load_corpus(args)
    kb = _load_kb(args)
    model = load_model(args.model)
    kb = _kb_with_model_stats(kb, model)
    gold = load_gold(args.gold)
    _, pred_entities = _decode_corpus(corpus, kb, model)
    result = entity_prf(pred_entities, gold)
    out = _out_dir(args)
    save_prf_report(result, out / "entity-prf.tsv", "kind")
    render_prf_chart(result, out / "entity-prf.png",
                     "exact-match entity precision/recall/F1")
    for kind, prf in result.items():
        print(f"{kind}\tP={prf.precision:.3f}\tR={prf.recall:.3f}"
              f"\tF1={prf.f1:.3f}")
    return 0


class _Table5Item:
    __slots__ = ("score", "correct")

    def __init__(self, score, correct):
        self.score = score
        self.correct = correct


def cmd_eval_zones(args) -> int:
    out = _out_dir(args)
    if args.table5_fixture:
        candidates = []
        for zone, (size, n_correct) in enumerate(
                zip(TABLE5_ZONE_SIZES, TABLE5_SAMPLE_CORRECT)):
            for i in range(size):
                candidates.append(_Table5Item(
                    score=float(-(zone * 10_000 + i)),
                    correct=i < n_correct and i < args.sample))
        report = zone_analysis(candidates, oracle=lambda c: c.correct,
                               zone_sizes=list(TABLE5_ZONE_SIZES),
                               sample_per_zone=args.sample)
    else:
        if not (args.corpus and args.model and args.gold):
            raise CliError("eval-zones needs --corpus, --model and --gold "
                           "(or --table5-fixture)")
        corpus = _load_corpus(args)
        kb = _load_kb(args)
        model = load_model(args.model)
        kb = _kb_with_model_stats(kb, model)
        gold = load_gold(args.gold)
        _, pred_entities = _decode_corpus(corpus, kb, model)
        gold_keys = gold.entity_keys()
        report = zone_analysis(
            pred_entities,
            oracle=lambda e: (e.doc_id, e.start, e.end, e.kind) in gold_keys,
            n_zones=args.zones, sample_per_zone=args.sample)
    save_zone_report(report, out / "zones.tsv")
    render_zone_chart(report, out / "zones.png")
    print(f"total expected correct: {report.total_expected}")
    print(f"overall rate: {report.overall_rate:.4f}")
    return 0


def cmd_pairs(args) -> int:
    corpus = _load_corpus(args)
    kb = _load_kb(args)
    entities = load_entities(args.entities)
    pairs = pair_names_addresses(entities, kb, corpus, max_gap=args.max_gap)
    out = _out_dir(args)
    save_pairs(pairs, out / "pairs.tsv")
    by_class = {}
    for p in pairs:
        by_class[p.kb_class] = by_class.get(p.kb_class, 0) + 1
    print(f"{len(pairs)} pairs: " + ", ".join(
        f"{k}={v}" for k, v in sorted(by_class.items())))
    return 0


def cmd_synth(args) -> int:
    out = _out_dir(args)
    kb = build_synthetic_kb(seed=args.seed)
    templates = tuple(t.strip() for t in args.templates.split(",") if t.strip())
    corpus, gold = generate_synthetic(kb, templates, args.docs, seed=args.seed)
    save_corpus(corpus, out / "corpus")
    save_entries(kb, out / "kb-entries.tsv")
    save_persons(kb, out / "kb-persons.tsv")
    save_gold(gold, out / "gold.std")
    save_records(gold.planted_records, out / "planted-records.tsv")
    bounds = ["# doc_id\tposition"]
    for doc_id in sorted(gold.docs):
        for b in sorted(set(gold.docs[doc_id].boundaries)):
            bounds.append(f"{doc_id}\t{b}")
    (out / "gold-boundaries.tsv").write_text("\n".join(bounds) + "\n",
                                             encoding="utf-8")
    n_entities = sum(len(g.entities) for g in gold.docs.values())
    print(f"generated {len(corpus)} documents, {n_entities} entities, "
          f"{len(gold.planted_records)} planted records")
    return 0


def cmd_serve(args) -> int:
    from .service import ReviewService, resolve_state_dir, serve

    state_dir = resolve_state_dir(args.state_dir)
    state = ReviewState(state_dir)
    corpus = load_corpus(args.corpus) if args.corpus else None
    kb = _load_kb(args) if (args.kb_entries or args.kb_persons) else None
    service = ReviewService(state, corpus=corpus, kb=kb,
                            ui_dir=args.ui or None)
    server = serve(service, host=args.host, port=args.port)
    print(f"review service on http://{args.host}:{args.port} "
          f"(state: {state_dir})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


# -- parser -------------------------------------------------------------------------


def _add_corpus_kb(p, corpus_required=True):
    p.add_argument("--corpus", required=corpus_required,
                   help="corpus file or directory")
    p.add_argument("--kb-entries", nargs="*", default=[],
                   help="lexicon TSV files")
    p.add_argument("--kb-persons", nargs="*", default=[],
                   help="person record TSV files")
    p.add_argument("--default-lexicons", action="store_true",
                   help="also load the bundled surname and time lexicons")


def build_parser() -> argparse.ArgumentParser:
    cfg = PipelineConfig()
    parser = argparse.ArgumentParser(
        prog="gazmine",
        description="biographical entity mining for unpunctuated "
                    "literary-Chinese text")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize a corpus and write a manifest")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("annotate", help="dump all lexicon matches")
    _add_corpus_kb(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("mine", help="mine frequent label-type patterns")
    _add_corpus_kb(p)
    p.add_argument("--out", required=True)
    p.add_argument("--n-min", type=int, default=cfg.n_min)
    p.add_argument("--n-max", type=int, default=cfg.n_max)
    p.add_argument("--min-support", type=int, default=cfg.min_support)
    p.add_argument("--window", type=int, default=cfg.consistency_window)
    p.add_argument("--auto-approve-top", type=int, default=0,
                   help="mark the top N mined patterns approved (headless runs)")
    p.add_argument("--samples", type=int, default=5,
                   help="sample excerpts to keep per pattern for review")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("extract", help="extract candidate records via "
                                       "approved patterns")
    _add_corpus_kb(p)
    p.add_argument("--out", required=True)
    p.add_argument("--patterns", help="pattern TSV (only approved rows fire)")
    p.add_argument("--window", type=int, default=cfg.consistency_window)
    p.add_argument("--circles", action="store_true",
                   help="also extract circle-anchored name/style pairs")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train the character tagger")
    _add_corpus_kb(p)
    p.add_argument("--gold", required=True, help="gold standoff file")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--k", type=int, default=cfg.k)
    p.add_argument("--ne-window", type=int, default=cfg.ne_window)
    p.add_argument("--groups", default=",".join(str(g) for g in sorted(DEFAULT_GROUPS)))
    p.add_argument("--l2", type=float, default=cfg.l2_lambda)
    p.add_argument("--max-iter", type=int, default=cfg.max_iter)
    p.add_argument("--tol", type=float, default=cfg.tol)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tag", help="decode a corpus and extract entities")
    _add_corpus_kb(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("segment", help="find paragraph beginnings and tile "
                                       "paragraphs")
    _add_corpus_kb(p)
    p.add_argument("--out", required=True)
    p.add_argument("--records", help="candidate record TSV")
    p.add_argument("--window", type=int, default=cfg.consistency_window)
    p.add_argument("--gold-boundaries", help="gold boundary TSV for scoring")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("eval-labels", help="per-tag precision/recall/F1")
    _add_corpus_kb(p)
    p.add_argument("--model", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval_labels)

    p = sub.add_parser("eval-entities", help="exact-match entity "
                                             "precision/recall/F1")
    _add_corpus_kb(p)
    p.add_argument("--model", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval_entities)

    p = sub.add_parser("eval-zones", help="rank candidates, sample zones, "
                                          "extrapolate correctness")
    _add_corpus_kb(p, corpus_required=False)
    p.add_argument("--model")
    p.add_argument("--gold")
    p.add_argument("--out", required=True)
    p.add_argument("--zones", type=int, default=cfg.n_zones)
    p.add_argument("--sample", type=int, default=cfg.sample_per_zone)
    p.add_argument("--table5-fixture", action="store_true",
                   help="run the built-in published-arithmetic fixture")
    p.set_defaults(func=cmd_eval_zones)

    p = sub.add_parser("pairs", help="pair person and location entities")
    _add_corpus_kb(p)
    p.add_argument("--entities", required=True, help="entity TSV from tag")
    p.add_argument("--out", required=True)
    p.add_argument("--max-gap", type=int, default=cfg.max_gap)
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("synth", help="generate a synthetic corpus with gold")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--docs", type=int, default=200)
    p.add_argument("--templates", default="P5,P8,P9,P10,CIRCLE")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="run the review service")
    _add_corpus_kb(p, corpus_required=False)
    p.add_argument("--state-dir", help="state directory "
                                       "(GZM_STATE_DIR overrides)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8571)
    p.add_argument("--ui", help="static UI bundle directory")
    p.set_defaults(func=cmd_serve)

    return parser


def run_command(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (_DOMAIN_ERRORS + (OSError, ValueError)) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
