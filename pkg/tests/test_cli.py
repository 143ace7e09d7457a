import json
from pathlib import Path

import pytest

from gazmine.cli import main
from gazmine.kb import save_entries, save_persons
from gazmine.patterns import APPROVED, load_records, pattern_from_tokens, save_patterns

T1 = "陳瑜字仲庸雷州人廣西中書省都事"


@pytest.fixture
def t1_workspace(tmp_path, worked_kb):
    corpus_dir = tmp_path / "corpus"
    corpus_dir.mkdir()
    (corpus_dir / "t1.txt").write_text(T1, encoding="utf-8")
    entries = tmp_path / "kb-entries.tsv"
    persons = tmp_path / "kb-persons.tsv"
    save_entries(worked_kb, entries)
    save_persons(worked_kb, persons)
    return {"corpus": corpus_dir, "entries": entries, "persons": persons,
            "root": tmp_path}


def test_ingest(t1_workspace):
    out = t1_workspace["root"] / "ingested"
    assert main(["ingest", "--corpus", str(t1_workspace["corpus"]),
                 "--out", str(out)]) == 0
    manifest = (out / "manifest.tsv").read_text(encoding="utf-8")
    assert "t1\t" in manifest
    assert (out / "normalized" / "t1.txt").read_text(encoding="utf-8") == T1


def test_mine_finds_p4_on_t1_fixture(t1_workspace):
    out = t1_workspace["root"] / "mined"
    code = main(["mine", "--corpus", str(t1_workspace["corpus"]),
                 "--kb-entries", str(t1_workspace["entries"]),
                 "--out", str(out)])
    assert code == 0
    patterns = (out / "patterns.tsv").read_text(encoding="utf-8")
    assert "NAME-ADDRESS-ADDRESS-OFFICE" in patterns


def test_extract_with_zero_approved_patterns_is_empty(t1_workspace):
    patterns_file = t1_workspace["root"] / "patterns.tsv"
    save_patterns([pattern_from_tokens("NAME-ADDRESS-ADDRESS-OFFICE",
                                       support=2)], patterns_file)
    out = t1_workspace["root"] / "extracted"
    code = main(["extract", "--corpus", str(t1_workspace["corpus"]),
                 "--kb-entries", str(t1_workspace["entries"]),
                 "--patterns", str(patterns_file), "--out", str(out)])
    assert code == 0
    assert load_records(out / "records.tsv") == []


def test_extract_with_approved_pattern_finds_worked_records(t1_workspace):
    patterns_file = t1_workspace["root"] / "patterns.tsv"
    save_patterns([pattern_from_tokens("NAME-ADDRESS-ADDRESS-OFFICE",
                                       support=2, status=APPROVED)],
                  patterns_file)
    out = t1_workspace["root"] / "extracted"
    code = main(["extract", "--corpus", str(t1_workspace["corpus"]),
                 "--kb-entries", str(t1_workspace["entries"]),
                 "--kb-persons", str(t1_workspace["persons"]),
                 "--patterns", str(patterns_file), "--out", str(out)])
    assert code == 0
    records = load_records(out / "records.tsv")
    assert {(r.dynasty, r.official_name, r.style_name) for r in records} == {
        ("Yuan", "陳瑜", "仲庸"), ("Ming", "陳瑜", "仲庸")}
    body = (out / "records.tsv").read_text(encoding="utf-8")
    assert "TABLE1\t2" in body  # both records classify as Table 1 type 2


def test_eval_zones_table5_fixture(tmp_path):
    out = tmp_path / "zones"
    assert main(["eval-zones", "--table5-fixture", "--out", str(out)]) == 0
    report = (out / "zones.tsv").read_text(encoding="utf-8")
    assert "# total_expected\t13791" in report
    assert "# overall_rate\t0.7698" in report
    assert (out / "zones.png").exists()


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["mine", "--no-such-flag"])
    assert exc.value.code == 2


def test_missing_corpus_exits_1(tmp_path, capsys):
    code = main(["ingest", "--corpus", str(tmp_path / "nope"),
                 "--out", str(tmp_path / "out")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_synth_then_pipeline_reproducible(tmp_path):
    out1 = tmp_path / "syn1"
    out2 = tmp_path / "syn2"
    for out in (out1, out2):
        assert main(["synth", "--out", str(out), "--seed", "11",
                     "--docs", "6"]) == 0
    for rel in ("kb-entries.tsv", "gold.std", "planted-records.tsv",
                "corpus/syn-0000.txt"):
        assert (out1 / rel).read_bytes() == (out2 / rel).read_bytes()


def test_synth_train_tag_eval_flow(tmp_path):
    syn = tmp_path / "syn"
    assert main(["synth", "--out", str(syn), "--seed", "5", "--docs", "8",
                 "--templates", "P5,P8"]) == 0
    model = tmp_path / "model.json"
    assert main(["train", "--corpus", str(syn / "corpus"),
                 "--kb-entries", str(syn / "kb-entries.tsv"),
                 "--gold", str(syn / "gold.std"), "--out", str(model),
                 "--k", "2", "--groups", "1,2", "--max-iter", "60"]) == 0
    assert json.loads(model.read_text(encoding="utf-8"))["format_version"] == 1

    tagged = tmp_path / "tagged"
    assert main(["tag", "--corpus", str(syn / "corpus"),
                 "--kb-entries", str(syn / "kb-entries.tsv"),
                 "--model", str(model), "--out", str(tagged)]) == 0
    assert (tagged / "entities.tsv").exists()

    labels = tmp_path / "labels"
    assert main(["eval-labels", "--corpus", str(syn / "corpus"),
                 "--kb-entries", str(syn / "kb-entries.tsv"),
                 "--model", str(model), "--gold", str(syn / "gold.std"),
                 "--out", str(labels)]) == 0
    assert (labels / "label-prf.tsv").exists()
    assert (labels / "label-prf.png").exists()

    ents = tmp_path / "ents"
    assert main(["eval-entities", "--corpus", str(syn / "corpus"),
                 "--kb-entries", str(syn / "kb-entries.tsv"),
                 "--model", str(model), "--gold", str(syn / "gold.std"),
                 "--out", str(ents)]) == 0
    assert (ents / "entity-prf.tsv").exists()

    pairs = tmp_path / "pairs"
    assert main(["pairs", "--corpus", str(syn / "corpus"),
                 "--kb-entries", str(syn / "kb-entries.tsv"),
                 "--kb-persons", str(syn / "kb-persons.tsv"),
                 "--entities", str(tagged / "entities.tsv"),
                 "--out", str(pairs)]) == 0
    assert (pairs / "pairs.tsv").exists()


def test_segment_with_gold_scoring(tmp_path):
    syn = tmp_path / "syn"
    assert main(["synth", "--out", str(syn), "--seed", "7", "--docs", "6",
                 "--templates", "P5,P8,P9,P10"]) == 0
    out = tmp_path / "segmented"
    assert main(["segment", "--corpus", str(syn / "corpus"),
                 "--kb-entries", str(syn / "kb-entries.tsv"),
                 "--gold-boundaries", str(syn / "gold-boundaries.tsv"),
                 "--out", str(out)]) == 0
    assert (out / "boundaries.tsv").exists()
    assert (out / "paragraphs.tsv").exists()
    body = (out / "segmentation.tsv").read_text(encoding="utf-8")
    assert body.startswith("# metric")
    assert (out / "segmentation.png").exists()


def test_annotate_command(t1_workspace):
    out = t1_workspace["root"] / "annotated"
    assert main(["annotate", "--corpus", str(t1_workspace["corpus"]),
                 "--kb-entries", str(t1_workspace["entries"]),
                 "--out", str(out)]) == 0
    spans = (out / "spans.tsv").read_text(encoding="utf-8")
    assert "中書省都事" in spans and "NAME" in spans
