import json
import threading
import time
import urllib.request

import pytest

from gazmine.corpus import Corpus, Document
from gazmine.kb import KnowledgeBase, LabelType, load_kb
from gazmine.patterns import (APPROVED, CandidateRecord, match_filter_patterns,
                              pattern_from_tokens, save_patterns, save_records)
from gazmine.review import PATTERN, RECORD, ReviewError, ReviewState
from gazmine.service import ReviewService, make_handler, resolve_state_dir, serve

P4 = "NAME-ADDRESS-ADDRESS-OFFICE"


@pytest.fixture
def state(tmp_path):
    state_dir = tmp_path / "state"
    state_dir.mkdir()
    save_patterns([pattern_from_tokens(P4, support=7),
                   pattern_from_tokens("NAME-ADDRESS", support=3)],
                  state_dir / "patterns.tsv")
    save_records([
        CandidateRecord(official_name="陳瑜", doc_id="t1", name_start=0,
                        source="P5", dynasty="Yuan", style_name="仲庸"),
        CandidateRecord(official_name="甲乙", doc_id="t1", name_start=5,
                        source="P7", style_name="丙丁"),
    ], state_dir / "records.tsv")
    return ReviewState(state_dir)


def test_decision_round_trip(state):
    state.record_decision(PATTERN, P4, "APPROVE", "tester")
    patterns = {p.id: p.status for p in state.patterns_with_status()}
    assert patterns[P4] == "approved"
    assert patterns["NAME-ADDRESS"] == "proposed"


def test_latest_decision_wins(state):
    state.record_decision(PATTERN, P4, "APPROVE", "a")
    time.sleep(0.002)
    state.record_decision(PATTERN, P4, "REJECT", "b")
    assert state.status_map(PATTERN)[P4] == "rejected"


def test_replay_reconstructs_status(state):
    state.record_decision(PATTERN, P4, "APPROVE")
    state.record_decision(RECORD, "t1:0:P5:Yuan", "APPROVE")
    state.record_decision(PATTERN, "NAME-ADDRESS", "REJECT")
    # a fresh state object over the same directory replays the log
    again = ReviewState(state.state_dir)
    assert again.status_map(PATTERN) == state.status_map(PATTERN)
    assert again.status_map(RECORD) == state.status_map(RECORD)


def test_unknown_target_rejected(state):
    with pytest.raises(ReviewError, match="unknown"):
        state.record_decision(PATTERN, "NO-SUCH", "APPROVE")
    with pytest.raises(ReviewError):
        state.record_decision(RECORD, "nope", "APPROVE")


def test_export_resolves_style_name(state, worked_kb):
    state.record_decision(RECORD, "t1:0:P5:Yuan", "APPROVE")
    summary = state.export(worked_kb)
    assert summary["records_merged"] == 1
    merged = load_kb([summary["entries_file"]], [summary["persons_file"]])
    doc = Document(id="d", chars="仲庸")
    entry, end = merged.lookup_longest(doc, 0, LabelType.STYLE)
    assert entry.surface == "仲庸" and end == 2
    assert merged.has_name_style("陳瑜", "仲庸")


def test_export_patterns_gate_reextraction(state, worked_kb, t1_doc, t1_corpus):
    from gazmine.annotator import annotate, enforce_consistency
    from gazmine.patterns import load_patterns

    sequences = enforce_consistency(annotate(t1_doc, worked_kb))
    # nothing approved: the exported pattern file licenses no extraction
    summary = state.export(worked_kb)
    patterns = load_patterns(summary["patterns_file"])
    assert match_filter_patterns(sequences, patterns, t1_corpus) == []
    # approving P4 makes exactly the approved pattern fire
    state.record_decision(PATTERN, P4, "APPROVE")
    patterns = load_patterns(state.export(worked_kb)["patterns_file"])
    excerpts = match_filter_patterns(sequences, patterns, t1_corpus)
    assert {e.pattern_id for e in excerpts} == {P4}


def test_rejecting_all_patterns_yields_no_excerpts(state, worked_kb, t1_doc,
                                                   t1_corpus):
    from gazmine.annotator import annotate, enforce_consistency
    from gazmine.patterns import load_patterns

    for p in state.patterns:
        state.record_decision(PATTERN, p.id, "REJECT")
    patterns = load_patterns(state.export(worked_kb)["patterns_file"])
    sequences = enforce_consistency(annotate(t1_doc, worked_kb))
    assert match_filter_patterns(sequences, patterns, t1_corpus) == []


# -- live HTTP ---------------------------------------------------------------------


@pytest.fixture
def live_server(state, worked_kb, t1_corpus):
    service = ReviewService(state, corpus=t1_corpus, kb=worked_kb)
    server = serve(service, host="127.0.0.1", port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    yield base
    server.shutdown()
    server.server_close()


def _get(base, path):
    with urllib.request.urlopen(base + path) as resp:
        return json.loads(resp.read().decode("utf-8"))


def _post(base, path, payload):
    req = urllib.request.Request(
        base + path, data=json.dumps(payload).encode("utf-8"),
        headers={"Content-Type": "application/json"}, method="POST")
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read().decode("utf-8"))


def test_http_pattern_decision_round_trip(live_server):
    patterns = _get(live_server, "/api/patterns")
    assert {p["id"] for p in patterns} == {P4, "NAME-ADDRESS"}
    _post(live_server, f"/api/patterns/{P4}/decision",
          {"verdict": "APPROVE", "reviewer": "historian"})
    patterns = {p["id"]: p["status"] for p in _get(live_server, "/api/patterns")}
    assert patterns[P4] == "approved"


def test_http_records_filter_and_classification(live_server):
    records = _get(live_server, "/api/records")
    assert len(records) == 2
    by_id = {r["id"]: r for r in records}
    # (Yuan, 陳瑜, 仲庸) with 陳瑜 known for Yuan but no style: Table 1 type 2
    assert by_id["t1:0:P5:Yuan"]["match_scheme"] == "TABLE1"
    assert by_id["t1:0:P5:Yuan"]["match_type"] == 2
    assert by_id["t1:5:P7:-"]["match_scheme"] == "TABLE2"
    _post(live_server, "/api/records/t1:0:P5:Yuan/decision",
          {"verdict": "APPROVE"})
    approved = _get(live_server, "/api/records?status=approved")
    assert [r["id"] for r in approved] == ["t1:0:P5:Yuan"]


def test_http_excerpt_context(live_server):
    payload = _get(live_server, "/api/excerpts/t1:0:P5:Yuan")
    assert payload["doc_id"] == "t1"
    assert payload["context"].startswith("陳瑜")
    h = payload["highlight"]
    assert payload["context"][h["start"]:h["end"]] == "陳瑜"


def test_http_export_summary(live_server):
    _post(live_server, "/api/records/t1:0:P5:Yuan/decision",
          {"verdict": "APPROVE"})
    summary = _post(live_server, "/api/export", {})
    assert summary["records_merged"] == 1


def test_http_unknown_endpoint_and_target(live_server):
    with pytest.raises(urllib.error.HTTPError) as err:
        _get(live_server, "/api/nothing")
    assert err.value.code == 404
    with pytest.raises(urllib.error.HTTPError) as err:
        _post(live_server, "/api/patterns/NO-SUCH/decision",
              {"verdict": "APPROVE"})
    assert err.value.code == 400


def test_http_serves_fallback_index(live_server):
    with urllib.request.urlopen(live_server + "/") as resp:
        body = resp.read().decode("utf-8")
    assert "review" in body


def test_resolve_state_dir_env_override(monkeypatch, tmp_path):
    monkeypatch.setenv("GZM_STATE_DIR", str(tmp_path / "env-state"))
    assert resolve_state_dir("cli-value") == tmp_path / "env-state"
    monkeypatch.delenv("GZM_STATE_DIR")
    assert resolve_state_dir("cli-value") == tmp_path.__class__("cli-value")
