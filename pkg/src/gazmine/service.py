"""Embedded review service.

JSON over HTTP, no framework: GET /api/patterns, GET /api/records,
GET /api/excerpts/{record_id}, POST /api/patterns/{id}/decision,
POST /api/records/{id}/decision, POST /api/export.  Also serves the static
review UI bundle when one is present.  GZM_STATE_DIR overrides the state
directory.
"""

from __future__ import annotations

import json
import mimetypes
import os
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlparse

from .corpus import Corpus
from .kb import KnowledgeBase
from .patterns import classify_record
from .review import PATTERN, RECORD, ReviewError, ReviewState

CONTEXT_CHARS = 30

_FALLBACK_INDEX = """<!doctype html>
<html><head><meta charset="utf-8"><title>gazmine review</title></head>
<body><h1>gazmine review service</h1>
<p>No UI bundle installed. The JSON API lives under <code>/api/</code>.</p>
</body></html>
"""


def resolve_state_dir(cli_value: str | None) -> Path:
    env = os.environ.get("GZM_STATE_DIR")
    if env:
        return Path(env)
    if cli_value:
        return Path(cli_value)
    return Path("gazmine-state")


class ReviewService:
    def __init__(self, state: ReviewState, corpus: Corpus | None = None,
                 kb: KnowledgeBase | None = None,
                 ui_dir: str | Path | None = None):
        self.state = state
        self.corpus = corpus
        self.kb = kb or KnowledgeBase()
        self.ui_dir = Path(ui_dir) if ui_dir else None

    # -- payload builders ----------------------------------------------------

    def pattern_payloads(self) -> list[dict]:
        return [{"id": p.id, "sequence": p.token_string, "support": p.support,
                 "status": p.status,
                 "samples": self.state.pattern_samples.get(p.id, [])[:5]}
                for p in self.state.patterns_with_status()]

    def record_payloads(self, status_filter: str | None = None) -> list[dict]:
        out = []
        for record, status in self.state.records_with_status():
            if status_filter and status != status_filter:
                continue
            scheme = "TABLE1" if record.dynasty else "TABLE2"
            match = classify_record(record, self.kb, scheme)
            out.append({
                "id": record.record_id,
                "dynasty": record.dynasty,
                "official_name": record.official_name,
                "style_name": record.style_name,
                "doc_id": record.doc_id,
                "name_start": record.name_start,
                "source": record.source,
                "status": status,
                "match_scheme": match.scheme,
                "match_type": match.type_id,
            })
        return out

    def excerpt_payload(self, record_id: str) -> dict | None:
        for record, status in self.state.records_with_status():
            if record.record_id != record_id:
                continue
            payload = {"id": record_id, "doc_id": record.doc_id,
                       "status": status, "evidence": record.evidence,
                       "context": None, "highlight": None}
            if self.corpus is not None and record.doc_id in self.corpus:
                doc = self.corpus.get(record.doc_id)
                start = max(0, record.name_start - CONTEXT_CHARS)
                end = min(doc.length,
                          record.name_start + len(record.official_name)
                          + CONTEXT_CHARS)
                payload["context"] = doc.chars[start:end]
                payload["highlight"] = {
                    "start": record.name_start - start,
                    "end": record.name_start - start
                    + len(record.official_name)}
            return payload
        return None


def make_handler(service: ReviewService):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):  # keep test output quiet
            pass

        def _send_json(self, payload, status=200):
            body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_error(self, status, message):
            self._send_json({"error": message}, status=status)

        def _read_body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if not length:
                return {}
            return json.loads(self.rfile.read(length).decode("utf-8"))

        def _serve_static(self, path: str):
            if path == "/":
                path = "/index.html"
            ui_dir = service.ui_dir
            if ui_dir is not None:
                target = (ui_dir / path.lstrip("/")).resolve()
                if ui_dir.resolve() in target.parents or target == ui_dir.resolve():
                    if target.is_file():
                        body = target.read_bytes()
                        ctype = (mimetypes.guess_type(str(target))[0]
                                 or "application/octet-stream")
                        self.send_response(200)
                        self.send_header("Content-Type", ctype)
                        self.send_header("Content-Length", str(len(body)))
                        self.end_headers()
                        self.wfile.write(body)
                        return
            if path == "/index.html":
                body = _FALLBACK_INDEX.encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "text/html; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                return
            self._send_error(404, f"no such path: {path}")

        def do_GET(self):
            url = urlparse(self.path)
            parts = [unquote(p) for p in url.path.split("/") if p]
            if parts[:1] != ["api"]:
                self._serve_static(url.path)
                return
            if parts == ["api", "patterns"]:
                self._send_json(service.pattern_payloads())
            elif parts == ["api", "records"]:
                status = parse_qs(url.query).get("status", [None])[0]
                self._send_json(service.record_payloads(status))
            elif len(parts) == 3 and parts[1] == "excerpts":
                payload = service.excerpt_payload(parts[2])
                if payload is None:
                    self._send_error(404, f"unknown record {parts[2]!r}")
                else:
                    self._send_json(payload)
            else:
                self._send_error(404, f"unknown endpoint {url.path}")

        def do_POST(self):
            parts = [unquote(p) for p in urlparse(self.path).path.split("/") if p]
            try:
                if len(parts) == 4 and parts[:2] == ["api", "patterns"] \
                        and parts[3] == "decision":
                    body = self._read_body()
                    d = service.state.record_decision(
                        PATTERN, parts[2], body.get("verdict", ""),
                        body.get("reviewer", "anonymous"))
                    self._send_json({"ok": True, "timestamp": d.timestamp})
                elif len(parts) == 4 and parts[:2] == ["api", "records"] \
                        and parts[3] == "decision":
                    body = self._read_body()
                    d = service.state.record_decision(
                        RECORD, parts[2], body.get("verdict", ""),
                        body.get("reviewer", "anonymous"))
                    self._send_json({"ok": True, "timestamp": d.timestamp})
                elif parts == ["api", "export"]:
                    self._send_json(service.state.export(service.kb))
                else:
                    self._send_error(404, f"unknown endpoint {self.path}")
            except ReviewError as exc:
                self._send_error(400, str(exc))
            except json.JSONDecodeError as exc:
                self._send_error(400, f"invalid JSON body: {exc}")

    return Handler


def serve(service: ReviewService, host: str = "127.0.0.1",
          port: int = 8571) -> ThreadingHTTPServer:
    """Bind and return the server; callers drive serve_forever()."""
    try:
        server = ThreadingHTTPServer((host, port), make_handler(service))
    except OSError as exc:
        raise ReviewError(f"cannot bind {host}:{port}: {exc}") from exc
    return server
