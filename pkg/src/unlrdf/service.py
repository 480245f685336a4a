"""Stateless HTTP front end.

``handle_request`` is a pure function of the request; the server class only
adapts it to ``http.server``.  The vocabulary is loaded once at startup and
never mutated afterwards.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from .checker import check, format_lines, format_text
from .core import UnlError
from .pipeline import PipelineConfig, ValidationFailed, collect_axioms, extract, unl_to_rdf_text
from .quadstore import StoreError, emit_turtle, load_trig
from .rdf_unl import ScopeMode, emit_schema

log = logging.getLogger(__name__)

TURTLE = "text/turtle; charset=utf-8"
TRIG = "application/trig; charset=utf-8"
TEXT = "text/plain; charset=utf-8"

Response = tuple[int, str, bytes]


def _text(status: int, body: str, media: str = TEXT) -> Response:
    return status, media, body.encode("utf-8")


def handle_request(method: str, target: str, body: bytes, config: PipelineConfig, vocab=None) -> Response:
    url = urlsplit(target)
    query = parse_qs(url.query)
    routes = {
        "/unl2rdf": "POST", "/extract": "POST", "/check": "POST", "/schema": "GET", "/health": "GET",
    }
    if url.path not in routes:
        return _text(404, f"unknown endpoint {url.path}\n")
    if method != routes[url.path]:
        return _text(405, f"{url.path} expects {routes[url.path]}\n")

    try:
        text = body.decode("utf-8")
    except UnicodeDecodeError:
        return _text(400, "request body is not UTF-8\n")
    vocab = vocab or config.vocabulary()

    try:
        if url.path == "/health":
            return _text(200, "ok\n")
        if url.path == "/schema":
            return _text(200, emit_turtle(emit_schema(vocab)), TURTLE)
        if url.path == "/unl2rdf":
            mode = ScopeMode(query.get("mode", [config.scope_mode.value])[0])
            rdf = unl_to_rdf_text(text, replace(config, scope_mode=mode), vocab)
            return _text(200, rdf, TRIG if mode is ScopeMode.NAMED_GRAPHS else TURTLE)
        store = load_trig(text)
        if url.path == "/extract":
            _, axioms = extract(store, config)
            return _text(200, emit_turtle(axioms), TURTLE)
        reports = check(collect_axioms(store, config))
        return _text(200, format_lines(reports) + format_text(reports))
    except ValidationFailed as exc:
        return _text(422, f"invalid document:\n{exc}\n")
    except (UnlError, StoreError, ValueError) as exc:
        return _text(400, f"{exc}\n")


def make_handler(config: PipelineConfig):
    vocab = config.vocabulary()

    class Handler(BaseHTTPRequestHandler):
        def _dispatch(self, method: str) -> None:
            length = int(self.headers.get("Content-Length") or 0)
            body = self.rfile.read(length) if length else b""
            status, media, payload = handle_request(method, self.path, body, config, vocab)
            self.send_response(status)
            self.send_header("Content-Type", media)
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def do_GET(self):
            self._dispatch("GET")

        def do_POST(self):
            self._dispatch("POST")

        def log_message(self, fmt, *args):
            log.info("%s %s", self.address_string(), fmt % args)

    return Handler


def make_server(host: str, port: int, config: PipelineConfig) -> ThreadingHTTPServer:
    return ThreadingHTTPServer((host, port), make_handler(config))


def serve(host: str, port: int, config: PipelineConfig) -> None:
    server = make_server(host, port, config)
    log.warning("listening on http://%s:%d", host, server.server_address[1])
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
