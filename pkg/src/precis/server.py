"""HTTP host for a generated interface: serves the spec and turns widget
states into SQL.

GET /interface returns the spec JSON; POST /query takes {panel, slot_values}
and answers {sql} (echo backend) or {sql, rows} (command backend, which pipes
the SQL to a user-supplied command and relays its JSON output).  The spec is
read-only shared state, so concurrent requests need no locking.
"""

from __future__ import annotations

import json
import shlex
import subprocess
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import PrecisError
from .interface import DomainValueError, InterfaceSpec, instantiate


@dataclass(frozen=True)
class Backend:
    mode: str  # "echo" | "command"
    command: str = ""

    @classmethod
    def parse(cls, text: str) -> "Backend":
        if text == "echo":
            return cls("echo")
        if text.startswith("command:"):
            command = text[len("command:"):]
            if not command.strip():
                raise ValueError("empty command backend")
            return cls("command", command)
        raise ValueError(f"unknown exec backend {text!r}")


class BackendError(PrecisError):
    pass


def run_backend(backend: Backend, sql: str, timeout: float = 30.0) -> list | None:
    """Rows for the SQL, or None under the echo backend (which never executes)."""
    if backend.mode == "echo":
        return None
    try:
        proc = subprocess.run(shlex.split(backend.command), input=sql.encode(),
                              capture_output=True, timeout=timeout)
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise BackendError(f"backend failed to run: {exc}") from exc
    if proc.returncode != 0:
        detail = proc.stderr.decode(errors="replace").strip()[:500]
        raise BackendError(f"backend exited {proc.returncode}: {detail}")
    try:
        rows = json.loads(proc.stdout.decode(errors="replace") or "[]")
    except json.JSONDecodeError as exc:
        raise BackendError(f"backend produced invalid JSON: {exc}") from exc
    if not isinstance(rows, list):
        raise BackendError("backend JSON must be a list of rows")
    return rows


class InterfaceHandler(BaseHTTPRequestHandler):
    spec: InterfaceSpec
    backend: Backend
    permissive: bool
    static_dir: Path | None

    def log_message(self, format, *args):  # quiet by default
        pass

    def _send(self, status: int, payload: dict | bytes,
              content_type: str = "application/json"):
        body = payload if isinstance(payload, bytes) else \
            json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(body)

    def do_OPTIONS(self):
        self._send(204, b"", "text/plain")

    def do_GET(self):
        if self.path == "/interface":
            self._send(200, self.spec.to_jsonable())
            return
        if self.static_dir is not None:
            self._serve_static()
            return
        self._send(404, {"error": "not found"})

    def _serve_static(self):
        relative = self.path.lstrip("/") or "index.html"
        target = (self.static_dir / relative).resolve()
        if not str(target).startswith(str(self.static_dir.resolve())) \
                or not target.is_file():
            self._send(404, {"error": "not found"})
            return
        types = {".html": "text/html", ".js": "text/javascript",
                 ".css": "text/css", ".json": "application/json"}
        self._send(200, target.read_bytes(),
                   types.get(target.suffix, "application/octet-stream"))

    def do_POST(self):
        if self.path != "/query":
            self._send(404, {"error": "not found"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            request = json.loads(self.rfile.read(length) or b"{}")
        except (ValueError, json.JSONDecodeError):
            self._send(400, {"error": "request body is not valid JSON"})
            return
        if not isinstance(request, dict) or "panel" not in request:
            self._send(400, {"error": "missing field", "field": "panel"})
            return
        slot_values = request.get("slot_values", {})
        if not isinstance(slot_values, dict):
            self._send(400, {"error": "slot_values must be an object",
                             "field": "slot_values"})
            return
        try:
            panel = self.spec.panel(int(request["panel"]))
        except (KeyError, ValueError, TypeError):
            self._send(400, {"error": "unknown panel", "field": "panel"})
            return
        try:
            sql = instantiate(panel, slot_values, permissive=self.permissive)
        except DomainValueError as exc:
            self._send(400, {"error": str(exc), "field": exc.slot})
            return
        try:
            rows = run_backend(self.backend, sql)
        except BackendError as exc:
            self._send(502, {"error": str(exc), "sql": sql})
            return
        payload: dict = {"sql": sql}
        if rows is not None:
            payload["rows"] = rows
        self._send(200, payload)


def make_server(spec: InterfaceSpec, port: int, backend: Backend,
                permissive: bool = False,
                static_dir: str | None = None) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (InterfaceHandler,), {
        "spec": spec,
        "backend": backend,
        "permissive": permissive,
        "static_dir": Path(static_dir) if static_dir else None,
    })
    return ThreadingHTTPServer(("", port), handler)
