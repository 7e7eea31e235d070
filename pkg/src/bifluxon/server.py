"""HTTP service backing the interactive fit studio.

Endpoints (all JSON, schema_version "1"):

    GET  /api/heatmap                       shipped two-tone map
    GET  /api/spectrum?model=&flux=&levels= theory overlay polylines
    GET  /api/points                        working labeled-point set
    PUT  /api/points                        replace + persist the point set
    POST /api/fit                           body FitProblem, response FitResult
    GET  /api/coherence?flux=               budget rows

Read endpoints are served concurrently; point-set writes are serialized
behind a lock and there is a single fit slot: a second concurrent fit
request is answered 409 rather than queued.  Malformed payloads get 400
with a field-level message.
"""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

import numpy as np

from . import bloch, coherence, dressed, fitting, fluxonium
from .formats import (
    FormatError,
    ParamsFile,
    canonical_dumps,
    parse_fit_problem,
    parse_heatmap,
    parse_params,
    parse_points,
    serialize_points,
)

DEFAULT_PORT = 8977

_UI_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".svg": "image/svg+xml",
}


class StudioState:
    """Mutable server state: the working point set and the single fit slot."""

    def __init__(self, heatmap, points, params: ParamsFile, points_path=None):
        self.heatmap = heatmap
        self.params = params
        self.points_path = points_path
        self._points = list(points)
        self._points_lock = threading.Lock()
        self.fit_lock = threading.Lock()

    def get_points(self):
        with self._points_lock:
            return list(self._points)

    def set_points(self, points):
        with self._points_lock:
            self._points = list(points)
            if self.points_path is not None:
                Path(self.points_path).write_text(
                    serialize_points(self._points), encoding="utf-8"
                )


def _spectrum_payload(state: StudioState, query: dict) -> dict:
    model = query.get("model", ["exact"])[0]
    flux_spec = query.get("flux", ["-0.5:0.5:101"])[0]
    levels = int(query.get("levels", ["6"])[0])
    if levels < 2 or levels > 12:
        raise FormatError("levels: must be between 2 and 12")
    try:
        start, stop, count = flux_spec.split(":")
        grid = np.linspace(float(start), float(stop), max(1, int(count)))
    except ValueError:
        raise FormatError(f"flux: bad range {flux_spec!r}, expected START:STOP:COUNT")
    if "params" in query:
        try:
            pf = parse_params(query["params"][0])
        except FormatError as exc:
            raise FormatError(f"params: {exc}")
    else:
        pf = state.params
    if model == "exact":
        table = fluxonium.flux_sweep(pf.circuit_params(), grid, k=levels)
    elif model == "dual":
        table = bloch.dual_spectrum(pf.dual_params(), grid, k=levels)
    elif model == "joint":
        if pf.resonator is None:
            raise FormatError("params.resonator: required for the joint model")
        table = dressed.labeled_transitions(pf.circuit_params(), pf.resonator,
                                            grid, k=levels)
    else:
        raise FormatError(f"model: expected exact, dual or joint, got {model!r}")
    lines = [
        {"i": 0, "j": j, "f_ghz": table.levels[:, j].tolist()}
        for j in range(1, levels)
    ]
    return {
        "schema_version": "1",
        "flux": table.flux_grid.tolist(),
        "lines": lines,
    }


def _coherence_payload(state: StudioState, query: dict) -> dict:
    pf = state.params
    if pf.noise is None or pf.resonator is None:
        raise FormatError("params: coherence rows need noise and resonator blocks")
    flux_spec = query.get("flux", ["-0.5:0.5:11"])[0]
    try:
        start, stop, count = flux_spec.split(":")
        grid = np.linspace(float(start), float(stop), max(1, int(count)))
    except ValueError:
        raise FormatError(f"flux: bad range {flux_spec!r}")
    budget = coherence.coherence_budget(pf.circuit_params(), pf.resonator,
                                        pf.noise, grid)
    rows = [
        {
            "phi_ext": float(budget.flux_grid[p]),
            "t1_s": float(budget.t1[p]),
            "t2_s": float(budget.t2[p]),
            "gamma_1_per_s": float(budget.gamma_1[p]),
            "gamma_phi_per_s": float(budget.gamma_phi[p]),
            "breakdown_per_s": {k: float(v[p]) for k, v in budget.breakdown.items()},
        }
        for p in range(grid.size)
    ]
    return {"schema_version": "1", "rows": rows}


class StudioHandler(BaseHTTPRequestHandler):
    server_version = "bifluxon/0.1"
    state: StudioState = None
    ui_dir: Path = None

    # quiet request logging; tests and scripted use do not want chatter
    def log_message(self, fmt, *args):
        pass

    def _send_json(self, code: int, payload: dict):
        body = canonical_dumps(payload).encode()
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, code: int, message: str):
        self._send_json(code, {"schema_version": "1", "error": message})

    def _read_body(self) -> str:
        length = int(self.headers.get("Content-Length", "0"))
        return self.rfile.read(length).decode("utf-8") if length else ""

    def do_GET(self):
        url = urlparse(self.path)
        query = parse_qs(url.query)
        state = self.state
        try:
            if url.path == "/api/heatmap":
                hm = state.heatmap
                if hm is None:
                    return self._send_error_json(404, "no heatmap loaded")
                return self._send_json(200, {
                    "schema_version": "1",
                    "flux": hm.flux.tolist(),
                    "frequency": hm.frequency.tolist(),
                    "magnitude": hm.magnitude.tolist(),
                })
            if url.path == "/api/spectrum":
                return self._send_json(200, _spectrum_payload(state, query))
            if url.path == "/api/points":
                payload = json.loads(serialize_points(state.get_points()))
                return self._send_json(200, payload)
            if url.path == "/api/params":
                return self._send_json(200, state.params.to_dict())
            if url.path == "/api/coherence":
                return self._send_json(200, _coherence_payload(state, query))
            return self._serve_ui(url.path)
        except FormatError as exc:
            return self._send_error_json(400, str(exc))
        except Exception as exc:  # keep the studio alive on surprises
            return self._send_error_json(500, f"internal error: {exc}")

    def _serve_ui(self, path: str):
        if self.ui_dir is None:
            return self._send_error_json(404, f"no such endpoint: {path}")
        rel = "index.html" if path in ("/", "") else path.lstrip("/")
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            return self._send_error_json(404, f"no such file: {path}")
        body = target.read_bytes()
        self.send_response(200)
        ctype = _UI_TYPES.get(target.suffix, "application/octet-stream")
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_PUT(self):
        url = urlparse(self.path)
        if url.path != "/api/points":
            return self._send_error_json(404, f"no such endpoint: {url.path}")
        try:
            points = parse_points(self._read_body())
        except FormatError as exc:
            return self._send_error_json(400, str(exc))
        self.state.set_points(points)
        payload = json.loads(serialize_points(self.state.get_points()))
        return self._send_json(200, payload)

    def do_POST(self):
        url = urlparse(self.path)
        if url.path != "/api/fit":
            return self._send_error_json(404, f"no such endpoint: {url.path}")
        try:
            problem = parse_fit_problem(self._read_body())
        except FormatError as exc:
            return self._send_error_json(400, str(exc))
        if not self.state.fit_lock.acquire(blocking=False):
            return self._send_error_json(409, "a fit is already running")
        try:
            result = fitting.fit(problem)
            report = fitting.residual_report(result, problem)
            payload = {
                "schema_version": "1",
                "params": dict(result.params),
                "cost": result.cost,
                "residuals_mhz": np.asarray(result.residuals_mhz).tolist(),
                "iterations": result.iterations,
                "converged": result.converged,
                "outliers": list(report.outliers),
                "rms_mhz": report.rms_mhz,
            }
            return self._send_json(200, payload)
        finally:
            self.state.fit_lock.release()


def make_server(heatmap_path=None, points_path=None, params_path=None,
                port: int = DEFAULT_PORT, ui_dir=None) -> ThreadingHTTPServer:
    """Build (but do not start) the studio server; state loaded from files."""
    heatmap = None
    if heatmap_path is not None:
        heatmap = parse_heatmap(Path(heatmap_path).read_text(encoding="utf-8"))
    points = []
    if points_path is not None and Path(points_path).exists():
        points = parse_points(Path(points_path).read_text(encoding="utf-8"))
    if params_path is None:
        raise ValueError("params_path is required")
    params = parse_params(Path(params_path).read_text(encoding="utf-8"))
    state = StudioState(heatmap, points, params, points_path=points_path)

    handler = type("BoundStudioHandler", (StudioHandler,), {
        "state": state,
        "ui_dir": Path(ui_dir) if ui_dir else None,
    })
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve(heatmap_path=None, points_path=None, params_path=None,
          port: int = DEFAULT_PORT, ui_dir=None):
    httpd = make_server(heatmap_path, points_path, params_path, port, ui_dir)
    host, bound_port = httpd.server_address
    print(f"studio listening on http://{host}:{bound_port}/ (Ctrl-C to stop)")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()


__all__ = ["make_server", "serve", "StudioState", "DEFAULT_PORT"]
