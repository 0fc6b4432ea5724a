"""Local HTTP service backing the browser console.

Stdlib-only: ThreadingHTTPServer bound to loopback. Checkpoints live in
an in-memory ModelRegistry (immutable entries), so concurrent sampling
and blending need no locking beyond the registry's own. Projections run
on background threads and are polled through /api/jobs/{id}.

All responses are JSON except the sample-grid endpoint, which returns
image/png directly.
"""

from __future__ import annotations

import base64
import binascii
import json
import os
import threading
import urllib.parse
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from . import blend as blend_mod
from . import png_io, projector, sampling
from .checkpoint import GeneratorConfig, ModelRegistry, load_bytes
from .errors import GanblendError, NotFoundError
from .generator import NoiseSpec, activations, mapping_forward

DEFAULT_PORT = 7860
MAX_UPLOAD = 64 * 1024 * 1024


class JobStore:
    """Background jobs keyed by opaque id, polled until done or error."""

    def __init__(self):
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}
        self._next = 1

    def submit(self, fn) -> str:
        with self._lock:
            job_id = f"j{self._next:04d}"
            self._next += 1
            self._jobs[job_id] = {"status": "running"}

        def run():
            try:
                result = fn()
            except Exception as e:  # job errors surface to the poller
                with self._lock:
                    self._jobs[job_id] = {"status": "error", "error": str(e)}
            else:
                with self._lock:
                    self._jobs[job_id] = {"status": "done", "result": result}

        threading.Thread(target=run, daemon=True).start()
        return job_id

    def get(self, job_id: str) -> dict:
        with self._lock:
            try:
                return dict(self._jobs[job_id])
            except KeyError:
                raise NotFoundError(f"unknown job id {job_id!r}") from None


class Service:
    """Request-independent state: the registry and the job store."""

    def __init__(self):
        self.registry = ModelRegistry()
        self.jobs = JobStore()


def _decode_png_b64(text: str) -> np.ndarray:
    try:
        raw = base64.b64decode(text, validate=True)
    except (binascii.Error, ValueError):
        raise GanblendError("png field is not valid base64") from None
    # console canvases export RGBA; alpha is dropped on decode
    return png_io.decode_png_bytes(raw, allow_alpha=True)


def _image_b64(img: np.ndarray) -> str:
    return base64.b64encode(png_io.encode_png_bytes(img)).decode("ascii")


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    service: Service = None
    static_dir: str | None = None

    # --- plumbing -------------------------------------------------------

    def log_message(self, fmt, *args):
        pass

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _json(self, obj, status: int = 200) -> None:
        self._send(status, json.dumps(obj).encode(), "application/json")

    def _error(self, status: int, message: str) -> None:
        self._json({"error": message}, status)

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length", 0))
        if length > MAX_UPLOAD:
            raise GanblendError(f"request body exceeds {MAX_UPLOAD} bytes")
        return self.rfile.read(length)

    def _json_body(self) -> dict:
        body = self._read_body()
        try:
            obj = json.loads(body)
        except json.JSONDecodeError as e:
            raise GanblendError(f"invalid JSON body: {e}") from None
        if not isinstance(obj, dict):
            raise GanblendError("JSON body must be an object")
        return obj

    def _dispatch(self, method: str) -> None:
        parsed = urllib.parse.urlsplit(self.path)
        path = parsed.path
        query = urllib.parse.parse_qs(parsed.query)
        try:
            if path.startswith("/api/"):
                self._route_api(method, path, query)
            elif method == "GET" and self.static_dir is not None:
                self._serve_static(path)
            else:
                self._error(404, f"no route for {path}")
        except NotFoundError as e:
            self._error(404, str(e))
        except GanblendError as e:
            self._error(400, str(e))
        except Exception as e:  # last resort: keep the server alive
            self._error(500, f"{type(e).__name__}: {e}")

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    # --- routing --------------------------------------------------------

    def _route_api(self, method: str, path: str, query: dict) -> None:
        parts = [p for p in path.split("/") if p]  # ["api", ...]
        svc = self.service

        if method == "GET" and parts == ["api", "models"]:
            rows = [
                {"id": mid, "name": name, "max_resolution": res}
                for mid, name, res in svc.registry.list()
            ]
            self._json({"models": rows})
        elif method == "POST" and parts == ["api", "models"]:
            self._post_model()
        elif method == "POST" and parts == ["api", "blend"]:
            self._post_blend()
        elif (
            method == "GET"
            and len(parts) == 4
            and parts[:2] == ["api", "models"]
            and parts[3] == "sample.png"
        ):
            self._get_sample(parts[2], query)
        elif (
            method == "GET"
            and len(parts) == 4
            and parts[:2] == ["api", "models"]
            and parts[3] == "activations"
        ):
            self._get_activations(parts[2], query)
        elif method == "GET" and parts == ["api", "schedule", "preview"]:
            self._get_schedule_preview(query)
        elif method == "GET" and parts == ["api", "config"]:
            cfg = GeneratorConfig.default()
            self._json(
                {
                    "bands": cfg.bands(),
                    "max_resolution": cfg.max_resolution,
                    "latent_dim": cfg.latent_dim,
                    "style_dim": cfg.style_dim,
                }
            )
        elif method == "POST" and parts == ["api", "project"]:
            self._post_project()
        elif method == "POST" and parts == ["api", "toonify"]:
            self._post_toonify()
        elif method == "GET" and len(parts) == 3 and parts[:2] == ["api", "jobs"]:
            self._json(svc.jobs.get(parts[2]))
        else:
            self._error(404, f"no route for {method} {path}")

    # --- handlers -------------------------------------------------------

    def _post_model(self) -> None:
        ctype = self.headers.get("Content-Type", "")
        body = self._read_body()
        if "json" in ctype:
            try:
                obj = json.loads(body)
            except json.JSONDecodeError as e:
                raise GanblendError(f"invalid JSON body: {e}") from None
            path = obj.get("path") if isinstance(obj, dict) else None
            if not isinstance(path, str):
                raise GanblendError('JSON upload needs {"path": "file.gwt"}')
            try:
                with open(path, "rb") as f:
                    data = f.read()
            except OSError as e:
                raise GanblendError(f"cannot read {path}: {e}") from None
            name = os.path.basename(path)
        else:
            data, name = body, "upload"
        ckpt = load_bytes(data)
        model_id = self.service.registry.put(ckpt, name)
        self._json({"id": model_id}, 201)

    def _post_blend(self) -> None:
        obj = self._json_body()
        for key in ("base_id", "transfer_id", "schedule"):
            if key not in obj:
                raise GanblendError(f"missing field {key!r}")
        base = self.service.registry.get(obj["base_id"])
        transfer = self.service.registry.get(obj["transfer_id"])
        schedule = blend_mod.schedule_from_json(obj["schedule"])
        mapping = blend_mod.MappingPolicy.parse(obj.get("mapping", "base"))
        out = blend_mod.blend_checkpoints(base, transfer, schedule, mapping)
        name = f"blend({obj['base_id']}+{obj['transfer_id']})"
        self._json({"id": self.service.registry.put(out, name)}, 201)

    @staticmethod
    def _int_param(query: dict, key: str, default: int) -> int:
        if key not in query:
            return default
        try:
            return int(query[key][0])
        except ValueError:
            raise GanblendError(f"query parameter {key} must be an integer") from None

    def _get_sample(self, model_id: str, query: dict) -> None:
        ckpt = self.service.registry.get(model_id)
        seed = self._int_param(query, "seed", 0)
        count = self._int_param(query, "count", 24)
        columns = self._int_param(query, "columns", 6)
        grid = sampling.render_grid(ckpt, seed, count, columns)
        self._send(200, png_io.encode_png_bytes(grid), "image/png")

    def _get_activations(self, model_id: str, query: dict) -> None:
        ckpt = self.service.registry.get(model_id)
        seed = self._int_param(query, "seed", 0)
        tap_r = self._int_param(query, "tap_r", ckpt.meta.max_resolution)
        z = sampling.sample_z(ckpt, seed, 0)
        tap = activations(ckpt, z, NoiseSpec(seed), tap_r)
        self._json(
            {
                "shape": list(tap.shape),
                "min": float(tap.min()),
                "max": float(tap.max()),
                "mean": float(tap.mean()),
            }
        )

    def _get_schedule_preview(self, query: dict) -> None:
        if "schedule" in query:
            obj = json.loads(query["schedule"][0])
        else:
            obj = {}
            for key, vals in query.items():
                text = vals[0]
                try:
                    obj[key] = json.loads(text)
                except json.JSONDecodeError:
                    obj[key] = text
        schedule = blend_mod.schedule_from_json(obj)
        cfg = GeneratorConfig.default()
        rows = blend_mod.describe_schedule(schedule, cfg)
        self._json({"rows": [{"r": r, "alpha": a} for r, a in rows]})

    def _projection_inputs(self, obj: dict) -> tuple[np.ndarray, projector.ProjectionConfig]:
        if "png" not in obj:
            raise GanblendError("missing field 'png'")
        target = _decode_png_b64(obj["png"])
        cfg = projector.ProjectionConfig.from_json_dict(obj.get("cfg", {}))
        return target, cfg

    def _post_project(self) -> None:
        obj = self._json_body()
        if "model_id" not in obj:
            raise GanblendError("missing field 'model_id'")
        ckpt = self.service.registry.get(obj["model_id"])
        target, cfg = self._projection_inputs(obj)

        def run():
            res = projector.project(ckpt, target, cfg)
            return {
                "space": cfg.space,
                "latent": [float(v) for v in res.latent],
                "final_loss": res.final_loss,
                "loss_trace": res.loss_trace,
                "reconstruction_png": _image_b64(res.reconstruction),
            }

        self._json({"job_id": self.service.jobs.submit(run)}, 202)

    def _post_toonify(self) -> None:
        obj = self._json_body()
        for key in ("base_id", "blended_id"):
            if key not in obj:
                raise GanblendError(f"missing field {key!r}")
        base = self.service.registry.get(obj["base_id"])
        blended = self.service.registry.get(obj["blended_id"])
        target, cfg = self._projection_inputs(obj)

        def run():
            img, res = projector.toonify_with_result(base, blended, target, cfg)
            return {
                "toonified_png": _image_b64(img),
                "reconstruction_png": _image_b64(res.reconstruction),
                "final_loss": res.final_loss,
            }

        self._json({"job_id": self.service.jobs.submit(run)}, 202)

    # --- static console files --------------------------------------------

    _MIME = {
        ".html": "text/html; charset=utf-8",
        ".js": "text/javascript; charset=utf-8",
        ".css": "text/css; charset=utf-8",
        ".map": "application/json",
        ".png": "image/png",
        ".svg": "image/svg+xml",
    }

    def _serve_static(self, path: str) -> None:
        rel = path.lstrip("/") or "index.html"
        root = os.path.realpath(self.static_dir)
        full = os.path.realpath(os.path.join(root, rel))
        if not (full == root or full.startswith(root + os.sep)):
            self._error(404, "not found")
            return
        if os.path.isdir(full):
            full = os.path.join(full, "index.html")
        try:
            with open(full, "rb") as f:
                data = f.read()
        except OSError:
            self._error(404, f"no file at {path}")
            return
        ext = os.path.splitext(full)[1].lower()
        self._send(200, data, self._MIME.get(ext, "application/octet-stream"))


def make_server(port: int = 0, static_dir: str | None = None) -> ThreadingHTTPServer:
    """Build (but do not run) the HTTP server; port 0 picks a free port."""
    service = Service()
    handler = type(
        "BoundHandler", (_Handler,), {"service": service, "static_dir": static_dir}
    )
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    server.service = service
    return server


def serve(port: int | None = None, static_dir: str | None = None) -> None:
    if port is None:
        port = int(os.environ.get("GANBLEND_PORT", DEFAULT_PORT))
    try:
        server = make_server(port, static_dir)
    except OSError as e:
        raise GanblendError(f"cannot bind port {port}: {e}") from None
    host, bound_port = server.server_address[:2]
    print(f"ganblend service on http://{host}:{bound_port}/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
