"""Read-only HTTP API over a frozen retrieval index.

Endpoints (JSON unless noted):
  GET  /api/models                 corpus manifest
  GET  /api/models/{id}            one model's label, class and key indexes
  GET  /api/models/{id}/mesh       raw OFF text
  GET  /api/classes                class names with member counts
  POST /api/query                  {model_id, k?, weights?, use_classifier?,
                                    use_ontology?, patterns?}
  GET  /api/eval/pr?class=NAME     CSV recall,precision

Every request reads the immutable index, so concurrent handling needs no
locking. CORS headers are permissive so the browser UI can be served from
anywhere.
"""

from __future__ import annotations

import errno
import json
import logging
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .config import DEFAULT_RESULT_COUNT
from .errors import (
    EmptyRelevantSet,
    PortInUse,
    ShapeEngineError,
    UnknownModel,
    UnknownPredicate,
)
from .retrieval import (
    RetrievalIndex,
    WeightProfile,
    evaluate_pr,
    pr_to_csv,
    results_to_json,
    retrieve,
)

logger = logging.getLogger(__name__)


def weights_from_payload(value) -> WeightProfile:
    if value is None:
        return WeightProfile()
    if isinstance(value, dict):
        return WeightProfile(
            w_measures=float(value.get("measures", 1.0)),
            w_indexes=float(value.get("indexes", 1.0)),
            w_moments=float(value.get("moments", 1.0)),
        )
    m, i, o = (float(x) for x in value)
    return WeightProfile(m, i, o)


def run_query(index: RetrievalIndex, payload: dict) -> str:
    """Execute a query request and return the canonical result JSON."""
    results = retrieve(
        payload["model_id"],
        index,
        w=weights_from_payload(payload.get("weights")),
        k_results=int(payload.get("k", DEFAULT_RESULT_COUNT)),
        use_classifier=bool(payload.get("use_classifier", True)),
        use_ontology=bool(payload.get("use_ontology", True)),
        ontology_patterns=payload.get("patterns"),
    )
    return results_to_json(results)


class _Handler(BaseHTTPRequestHandler):
    index: RetrievalIndex  # injected by make_server

    def log_message(self, fmt, *args):
        logger.debug("%s " + fmt, self.address_string(), *args)

    def _send(self, status: int, body: str, content_type: str = "application/json"):
        data = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", f"{content_type}; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(data)

    def _error(self, status: int, message: str):
        self._send(status, json.dumps({"error": message}, sort_keys=True))

    def do_OPTIONS(self):
        self._send(204, "")

    def do_GET(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        try:
            if parts == ["api", "models"]:
                return self._send(200, self._models_json())
            if len(parts) == 3 and parts[:2] == ["api", "models"]:
                return self._send(200, self._model_json(parts[2]))
            if len(parts) == 4 and parts[:2] == ["api", "models"] and parts[3] == "mesh":
                return self._send(200, self._mesh_text(parts[2]), "text/plain")
            if parts == ["api", "classes"]:
                return self._send(200, self._classes_json())
            if parts == ["api", "eval", "pr"]:
                params = parse_qs(url.query)
                name = params.get("class", [None])[0]
                curve = evaluate_pr(self.index, class_name=name)
                return self._send(200, pr_to_csv(curve), "text/csv")
            return self._error(404, f"no route for {url.path}")
        except UnknownModel as exc:
            return self._error(404, f"unknown model: {exc}")
        except EmptyRelevantSet as exc:
            return self._error(404, str(exc))
        except ShapeEngineError as exc:
            return self._error(400, str(exc))

    def do_POST(self):
        url = urlparse(self.path)
        if url.path != "/api/query":
            return self._error(404, f"no route for {url.path}")
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length) or b"{}")
            if "model_id" not in payload:
                return self._error(400, "model_id is required")
            return self._send(200, run_query(self.index, payload))
        except (UnknownModel,) as exc:
            return self._error(404, f"unknown model: {exc}")
        except (UnknownPredicate, ShapeEngineError, ValueError) as exc:
            return self._error(400, str(exc))
        except json.JSONDecodeError as exc:
            return self._error(400, f"bad JSON body: {exc}")

    # --- payload builders --------------------------------------------------

    def _models_json(self) -> str:
        rows = [
            {
                "id": mid,
                "class": rec.class_name,
                "label": dict(rec.label.items()),
            }
            for mid, rec in sorted(self.index.models.items())
        ]
        return json.dumps(rows, sort_keys=True)

    def _model_json(self, model_id: str) -> str:
        rec = self.index.models.get(model_id)
        if rec is None:
            raise UnknownModel(model_id)
        from .descriptors import INDEX_COMPONENTS

        return json.dumps(
            {
                "id": model_id,
                "class": rec.class_name,
                "label": dict(rec.label.items()),
                "indexes": {n: getattr(rec.descriptor.indexes, n) for n in INDEX_COMPONENTS},
                "moments": list(rec.descriptor.moments.as_array()),
                "volume": rec.descriptor.measures.volume,
                "surface_area": rec.descriptor.measures.surface_area,
                "path": rec.path,
            },
            sort_keys=True,
        )

    def _mesh_text(self, model_id: str) -> str:
        if model_id not in self.index.models:
            raise UnknownModel(model_id)
        path = self.index.mesh_path(model_id)
        if not path.exists():
            raise UnknownModel(f"{model_id} (mesh file moved: {path})")
        return path.read_text(encoding="ascii", errors="replace")

    def _classes_json(self) -> str:
        counts: dict[str, int] = {}
        for rec in self.index.models.values():
            if rec.class_name is not None:
                counts[rec.class_name] = counts.get(rec.class_name, 0) + 1
        return json.dumps(
            [{"name": name, "count": counts[name]} for name in sorted(counts)],
            sort_keys=True,
        )


def make_server(index: RetrievalIndex, port: int) -> ThreadingHTTPServer:
    """Bind the service; port 0 picks a free port (server.server_address)."""
    handler = type("BoundHandler", (_Handler,), {"index": index})
    try:
        return ThreadingHTTPServer(("0.0.0.0", port), handler)
    except OSError as exc:
        if exc.errno == errno.EADDRINUSE:
            raise PortInUse(f"port {port} is already in use") from exc
        raise


def serve(index: RetrievalIndex, port: int):
    """Run the service until interrupted."""
    server = make_server(index, port)
    host, bound = server.server_address[:2]
    logger.info("serving on %s:%s", host, bound)
    try:
        server.serve_forever()
    finally:
        server.server_close()
