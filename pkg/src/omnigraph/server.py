"""HTTP surface over a workspace store.

JSON API: list/load/save workspaces (ETag + If-Match optimistic concurrency),
validation, queries, code generation, navigation, and metamodel access. The
browser editor is served as static assets under /ui/ when a build directory
is available. Error bodies are structured: {code, message, element?}.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from .codegen import load_genplan, run_genplan
from .errors import (
    ConflictError,
    FormatVersionError,
    GraphError,
    IntegrityError,
    MetaModelError,
    NotFoundError,
    OmniGraphError,
    ParseError,
    QueryError,
    RenderError,
)
from .graph import serialize, workspace_from_doc
from .metamodel import palette, validate
from .query import query as run_query_text
from .store import WorkspaceStore

DEFAULT_PORT = 8400


class ApiError(OmniGraphError):
    def __init__(self, status: int, code: str, message: str, element: int | None = None):
        self.status = status
        self.code = code
        self.element = element
        super().__init__(message)


def _error_response(status: int, code: str, message: str, element: int | None = None):
    body = {"code": code, "message": message}
    if element is not None:
        body["element"] = element
    return JSONResponse(body, status_code=status)


def _classify(exc: OmniGraphError) -> tuple:
    if isinstance(exc, ApiError):
        return exc.status, exc.code, getattr(exc, "element", None)
    if isinstance(exc, ConflictError):
        return 409, "CONFLICT", None
    if isinstance(exc, NotFoundError):
        return 404, "NOT_FOUND", None
    if isinstance(exc, IntegrityError):
        return 422, "INTEGRITY", exc.element_id
    if isinstance(exc, FormatVersionError):
        return 422, "FORMAT_VERSION", None
    if isinstance(exc, (ParseError, QueryError)):
        return 400, "PARSE", None
    if isinstance(exc, (GraphError, MetaModelError, RenderError)):
        return 400, "BAD_REQUEST", None
    return 400, "BAD_REQUEST", None


def _parse_if_match(request: Request) -> int:
    raw = request.headers.get("if-match")
    if raw is None:
        raise ApiError(428, "IF_MATCH", "PUT requires an If-Match version header")
    token = raw.strip().strip('"')
    if not token.isdigit():
        raise ApiError(400, "IF_MATCH", f"If-Match must be an integer version, got {raw!r}")
    return int(token)


def default_ui_dir() -> Path | None:
    env = os.environ.get("HGOS_UI_DIR")
    if env:
        return Path(env)
    candidate = Path(__file__).resolve().parents[3] / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def create_app(root, ui_dir=None) -> FastAPI:
    store = WorkspaceStore(root)
    app = FastAPI(title="omnigraph workspace server", docs_url=None, redoc_url=None)
    app.state.store = store

    @app.exception_handler(OmniGraphError)
    async def handle_domain_error(request: Request, exc: OmniGraphError):
        status, code, element = _classify(exc)
        return _error_response(status, code, str(exc), element)

    @app.exception_handler(StarletteHTTPException)
    async def handle_http_error(request: Request, exc: StarletteHTTPException):
        code = "ROUTE" if exc.status_code == 404 else "HTTP"
        return _error_response(exc.status_code, code, str(exc.detail))

    @app.get("/workspaces")
    def list_workspaces():
        return {"workspaces": [info.to_doc() for info in store.list()]}

    @app.get("/workspaces/{workspace_id}")
    def get_workspace(workspace_id: str):
        ws, version = store.load(workspace_id)
        return Response(
            serialize(ws),
            media_type="application/json",
            headers={"ETag": f'"{version}"'},
        )

    @app.put("/workspaces/{workspace_id}")
    async def put_workspace(workspace_id: str, request: Request):
        expected = _parse_if_match(request)
        try:
            doc = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise ApiError(400, "PARSE", f"request body is not JSON: {exc.msg}") from exc
        ws = workspace_from_doc(doc)
        version = store.save(workspace_id, ws, expected)
        return JSONResponse({"id": workspace_id, "version": version},
                            headers={"ETag": f'"{version}"'})

    @app.post("/workspaces/{workspace_id}/validate")
    def validate_workspace(workspace_id: str):
        ws, version = store.load(workspace_id)
        mm = store.load_metamodel(ws.metamodel)
        violations = validate(ws, mm)
        return {
            "version": version,
            "violations": [
                {"element": v.element, "code": v.code, "message": v.message}
                for v in violations
            ],
        }

    @app.post("/workspaces/{workspace_id}/query")
    async def query_workspace(workspace_id: str, request: Request):
        body = await _json_body(request)
        q = body.get("q")
        if not isinstance(q, str):
            raise ApiError(400, "PARSE", "body must carry a query string under 'q'")
        ws, version = store.load(workspace_id)
        selection = run_query_text(ws, q)
        return {"version": version, "kind": selection.kind, "ids": list(selection.ids)}

    @app.post("/workspaces/{workspace_id}/generate")
    async def generate_workspace(workspace_id: str, request: Request):
        body = await _json_body(request, optional=True)
        ws, version = store.load(workspace_id)
        mm = store.load_metamodel(ws.metamodel)
        out_dir = body.get("out_dir") or f"generated/{workspace_id}"
        out_path = Path(out_dir)
        if not out_path.is_absolute():
            out_path = store.root / out_path
        plan = load_genplan(ws)
        report = run_genplan(plan, ws, mm, out_path, template_dir=store.root)
        doc = report.to_doc()
        doc["version"] = version
        return doc

    @app.post("/workspaces/{workspace_id}/navigate")
    async def navigate_workspace(workspace_id: str, request: Request):
        body = await _json_body(request)
        target = body.get("target")
        if not isinstance(target, str):
            raise ApiError(400, "PARSE", "body must carry a 'target' workspace id")
        history = store.navigate(workspace_id, target)
        _, version = store.load(workspace_id)
        return {"version": version, "history": history}

    @app.get("/metamodels")
    def list_metamodels():
        return {"metamodels": store.metamodel_ids()}

    @app.get("/metamodels/{name}")
    def get_metamodel(name: str):
        mm = store.load_metamodel(name)
        return {
            "id": mm.id,
            "name": mm.name,
            "node_types": {
                type_name: {
                    "container": nt.container,
                    "shape": nt.visual.shape,
                    "fill": nt.visual.fill,
                    "show": list(nt.visual.text_fields),
                    "label": nt.palette_label,
                    "attrs": {
                        key: {
                            "kind": spec.kind,
                            "required": spec.required,
                            "default": spec.default,
                            "enum": list(spec.enum_values) if spec.enum_values else None,
                        }
                        for key, spec in nt.attr_schema.items()
                    },
                }
                for type_name, nt in mm.node_types.items()
            },
            "link_types": {
                type_name: {
                    "endpoints": [f"{f} -> {t}" for f, t in lt.allowed_endpoints],
                    "self": lt.allow_self,
                    "max_out": lt.max_out,
                    "max_in": lt.max_in,
                    "style": {
                        "stroke": lt.default_style.stroke,
                        "head": lt.default_style.head,
                        "color": lt.default_style.color,
                    },
                }
                for type_name, lt in mm.link_types.items()
            },
            "styles": [
                {"from": f, "to": t, "stroke": s.stroke, "head": s.head, "color": s.color}
                for (f, t), s in mm.style_table.items()
            ],
            "palette": [
                {"label": entry.label, "type": entry.type_name, "shape": entry.visual.shape,
                 "fill": entry.visual.fill}
                for entry in palette(mm)
            ],
        }

    resolved_ui = Path(ui_dir) if ui_dir else default_ui_dir()
    if resolved_ui and resolved_ui.is_dir():
        app.mount("/ui", StaticFiles(directory=resolved_ui, html=True), name="ui")

    return app


async def _json_body(request: Request, optional: bool = False) -> dict:
    raw = await request.body()
    if not raw:
        if optional:
            return {}
        raise ApiError(400, "PARSE", "request body must be a JSON object")
    try:
        body = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ApiError(400, "PARSE", f"request body is not JSON: {exc.msg}") from exc
    if not isinstance(body, dict):
        raise ApiError(400, "PARSE", "request body must be a JSON object")
    return body


def serve(root, port: int = DEFAULT_PORT, host: str = "127.0.0.1", ui_dir=None) -> None:
    import uvicorn

    uvicorn.run(create_app(root, ui_dir=ui_dir), host=host, port=port, log_level="warning")
