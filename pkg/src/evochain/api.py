"""HTTP JSON API over the evolution graph.

All endpoints are read-only; every non-2xx body has the shape
{status, code, message}. Response shapes are pinned by the JSON Schema
files shipped under ``evochain/schemas``.
"""

from __future__ import annotations

from dataclasses import asdict
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .explorer import ExplorerClient, TransientFailureError, ProtocolError
from .ingest import ValidationError, normalize_address
from .store import GraphStore, Lineage, ObservedChangeEdge

_CODE_BY_STATUS = {400: "bad_request", 404: "not_found", 502: "upstream_unavailable"}


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        self.code = _CODE_BY_STATUS.get(status, "bad_request")
        self.message = message


def _error_response(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={
        "status": status,
        "code": _CODE_BY_STATUS.get(status, "bad_request"),
        "message": message,
    })


def _lineage_payload(lineage: Lineage) -> dict:
    return {
        "proxy": asdict(lineage.proxy),
        "versions": [
            {"version": asdict(version),
             "change": asdict(change) if change is not None else None}
            for version, change in lineage.items
        ],
    }


def _parse_address(text: str) -> str:
    try:
        return normalize_address(text)
    except ValidationError as exc:
        raise ApiError(400, str(exc)) from None


def create_app(store: GraphStore,
               explorer: Optional[ExplorerClient] = None,
               cors_origin: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="evochain", docs_url=None, redoc_url=None)

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware
        app.add_middleware(CORSMiddleware, allow_origins=[cors_origin],
                           allow_methods=["GET"], allow_headers=["*"])

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return _error_response(exc.status, exc.message)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return _error_response(400, str(exc.errors()[:1]))

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(_request: Request, exc: StarletteHTTPException):
        return _error_response(exc.status_code, str(exc.detail))

    @app.get("/api/v1/proxies")
    def list_proxies(type: Optional[str] = None,
                     min_versions: Optional[int] = None,
                     vulnerability: Optional[str] = None,
                     q: Optional[str] = None,
                     limit: int = Query(default=50),
                     offset: int = Query(default=0)):
        try:
            items, total = store.find(
                proxy_type=type, min_versions=min_versions,
                vulnerability=vulnerability, address_prefix=q,
                limit=limit, offset=offset)
        except ValueError as exc:
            raise ApiError(400, str(exc)) from None
        return {"items": [asdict(p) for p in items], "total": total,
                "limit": limit, "offset": offset}

    @app.get("/api/v1/contracts/{address}/lineage")
    def contract_lineage(address: str):
        lineage = store.get_lineage(_parse_address(address))
        if not lineage.found:
            raise ApiError(404, f"unknown proxy {address}")
        return _lineage_payload(lineage)

    @app.get("/api/v1/contracts/{address}/source")
    def contract_source(address: str):
        address = _parse_address(address)
        if explorer is None:
            raise ApiError(502, "no explorer client configured")
        try:
            bundle = explorer.fetch_verified_source(address)
        except (TransientFailureError, ProtocolError) as exc:
            raise ApiError(502, str(exc)) from None
        return bundle.to_dict()

    @app.get("/api/v1/graph/{address}")
    def contract_graph(address: str, depth: int = Query(default=2)):
        if not 1 <= depth <= 3:
            raise ApiError(400, f"depth must be in [1, 3], got {depth}")
        lineage = store.get_lineage(_parse_address(address))
        if not lineage.found:
            raise ApiError(404, f"unknown proxy {address}")
        return _subgraph(lineage, depth)

    @app.get("/api/v1/stats")
    def stats():
        return store.stats()

    return app


def _subgraph(lineage: Lineage, depth: int) -> dict:
    proxy = lineage.proxy
    nodes = [{
        "id": f"proxy:{proxy.address}",
        "type": "proxy",
        "label": proxy.address,
        "attributes": asdict(proxy),
    }]
    edges = []
    for version, change in lineage.items:
        vid = f"version:{version.proxy}:{version.version_number}"
        nodes.append({
            "id": vid,
            "type": "version",
            "label": f"v{version.version_number} {version.contract_address}",
            "attributes": asdict(version),
        })
        edges.append({"source": f"proxy:{proxy.address}", "target": vid,
                      "kind": "implements"})
        # Change edges connect two hop-1 nodes, so they need depth >= 2.
        if depth >= 2 and change is not None:
            edges.append({
                "source": f"version:{change.proxy}:{change.from_version}",
                "target": f"version:{change.proxy}:{change.to_version}",
                "kind": "observed_change",
                "categories": list(change.categories),
                "evidence": list(change.evidence),
            })
    return {"nodes": nodes, "edges": edges}
