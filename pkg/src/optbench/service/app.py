"""HTTP facade over the workbench (FastAPI).

Reads are side-effect free; uploads land in namespaced registries; /bench
is an async job (submit, then poll). Errors use {code, message, detail}
with 4xx for validation and 404 for unknown names. See docs/api.md.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..bench.diff import diff_plans
from ..errors import (
    DuplicateName,
    OptBenchError,
    ParseError,
    UnknownAction,
    UnknownQuery,
    UnknownStatistic,
    ValidationError,
)
from ..ir.hashing import canonical_hash
from ..ir.serde import plan_to_doc
from ..stats.collect import collect_stats
from ..suite.queries import QUERY_IDS, build_query
from ..suite.registry import suite_entries
from .session import ApiSession

_NOT_FOUND = (UnknownQuery, UnknownAction, KeyError)
_BAD_REQUEST = (ValidationError, ParseError, DuplicateName, UnknownStatistic)


def annotate_paths(node_doc: dict, path: str = "root") -> dict:
    """Add stable per-node path ids so panes and diffs align."""
    out = dict(node_doc)
    out["path"] = path
    prefix = "" if path == "root" else path + "."
    if isinstance(out.get("left"), dict):
        out["left"] = annotate_paths(out["left"], prefix + "0")
        out["right"] = annotate_paths(out["right"], prefix + "1")
    elif isinstance(out.get("child"), dict):
        out["child"] = annotate_paths(out["child"], prefix + "0")
    return out


def create_app(session: ApiSession | None = None, frontend_dir: str | None = None) -> FastAPI:
    session = session or ApiSession()
    app = FastAPI(title="optbench", version="0.1.0")
    app.state.session = session

    @app.exception_handler(OptBenchError)
    async def _optbench_error(request: Request, exc: OptBenchError):
        if isinstance(exc, _NOT_FOUND):
            status = 404
        elif isinstance(exc, _BAD_REQUEST):
            status = 400
        else:
            status = 500
        return JSONResponse(
            status_code=status,
            content={"code": type(exc).__name__, "message": str(exc), "detail": getattr(exc, "detail", None)},
        )

    @app.exception_handler(KeyError)
    async def _key_error(request: Request, exc: KeyError):
        return JSONResponse(
            status_code=404,
            content={"code": "NotFound", "message": str(exc.args[0]) if exc.args else "not found", "detail": None},
        )

    @app.get("/queries")
    def list_queries():
        entries = suite_entries()
        return [
            {
                "id": qid,
                "description": entries[qid].description,
                "expected_ml_functions": sorted(entries[qid].expected_ml_functions),
                "compare_keys": list(entries[qid].compare_keys),
            }
            for qid in QUERY_IDS
        ]

    @app.get("/queries/{query_id}/plan")
    def query_plan(query_id: str, optimizer: Optional[str] = None):
        if query_id not in QUERY_IDS:
            raise UnknownQuery(query_id)
        plan, trace = session.optimized_plan(query_id, optimizer)
        stats = collect_stats(
            plan, session.catalog(query_id),
            session.optimize_context(query_id).stats_config,
            session.optimize_context(query_id).cache,
        )
        doc = plan_to_doc(plan)
        doc["root"] = annotate_paths(doc["root"])
        return {
            "query": query_id,
            "optimizer": optimizer,
            "plan": doc,
            "plan_hash": f"{canonical_hash(plan):016x}",
            "stats": stats.to_doc(),
            "trace": trace.to_doc() if trace is not None else None,
        }

    @app.get("/stats/{query_id}")
    def query_stats(query_id: str):
        if query_id not in QUERY_IDS:
            raise UnknownQuery(query_id)
        plan = build_query(query_id, session.seed)
        ctx = session.optimize_context(query_id)
        stats = collect_stats(plan, session.catalog(query_id), ctx.stats_config, ctx.cache)
        return {"query": query_id, "stats": stats.to_doc()}

    @app.get("/actions")
    def list_actions():
        return session.actions.describe()

    @app.post("/actions", status_code=201)
    def upload_action(doc: dict):
        action = session.actions.register_external(doc)
        return action.describe()

    @app.get("/optimizers")
    def list_optimizers():
        return session.optimizers.describe()

    @app.post("/optimizers", status_code=201)
    def upload_optimizer(doc: dict):
        profile = session.optimizers.register_from_doc(doc, session.actions)
        return {"name": profile.name, "kind": profile.kind}

    @app.post("/bench", status_code=202)
    def submit_bench(request: dict):
        queries = request.get("queries") or list(QUERY_IDS)
        optimizers = request.get("optimizers") or session.optimizers.names()
        for qid in queries:
            if qid not in QUERY_IDS:
                raise UnknownQuery(qid)
        for name in optimizers:
            session.optimizers.get(name)
        job = session.submit_bench({**request, "queries": queries, "optimizers": optimizers})
        return {"job_id": job.job_id, "status": job.status}

    @app.get("/bench/{job_id}")
    def bench_status(job_id: str):
        job = session.job(job_id)
        out = {"job_id": job.job_id, "status": job.status, "request": job.request}
        if job.report is not None:
            out["report"] = job.report
        if job.error is not None:
            out["error"] = job.error
        return out

    @app.get("/plans/diff")
    def plans_diff(query: str, left: str, right: str):
        if query not in QUERY_IDS:
            raise UnknownQuery(query)
        left_plan, _ = session.optimized_plan(query, left)
        right_plan, _ = session.optimized_plan(query, right)
        diff = diff_plans(left_plan, right_plan)
        return {
            "query": query,
            "left": left,
            "right": right,
            "left_hash": f"{canonical_hash(left_plan):016x}",
            "right_hash": f"{canonical_hash(right_plan):016x}",
            "diff": diff.to_doc(),
        }

    if frontend_dir and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app
