"""HTTP+JSON surface over the annotation store.

Annotator-facing payloads never contain other annotators' votes or the
model score; conflict listings (which do show both votes) require an
authorized adjudicator id.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from ..errors import (
    AuthorizationError,
    SessionCapError,
    StateError,
    ValidationError,
)
from .store import AnnotationStore

import json


class VoteRequest(BaseModel):
    annotator: str
    labels: dict[str, int]
    needs_context: bool = False


class ResolveRequest(BaseModel):
    adjudicator: str
    labels: dict[str, int] | None = None
    reject: bool = False


def create_app(store: AnnotationStore, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="ctlab annotation service")

    @app.exception_handler(SessionCapError)
    async def _cap(request: Request, exc: SessionCapError):
        return JSONResponse(status_code=409, content={"error": "session_cap", "detail": str(exc)})

    @app.exception_handler(AuthorizationError)
    async def _auth(request: Request, exc: AuthorizationError):
        return JSONResponse(status_code=403, content={"error": "unauthorized", "detail": str(exc)})

    @app.exception_handler(StateError)
    async def _state(request: Request, exc: StateError):
        return JSONResponse(status_code=409, content={"error": "state", "detail": str(exc)})

    @app.exception_handler(ValidationError)
    async def _validation(request: Request, exc: ValidationError):
        return JSONResponse(status_code=400, content={"error": "validation", "detail": str(exc)})

    @app.get("/api/tasks/next")
    def next_task(annotator: str = Query(...)):
        view = store.next_task(annotator)
        if view is None:
            return {"task": None, "reason": "empty_queue"}
        return {"task": view}

    @app.post("/api/tasks/{task_id}/vote")
    def vote(task_id: str, body: VoteRequest):
        state = store.submit_vote(
            body.annotator, task_id, body.labels, body.needs_context
        )
        return {"task_id": task_id, "state": state}

    @app.get("/api/conflicts")
    def conflicts(adjudicator: str = Query(...)):
        return {"conflicts": store.conflicts(adjudicator)}

    @app.post("/api/conflicts/{task_id}/resolve")
    def resolve(task_id: str, body: ResolveRequest):
        state = store.resolve_conflict(
            body.adjudicator, task_id, final_labels=body.labels, reject=body.reject
        )
        return {"task_id": task_id, "state": state}

    @app.get("/api/progress")
    def progress():
        return store.progress()

    @app.get("/api/export")
    def export():
        lines = [
            json.dumps(rec, ensure_ascii=False) for rec in store.export_accepted()
        ]
        return PlainTextResponse(
            "\n".join(lines) + ("\n" if lines else ""),
            media_type="application/x-ndjson",
        )

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
