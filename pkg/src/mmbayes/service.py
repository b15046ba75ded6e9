"""Local HTTP API for classroom sessions.

JSON in and out on every route except the CSV export. Error bodies always
carry {code, rule, message}; conflicts name the violated session rule so
clients can attach the message to the right form field. Density grids are
returned as parallel theta/density arrays. Every session response echoes the
event-log sequence number so polling clients can drop stale replies.

No authentication: the service is meant to bind to localhost on the
instructor's machine.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict

from .classifier import FactoryProfile, load_profiles
from .conjugate import PosteriorSummary
from .distributions import BetaParams
from .session import (
    PosteriorView,
    Session,
    SessionError,
    SessionStore,
    export_csv,
    posterior_view,
    reveal_report,
)

__all__ = ["create_app"]


class PriorBody(BaseModel):
    alpha: float
    beta: float


class BagBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    bag_id: str
    counts: dict[str, int] | None = None
    blue: int | None = None
    total: int | None = None
    lot_code: str | None = None


def _session_json(session: Session) -> dict:
    return {
        "id": session.id,
        "created_at": session.created_at,
        "prior": (
            {"alpha": session.prior.alpha, "beta": session.prior.beta}
            if session.prior else None),
        "prior_locked": session.prior_locked,
        "revealed": session.revealed,
        "sequence": session.sequence,
        "bags": [
            {"bag_id": b.bag_id, "counts": b.counts, "blue": b.blue,
             "total": b.total, "lot_code": b.lot_code}
            for b in session.bags
        ],
    }


def _summary_json(summary: PosteriorSummary) -> dict:
    return {
        "mean": summary.mean,
        "mode": summary.mode,
        "variance": summary.variance,
        "interval": list(summary.interval),
        "level": summary.level,
    }


def _view_json(view: PosteriorView, sequence: int) -> dict:
    thetas = [t for t, _ in view.grid]
    densities = [d for _, d in view.grid]
    return {
        "scope": view.scope,
        "prior": {"alpha": view.prior.alpha, "beta": view.prior.beta},
        "posterior": {
            "alpha": view.posterior.params.alpha,
            "beta": view.posterior.params.beta,
        },
        "data": {
            "blue": int(view.posterior.data.counts[0]),
            "total": view.posterior.data.total,
        },
        "summary": _summary_json(view.summary),
        "grid": {"theta": thetas, "density": densities},
        "sequence": sequence,
    }


def create_app(
    data_dir: str | Path,
    fsync: bool = True,
    profiles: list[FactoryProfile] | None = None,
    profiles_path: str | Path | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Build the session service; state persists under ``data_dir``."""
    if profiles is None and profiles_path is not None:
        profiles = load_profiles(profiles_path)
    store = SessionStore(data_dir, fsync=fsync)
    app = FastAPI(title="mmbayes session service")
    app.state.store = store

    @app.exception_handler(SessionError)
    async def _session_error(request: Request, exc: SessionError):
        status = {"not_found": 404, "conflict": 409}.get(exc.code, 400)
        return JSONResponse(
            status_code=status,
            content={"code": exc.code, "rule": exc.rule, "message": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=422,
            content={"code": "invalid", "rule": None, "message": str(exc)})

    @app.post("/sessions", status_code=201)
    def create_session():
        return _session_json(store.create_session())

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_json(store.get(session_id))

    @app.put("/sessions/{session_id}/prior")
    def set_prior(session_id: str, body: PriorBody):
        return _session_json(
            store.set_prior(session_id, BetaParams(body.alpha, body.beta)))

    @app.post("/sessions/{session_id}/prior/lock")
    def lock_prior(session_id: str):
        return _session_json(store.lock_prior(session_id))

    @app.post("/sessions/{session_id}/bags", status_code=201)
    def add_bag(session_id: str, body: BagBody):
        if body.counts is not None:
            counts = body.counts
            if body.blue is not None or body.total is not None:
                raise ValueError("give either counts or (blue, total), not both")
        else:
            from .session import normalize_counts
            counts = normalize_counts(blue=body.blue, total=body.total)
        return _session_json(
            store.add_bag(session_id, body.bag_id, counts, body.lot_code))

    @app.get("/sessions/{session_id}/posterior")
    def get_posterior(
        session_id: str,
        scope: str = "class",
        level: float = Query(0.95, gt=0.0, lt=1.0),
        grid: int = Query(512, ge=2, le=8192),
    ):
        session = store.get(session_id)
        view = posterior_view(session, scope, level, grid)
        return _view_json(view, session.sequence)

    @app.post("/sessions/{session_id}/reveal")
    def reveal(session_id: str):
        session = store.reveal(session_id)
        report = reveal_report(session, profiles)
        return {
            "factories": [
                {"name": name, "probability": prob}
                for name, prob in zip(report.factory_names, report.probabilities)
            ],
            "log_bayes_factor": report.log_bayes_factor,
            "pooled": {"blue": report.pooled_blue, "total": report.pooled_total},
            "lot_codes": report.lot_codes,
            "sequence": session.sequence,
        }

    @app.get("/sessions/{session_id}/export.csv")
    def export(session_id: str):
        text = export_csv(store.get(session_id))
        return PlainTextResponse(content=text, media_type="text/csv")

    @app.get("/preview")
    def preview(
        alpha: float = Query(..., gt=0.0),
        beta: float = Query(..., gt=0.0),
        grid: int = Query(512, ge=2, le=8192),
    ):
        from .elicitation import preview as preview_grid
        pts = preview_grid(BetaParams(alpha, beta), grid)
        return {
            "prior": {"alpha": alpha, "beta": beta},
            "grid": {"theta": [t for t, _ in pts], "density": [d for _, d in pts]},
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
