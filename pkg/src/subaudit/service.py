"""Read-mostly HTTP API over precomputed match audits.

The store is immutable after startup; what-if queries re-run inference only
(never the pipeline) and never mutate stored results, so concurrent reads
and probes are safe. All payload field names match the exported JSON
schemas in ``subaudit/schemas/``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping

import pandas as pd
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .ingest import MatchRecord, Role
from .metrics import PlayerSliceState
from .priority import MatchAudit, OverrideError, PriorityConfig, audit_match, what_if
from .system import SystemConfig


@dataclass(frozen=True)
class AuditStore:
    """Immutable bundle the service reads from."""

    audits: Mapping[int, MatchAudit]
    states: Mapping[tuple[int, int, int], PlayerSliceState]  # (match, label, player)
    matches: Mapping[int, MatchRecord]
    system: SystemConfig
    config: PriorityConfig


def build_store(
    dataset: pd.DataFrame,
    matches: Mapping[int, MatchRecord],
    system: SystemConfig,
    config: PriorityConfig = PriorityConfig(),
) -> AuditStore:
    """Audit every match in the dataset and index the states for what-if."""
    audits: dict[int, MatchAudit] = {}
    states: dict[tuple[int, int, int], PlayerSliceState] = {}
    for match_id, group in dataset.groupby("matchId", sort=True):
        match_id = int(match_id)
        audits[match_id] = audit_match(group, matches.get(match_id), system, config)
        for _, row in group.iterrows():
            state = PlayerSliceState.from_row(row)
            states[(match_id, state.tempo_partida, state.player_id)] = state
    return AuditStore(audits=audits, states=states, matches=dict(matches),
                      system=system, config=config)


def _timeline_payload(audit: MatchAudit) -> dict:
    return {
        "match_id": audit.match_id,
        "critical_threshold": audit.config.critical_threshold,
        "alpha": audit.config.alpha,
        "players": {str(pid): dict(info) for pid, info in sorted(audit.players.items())},
        "slices": [
            {
                "label": label,
                "entries": [result.as_dict(include_trace=False) for result in results],
            }
            for label, results in audit.slices
        ],
        "substitutions": [
            {"team_id": s.team_id, "minute": s.minute,
             "player_out": s.player_out, "player_in": s.player_in}
            for s in audit.substitutions
        ],
        "latency": [entry.as_dict() for entry in audit.latency],
        "post_entry": [track.as_dict() for track in audit.post_entry],
    }


def create_app(store: AuditStore) -> FastAPI:
    app = FastAPI(title="subaudit", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[os.environ.get("SUBAUDIT_CORS", "*")],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        # Unparseable JSON is a 400; schema-valid JSON with bad values is 422.
        if any(err.get("type") == "json_invalid" for err in exc.errors()):
            return JSONResponse(status_code=400, content={"detail": "malformed JSON body"})
        return JSONResponse(status_code=422, content={"detail": exc.errors()})

    def get_audit(match_id: int) -> MatchAudit | JSONResponse:
        audit = store.audits.get(match_id)
        if audit is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown match {match_id}"})
        return audit

    @app.get("/health")
    def health():
        return {"status": "ok", "matches": len(store.audits)}

    @app.get("/matches")
    def matches():
        out = []
        for match_id, audit in sorted(store.audits.items()):
            record = store.matches.get(match_id)
            out.append(
                {
                    "match_id": match_id,
                    "teams": list(record.teams) if record else sorted(
                        {info["team_id"] for info in audit.players.values()}
                    ),
                    "date": record.date.isoformat() if record else None,
                    "n_slices": len(audit.slices),
                }
            )
        return out

    @app.get("/matches/{match_id}/timeline")
    def timeline(match_id: int):
        audit = get_audit(match_id)
        if isinstance(audit, JSONResponse):
            return audit
        return _timeline_payload(audit)

    @app.get("/matches/{match_id}/players/{player_id}")
    def player_series(match_id: int, player_id: int):
        audit = get_audit(match_id)
        if isinstance(audit, JSONResponse):
            return audit
        series = audit.player_series(player_id)
        if not series:
            return JSONResponse(
                status_code=404,
                content={"detail": f"no audited slices for player {player_id}"},
            )
        return {
            "match_id": match_id,
            "player_id": player_id,
            "player": audit.players.get(player_id, {}),
            "series": [result.as_dict(include_trace=True) for result in series],
        }

    @app.post("/matches/{match_id}/whatif")
    async def whatif(match_id: int, request: Request):
        audit = get_audit(match_id)
        if isinstance(audit, JSONResponse):
            return audit
        try:
            body = await request.json()
        except Exception:
            return JSONResponse(status_code=400, content={"detail": "malformed JSON body"})
        if not isinstance(body, dict):
            return JSONResponse(status_code=400, content={"detail": "body must be an object"})
        missing = [key for key in ("slice", "player") if key not in body]
        if missing:
            return JSONResponse(
                status_code=400, content={"detail": f"missing fields: {missing}"}
            )
        try:
            label = int(body["slice"])
            player_id = int(body["player"])
        except (TypeError, ValueError):
            return JSONResponse(
                status_code=400, content={"detail": "slice and player must be integers"}
            )
        overrides = body.get("overrides") or {}
        if not isinstance(overrides, dict):
            return JSONResponse(status_code=400, content={"detail": "overrides must be an object"})
        state = store.states.get((match_id, label, player_id))
        if state is None or state.player_position is Role.GOALKEEPER:
            return JSONResponse(
                status_code=404,
                content={"detail": f"no audited state for player {player_id} at slice {label}"},
            )
        try:
            result = what_if(state, overrides, store.system, store.config)
        except OverrideError as exc:
            return JSONResponse(
                status_code=422, content={"detail": str(exc), "field": exc.field}
            )
        stored = next(
            (r for r in audit.results_for(label) if r.player_id == player_id), None
        )
        # rank the hypothetical value against the stored peers
        peers = [r.p_final for r in audit.results_for(label) if r.player_id != player_id]
        rank = 1 + sum(1 for p in peers if p > result.p_final)
        payload = result.as_dict(include_trace=True)
        payload["rank"] = rank
        return {
            "match_id": match_id,
            "result": payload,
            "stored": stored.as_dict(include_trace=False) if stored else None,
        }

    return app
