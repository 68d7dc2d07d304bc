"""Session-oriented HTTP API for remote clients (primarily the operator UI).

Verbs: create a session (case + chronic), read the observation, post an
action (advances the game, returns cascade frames for replay), run a
read-only what-if, reset into the next epoch. Sessions live in memory,
expire after an idle timeout, and are fully isolated from one another.
"""
from __future__ import annotations

import os
import threading
import time
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import catalog, chronics, encoding
from .agents import AGENT_KINDS
from .environment import EnvConfig, Environment, overflow_count
from .errors import (
    BadConfig,
    GridGameError,
    SessionFinished,
    UnknownCase,
    UnknownChronic,
    ValidationError,
)

DEFAULT_SESSION_TTL_S = 3600.0

_HTTP_STATUS = {
    "unknown_case": 404,
    "unknown_chronic": 404,
    "session_finished": 410,
    "episode_finished": 409,
    "bad_config": 422,
}


def _status_for(error: GridGameError) -> int:
    if isinstance(error, ValidationError):
        return 422
    return _HTTP_STATUS.get(error.code, 400)


@dataclass
class Session:
    id: str
    case_name: str
    env: Environment
    chronic: chronics.Chronic
    created: float
    last_active: float
    lock: threading.Lock = field(default_factory=threading.Lock)
    # injections fetched for a step that ended in a game over; the next
    # epoch starts from them so the schedule neither rewinds nor skips
    pending_injections: chronics.InjectionSet | None = None


class SessionStore:
    def __init__(self, ttl_s: float = DEFAULT_SESSION_TTL_S):
        self.ttl_s = ttl_s
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def add(self, session: Session) -> None:
        with self._lock:
            self._sessions[session.id] = session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise SessionFinished(f"no session {session_id}")
            if time.monotonic() - session.last_active > self.ttl_s:
                del self._sessions[session_id]
                raise SessionFinished(f"session {session_id} expired")
            session.last_active = time.monotonic()
            return session


def _observation_payload(session: Session):
    env = session.env
    if env.done or env.solution is None:
        return None
    obs = env.observe()
    payload = encoding.observation_to_dict(obs)
    payload["overflow_count"] = overflow_count(obs)
    payload["step_index"] = env.step_index
    return payload


def _element_label(grid, element) -> str:
    from . import grid_model

    if element.kind == grid_model.BRANCH_FROM or element.kind == grid_model.BRANCH_TO:
        branch = grid.branches[element.index]
        return (
            f"line {grid.substations[branch.from_sub].id}-"
            f"{grid.substations[branch.to_sub].id}"
        )
    if element.kind == grid_model.GENERATOR:
        return f"generator G{grid.generators[element.index].bus_id}"
    return f"load C{grid.loads[element.index].bus_id}"


def _structure_payload(env: Environment) -> dict:
    grid = env.grid
    substations = []
    for sub in grid.substations:
        allowed = env.allowed_configurations(sub.index)
        configurations = []
        for cid in allowed:
            a, b = sub.configurations[cid].sides(sub.n_elements)
            configurations.append({"id": cid, "bus_a": list(a), "bus_b": list(b)})
        substations.append(
            {
                "id": sub.id,
                "index": sub.index,
                "elements": [
                    {
                        "kind": el.kind,
                        "index": el.index,
                        "label": _element_label(grid, el),
                    }
                    for el in sub.elements
                ],
                "n_configurations": sub.n_configurations,
                "configurations": configurations,
            }
        )
    branches = [
        {
            "index": br.index,
            "from": grid.substations[br.from_sub].id,
            "to": grid.substations[br.to_sub].id,
            # null = unrated (unlimited) branch
            "thermal_limit_mw": (
                float(env.limits[br.index])
                if np.isfinite(env.limits[br.index])
                else None
            ),
        }
        for br in grid.branches
    ]
    return {"substations": substations, "branches": branches}


def create_app(session_ttl_s: float = DEFAULT_SESSION_TTL_S) -> FastAPI:
    app = FastAPI(title="gridgame service")
    store = SessionStore(ttl_s=session_ttl_s)
    app.state.sessions = store

    @app.exception_handler(GridGameError)
    async def _game_error(request: Request, exc: GridGameError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={
                "schema_version": encoding.SCHEMA_VERSION,
                "error": {
                    "code": exc.code,
                    "message": str(exc),
                    "details": {
                        k: v for k, v in exc.details.items()
                        if isinstance(v, (str, int, float, bool))
                    },
                },
            },
        )

    def respond(payload: dict, status_code: int = 200) -> JSONResponse:
        payload["schema_version"] = encoding.SCHEMA_VERSION
        return JSONResponse(status_code=status_code, content=payload)

    @app.get("/cases")
    def list_cases():
        return respond(
            {
                "cases": catalog.builtin_case_names(),
                "agent_kinds": list(AGENT_KINDS),
            }
        )

    @app.get("/chronics")
    def list_chronics():
        return respond(
            {
                "chronics": {
                    name: chronics.builtin_chronics_for(name)
                    for name in catalog.builtin_case_names()
                }
            }
        )

    @app.post("/sessions", status_code=201)
    def create_session(body: dict):
        case_name = body.get("case")
        chronic_name = body.get("chronic")
        if not case_name:
            raise UnknownCase("request body needs a 'case' field")
        if not chronic_name:
            raise UnknownChronic("request body needs a 'chronic' field")
        grid = catalog.load_case(case_name)
        chronic = chronics.load_chronic(chronic_name, grid)
        try:
            config = EnvConfig.from_dict(body.get("config") or {})
        except (TypeError, ValueError) as exc:
            raise BadConfig(str(exc)) from exc
        env = Environment(grid, config)
        injections = chronic.next()
        if injections is None:
            raise UnknownChronic(f"chronic {chronic_name} is empty")
        env.reset(injections)
        session = Session(
            id=uuid.uuid4().hex,
            case_name=case_name,
            env=env,
            chronic=chronic,
            created=time.monotonic(),
            last_active=time.monotonic(),
        )
        store.add(session)
        return respond(
            {
                "session_id": session.id,
                "case": case_name,
                "chronic": chronic_name,
                "observation": _observation_payload(session),
            },
            status_code=201,
        )

    @app.get("/sessions/{session_id}/observation")
    def get_observation(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return respond(
                {
                    "observation": _observation_payload(session),
                    "done": session.env.done,
                    "remaining_steps": session.chronic.remaining,
                }
            )

    @app.post("/sessions/{session_id}/action")
    def post_action(session_id: str, body: dict):
        session = store.get(session_id)
        with session.lock:
            env = session.env
            action = encoding.action_from_dict(env.grid, body.get("action", {}))
            next_injections = session.chronic.next()
            _, obs, breakdown, done, info = env.step(action, next_injections)
            if done and info.get("load_was_cut") and next_injections is not None:
                session.pending_injections = next_injections
            payload = {
                "reward": encoding.reward_to_dict(breakdown),
                "done": done,
                "game_over": bool(info.get("load_was_cut")),
                "chronic_exhausted": bool(info.get("chronic_exhausted")),
                "cascade_frames": [
                    encoding.frame_to_dict(f) for f in info["cascade_frames"]
                ],
                "observation": _observation_payload(session),
            }
            return respond(payload)

    @app.post("/sessions/{session_id}/simulate")
    def what_if(session_id: str, body: dict):
        session = store.get(session_id)
        with session.lock:
            env = session.env
            action = encoding.action_from_dict(env.grid, body.get("action", {}))
            breakdown, details = env.simulate_detailed(action)
            return respond(
                {
                    "reward": encoding.reward_to_dict(breakdown),
                    "predicted_overflows": list(details["predicted_overflows"]),
                    "would_cut_load": details["load_was_cut"],
                }
            )

    @app.post("/sessions/{session_id}/reset")
    def reset_session(session_id: str):
        """Start the next epoch with the remaining schedule."""
        session = store.get(session_id)
        with session.lock:
            injections = session.pending_injections
            session.pending_injections = None
            if injections is None:
                injections = session.chronic.next()
            if injections is None:
                raise SessionFinished("chronic exhausted; no epoch to start")
            session.env.reset(injections)
            return respond(
                {
                    "observation": _observation_payload(session),
                    "remaining_steps": session.chronic.remaining,
                }
            )

    @app.get("/sessions/{session_id}/layout")
    def get_layout(session_id: str):
        """Drawing coordinates plus the grid structure the selectors need
        (element labels and the legal partitions per substation)."""
        session = store.get(session_id)
        layout = catalog.layout_for(session.case_name)
        if layout is None:
            raise UnknownCase(f"no layout bundled for {session.case_name}")
        return respond(
            {"layout": layout, "structure": _structure_payload(session.env)}
        )

    ui_dir = os.environ.get("GRIDGAME_UI_DIR", "frontend/dist")
    if os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
