"""HTTP face of the steering loop: windows out, selections in.

Sessions live in memory; their artifacts persist to the run directory
as usual.  Codes travel as decimal strings because they can exceed any
fixed-width integer.  Selection handling is serialized per session: a
second selection arriving while one is being applied gets 409 instead
of waiting, so exactly one concurrent click wins.

Endpoints:

    GET  /stages                          registry listing
    GET  /sessions                        ids and status of live sessions
    POST /sessions                        body: run config mapping ({} uses
                                          the server's default config)
    GET  /sessions/{sid}                  current snapshot
    GET  /sessions/{sid}/candidates/{code}/image/{phase}
                                          phase PNG; phases veni/vidi/vici
                                          plus <phase>_render for charts
    POST /sessions/{sid}/selection        body: {"code": "17"} or
                                          {"code": null} to stop
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import Response
from fastapi.staticfiles import StaticFiles

from .codec import settings_values
from .config import RunConfig, build_run_config, to_session_config
from .explorer import (
    SessionState,
    Terminated,
    ValidationError,
    apply_selection,
    evaluate_window,
    init_session,
    state_summary,
)
from .pipeline import list_stages
from .runio import PHASES, png_bytes

__all__ = ["create_app", "SessionManager"]


@dataclass
class _Session:
    sid: str
    state: Union[SessionState, Terminated]
    lock: threading.Lock = field(default_factory=threading.Lock)
    timer: Optional[threading.Timer] = None

    @property
    def terminated(self) -> bool:
        return isinstance(self.state, Terminated)


class SessionManager:
    """Owns the live sessions; one writer per session at a time."""

    def __init__(self) -> None:
        self._sessions: dict[str, _Session] = {}
        self._guard = threading.Lock()

    def create(self, run_config: RunConfig) -> _Session:
        sid = uuid.uuid4().hex[:12]
        session_config = to_session_config(run_config, output_root=run_config.output_root / sid)
        state = evaluate_window(init_session(session_config))
        session = _Session(sid=sid, state=state)
        with self._guard:
            self._sessions[sid] = session
        self._arm_timer(session)
        return session

    def get(self, sid: str) -> _Session:
        try:
            return self._sessions[sid]
        except KeyError:
            raise HTTPException(404, f"unknown session {sid!r}") from None

    def all(self) -> list[_Session]:
        with self._guard:
            return list(self._sessions.values())

    def select(self, sid: str, code: Optional[int]) -> _Session:
        session = self.get(sid)
        if not session.lock.acquire(blocking=False):
            raise HTTPException(409, "a selection for this session is already being processed")
        try:
            if session.terminated:
                raise HTTPException(409, "session already terminated")
            session.state = apply_selection(session.state, code)
        finally:
            session.lock.release()
        self._arm_timer(session)
        return session

    def _timeout(self, session: _Session) -> None:
        # The pause ran out: take the current settings and stop.
        with session.lock:
            if not session.terminated:
                session.state = apply_selection(session.state, None)

    def _arm_timer(self, session: _Session) -> None:
        if session.timer is not None:
            session.timer.cancel()
            session.timer = None
        if session.terminated:
            return
        timeout = session.state.config.pause_timeout
        if timeout is None:
            return
        session.timer = threading.Timer(timeout, self._timeout, args=(session,))
        session.timer.daemon = True
        session.timer.start()


def _image_urls(sid: str, candidate) -> dict[str, str]:
    base = f"/sessions/{sid}/candidates/{candidate.code}/image"
    urls = {}
    if candidate.outputs:
        triple = candidate.outputs[0]
        for phase, output in zip(PHASES, triple):
            urls[phase] = f"{base}/{phase}"
            if output.rendering is not None:
                urls[f"{phase}_render"] = f"{base}/{phase}_render"
    return urls


def snapshot(session: _Session) -> dict:
    """A plain-JSON view of the session: the wire format of the loop."""
    state = session.state
    if isinstance(state, Terminated):
        schemas = state.config.schemas
        return {
            "session_id": session.sid,
            "status": "terminated",
            "iteration": state.iteration,
            "final_indices": list(state.final_settings),
            "final_values": {
                schema.name: value
                for schema, value in zip(
                    schemas, settings_values(state.final_settings, schemas)
                )
            },
            "history": [[i, str(code)] for i, code in state.history],
        }
    summary = state_summary(state)
    summary["session_id"] = session.sid
    summary["status"] = "active"
    by_code = {candidate.code: candidate for candidate in state.window}
    for entry in summary["window"]:
        candidate = by_code[int(entry["code"])]
        entry["images"] = _image_urls(session.sid, candidate)
        entry["thumbnail"] = entry["images"].get("vici")
    return summary


def create_app(
    default_config: Optional[RunConfig] = None, ui_dir: Union[str, Path, None] = None
) -> FastAPI:
    """Build the application; `default_config` backs empty POST /sessions bodies."""
    app = FastAPI(title="vvv", docs_url=None, redoc_url=None)
    manager = SessionManager()
    app.state.manager = manager

    @app.get("/stages")
    def stages() -> dict:
        return {
            "stages": [
                {
                    "id": stage.id,
                    "phase": stage.phase.value,
                    "params": [
                        {"name": s.name, "min": s.min, "step": s.step, "count": s.count}
                        for s in stage.default_schemas
                    ],
                }
                for stage in list_stages()
            ]
        }

    @app.get("/sessions")
    def sessions() -> dict:
        return {
            "sessions": [
                {
                    "session_id": s.sid,
                    "status": "terminated" if s.terminated else "active",
                    "iteration": s.state.iteration,
                }
                for s in manager.all()
            ]
        }

    @app.post("/sessions", status_code=201)
    def create_session(payload: Optional[dict] = Body(default=None)) -> dict:
        if payload:
            try:
                run_config = build_run_config(payload)
            except ValidationError as exc:
                raise HTTPException(400, exc.errors)
        elif default_config is not None:
            run_config = default_config
        else:
            raise HTTPException(400, "no run configuration given and no server default")
        try:
            session = manager.create(run_config)
        except ValidationError as exc:
            raise HTTPException(400, exc.errors)
        except (FileNotFoundError, ValueError, OSError) as exc:
            raise HTTPException(400, f"cannot load inputs: {exc}")
        return snapshot(session)

    @app.get("/sessions/{sid}")
    def get_session(sid: str) -> dict:
        return snapshot(manager.get(sid))

    @app.get("/sessions/{sid}/candidates/{code}/image/{phase}")
    def candidate_image(sid: str, code: str, phase: str) -> Response:
        session = manager.get(sid)
        state = session.state
        if isinstance(state, Terminated):
            raise HTTPException(409, "session terminated")
        if not code.isdigit():
            raise HTTPException(404, f"no candidate {code!r}")
        candidate = next((c for c in state.window if c.code == int(code)), None)
        if candidate is None:
            raise HTTPException(404, f"code {code} is not in the current window")
        if not candidate.feasible:
            raise HTTPException(409, f"candidate {code} is infeasible: {candidate.infeasible_reason}")
        if candidate.outputs is None:
            raise HTTPException(409, f"candidate {code} failed to evaluate: {candidate.error}")
        base_phase, _, render = phase.partition("_")
        if base_phase not in PHASES or (render and render != "render"):
            raise HTTPException(404, f"unknown phase {phase!r}")
        output = candidate.outputs[0][PHASES.index(base_phase)]
        image = output.rendering if render else output.image
        if image is None:
            raise HTTPException(404, f"candidate {code} has no {phase} image")
        return Response(content=png_bytes(image), media_type="image/png")

    @app.post("/sessions/{sid}/selection")
    def post_selection(sid: str, payload: dict = Body(...)) -> dict:
        if "code" not in payload:
            raise HTTPException(422, 'body must be {"code": <decimal string or null>}')
        raw = payload["code"]
        if raw is None:
            code = None
        else:
            text = str(raw)
            if not text.isdigit():
                raise HTTPException(422, f"not a code: {raw!r}")
            code = int(text)
        try:
            session = manager.select(sid, code)
        except ValueError as exc:  # SelectionError and kin
            raise HTTPException(422, str(exc))
        return snapshot(session)

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
