"""Human play sessions over HTTP.

Sessions are persisted as append-only event logs, one JSONL file per
session plus an index file, so any session can be rebuilt by replaying
its events through the engine. The API serves the play client and the
batch tooling; state lives server-side and every mutation goes through
the same apply_action the simulations use.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .profiles import (
    DEFAULT_QUESTIONNAIRE,
    LEVEL_SCALE_STATEMENTS,
    LikertResponse,
    PlayerProfile,
    apply_replay_rule,
    build_profile,
    profile_to_json_dict,
)
from .story import (
    Action,
    GameState,
    IllegalActionError,
    StoryDefinition,
    action_label,
    apply_action,
    available_actions,
    describe_state,
    initial_state,
    load_story,
)
from .traces import Trace, trace_to_line


class ServiceError(Exception):
    def __init__(self, code: str, message: str, status: int = 400):
        self.code = code
        self.message = message
        self.status = status
        super().__init__(message)


@dataclass
class Session:
    id: str
    story_id: str
    game_index: int
    prior_session_id: str | None
    state: GameState
    created_at: float
    updated_at: float
    actions: list[tuple[int, Action]] = field(default_factory=list)
    questionnaire: LikertResponse | None = None
    profile: PlayerProfile | None = None
    applied_tokens: dict[str, dict] = field(default_factory=dict)

    def ended(self, definition: StoryDefinition) -> bool:
        from .story import is_terminal
        return is_terminal(definition, self.state) is not None

    def to_trace(self, definition: StoryDefinition) -> Trace:
        from .story import is_terminal
        return Trace(
            session_id=self.id,
            story_id=self.story_id,
            agent_kind="human",
            actions=tuple(self.actions),
            plot_points=tuple(self.state.discovered),
            ending=is_terminal(definition, self.state),
            profile_used=self.profile,
            seed=None,
        )


class SessionStore:
    """File-backed session persistence.

    Each session appends events to data_dir/sessions/<id>.jsonl; an
    index file lists the sessions. Loading replays the event log through
    the engine, which doubles as an integrity check."""

    def __init__(self, stories: dict[str, StoryDefinition], data_dir):
        self.stories = stories
        self.data_dir = Path(data_dir)
        self.sessions_dir = self.data_dir / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.index_path = self.data_dir / "index.json"
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._global_lock = threading.Lock()
        self._load_existing()

    # -- locking

    def lock_for(self, session_id: str) -> threading.Lock:
        with self._global_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    # -- persistence

    def _session_path(self, session_id: str) -> Path:
        return self.sessions_dir / f"{session_id}.jsonl"

    def _append_event(self, session_id: str, event: dict) -> None:
        with open(self._session_path(session_id), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True, separators=(",", ":")) + "\n")

    def _write_index(self) -> None:
        index = {
            sid: {
                "story_id": s.story_id,
                "game_index": s.game_index,
                "created_at": s.created_at,
                "ended": s.ended(self.stories[s.story_id]),
            }
            for sid, s in sorted(self._sessions.items())
        }
        with open(self.index_path, "w", encoding="utf-8") as fh:
            json.dump(index, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def _load_existing(self) -> None:
        for path in sorted(self.sessions_dir.glob("*.jsonl")):
            try:
                self._replay_file(path)
            except Exception as exc:  # a corrupt log should not sink the server
                print(f"warning: skipping session log {path.name}: {exc}")

    def _replay_file(self, path: Path) -> None:
        session: Session | None = None
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                event = json.loads(line)
                kind = event["event"]
                if kind == "created":
                    definition = self.stories[event["story_id"]]
                    session = Session(
                        id=event["session_id"],
                        story_id=event["story_id"],
                        game_index=event["game_index"],
                        prior_session_id=event.get("prior_session_id"),
                        state=initial_state(definition),
                        created_at=event["at"],
                        updated_at=event["at"],
                    )
                elif kind == "action" and session is not None:
                    definition = self.stories[session.story_id]
                    action = Action.from_dict(event["action"])
                    session.state, _ = apply_action(definition, session.state, action)
                    session.actions.append((session.state.tick, action))
                    session.updated_at = event["at"]
                    token = event.get("token")
                    if token:
                        session.applied_tokens[token] = event.get("result", {})
                elif kind == "questionnaire" and session is not None:
                    session.questionnaire = LikertResponse(tuple(event["answers"]))
                    session.profile = PlayerProfile(**event["profile"])
                    session.updated_at = event["at"]
        if session is not None:
            self._sessions[session.id] = session

    # -- operations

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise ServiceError("unknown-session", f"no session {session_id!r}", 404)
        return session

    def create_session(self, story_id: str, prior_session_id: str | None = None) -> Session:
        if story_id not in self.stories:
            raise ServiceError("unknown-story", f"no story {story_id!r}", 404)
        game_index = 1
        if prior_session_id is not None:
            prior = self.get(prior_session_id)
            if not prior.ended(self.stories[prior.story_id]):
                raise ServiceError(
                    "prior-unfinished",
                    f"session {prior_session_id!r} has not reached an ending", 409)
            game_index = prior.game_index + 1
        definition = self.stories[story_id]
        now = time.time()
        session = Session(
            id=secrets.token_urlsafe(16),
            story_id=story_id,
            game_index=game_index,
            prior_session_id=prior_session_id,
            state=initial_state(definition),
            created_at=now,
            updated_at=now,
        )
        self._sessions[session.id] = session
        self._append_event(session.id, {
            "event": "created",
            "session_id": session.id,
            "story_id": story_id,
            "game_index": game_index,
            "prior_session_id": prior_session_id,
            "at": now,
        })
        self._write_index()
        return session

    def apply(self, session_id: str, action: Action, token: str | None = None) -> dict:
        session = self.get(session_id)
        definition = self.stories[session.story_id]
        with self.lock_for(session_id):
            if token is not None and token in session.applied_tokens:
                cached = session.applied_tokens[token]
                if "view" not in cached:
                    # token replayed from the on-disk log: the stored event
                    # keeps only the triggers, so rebuild a current view
                    cached = {**cached, "view": self.view(session_id)}
                return cached
            if session.ended(definition):
                raise ServiceError("session-ended", "the story has ended", 409)
            try:
                new_state, triggered = apply_action(definition, session.state, action)
            except IllegalActionError as exc:
                raise ServiceError("illegal-action", str(exc), 409) from exc
            session.state = new_state
            session.actions.append((new_state.tick, action))
            session.updated_at = time.time()
            result = {"triggered": triggered, "view": self.view(session_id)}
            if token is not None:
                session.applied_tokens[token] = result
            self._append_event(session_id, {
                "event": "action",
                "action": action.to_dict(),
                "token": token,
                "result": {"triggered": triggered},
                "at": session.updated_at,
            })
            if session.ended(definition):
                self._write_index()
            return result

    def store_questionnaire(self, session_id: str, answers: list[int]) -> PlayerProfile:
        session = self.get(session_id)
        with self.lock_for(session_id):
            try:
                response = LikertResponse(tuple(answers))
            except ValueError as exc:
                raise ServiceError("invalid-answers", str(exc), 422) from exc
            profile = build_profile(DEFAULT_QUESTIONNAIRE, response)
            profile = apply_replay_rule(profile, session.game_index)
            session.questionnaire = response
            session.profile = profile
            session.updated_at = time.time()
            self._append_event(session_id, {
                "event": "questionnaire",
                "answers": list(answers),
                "profile": profile.as_dict(),
                "at": session.updated_at,
            })
            return profile

    def view(self, session_id: str) -> dict:
        session = self.get(session_id)
        definition = self.stories[session.story_id]
        view = describe_state(definition, session.state)
        actions = available_actions(definition, session.state)
        view["session_id"] = session.id
        view["story_id"] = session.story_id
        view["game_index"] = session.game_index
        view["questionnaire_done"] = session.questionnaire is not None
        view["actions"] = [
            {**a.to_dict(), "label": action_label(definition, a)} for a in actions
        ]
        return view

    def human_traces(self, story_id: str | None = None, finished_only: bool = False):
        for sid in sorted(self._sessions):
            session = self._sessions[sid]
            if story_id is not None and session.story_id != story_id:
                continue
            definition = self.stories[session.story_id]
            trace = session.to_trace(definition)
            if finished_only and not trace.finished():
                continue
            yield trace


def load_stories(stories_dir) -> dict[str, StoryDefinition]:
    stories = {}
    for path in sorted(Path(stories_dir).glob("*.json")):
        definition = load_story(path)
        stories[definition.id] = definition
    if not stories:
        raise ValueError(f"no stories found under {stories_dir}")
    return stories


def create_app(stories_dir, data_dir, static_dir=None) -> FastAPI:
    stories = load_stories(stories_dir)
    store = SessionStore(stories, data_dir)
    app = FastAPI(title="inplayer session service")
    app.state.store = store

    @app.exception_handler(ServiceError)
    async def service_error_handler(request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message},
        )

    @app.get("/api/health")
    def health():
        return {"status": "ok", "stories": sorted(stories)}

    @app.get("/api/stories")
    def list_stories():
        return [
            {
                "id": d.id,
                "title": d.title,
                "plot_points": len(d.graph.plot_points),
                "endings": len(d.graph.endings),
            }
            for d in stories.values()
        ]

    @app.get("/api/questionnaire")
    def questionnaire():
        return {
            "statements": [
                {
                    "text": s.text,
                    "factor": s.factor,
                    "polarity": s.polarity,
                    "scale": "level" if i < LEVEL_SCALE_STATEMENTS else "agreement",
                }
                for i, s in enumerate(DEFAULT_QUESTIONNAIRE.statements)
            ]
        }

    @app.post("/api/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.json()
        session = store.create_session(
            body.get("story_id", ""), body.get("prior_session_id"))
        return store.view(session.id)

    @app.get("/api/sessions/{session_id}")
    def get_state(session_id: str):
        return store.view(session_id)

    @app.get("/api/sessions/{session_id}/actions")
    def get_actions(session_id: str):
        return store.view(session_id)["actions"]

    @app.post("/api/sessions/{session_id}/actions")
    async def post_action(session_id: str, request: Request):
        body = await request.json()
        try:
            action = Action(body["verb"], body["subject"], body.get("object"))
        except (KeyError, ValueError) as exc:
            raise ServiceError("bad-action", str(exc), 422) from exc
        return store.apply(session_id, action, token=body.get("idempotency_token"))

    @app.post("/api/sessions/{session_id}/questionnaire")
    async def post_questionnaire(session_id: str, request: Request):
        body = await request.json()
        answers = body.get("answers")
        if not isinstance(answers, list):
            raise ServiceError("invalid-answers", "answers must be a list", 422)
        profile = store.store_questionnaire(session_id, answers)
        return profile_to_json_dict(profile)

    @app.get("/api/traces")
    def get_traces(story: str | None = Query(default=None),
                   finished: bool = Query(default=False)):
        lines = "".join(
            trace_to_line(t) + "\n"
            for t in store.human_traces(story_id=story, finished_only=finished)
        )
        return PlainTextResponse(lines, media_type="application/x-ndjson")

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="client")

    return app
