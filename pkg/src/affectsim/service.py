"""Human-in-the-loop session service.

Serves a trained policy so a person can play the user role: each session
samples a goal card, the agent opens with a greeting, and every posted
user turn carries a dialogue act plus six 1-5 emotion ratings.  Action
selection is forced greedy so a stored transcript replays bit-identically
through the same checkpoint.  Sessions persist as append-only JSON-lines
event logs; the export endpoint writes calibration-ready session files
and the cumulative human success-rate curve.
"""

from __future__ import annotations

import csv
import json
import random
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .calibration import AnnotatedSession, SessionTurn
from .domain import DialogueAct, Domain, UserGoal, kb_lookup, load_domain, sample_goal
from .emotion import EMOTIONS, Personality
from .policy import DQNAgent, AgentDialogueView, materialize

ONGOING = "ongoing"
SUCCESS = "success"
FAILURE = "failure"
TERMINATED = "terminated"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _error(status: int, code: str, message: str, field_name: str | None = None) -> JSONResponse:
    body = {"code": code, "message": message}
    if field_name is not None:
        body["field"] = field_name
    return JSONResponse(status_code=status, content=body)


class ActPayload(BaseModel):
    intent: str
    inform_slots: dict = Field(default_factory=dict)
    request_slots: list = Field(default_factory=list)


class CreateSessionRequest(BaseModel):
    domain: str | None = None
    checkpoint: str | None = None
    personality: dict = Field(default_factory=dict)
    volunteer: str = ""
    seed: int | None = None


class PostTurnRequest(BaseModel):
    user_act: ActPayload
    emotion_labels: dict


@dataclass
class Session:
    session_id: str
    domain_name: str
    checkpoint: str
    volunteer: str
    personality: Personality
    goal: UserGoal
    view: AgentDialogueView
    agent: DQNAgent
    transcript: list = field(default_factory=list)
    status: str = ONGOING
    obtained: dict = field(default_factory=dict)
    turn: int = 0
    created: str = field(default_factory=_now)
    updated: str = field(default_factory=_now)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def snapshot(self) -> dict:
        return {
            "session_id": self.session_id,
            "domain": self.domain_name,
            "checkpoint": self.checkpoint,
            "volunteer": self.volunteer,
            "goal": self.goal.to_dict(),
            "status": self.status,
            "turn": self.turn,
            "transcript": list(self.transcript),
            "created": self.created,
            "updated": self.updated,
        }


class HilService:
    """Session registry plus the dialogue mechanics behind the endpoints."""

    def __init__(self, data_dir, default_domain: str = "movie",
                 default_checkpoint: str | None = None, max_turns: int = 40):
        self.data_dir = Path(data_dir)
        (self.data_dir / "sessions").mkdir(parents=True, exist_ok=True)
        self.default_domain = default_domain
        self.default_checkpoint = default_checkpoint
        self.max_turns = max_turns
        self.sessions: dict = {}
        self._domains: dict = {}
        self._agents: dict = {}
        self._registry_lock = threading.Lock()
        self._session_counter = 0

    # ---- helpers ---------------------------------------------------------

    def _domain(self, name: str) -> Domain:
        if name not in self._domains:
            self._domains[name] = load_domain(name)
        return self._domains[name]

    def _agent(self, checkpoint: str, domain: Domain) -> DQNAgent:
        key = (checkpoint, domain.name)
        if key not in self._agents:
            self._agents[key] = DQNAgent.load(checkpoint, domain)
        return self._agents[key]

    def _log(self, session: Session, record: dict) -> None:
        path = self.data_dir / "sessions" / f"{session.session_id}.jsonl"
        with path.open("a") as fh:
            fh.write(json.dumps(record) + "\n")

    # ---- operations --------------------------------------------------------

    def create_session(self, req: CreateSessionRequest) -> Session:
        domain_name = req.domain or self.default_domain
        checkpoint = req.checkpoint or self.default_checkpoint
        if checkpoint is None or not Path(checkpoint).exists():
            raise FileNotFoundError(f"policy checkpoint not found: {checkpoint}")
        domain = self._domain(domain_name)
        agent = self._agent(checkpoint, domain)

        with self._registry_lock:
            self._session_counter += 1
            counter = self._session_counter
        rng = random.Random(req.seed if req.seed is not None else counter)
        goal = sample_goal(domain, rng, unsat_prob=0.0)
        personality = Personality(**req.personality) if req.personality else Personality(0.5, 0.5, 0.5, 0.5, 0.5)

        session = Session(
            session_id=uuid.uuid4().hex,
            domain_name=domain_name,
            checkpoint=checkpoint,
            volunteer=req.volunteer,
            personality=personality,
            goal=goal,
            view=AgentDialogueView(domain, self.max_turns),
            agent=agent,
        )
        opening = DialogueAct(intent="greeting")
        session.view.observe_agent(opening)
        session.turn = 1
        session.transcript.append({"role": "agent", "turn": 1, "act": opening.to_dict()})
        with self._registry_lock:
            self.sessions[session.session_id] = session
        self._log(session, {
            "event": "created", "session": {
                "session_id": session.session_id,
                "domain": domain_name,
                "checkpoint": checkpoint,
                "volunteer": session.volunteer,
                "personality": personality.as_array().tolist(),
                "goal": goal.to_dict(),
                "created": session.created,
            },
        })
        self._log(session, {"event": "agent_act", "turn": 1, "act": opening.to_dict()})
        return session

    def post_turn(self, session_id: str, req: PostTurnRequest):
        session = self.sessions.get(session_id)
        if session is None:
            raise KeyError(session_id)
        with session.lock:
            if session.status != ONGOING:
                raise RuntimeError(f"session is {session.status}")
            domain = self._domain(session.domain_name)

            labels = self._validate_labels(req.emotion_labels)
            act = DialogueAct(
                intent=req.user_act.intent,
                inform_slots=dict(req.user_act.inform_slots),
                request_slots=frozenset(req.user_act.request_slots),
            )
            act.validate(domain.schema)

            session.turn += 1
            session.transcript.append({
                "role": "user", "turn": session.turn,
                "act": act.to_dict(), "emotion_labels": labels,
            })
            session.view.observe_user(act)
            self._log(session, {
                "event": "user_act", "turn": session.turn,
                "act": act.to_dict(), "emotion_labels": labels,
            })

            agent_act = None
            if act.intent == "terminating":
                session.status = TERMINATED
            elif act.intent in ("thanks", "closing"):
                session.status = SUCCESS if self._goal_met(session, domain) else FAILURE
            elif session.turn + 1 > self.max_turns:
                session.status = FAILURE
            else:
                agent_act = self._agent_reply(session, domain)

            if session.status != ONGOING:
                self._log(session, {"event": "status", "status": session.status})
            session.updated = _now()
            return agent_act, session.status

    def _agent_reply(self, session: Session, domain: Domain) -> DialogueAct:
        session.view.turn = session.turn + 1
        index = session.agent.select(session.view, greedy=True)  # reproducible HIL mode
        agent_act = materialize(session.view, session.agent.actions[index])
        session.view.observe_agent(agent_act)
        session.turn += 1
        for slot, value in agent_act.inform_slots.items():
            if slot in session.goal.request_slots:
                session.obtained[slot] = value
        session.transcript.append({"role": "agent", "turn": session.turn, "act": agent_act.to_dict()})
        self._log(session, {"event": "agent_act", "turn": session.turn, "act": agent_act.to_dict()})
        return agent_act

    def _goal_met(self, session: Session, domain: Domain) -> bool:
        if not session.goal.request_slots <= set(session.obtained):
            return False
        merged = {**session.goal.inform_slots, **session.obtained}
        return bool(kb_lookup(domain.kb, merged))

    @staticmethod
    def _validate_labels(labels: dict) -> dict:
        missing = set(EMOTIONS) - set(labels)
        if missing:
            raise ValueError(f"emotion_labels missing: {sorted(missing)}|emotion_labels")
        clean = {}
        for name in EMOTIONS:
            value = labels[name]
            if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
                raise ValueError(f"level for {name!r} must be an integer in 1..5|emotion_labels.{name}")
            clean[name] = value
        extra = set(labels) - set(EMOTIONS)
        if extra:
            raise ValueError(f"unknown emotions: {sorted(extra)}|emotion_labels")
        return clean

    # ---- export ------------------------------------------------------------

    def to_annotated(self, session: Session) -> AnnotatedSession:
        """Pair each agent act with the following user reply and its labels."""
        turns = []
        pending = None
        for entry in session.transcript:
            if entry["role"] == "agent":
                pending = entry
            elif pending is not None:
                turns.append(SessionTurn(
                    turn_index=pending["turn"],
                    agent_act=DialogueAct.from_dict(pending["act"]),
                    user_act=DialogueAct.from_dict(entry["act"]),
                    emotion_labels=entry["emotion_labels"],
                ))
                pending = None
        return AnnotatedSession(
            personality=session.personality,
            domain=session.domain_name,
            goal=session.goal,
            turns=turns,
            session_id=session.session_id,
            volunteer=session.volunteer,
            success=session.status == SUCCESS,
        )

    def export_sessions(self, volunteer: str | None = None, terminal_only: bool = True):
        """Write calibration session files and the success curve CSV."""
        export_dir = self.data_dir / "export"
        export_dir.mkdir(parents=True, exist_ok=True)
        with self._registry_lock:
            ordered = sorted(self.sessions.values(), key=lambda s: s.created)
        selected = [
            s for s in ordered
            if (volunteer is None or s.volunteer == volunteer)
            and (not terminal_only or s.status != ONGOING)
        ]
        paths = []
        for s in selected:
            annotated = self.to_annotated(s)
            path = export_dir / f"session_{s.session_id}.jsonl"
            annotated.save(path)
            paths.append(path)

        curve_path = export_dir / "human_curve.csv"
        successes = 0
        rows = []
        for i, s in enumerate(selected, start=1):
            successes += int(s.status == SUCCESS)
            rows.append((i, s.session_id, int(s.status == SUCCESS), successes / i))
        with curve_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["session_index", "session_id", "success", "cumulative_success_rate"])
            for row in rows:
                writer.writerow([row[0], row[1], row[2], repr(row[3])])
        return paths, curve_path, rows


def create_app(service: HilService, static_dir=None) -> FastAPI:
    app = FastAPI(title="affectsim HIL service")
    app.state.service = service

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request, exc):  # keep the documented error shape
        first = exc.errors()[0] if exc.errors() else {}
        field_name = ".".join(str(part) for part in first.get("loc", ()) if part != "body")
        return _error(422, "invalid_request", first.get("msg", "invalid request body"),
                      field_name or None)

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        try:
            session = service.create_session(req)
        except FileNotFoundError as exc:
            return _error(404, "checkpoint_not_found", str(exc), "checkpoint")
        except (ValueError, TypeError) as exc:
            return _error(422, "invalid_request", str(exc), "personality")
        snap = session.snapshot()
        snap["agent_act"] = session.transcript[0]["act"]
        return snap

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = service.sessions.get(session_id)
        if session is None:
            return _error(404, "session_not_found", f"no session {session_id}")
        return session.snapshot()

    @app.post("/sessions/{session_id}/turns")
    def post_turn(session_id: str, req: PostTurnRequest):
        try:
            agent_act, status = service.post_turn(session_id, req)
        except KeyError:
            return _error(404, "session_not_found", f"no session {session_id}")
        except RuntimeError as exc:
            return _error(409, "session_terminal", str(exc))
        except ValueError as exc:
            message, _, field_name = str(exc).partition("|")
            return _error(422, "invalid_turn", message, field_name or None)
        return {
            "agent_act": agent_act.to_dict() if agent_act is not None else None,
            "status": status,
            "turn": service.sessions[session_id].turn,
        }

    @app.get("/export")
    def export(volunteer: str | None = None):
        paths, curve_path, rows = service.export_sessions(volunteer=volunteer)
        return {
            "session_files": [str(p) for p in paths],
            "curve_file": str(curve_path),
            "curve": [
                {"session_index": i, "session_id": sid, "success": ok, "cumulative_success_rate": rate}
                for i, sid, ok, rate in rows
            ],
        }

    @app.get("/schema/{domain_name}")
    def get_schema(domain_name: str):
        try:
            domain = service._domain(domain_name)
        except FileNotFoundError as exc:
            return _error(404, "domain_not_found", str(exc), "domain")
        return domain.schema.to_dict()

    if static_dir is not None and Path(static_dir).exists():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")
    return app
