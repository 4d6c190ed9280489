"""Profile calibration against annotated human sessions.

Volunteers play the user against a trained policy and rate all six
emotions on a 1-5 scale each turn.  This module replays those sessions
through the trigger detectors and the affect pipeline under a candidate
profile, reports per-turn and per-trigger discrepancies, and derives
multiplicative rescaling suggestions for the trigger-emotion matrix.
Suggestions are written to a file for a human to act on; nothing is
applied automatically.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .domain import DialogueAct, Domain, UserGoal
from .emotion import (
    EMOTIONS,
    TRIGGERS,
    EmotionProfile,
    EmotionState,
    Personality,
    update_state,
    variation,
)
from .triggers import TurnContext, detect_all

_DATA_DIR = Path(__file__).parent / "data"


def load_personalities(path=None) -> dict:
    """Named Big Five presets (uA, uB, ...) shipped with the package."""
    source = Path(path) if path is not None else _DATA_DIR / "personalities.json"
    raw = json.loads(source.read_text())
    return {name: Personality(**values) for name, values in raw.items()}


def level_to_intensity(level: int) -> float:
    """Map the 1-5 annotation scale linearly onto [0, 1]."""
    if level not in (1, 2, 3, 4, 5):
        raise ValueError(f"emotion level must be an integer in 1..5, got {level!r}")
    return (level - 1) / 4


def intensity_to_level(intensity: float) -> int:
    """Nearest annotation level for a model intensity."""
    return int(np.clip(round(intensity * 4), 0, 4)) + 1


@dataclass(frozen=True)
class SessionTurn:
    """One agent act, the user's reply, and the user's emotion ratings."""

    turn_index: int
    agent_act: DialogueAct
    user_act: DialogueAct | None
    emotion_labels: dict  # emotion name -> level 1..5

    def __post_init__(self):
        missing = set(EMOTIONS) - set(self.emotion_labels)
        if missing:
            raise ValueError(f"labels missing emotions: {sorted(missing)}")
        for name, level in self.emotion_labels.items():
            level_to_intensity(level)

    def label_intensities(self) -> np.ndarray:
        return np.array([level_to_intensity(self.emotion_labels[e]) for e in EMOTIONS])


@dataclass
class AnnotatedSession:
    """A recorded human (or simulated) dialogue with per-turn ratings."""

    personality: Personality
    domain: str
    goal: UserGoal
    turns: list
    opening_user_act: DialogueAct | None = None
    session_id: str = ""
    volunteer: str = ""
    success: bool | None = None

    def to_lines(self) -> list:
        meta = {
            "personality": self.personality.as_array().tolist(),
            "domain": self.domain,
            "goal": self.goal.to_dict(),
            "opening_user_act": self.opening_user_act.to_dict() if self.opening_user_act else None,
            "session_id": self.session_id,
            "volunteer": self.volunteer,
            "success": self.success,
        }
        lines = [json.dumps(meta)]
        for t in self.turns:
            lines.append(json.dumps({
                "turn_index": t.turn_index,
                "agent_act": t.agent_act.to_dict(),
                "user_act": t.user_act.to_dict() if t.user_act else None,
                "emotion_labels": t.emotion_labels,
            }))
        return lines

    def save(self, path) -> None:
        Path(path).write_text("\n".join(self.to_lines()) + "\n")

    @classmethod
    def from_lines(cls, lines) -> "AnnotatedSession":
        meta = json.loads(lines[0])
        turns = []
        for line in lines[1:]:
            if not line.strip():
                continue
            raw = json.loads(line)
            turns.append(SessionTurn(
                turn_index=int(raw["turn_index"]),
                agent_act=DialogueAct.from_dict(raw["agent_act"]),
                user_act=DialogueAct.from_dict(raw["user_act"]) if raw.get("user_act") else None,
                emotion_labels={e: int(v) for e, v in raw["emotion_labels"].items()},
            ))
        p = meta["personality"]
        return cls(
            personality=Personality(*p),
            domain=meta["domain"],
            goal=UserGoal.from_dict(meta["goal"]),
            turns=turns,
            opening_user_act=(
                DialogueAct.from_dict(meta["opening_user_act"]) if meta.get("opening_user_act") else None
            ),
            session_id=meta.get("session_id", ""),
            volunteer=meta.get("volunteer", ""),
            success=meta.get("success"),
        )

    @classmethod
    def load(cls, path) -> "AnnotatedSession":
        return cls.from_lines(Path(path).read_text().splitlines())


@dataclass
class DiscrepancyReport:
    """Simulated-vs-annotated intensities for every turn of one session."""

    session_id: str
    turn_rows: list  # dicts: turn_index, triggers, sim, label, sim_delta, label_delta
    per_trigger_error: dict  # trigger -> mean signed (sim - label) error, or None
    rmse: float


def _replay_rows(session: AnnotatedSession, profile: EmotionProfile, domain: Domain) -> list:
    """Re-run trigger detection and emotion updates over the session's
    agent acts, yielding per-turn comparison rows."""
    invalid = []
    for t in session.turns:
        try:
            t.agent_act.validate(domain.schema)
            if t.user_act is not None:
                t.user_act.validate(domain.schema)
        except ValueError as exc:
            invalid.append(f"turn {t.turn_index}: {exc}")
    if invalid:
        raise ValueError("session contains schema-invalid acts: " + "; ".join(invalid))

    informed = set()
    user_requested = set()
    if session.opening_user_act is not None:
        informed.update(session.opening_user_act.inform_slots)
        user_requested.update(session.opening_user_act.request_slots)
    agent_history: list = []
    emotion = EmotionState()
    prev_sim = emotion.as_array()
    prev_label = np.zeros(len(EMOTIONS))  # annotations start from the neutral level 1

    rows = []
    for t in session.turns:
        ctx = TurnContext(
            turn_index=t.turn_index,
            agent_action=t.agent_act,
            user_goal=session.goal,
            informed_slots=frozenset(informed),
            user_requested_slots=frozenset(user_requested),
            requested_history=tuple(agent_history),
            tau=profile.tau,
        )
        triggers = detect_all(ctx)
        v = variation(session.personality, triggers, profile)
        emotion = update_state(emotion, session.personality, v, profile)
        sim = emotion.as_array()
        label = t.label_intensities()
        rows.append({
            "turn_index": t.turn_index,
            "triggers": triggers,
            "sim": sim,
            "label": label,
            "sim_delta": sim - prev_sim,
            "label_delta": label - prev_label,
        })
        prev_sim, prev_label = sim, label

        agent_history.extend(sorted(t.agent_act.request_slots))
        if t.user_act is not None:
            informed.update(t.user_act.inform_slots)
            user_requested.update(t.user_act.request_slots)
    return rows


def replay_and_diff(session: AnnotatedSession, profile: EmotionProfile, domain: Domain) -> DiscrepancyReport:
    """Deterministic replay comparing simulated intensities to the labels."""
    rows = _replay_rows(session, profile, domain)
    diffs = np.stack([r["sim"] - r["label"] for r in rows]) if rows else np.zeros((0, len(EMOTIONS)))
    rmse = float(np.sqrt(np.mean(diffs**2))) if rows else 0.0

    per_trigger = {}
    for k, trig in enumerate(TRIGGERS):
        fired = [r for r in rows if r["triggers"].as_array()[k] == 1.0]
        if fired:
            per_trigger[trig] = float(np.mean([r["sim"] - r["label"] for r in fired]))
        else:
            per_trigger[trig] = None
    return DiscrepancyReport(
        session_id=session.session_id,
        turn_rows=rows,
        per_trigger_error=per_trigger,
        rmse=rmse,
    )


def suggest_scaling(reports: list) -> dict:
    """Per-(trigger, emotion) multiplicative correction for m_te.

    Each defined cell is the ratio of the mean annotated per-turn delta to
    the mean simulated delta over turns where the trigger fired.  Cells
    with no fired events or a zero simulated delta are omitted.  The output
    is advice for a manual matrix edit, never applied automatically.
    """
    if not reports:
        raise ValueError("at least one discrepancy report is required")
    suggestions: dict = {}
    for k, trig in enumerate(TRIGGERS):
        fired_rows = [
            r for rep in reports for r in rep.turn_rows
            if r["triggers"].as_array()[k] == 1.0
        ]
        if not fired_rows:
            continue
        sim_mean = np.mean([r["sim_delta"] for r in fired_rows], axis=0)
        label_mean = np.mean([r["label_delta"] for r in fired_rows], axis=0)
        cells = {}
        for j, emo in enumerate(EMOTIONS):
            if sim_mean[j] != 0.0:
                cells[emo] = float(label_mean[j] / sim_mean[j])
        if cells:
            suggestions[trig] = cells
    return suggestions


def write_suggestions(suggestions: dict, path) -> None:
    Path(path).write_text(json.dumps(suggestions, indent=2) + "\n")


def label_session_with_replay(session: AnnotatedSession, profile: EmotionProfile, domain: Domain) -> AnnotatedSession:
    """Fill a session's labels from its own simulated replay.

    Intensities are snapped to the nearest 1-5 level, so the round trip is
    exact (self-replay discrepancy zero) whenever the profile keeps the
    trajectory on the quarter-intensity grid.
    """
    rows = _replay_rows(session, profile, domain)
    turns = []
    for t, row in zip(session.turns, rows):
        labels = {e: intensity_to_level(row["sim"][j]) for j, e in enumerate(EMOTIONS)}
        turns.append(SessionTurn(t.turn_index, t.agent_act, t.user_act, labels))
    return AnnotatedSession(
        personality=session.personality,
        domain=session.domain,
        goal=session.goal,
        turns=turns,
        opening_user_act=session.opening_user_act,
        session_id=session.session_id,
        volunteer=session.volunteer,
        success=session.success,
    )


def write_report_csv(report: DiscrepancyReport, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["turn_index", "emotion", "sim", "label", "sim_delta", "label_delta", "triggers"])
        for row in report.turn_rows:
            fired = ",".join(
                trig for k, trig in enumerate(TRIGGERS) if row["triggers"].as_array()[k] == 1.0
            )
            for j, emo in enumerate(EMOTIONS):
                writer.writerow([
                    row["turn_index"], emo,
                    repr(float(row["sim"][j])), repr(float(row["label"][j])),
                    repr(float(row["sim_delta"][j])), repr(float(row["label_delta"][j])),
                    fired,
                ])


def format_report(report: DiscrepancyReport) -> str:
    lines = [
        f"session: {report.session_id or '(unnamed)'}",
        f"turns compared: {len(report.turn_rows)}",
        f"overall rmse: {report.rmse:.6f}",
        "mean signed error (sim - label) by trigger:",
    ]
    for trig in TRIGGERS:
        err = report.per_trigger_error[trig]
        lines.append(f"  {trig.upper():>3}: " + ("no events" if err is None else f"{err:+.6f}"))
    return "\n".join(lines)
