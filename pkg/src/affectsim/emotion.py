"""Linear affect pipeline: trigger-driven variation, state update, decay.

The user's affective state is a 6-vector of Ekman emotion intensities that
evolves once per dialogue turn.  Detected trigger events produce a signed
variation vector, a personality-weighted update adds it to the running
state, and a constant per-emotion decay pulls intensities back toward zero.
A normalized view of the state gates early termination of the dialogue.

All operations are pure functions of their inputs (plus an explicitly
passed random stream for the termination lottery), so values can be shared
freely across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

EMOTIONS = ("angry", "disgust", "fear", "happy", "sad", "surprise")
TRIGGERS = ("od", "ir", "rr", "rq", "in")

# Indices of the emotions counted as negative by the termination rule.
NEGATIVE_EMOTION_INDICES = (0, 1, 2, 4)  # angry, disgust, fear, sad

_DATA_DIR = Path(__file__).parent / "data"


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class Personality:
    """Big Five weight vector: each dimension scales emotional sensitivity."""

    open: float
    cons: float
    extra: float
    agree: float
    neuro: float

    def __post_init__(self):
        for name in ("open", "cons", "extra", "agree", "neuro"):
            _check_unit(f"personality.{name}", getattr(self, name))

    def as_array(self) -> np.ndarray:
        return np.array([self.open, self.cons, self.extra, self.agree, self.neuro])


@dataclass(frozen=True)
class EmotionState:
    """Six Ekman emotion intensities plus the count of updates applied."""

    angry: float = 0.0
    disgust: float = 0.0
    fear: float = 0.0
    happy: float = 0.0
    sad: float = 0.0
    surprise: float = 0.0
    turn_index: int = 0

    def __post_init__(self):
        for name in EMOTIONS:
            _check_unit(f"emotion.{name}", getattr(self, name))
        if self.turn_index < 0:
            raise ValueError("turn_index must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in EMOTIONS])

    @classmethod
    def from_array(cls, values: Sequence[float], turn_index: int = 0) -> "EmotionState":
        if len(values) != len(EMOTIONS):
            raise ValueError(f"expected {len(EMOTIONS)} intensities, got {len(values)}")
        return cls(*(float(v) for v in values), turn_index=turn_index)


@dataclass(frozen=True)
class TriggerVector:
    """Binary flags for the five per-turn trigger events.

    ``ir`` and ``rr`` are mutually exclusive: an agent act cannot be both
    irrelevant and relevant to the goal.  All other triggers may co-fire.
    """

    od: int = 0
    ir: int = 0
    rr: int = 0
    rq: int = 0
    in_: int = 0

    def __post_init__(self):
        for name in ("od", "ir", "rr", "rq", "in_"):
            if getattr(self, name) not in (0, 1):
                raise ValueError(f"trigger.{name} must be 0 or 1")
        if self.ir and self.rr:
            raise ValueError("ir and rr are mutually exclusive")

    def as_array(self) -> np.ndarray:
        return np.array([self.od, self.ir, self.rr, self.rq, self.in_], dtype=float)

    def any(self) -> bool:
        return bool(self.od or self.ir or self.rr or self.rq or self.in_)


@dataclass(frozen=True)
class EmotionVariation:
    """Signed per-emotion delta produced by one turn's triggers."""

    values: tuple

    def __post_init__(self):
        if len(self.values) != len(EMOTIONS):
            raise ValueError(f"expected {len(EMOTIONS)} deltas, got {len(self.values)}")
        arr = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("variation components must be finite")
        object.__setattr__(self, "values", tuple(float(v) for v in arr))

    def as_array(self) -> np.ndarray:
        return np.array(self.values)


def _frozen_array(values, shape, name, low, high) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} entries must be finite")
    if arr.min() < low or arr.max() > high:
        raise ValueError(f"{name} entries must lie in [{low}, {high}]")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class EmotionProfile:
    """Weight matrices and thresholds driving the affect pipeline.

    m_te maps fired triggers to signed emotion deltas (negative entries let
    positive events reduce anger).  m_pt maps personality to per-trigger
    attention, m_pe to per-emotion importance; both are non-negative.
    decay_c holds the per-emotion constant decay rates.  eta_b and p_term
    parameterize the termination lottery; tau is the per-domain turn count
    past which a dialogue counts as overlong.
    """

    m_te: np.ndarray
    m_pt: np.ndarray
    m_pe: np.ndarray
    decay_c: np.ndarray
    eta_b: float = 0.5
    p_term: float = 0.0
    tau: int = 20

    def __post_init__(self):
        n_t, n_e, n_p = len(TRIGGERS), len(EMOTIONS), 5
        object.__setattr__(self, "m_te", _frozen_array(self.m_te, (n_t, n_e), "m_te", -1.0, 1.0))
        object.__setattr__(self, "m_pt", _frozen_array(self.m_pt, (n_p, n_t), "m_pt", 0.0, 1.0))
        object.__setattr__(self, "m_pe", _frozen_array(self.m_pe, (n_p, n_e), "m_pe", 0.0, 1.0))
        object.__setattr__(self, "decay_c", _frozen_array(self.decay_c, (n_e,), "decay_c", 0.0, 1.0))
        _check_unit("eta_b", self.eta_b)
        _check_unit("p_term", self.p_term)
        if not (isinstance(self.tau, int) and self.tau >= 1):
            raise ValueError(f"tau must be a positive integer, got {self.tau!r}")

    def replace(self, **changes) -> "EmotionProfile":
        fields = dict(
            m_te=self.m_te, m_pt=self.m_pt, m_pe=self.m_pe,
            decay_c=self.decay_c, eta_b=self.eta_b, p_term=self.p_term, tau=self.tau,
        )
        fields.update(changes)
        return EmotionProfile(**fields)

    def to_dict(self) -> dict:
        return {
            "m_te": self.m_te.tolist(),
            "m_pt": self.m_pt.tolist(),
            "m_pe": self.m_pe.tolist(),
            "decay_c": self.decay_c.tolist(),
            "eta_b": self.eta_b,
            "p_term": self.p_term,
            "tau": self.tau,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EmotionProfile":
        return cls(
            m_te=data["m_te"],
            m_pt=data["m_pt"],
            m_pe=data["m_pe"],
            decay_c=data["decay_c"],
            eta_b=float(data["eta_b"]),
            p_term=float(data["p_term"]),
            tau=int(data["tau"]),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "EmotionProfile":
        return cls.from_dict(json.loads(Path(path).read_text()))


def default_profile(domain: str) -> EmotionProfile:
    """Checked-in hand-calibrated profile for a built-in domain."""
    path = _DATA_DIR / "profiles" / f"{domain}.json"
    if not path.exists():
        raise FileNotFoundError(f"no default emotion profile for domain {domain!r}")
    return EmotionProfile.load(path)


def variation_simple(t: TriggerVector, profile: EmotionProfile) -> EmotionVariation:
    """Personality-free variation: the trigger row vector times m_te."""
    return EmotionVariation(tuple(t.as_array() @ profile.m_te))


def variation(p: Personality, t: TriggerVector, profile: EmotionProfile) -> EmotionVariation:
    """Variation with personality-dependent trigger attention.

    Computes ((p . m_pt) * t) . m_te where ``.`` is a matrix product and
    ``*`` is component-wise; the result is clamped to [-1, 1].
    """
    attention = p.as_array() @ profile.m_pt
    raw = (attention * t.as_array()) @ profile.m_te
    return EmotionVariation(tuple(np.clip(raw, -1.0, 1.0)))


def decay_term(e_prev: EmotionState, profile: EmotionProfile) -> EmotionVariation:
    """Constant-rate decay: component-wise -C * e, independent of personality."""
    return EmotionVariation(tuple(-profile.decay_c * e_prev.as_array()))


def update_state(
    e_prev: EmotionState,
    p: Personality,
    v: EmotionVariation,
    profile: EmotionProfile,
) -> EmotionState:
    """One emotional step: previous state plus weighted variation plus decay.

    The additive update can leave [0, 1]; the result is clamped back so the
    state invariant holds.  The update itself ignores emotion history: only
    e_prev enters, through the decay term.
    """
    importance = p.as_array() @ profile.m_pe
    raw = e_prev.as_array() + importance * v.as_array() + decay_term(e_prev, profile).as_array()
    clamped = np.clip(raw, 0.0, 1.0)
    return EmotionState.from_array(clamped, turn_index=e_prev.turn_index + 1)


def normalized(e: EmotionState) -> np.ndarray:
    """Ephemeral unit-sum view of the intensities; the state is not mutated.

    A zero state normalizes to the uniform vector, the maximum-entropy
    stand-in that avoids dividing by zero.
    """
    arr = e.as_array()
    total = arr.sum()
    if total == 0.0:
        return np.full(len(EMOTIONS), 1.0 / len(EMOTIONS))
    return arr / total


def negative_mass(e: EmotionState) -> float:
    """Share of the normalized state held by angry, disgust, fear and sad."""
    return float(normalized(e)[list(NEGATIVE_EMOTION_INDICES)].sum())


def should_terminate(e: EmotionState, profile: EmotionProfile, rng) -> bool:
    """Termination lottery: Bernoulli(p_term) once negative mass tops eta_b.

    Draws exactly one number from ``rng`` when the threshold condition
    holds and none otherwise, so seeded streams stay reproducible.
    """
    if negative_mass(e) > profile.eta_b:
        return rng.random() < profile.p_term
    return False
