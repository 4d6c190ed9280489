"""Rule-based detection of the five per-turn emotional trigger events.

Each detector is a pure function of a :class:`TurnContext` snapshot:
overlong dialogue (OD), irrelevant vs relevant response (IR/RR), repeated
query (RQ) and initiative (IN).  IR and RR are mutually exclusive; the
remaining triggers may fire together on one turn.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .domain import DialogueAct, UserGoal
from .emotion import TriggerVector


class Relevance(enum.Enum):
    IR = "ir"
    RR = "rr"
    NONE = "none"


@dataclass(frozen=True)
class TurnContext:
    """Everything the detectors may inspect about the current agent turn.

    ``informed_slots`` holds slot names the user has already supplied;
    ``user_requested_slots`` the slots the user has voiced requests for
    (an agent inform only counts as initiative before the user asks);
    ``requested_history`` the multiset of slots the agent has requested
    so far.
    """

    turn_index: int
    agent_action: DialogueAct
    user_goal: UserGoal
    informed_slots: frozenset = field(default_factory=frozenset)
    user_requested_slots: frozenset = field(default_factory=frozenset)
    requested_history: tuple = ()
    tau: int = 20

    def __post_init__(self):
        object.__setattr__(self, "informed_slots", frozenset(self.informed_slots))
        object.__setattr__(self, "user_requested_slots", frozenset(self.user_requested_slots))
        object.__setattr__(self, "requested_history", tuple(self.requested_history))
        if self.turn_index < 0:
            raise ValueError("turn_index must be non-negative")
        if self.tau < 1:
            raise ValueError("tau must be at least 1")

    @classmethod
    def from_dict(cls, data: dict) -> "TurnContext":
        return cls(
            turn_index=int(data["turn_index"]),
            agent_action=DialogueAct.from_dict(data["agent_action"]),
            user_goal=UserGoal.from_dict(data["user_goal"]),
            informed_slots=frozenset(data.get("informed_slots", ())),
            user_requested_slots=frozenset(data.get("user_requested_slots", ())),
            requested_history=tuple(data.get("requested_history", ())),
            tau=int(data.get("tau", 20)),
        )


def detect_overlong(ctx: TurnContext) -> int:
    """1 once the dialogue strictly exceeds the domain length threshold."""
    return int(ctx.turn_index > ctx.tau)


def detect_relevance(ctx: TurnContext) -> Relevance:
    """IR when every mentioned slot falls outside the goal, RR when any
    goal slot is touched, NONE for slot-free acts such as greetings."""
    mentioned = ctx.agent_action.mentioned_slots()
    if not mentioned:
        return Relevance.NONE
    goal_slots = set(ctx.user_goal.inform_slots) | ctx.user_goal.request_slots
    return Relevance.RR if mentioned & goal_slots else Relevance.IR


def detect_repeated_query(ctx: TurnContext) -> int:
    """1 when the agent requests a slot the user has already supplied."""
    if ctx.agent_action.intent != "request":
        return 0
    return int(bool(ctx.agent_action.request_slots & ctx.informed_slots))


def detect_initiative(ctx: TurnContext) -> int:
    """1 when the agent proactively informs a wanted slot before it is asked."""
    proactive = (
        set(ctx.agent_action.inform_slots)
        & ctx.user_goal.request_slots
    ) - ctx.user_requested_slots
    return int(bool(proactive))


def detect_all(ctx: TurnContext) -> TriggerVector:
    """Compose the detectors into one per-turn trigger vector."""
    relevance = detect_relevance(ctx)
    return TriggerVector(
        od=detect_overlong(ctx),
        ir=int(relevance is Relevance.IR),
        rr=int(relevance is Relevance.RR),
        rq=detect_repeated_query(ctx),
        in_=detect_initiative(ctx),
    )
