"""Agenda-based simulated user with trigger-driven emotion and termination.

Per agent turn the simulator detects trigger events, updates its emotional
state, and either terminates the dialogue (emotion-motivated, gated by the
profile's p_term) or replies with the rule-selected next action toward its
sampled goal: answering requests from constraints, re-asserting constraints
after irrelevant responses, working through a stack of pending requests,
and thanking once every requested slot has been obtained consistently.

Acts are indexed from 1 (the user's opening act); agent acts take even
indices, user replies odd.  A dialogue that reaches ``max_turns`` acts is
cut off as a failure.

The action/goal random stream and the termination lottery stream are kept
separate so that dialogues with termination disabled, or with a different
personality, replay act-for-act identically under the same seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .domain import ANY_VALUE, DialogueAct, Domain, UserGoal, kb_lookup, sample_goal
from .emotion import (
    EmotionProfile,
    EmotionState,
    Personality,
    TriggerVector,
    should_terminate,
    update_state,
    variation,
)
from .triggers import Relevance, TurnContext, detect_all, detect_relevance

ONGOING = "ongoing"
SUCCESS = "success"
FAILURE = "failure"
TERMINATED = "terminated"

DEFAULT_MAX_TURNS = 40


@dataclass
class UserSimState:
    """Mutable per-dialogue state owned by a single simulator instance."""

    goal: UserGoal
    agenda: list  # pending request slots, popped LIFO
    informed_slots: set
    obtained_slots: dict
    emotion: EmotionState
    personality: Personality
    profile: EmotionProfile
    status: str = ONGOING
    turn_count: int = 0
    user_requested_slots: set = field(default_factory=set)
    agent_requested_history: list = field(default_factory=list)


@dataclass(frozen=True)
class StepResult:
    user_action: DialogueAct
    triggers: TriggerVector
    emotion: EmotionState
    status: str


class UserSimulator:
    """Factory and rule engine for emotion-aware simulated users."""

    def __init__(
        self,
        domain: Domain,
        personality: Personality,
        profile: EmotionProfile,
        rng: random.Random,
        term_rng: random.Random | None = None,
        max_turns: int = DEFAULT_MAX_TURNS,
        unsat_prob: float = 0.1,
    ):
        self.domain = domain
        self.personality = personality
        self.profile = profile
        self.rng = rng
        # Termination draws come from their own stream: their count depends
        # on the emotion trajectory, which must not perturb act selection.
        self.term_rng = term_rng if term_rng is not None else random.Random(rng.getrandbits(64))
        self.max_turns = max_turns
        self.unsat_prob = unsat_prob

    def reset(self, goal: UserGoal | None = None) -> tuple:
        """Sample a goal and emit the opening user act (never terminating).

        The termination lottery is skipped on the opening turn: a fresh
        all-zero emotion state would otherwise normalize to the uniform
        fallback, whose negative mass (4/6) already tops the threshold.
        A fixed ``goal`` (e.g. one issued by the HIL service) can be
        supplied instead of sampling.
        """
        if goal is None:
            goal = sample_goal(self.domain, self.rng, unsat_prob=self.unsat_prob)
        agenda = sorted(goal.request_slots, reverse=True)
        first_request = agenda.pop()

        constraints = sorted(goal.inform_slots)
        k = self.rng.randint(1, len(constraints)) if constraints else 0
        opening_informs = {s: goal.inform_slots[s] for s in sorted(self.rng.sample(constraints, k))}

        act = DialogueAct(
            intent="request",
            inform_slots=opening_informs,
            request_slots=frozenset({first_request}),
        )
        state = UserSimState(
            goal=goal,
            agenda=agenda,
            informed_slots=set(opening_informs),
            obtained_slots={},
            emotion=EmotionState(),
            personality=self.personality,
            profile=self.profile,
            turn_count=1,
            user_requested_slots={first_request},
        )
        return state, act

    def step(self, state: UserSimState, agent_action: DialogueAct) -> StepResult:
        """Process one agent act: triggers, emotion, termination, rule reply."""
        if state.status != ONGOING:
            raise RuntimeError(f"step() called on a {state.status} dialogue")
        agent_action.validate(self.domain.schema)

        agent_turn = state.turn_count + 1
        ctx = TurnContext(
            turn_index=agent_turn,
            agent_action=agent_action,
            user_goal=state.goal,
            informed_slots=frozenset(state.informed_slots),
            user_requested_slots=frozenset(state.user_requested_slots),
            requested_history=tuple(state.agent_requested_history),
            tau=self.profile.tau,
        )
        triggers = detect_all(ctx)
        v = variation(state.personality, triggers, self.profile)
        state.emotion = update_state(state.emotion, state.personality, v, self.profile)
        state.agent_requested_history.extend(sorted(agent_action.request_slots))

        if should_terminate(state.emotion, self.profile, self.term_rng):
            state.status = TERMINATED
            state.turn_count = agent_turn + 1
            return self._finish(state, DialogueAct(intent="terminating"), triggers)

        if agent_turn + 1 > self.max_turns:
            state.status = FAILURE
            state.turn_count = self.max_turns
            return self._finish(state, DialogueAct(intent="closing"), triggers)

        user_act = self._respond(state, agent_action, detect_relevance(ctx))
        state.turn_count = agent_turn + 1
        return self._finish(state, user_act, triggers)

    def _finish(self, state: UserSimState, act: DialogueAct, triggers: TriggerVector) -> StepResult:
        state.informed_slots.update(act.inform_slots)
        state.user_requested_slots.update(act.request_slots)
        return StepResult(user_action=act, triggers=triggers, emotion=state.emotion, status=state.status)

    # ---- rule policy ----------------------------------------------------

    def _respond(self, state: UserSimState, agent_action: DialogueAct, relevance: Relevance) -> DialogueAct:
        goal = state.goal

        contradicted = sorted(
            s for s, v in agent_action.inform_slots.items()
            if s in goal.inform_slots and v != goal.inform_slots[s]
        )
        for slot, value in sorted(agent_action.inform_slots.items()):
            if slot in goal.request_slots:
                state.obtained_slots[slot] = value

        if contradicted:
            return DialogueAct(
                intent="deny",
                inform_slots={s: goal.inform_slots[s] for s in contradicted},
            )

        if goal.request_slots <= set(state.obtained_slots):
            return self._check_completion(state)

        if agent_action.intent == "request" and agent_action.request_slots:
            return self._answer_request(state, agent_action)

        if agent_action.intent == "confirm_question":
            confirmed = sorted(agent_action.mentioned_slots() & set(goal.inform_slots))
            return DialogueAct(
                intent="confirm_answer",
                inform_slots={s: goal.inform_slots[s] for s in confirmed},
            )

        if relevance is Relevance.IR:
            return self._reassert_constraint(state)

        return self._advance_agenda(state)

    def _check_completion(self, state: UserSimState) -> DialogueAct:
        goal = state.goal
        merged = {**goal.inform_slots, **state.obtained_slots}
        if kb_lookup(self.domain.kb, merged):
            state.status = SUCCESS
            return DialogueAct(intent="thanks")
        # Obtained values fit no record satisfying the constraints: drop the
        # offending slots and ask again.
        bad = [
            s for s in sorted(state.obtained_slots)
            if not kb_lookup(self.domain.kb, {**goal.inform_slots, s: state.obtained_slots[s]})
        ]
        if not bad:
            bad = sorted(state.obtained_slots)
        for s in bad:
            del state.obtained_slots[s]
        # Volunteering another constraint lets the agent narrow its lookup.
        fresh = [s for s in sorted(goal.inform_slots) if s not in state.informed_slots]
        informs = {fresh[0]: goal.inform_slots[fresh[0]]} if fresh else {}
        return DialogueAct(intent="deny", inform_slots=informs, request_slots=frozenset({bad[0]}))

    def _answer_request(self, state: UserSimState, agent_action: DialogueAct) -> DialogueAct:
        slot = sorted(agent_action.request_slots)[0]
        goal = state.goal
        if slot in goal.inform_slots:
            return DialogueAct(intent="inform", inform_slots={slot: goal.inform_slots[slot]})
        if slot in goal.request_slots:
            if slot in state.obtained_slots:
                return DialogueAct(intent="inform", inform_slots={slot: state.obtained_slots[slot]})
            # The user wants this slot itself; bounce the question back.
            return DialogueAct(intent="request", request_slots=frozenset({slot}))
        return DialogueAct(intent="inform", inform_slots={slot: ANY_VALUE})

    def _reassert_constraint(self, state: UserSimState) -> DialogueAct:
        constraints = sorted(state.goal.inform_slots)
        fresh = [s for s in constraints if s not in state.informed_slots]
        slot = fresh[0] if fresh else constraints[0] if constraints else None
        if slot is None:
            return self._advance_agenda(state)
        return DialogueAct(intent="inform", inform_slots={slot: state.goal.inform_slots[slot]})

    def _advance_agenda(self, state: UserSimState) -> DialogueAct:
        while state.agenda:
            slot = state.agenda.pop()
            if slot not in state.obtained_slots:
                return DialogueAct(intent="request", request_slots=frozenset({slot}))
        outstanding = sorted(state.goal.request_slots - set(state.obtained_slots))
        return DialogueAct(intent="request", request_slots=frozenset({outstanding[0]}))


def dialogue_success(state: UserSimState) -> bool:
    """True iff a finished dialogue ended with the goal consistently met."""
    if state.status == ONGOING:
        raise RuntimeError("dialogue_success() requires a terminal state")
    return state.status == SUCCESS


def trace_record(turn: int, agent_act: DialogueAct, result: StepResult) -> dict:
    """One JSON-lines record per exchange, consumed by harness and calibration."""
    return {
        "turn": turn,
        "agent_act": agent_act.to_dict(),
        "user_act": result.user_action.to_dict(),
        "triggers": {
            "od": result.triggers.od,
            "ir": result.triggers.ir,
            "rr": result.triggers.rr,
            "rq": result.triggers.rq,
            "in": result.triggers.in_,
        },
        "emotion": list(result.emotion.as_array()),
        "status": result.status,
    }
