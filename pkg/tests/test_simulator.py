"""Simulated user: opening acts, rule policy, termination, invariants."""

import random

import numpy as np
import pytest

from affectsim.domain import DialogueAct, kb_lookup, load_domain
from affectsim.emotion import (
    EmotionProfile,
    EmotionState,
    Personality,
    TriggerVector,
    negative_mass,
    update_state,
    variation,
)
from affectsim.simulator import (
    FAILURE,
    ONGOING,
    SUCCESS,
    TERMINATED,
    UserSimulator,
    dialogue_success,
)

MOVIE = load_domain("movie")
U_A = Personality(0.45, 0.62, 0.55, 0.70, 0.30)
U_B = Personality(0.60, 0.40, 0.38, 0.32, 0.78)


def quiet_profile(p_term=0.0, tau=20) -> EmotionProfile:
    """Small hand profile used where emotion values are incidental."""
    return EmotionProfile(
        m_te=[[0.1, 0.05, 0.0, -0.05, 0.0, 0.02]] * 5,
        m_pt=[[0.2] * 5] * 5,
        m_pe=[[0.2] * 6] * 5,
        decay_c=[0.1] * 6,
        eta_b=0.5,
        p_term=p_term,
        tau=tau,
    )


def rage_profile(p_term=1.0) -> EmotionProfile:
    """One irrelevant response maxes anger; termination lottery certain."""
    m_te = [[0.0] * 6 for _ in range(5)]
    m_te[1][0] = 1.0  # ir -> angry
    m_pt = np.eye(5).tolist()
    m_pe = [[0.0] * 6 for _ in range(5)]
    m_pe[0] = [1.0] * 6
    return EmotionProfile(
        m_te=m_te, m_pt=m_pt, m_pe=m_pe, decay_c=[0.0] * 6,
        eta_b=0.5, p_term=p_term, tau=20,
    )


def make_sim(profile=None, seed=1, personality=U_A, **kwargs) -> UserSimulator:
    return UserSimulator(
        MOVIE, personality, profile or quiet_profile(),
        rng=random.Random(seed), **kwargs,
    )


def test_reset_deterministic_across_runs():
    a_state, a_act = make_sim(seed=5).reset()
    b_state, b_act = make_sim(seed=5).reset()
    assert a_act.to_dict() == b_act.to_dict()
    assert a_state.goal.to_dict() == b_state.goal.to_dict()


def test_opening_act_shape():
    for seed in range(30):
        state, act = make_sim(seed=seed).reset()
        assert act.intent in ("inform", "request", "greeting")
        assert act.intent != "terminating"
        act.validate(MOVIE.schema)
        assert state.emotion.as_array().tolist() == [0.0] * 6
        assert state.status == ONGOING


def test_opening_never_terminates_even_at_p_term_one():
    state, act = make_sim(profile=rage_profile(p_term=1.0), seed=3).reset()
    assert act.intent != "terminating"


def test_agent_request_of_constraint_answered():
    sim = make_sim(seed=7)
    state, _ = sim.reset()
    slot = sorted(state.goal.inform_slots)[0]
    result = sim.step(state, DialogueAct(intent="request", request_slots=frozenset({slot})))
    assert result.user_action.intent == "inform"
    assert result.user_action.inform_slots == {slot: state.goal.inform_slots[slot]}


def test_perfect_agent_reaches_success():
    sim = make_sim(seed=8, unsat_prob=0.0)
    state, act = sim.reset()
    record = kb_lookup(MOVIE.kb, state.goal.inform_slots)[0]
    last = None
    while state.status == ONGOING:
        wanted = sorted(act.request_slots)
        assert wanted, "perfect agent only ever sees requests"
        slot = wanted[0]
        result = sim.step(state, DialogueAct(intent="inform", inform_slots={slot: record[slot]}))
        act, last = result.user_action, result
    assert state.status == SUCCESS
    assert last.user_action.intent == "thanks"
    assert dialogue_success(state)
    assert set(state.obtained_slots) == set(state.goal.request_slots)


def test_contradictory_inform_is_denied():
    sim = make_sim(seed=9)
    state, _ = sim.reset()
    slot = sorted(state.goal.inform_slots)[0]
    result = sim.step(state, DialogueAct(intent="inform", inform_slots={slot: "plainly-wrong"}))
    assert result.user_action.intent == "deny"
    assert result.user_action.inform_slots[slot] == state.goal.inform_slots[slot]


def test_rigged_ir_event_terminates():
    profile = rage_profile(p_term=1.0)
    sim = make_sim(profile=profile, seed=10)
    state, _ = sim.reset()

    # oracle: one IR event must push negative mass past the threshold
    t = TriggerVector(ir=1)
    v = variation(U_A, t, profile)
    predicted = update_state(EmotionState(), U_A, v, profile)
    assert negative_mass(predicted) > profile.eta_b

    result = sim.step(state, DialogueAct(intent="request", request_slots=frozenset({"zip"})))
    assert result.user_action.intent == "terminating"
    assert state.status == TERMINATED
    assert result.emotion.as_array().tolist() == predicted.as_array().tolist()
    assert not dialogue_success(state)


def test_p_term_zero_never_terminates():
    sim = make_sim(profile=rage_profile(p_term=0.0), seed=11)
    for _ in range(20):
        state, _ = sim.reset()
        while state.status == ONGOING:
            result = sim.step(state, DialogueAct(intent="request", request_slots=frozenset({"zip"})))
            assert result.user_action.intent != "terminating"
        assert state.status == FAILURE  # max turns, never early termination


def test_step_after_terminal_raises():
    sim = make_sim(profile=rage_profile(), seed=12)
    state, _ = sim.reset()
    sim.step(state, DialogueAct(intent="request", request_slots=frozenset({"zip"})))
    assert state.status == TERMINATED
    with pytest.raises(RuntimeError):
        sim.step(state, DialogueAct(intent="greeting"))


def test_dialogue_success_requires_terminal_state():
    sim = make_sim(seed=13)
    state, _ = sim.reset()
    with pytest.raises(RuntimeError):
        dialogue_success(state)


def test_max_turns_failure_counts_cap():
    sim = make_sim(seed=14, max_turns=40)
    state, _ = sim.reset()
    while state.status == ONGOING:
        result = sim.step(state, DialogueAct(intent="greeting"))
    assert state.status == FAILURE
    assert state.turn_count == 40
    assert result.user_action.intent == "closing"


def test_all_emitted_acts_validate():
    sim = make_sim(seed=15, unsat_prob=0.3)
    rng = random.Random(5)
    slots = sorted(MOVIE.schema.kb_slots)
    for _ in range(10):
        state, act = sim.reset()
        act.validate(MOVIE.schema)
        while state.status == ONGOING:
            agent_act = random.Random(rng.random()).choice([
                DialogueAct(intent="greeting"),
                DialogueAct(intent="request", request_slots=frozenset({rng.choice(slots)})),
                DialogueAct(intent="inform", inform_slots={rng.choice(slots): "x"}),
                DialogueAct(intent="confirm_question"),
                DialogueAct(intent="taskcomplete"),
            ])
            result = sim.step(state, agent_act)
            result.user_action.validate(MOVIE.schema)


def _roll_acts(personality, p_term, seed, n_dialogues=5):
    """Act transcript under a fixed scripted agent; used for invariance checks."""
    profile = quiet_profile(p_term=p_term).replace(
        m_te=[
            [0.25, 0.2, 0.0, -0.1, 0.05, 0.05],
            [0.3, 0.25, 0.0, -0.15, 0.0, 0.1],
            [-0.15, -0.1, 0.0, 0.25, 0.0, 0.05],
            [0.2, 0.25, 0.0, -0.12, 0.0, 0.05],
            [-0.12, -0.08, 0.0, 0.3, 0.0, 0.12],
        ]
    )
    sim = UserSimulator(
        MOVIE, personality, profile,
        rng=random.Random(seed), term_rng=random.Random(seed + 999),
        unsat_prob=0.2,
    )
    acts, statuses, turns, emotions = [], [], [], []
    script_rng = random.Random(seed + 1)
    slots = sorted(MOVIE.schema.kb_slots)
    for _ in range(n_dialogues):
        state, act = sim.reset()
        acts.append(act.to_dict())
        while state.status == ONGOING:
            agent_act = [
                DialogueAct(intent="request", request_slots=frozenset({script_rng.choice(slots)})),
                DialogueAct(intent="inform", inform_slots={script_rng.choice(slots): "x"}),
                DialogueAct(intent="greeting"),
            ][script_rng.randrange(3)]
            result = sim.step(state, agent_act)
            acts.append(result.user_action.to_dict())
            emotions.append(result.emotion.as_array().tolist())
        statuses.append(state.status)
        turns.append(state.turn_count)
    return acts, statuses, turns, emotions


def test_personality_independence_at_p_term_zero():
    acts_a, st_a, turns_a, emo_a = _roll_acts(U_A, 0.0, seed=21)
    acts_b, st_b, turns_b, emo_b = _roll_acts(U_B, 0.0, seed=21)
    assert acts_a == acts_b
    assert st_a == st_b
    assert turns_a == turns_b
    assert emo_a != emo_b  # emotion curves may differ, and do here


def test_termination_toggle_shares_prefix():
    acts_off, _, _, _ = _roll_acts(U_A, 0.0, seed=22, n_dialogues=10)
    acts_on, statuses_on, _, _ = _roll_acts(U_A, 0.35, seed=22, n_dialogues=10)
    first_term = next(
        (i for i, a in enumerate(acts_on) if a["intent"] == "terminating"), None
    )
    assert first_term is not None, "high p_term under a hostile script must terminate"
    assert TERMINATED in statuses_on
    assert acts_on[:first_term] == acts_off[:first_term]


def test_terminated_dialogues_are_never_successful():
    _, statuses, _, _ = _roll_acts(U_A, 1.0, seed=23, n_dialogues=10)
    assert TERMINATED in statuses
    assert SUCCESS not in [s for s in statuses if s == TERMINATED]
