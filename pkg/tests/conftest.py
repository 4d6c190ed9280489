"""Shared fixtures: quarter-grid profiles, annotated-session rolling, and a
small trained checkpoint for service-level tests."""

import random

import numpy as np
import pytest

from affectsim.calibration import AnnotatedSession, SessionTurn, label_session_with_replay
from affectsim.domain import load_domain
from affectsim.emotion import EmotionProfile, Personality
from affectsim.harness import ExperimentConfig, run_experiment
from affectsim.policy import Hyperparams, RuleAgent, materialize
from affectsim.simulator import ONGOING, UserSimulator

ALL_ONES = Personality(1.0, 1.0, 1.0, 1.0, 1.0)


def grid_profile(p_term=0.0, tau=100) -> EmotionProfile:
    """Profile whose trajectories stay on the quarter-intensity grid.

    Identity attention and unit emotion importance (for an all-ones
    personality) plus m_te entries that are multiples of 0.25 keep every
    update exactly representable, so label quantization is lossless.
    """
    m_te = [
        [0.25, 0.25, 0.0, -0.25, 0.0, 0.0],   # od
        [0.25, 0.25, 0.0, 0.0, 0.0, 0.0],     # ir
        [-0.25, 0.0, 0.0, 0.25, 0.0, 0.0],    # rr
        [0.25, 0.25, 0.0, -0.25, 0.0, 0.0],   # rq
        [0.0, 0.0, 0.0, 0.25, 0.0, 0.25],     # in
    ]
    m_pe = [[0.0] * 6 for _ in range(5)]
    m_pe[0] = [1.0] * 6
    return EmotionProfile(
        m_te=m_te,
        m_pt=np.eye(5),
        m_pe=m_pe,
        decay_c=[0.0] * 6,
        eta_b=0.5,
        p_term=p_term,
        tau=tau,
    )


def roll_annotated_session(domain, profile, seed=0, personality=ALL_ONES, agent=None,
                           session_id="rolled") -> AnnotatedSession:
    """One simulator dialogue converted into an annotated session whose
    labels come from the simulator's own trajectory."""
    agent = agent or RuleAgent(domain)
    sim = UserSimulator(domain, personality, profile, rng=random.Random(seed), unsat_prob=0.0)
    state, opening = sim.reset()

    from affectsim.policy import AgentDialogueView

    view = AgentDialogueView(domain, sim.max_turns)
    view.observe_user(opening)
    turns = []
    while state.status == ONGOING:
        agent_turn = state.turn_count + 1
        view.turn = agent_turn
        agent_act = materialize(view, agent.actions[agent.select(view)])
        view.observe_agent(agent_act)
        result = sim.step(state, agent_act)
        view.observe_user(result.user_action)
        turns.append(SessionTurn(
            turn_index=agent_turn,
            agent_act=agent_act,
            user_act=result.user_action,
            emotion_labels={e: 1 for e in ("angry", "disgust", "fear", "happy", "sad", "surprise")},
        ))
    session = AnnotatedSession(
        personality=personality,
        domain=domain.name,
        goal=state.goal,
        turns=turns,
        opening_user_act=opening,
        session_id=session_id,
        success=state.status == "success",
    )
    return label_session_with_replay(session, profile, domain)


@pytest.fixture(scope="session")
def movie_domain():
    return load_domain("movie")


@pytest.fixture(scope="session")
def trained_checkpoint(tmp_path_factory):
    """A briefly trained movie policy, good enough to finish dialogues."""
    config = ExperimentConfig(
        domain="movie", personality_name="uA", p_term=0.0,
        epochs=12, dialogues_per_epoch=30, seeds=(7,),
        unsat_prob=0.0, hyperparams=Hyperparams(),
    )
    result = run_experiment(config)
    path = tmp_path_factory.mktemp("checkpoint") / "movie_policy.json"
    result.agent.save(path)
    return path
