"""Q-network math, replay behavior, action selection, checkpoints."""

import math
import random

import numpy as np
import pytest

from affectsim.domain import DialogueAct, load_domain
from affectsim.policy import (
    AgentDialogueView,
    DQNAgent,
    Hyperparams,
    QNetwork,
    ReplayBuffer,
    RuleAgent,
    build_action_set,
    feature_dim,
    featurize,
    materialize,
    q_forward,
    q_gradients,
    reward,
    select_action,
    sync_target,
    train_step,
)

MOVIE = load_domain("movie")


def small_net(seed=0, d=7, a=4, h=5) -> QNetwork:
    return QNetwork(d, a, hidden=h, rng=random.Random(seed))


# ---- featurizer -----------------------------------------------------------


def test_featurize_fresh_view():
    view = AgentDialogueView(MOVIE, max_turns=40)
    vec = featurize(view)
    assert vec.shape == (feature_dim(MOVIE),)
    n_intents = len(view.intents)
    n_slots = len(view.kb_slots)
    assert vec[:n_intents].sum() == 0.0  # no user intent yet
    assert vec[n_intents:n_intents + 3 * n_slots].sum() == 0.0  # empty bags
    assert np.all(vec >= 0.0) and np.all(vec <= 1.0)


def test_featurize_counts_informed_slots():
    view = AgentDialogueView(MOVIE, max_turns=40)
    view.observe_user(DialogueAct(intent="inform", inform_slots={"moviename": "creed", "city": "boston"}))
    vec = featurize(view)
    n_intents = len(view.intents)
    informed = vec[n_intents:n_intents + len(view.kb_slots)]
    assert informed.sum() == 2.0


def test_featurize_turn_scaling():
    view = AgentDialogueView(MOVIE, max_turns=40)
    view.turn = 40
    assert featurize(view)[-5] == 1.0
    view.turn = 60
    assert featurize(view)[-5] == 1.0  # clipped past the cap


def test_featurize_deterministic():
    view = AgentDialogueView(MOVIE, max_turns=40)
    view.observe_user(DialogueAct(intent="request", request_slots=frozenset({"ticket"})))
    assert featurize(view).tolist() == featurize(view).tolist()


def test_view_reopens_slot_on_re_request():
    view = AgentDialogueView(MOVIE, max_turns=40)
    view.observe_user(DialogueAct(intent="request", request_slots=frozenset({"ticket"})))
    view.observe_agent(DialogueAct(intent="inform", inform_slots={"ticket": "ticket-0001"}))
    assert view.outstanding_requests == []
    view.observe_user(DialogueAct(intent="deny", request_slots=frozenset({"ticket"})))
    assert view.outstanding_requests == ["ticket"]


# ---- forward pass and gradients --------------------------------------------


def test_q_forward_zero_weights():
    net = small_net()
    net.w1[:] = 0.0
    net.w2[:] = 0.0
    assert q_forward(net, np.ones(7)).tolist() == [0.0] * 4


def test_q_forward_hand_computed_fixture():
    # one input, one hidden unit, two actions: verify against pencil math
    net = QNetwork(1, 2, hidden=1, rng=random.Random(0))
    net.w1 = np.array([[2.0]])
    net.b1 = np.array([-1.0])
    net.w2 = np.array([[3.0, -0.5]])
    net.b2 = np.array([0.25, 1.0])
    # x=1: h = relu(2*1-1)=1 -> q = (3*1+0.25, -0.5*1+1) = (3.25, 0.5)
    assert q_forward(net, np.array([1.0])).tolist() == [3.25, 0.5]
    # x=0: h = relu(-1)=0 -> q = (0.25, 1.0)
    assert q_forward(net, np.array([0.0])).tolist() == [0.25, 1.0]


def test_q_forward_dimension_mismatch():
    with pytest.raises(ValueError):
        q_forward(small_net(), np.ones(9))


def test_q_forward_finite_for_finite_weights():
    net = small_net(3)
    rng = np.random.default_rng(0)
    out = q_forward(net, rng.uniform(-5, 5, size=(64, 7)))
    assert np.all(np.isfinite(out))


def _finite_difference_grads(net, states, actions, targets, eps=1e-6):
    grads = []
    for param in net.params():
        g = np.zeros_like(param)
        it = np.nditer(param, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            orig = param[idx]
            param[idx] = orig + eps
            up, _ = q_gradients(net, states, actions, targets)
            param[idx] = orig - eps
            down, _ = q_gradients(net, states, actions, targets)
            param[idx] = orig
            g[idx] = (up - down) / (2 * eps)
            it.iternext()
        grads.append(g)
    return grads


def gradient_check(n_instances, seed=0):
    rng = random.Random(seed)
    np_rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        net = QNetwork(6, 3, hidden=4, rng=random.Random(rng.randrange(1 << 30)))
        states = np_rng.uniform(0.0, 1.0, size=(5, 6))
        actions = np_rng.integers(0, 3, size=5)
        targets = np_rng.uniform(-5.0, 5.0, size=5)
        _, analytic = q_gradients(net, states, actions, targets)
        numeric = _finite_difference_grads(net, states, actions, targets)
        for a, n in zip(analytic, numeric):
            denom = max(np.max(np.abs(a)), np.max(np.abs(n)), 1e-8)
            worst = max(worst, float(np.max(np.abs(a - n)) / denom))
    return worst


def test_gradients_match_finite_differences():
    assert gradient_check(10, seed=1) <= 1e-4


# ---- action selection --------------------------------------------------------


def test_select_action_greedy_argmax():
    net = small_net(4)
    s = np.ones(7) * 0.3
    q = q_forward(net, s)
    assert select_action(net, s, 0.0, random.Random(0)) == int(np.argmax(q))


def test_select_action_tie_breaks_low_index():
    net = small_net()
    net.w1[:] = 0.0
    net.w2[:] = 0.0
    net.b2 = np.array([0.5, 1.0, 0.2, 1.0])  # tie between 1 and 3
    assert select_action(net, np.zeros(7), 0.0, random.Random(0)) == 1


def test_select_action_epsilon_one_uniform_chi_squared():
    net = small_net(5)
    rng = random.Random(7)
    counts = np.zeros(4)
    n = 10_000
    for _ in range(n):
        counts[select_action(net, np.zeros(7), 1.0, rng)] += 1
    expected = n / 4
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    assert chi2 < 16.27  # chi-square 99.9% quantile, 3 dof


def test_select_action_validates_epsilon():
    with pytest.raises(ValueError):
        select_action(small_net(), np.zeros(7), 1.5, random.Random(0))


# ---- replay buffer -------------------------------------------------------------


def test_replay_ring_never_exceeds_capacity():
    buf = ReplayBuffer(capacity=8)
    for i in range(30):
        buf.push(np.zeros(2), i % 3, -1.0, np.zeros(2), False)
    assert len(buf) == 8
    kept = {item[1] for item in buf._items}
    assert kept <= {0, 1, 2}


def test_replay_uniform_sampling_within_3_sigma():
    buf = ReplayBuffer(capacity=20)
    for i in range(20):
        buf.push(np.array([float(i)]), i, 0.0, np.zeros(1), False)
    rng = random.Random(11)
    n = 20_000
    counts = np.zeros(20)
    for item in buf.sample(n, rng):
        counts[item[1]] += 1
    p = 1 / 20
    sigma = math.sqrt(n * p * (1 - p))
    assert np.all(np.abs(counts - n * p) <= 3 * sigma)


# ---- training step ----------------------------------------------------------------


def _single_transition_buffer(s, a, r, s2, terminal):
    buf = ReplayBuffer(capacity=4)
    buf.push(s, a, r, s2, terminal)
    return buf


def test_train_step_gamma_zero_targets_reward():
    net = small_net(6)
    target = small_net(7)
    s = np.ones(7) * 0.2
    buf = _single_transition_buffer(s, 2, 1.5, np.ones(7), False)
    hp = Hyperparams(gamma=0.0, batch_size=1, learning_rate=0.0, grad_clip=0.0)
    q_before = q_forward(net, s)[2]
    loss = train_step(net, target, buf, hp, random.Random(0))
    assert loss == pytest.approx((q_before - 1.5) ** 2, abs=1e-12)


def test_train_step_terminal_ignores_bootstrap():
    net = small_net(8)
    target = small_net(9)
    s = np.ones(7) * 0.4
    buf = _single_transition_buffer(s, 1, -40.0, np.ones(7), True)
    hp = Hyperparams(gamma=0.9, batch_size=1, learning_rate=0.0, grad_clip=0.0)
    q_before = q_forward(net, s)[1]
    loss = train_step(net, target, buf, hp, random.Random(0))
    assert loss == pytest.approx((q_before + 40.0) ** 2, abs=1e-9)


def test_train_step_insufficient_buffer_skips():
    net = small_net(10)
    buf = ReplayBuffer(capacity=4)
    hp = Hyperparams(batch_size=2)
    assert train_step(net, small_net(10), buf, hp, random.Random(0)) is None


def test_train_step_reduces_loss_on_fixed_batch():
    net = small_net(12)
    target = small_net(12)
    buf = ReplayBuffer(capacity=8)
    rng_np = np.random.default_rng(3)
    for i in range(8):
        buf.push(rng_np.uniform(0, 1, 7), i % 4, -1.0, rng_np.uniform(0, 1, 7), i == 7)
    hp = Hyperparams(gamma=0.9, batch_size=8, learning_rate=0.05)
    rng = random.Random(5)
    first = train_step(net, target, buf, hp, rng)
    losses = [train_step(net, target, buf, hp, rng) for _ in range(200)]
    assert losses[-1] < first


# ---- target sync ---------------------------------------------------------------------


def test_sync_target_bit_exact_and_idempotent():
    net = small_net(13)
    target = small_net(14)
    s = np.ones(7) * 0.1
    assert q_forward(net, s).tolist() != q_forward(target, s).tolist()
    sync_target(net, target)
    assert q_forward(net, s).tolist() == q_forward(target, s).tolist()
    w1 = target.w1.copy()
    sync_target(net, target)
    assert np.array_equal(target.w1, w1)


def test_sync_target_architecture_mismatch():
    with pytest.raises(ValueError):
        sync_target(small_net(), QNetwork(7, 5, hidden=5))


def test_networks_diverge_after_updates():
    net = small_net(15)
    target = small_net(15)
    sync_target(net, target)
    buf = ReplayBuffer(4)
    buf.push(np.ones(7), 0, 1.0, np.ones(7), True)
    train_step(net, target, buf, Hyperparams(batch_size=1, learning_rate=0.1), random.Random(0))
    assert not np.array_equal(net.w2, target.w2)


# ---- reward ------------------------------------------------------------------------------


def test_reward_convention():
    assert reward("success", 40) == 80.0
    assert reward("terminated", 40) == -40.0
    assert reward("failure", 40) == -40.0
    assert reward(None, 40) == -1.0


# ---- agents -----------------------------------------------------------------------------


def test_action_set_stable_and_complete():
    actions = build_action_set(MOVIE.schema)
    assert actions == build_action_set(MOVIE.schema)
    assert ("request", "moviename") in actions
    assert ("inform", "ticket") in actions
    assert ("taskcomplete", None) in actions
    assert len(actions) == 2 * len(MOVIE.schema.kb_slots) + 6


def test_materialize_inform_uses_matching_record():
    view = AgentDialogueView(MOVIE, max_turns=40)
    record = MOVIE.kb.records[0]
    view.observe_user(DialogueAct(intent="inform", inform_slots={"moviename": record["moviename"]}))
    act = materialize(view, ("inform", "starttime"))
    candidates = [r["starttime"] for r in MOVIE.kb.records if r["moviename"] == record["moviename"]]
    assert act.inform_slots["starttime"] in candidates


def test_materialize_no_match_value():
    view = AgentDialogueView(MOVIE, max_turns=40)
    view.observe_user(DialogueAct(intent="inform", inform_slots={"moviename": "not-a-movie"}))
    act = materialize(view, ("inform", "ticket"))
    assert act.inform_slots["ticket"] == "no match available"


def test_dqn_agent_training_is_bit_deterministic():
    def run():
        agent = DQNAgent(MOVIE, hp=Hyperparams(batch_size=4), seed=42)
        rng_np = np.random.default_rng(0)
        for i in range(20):
            agent.buffer.push(rng_np.uniform(0, 1, feature_dim(MOVIE)), i % 5, -1.0,
                              rng_np.uniform(0, 1, feature_dim(MOVIE)), i % 7 == 0)
        agent.train(50)
        return agent.net.w1.copy(), agent.net.w2.copy()

    w1a, w2a = run()
    w1b, w2b = run()
    assert np.array_equal(w1a, w1b)
    assert np.array_equal(w2a, w2b)


def test_checkpoint_round_trip(tmp_path):
    agent = DQNAgent(MOVIE, seed=9)
    path = tmp_path / "checkpoint.json"
    agent.save(path)
    loaded = DQNAgent.load(path, MOVIE)
    s = np.full(feature_dim(MOVIE), 0.5)
    assert q_forward(loaded.net, s).tolist() == q_forward(agent.net, s).tolist()
    with pytest.raises(ValueError):
        DQNAgent.load(path, load_domain("taxi"))


def test_rule_agent_answers_outstanding_requests():
    rule = RuleAgent(MOVIE)
    view = AgentDialogueView(MOVIE, max_turns=40)
    record = MOVIE.kb.records[3]
    view.observe_user(DialogueAct(
        intent="request",
        inform_slots={"moviename": record["moviename"], "date": record["date"], "city": record["city"]},
        request_slots=frozenset({"ticket"}),
    ))
    idx = rule.select(view)
    assert rule.actions[idx] == ("inform", "ticket")
