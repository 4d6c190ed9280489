"""Deep-Q dialogue policy: featurizer, one-hidden-layer net, replay, rewards.

The agent works from its own view of the dialogue (user constraints heard
so far, outstanding user requests, its request history, turn number, and
the current knowledge-base match count).  Action templates are discrete:
request/inform per informable slot plus the slot-free intents.  A template
is materialized into a concrete act by filling inform values from the
first knowledge-base record matching the heard constraints.

The Q-network is plain numpy with hand-derived gradients (checked against
finite differences in the test suite), trained by clipped SGD on squared
TD error with a periodically synced target network.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .domain import ANY_VALUE, DialogueAct, Domain, kb_lookup

NO_MATCH = "no match available"

HIDDEN_SIZE = 80

SLOT_FREE_INTENTS = (
    "confirm_question", "confirm_answer", "greeting", "thanks", "closing", "taskcomplete",
)


def build_action_set(schema) -> list:
    """Index-stable discrete templates: (intent, slot-or-None) tuples."""
    actions = [("request", s) for s in schema.kb_slots]
    actions += [("inform", s) for s in schema.kb_slots]
    actions += [(intent, None) for intent in SLOT_FREE_INTENTS]
    return actions


class AgentDialogueView:
    """What the agent can legitimately know mid-dialogue."""

    def __init__(self, domain: Domain, max_turns: int):
        self.domain = domain
        self.max_turns = max_turns
        self.intents = sorted(domain.schema.intents)
        self.kb_slots = list(domain.schema.kb_slots)
        self.last_user_intent = None
        self.user_constraints = {}
        self.user_requested = set()
        self.agent_requested = []
        self.agent_informed = set()
        self.turn = 1  # index of the most recent act

    def observe_user(self, act: DialogueAct) -> None:
        self.last_user_intent = act.intent
        self.user_constraints.update(act.inform_slots)
        self.user_requested.update(act.request_slots)
        # A (re-)request reopens the slot even if it was informed before:
        # the user evidently rejected or missed the earlier answer.
        self.agent_informed -= act.request_slots

    def observe_agent(self, act: DialogueAct) -> None:
        self.agent_requested.extend(sorted(act.request_slots))
        self.agent_informed.update(act.inform_slots)

    @property
    def outstanding_requests(self) -> list:
        return sorted(self.user_requested - self.agent_informed)

    def hard_constraints(self) -> dict:
        return {
            s: v for s, v in self.user_constraints.items()
            if s in self.domain.schema.kb_slots and v != ANY_VALUE and v != NO_MATCH
        }

    def kb_match_count(self) -> int:
        return len(kb_lookup(self.domain.kb, self.hard_constraints()))

    def matching_record(self) -> dict | None:
        matches = kb_lookup(self.domain.kb, self.hard_constraints())
        return matches[0] if matches else None


def featurize(view: AgentDialogueView) -> np.ndarray:
    """Deterministic fixed-length encoding of the agent's dialogue view.

    Layout: one-hot last user intent | informed-slot bag | requested-history
    bag | outstanding-request bag | scaled turn | match-count bucket.
    All components lie in [0, 1].
    """
    intent_vec = np.zeros(len(view.intents))
    if view.last_user_intent is not None:
        intent_vec[view.intents.index(view.last_user_intent)] = 1.0

    n = len(view.kb_slots)
    informed = np.zeros(n)
    requested_hist = np.zeros(n)
    outstanding = np.zeros(n)
    for i, slot in enumerate(view.kb_slots):
        if slot in view.user_constraints:
            informed[i] = 1.0
        if slot in view.agent_requested:
            requested_hist[i] = 1.0
        if slot in view.user_requested and slot not in view.agent_informed:
            outstanding[i] = 1.0

    turn = np.array([min(view.turn / view.max_turns, 1.0)])

    bucket = np.zeros(4)
    count = view.kb_match_count()
    if count == 0:
        bucket[0] = 1.0
    elif count == 1:
        bucket[1] = 1.0
    elif count <= 5:
        bucket[2] = 1.0
    else:
        bucket[3] = 1.0

    return np.concatenate([intent_vec, informed, requested_hist, outstanding, turn, bucket])


def feature_dim(domain: Domain) -> int:
    return len(domain.schema.intents) + 3 * len(domain.schema.kb_slots) + 1 + 4


def materialize(view: AgentDialogueView, template: tuple) -> DialogueAct:
    """Turn an action template into a concrete act, filling inform values
    from the first record matching the heard constraints."""
    intent, slot = template
    if intent == "request":
        return DialogueAct(intent="request", request_slots=frozenset({slot}))
    if intent == "inform":
        record = view.matching_record()
        value = record[slot] if record is not None else NO_MATCH
        return DialogueAct(intent="inform", inform_slots={slot: value})
    return DialogueAct(intent=intent)


class QNetwork:
    """input -> rectified hidden (80 units) -> one Q value per action."""

    def __init__(self, input_dim: int, n_actions: int, hidden: int = HIDDEN_SIZE, rng: random.Random | None = None):
        self.input_dim = input_dim
        self.n_actions = n_actions
        self.hidden = hidden
        rng = rng or random.Random(0)
        s1 = (6.0 / (input_dim + hidden)) ** 0.5
        s2 = (6.0 / (hidden + n_actions)) ** 0.5
        self.w1 = np.array([[rng.uniform(-s1, s1) for _ in range(hidden)] for _ in range(input_dim)])
        self.b1 = np.zeros(hidden)
        self.w2 = np.array([[rng.uniform(-s2, s2) for _ in range(n_actions)] for _ in range(hidden)])
        self.b2 = np.zeros(n_actions)

    def params(self) -> list:
        return [self.w1, self.b1, self.w2, self.b2]

    def copy_from(self, other: "QNetwork") -> None:
        self.w1 = other.w1.copy()
        self.b1 = other.b1.copy()
        self.w2 = other.w2.copy()
        self.b2 = other.b2.copy()


def q_forward(net: QNetwork, s: np.ndarray) -> np.ndarray:
    """Action-value vector(s) for a single state or a batch."""
    s = np.asarray(s, dtype=float)
    if s.shape[-1] != net.input_dim:
        raise ValueError(f"state dim {s.shape[-1]} != network input dim {net.input_dim}")
    h = np.maximum(s @ net.w1 + net.b1, 0.0)
    return h @ net.w2 + net.b2


def q_gradients(net: QNetwork, states: np.ndarray, actions: np.ndarray, targets: np.ndarray):
    """Mean squared TD error over the batch and its parameter gradients."""
    states = np.atleast_2d(np.asarray(states, dtype=float))
    batch = states.shape[0]
    pre_h = states @ net.w1 + net.b1
    h = np.maximum(pre_h, 0.0)
    q = h @ net.w2 + net.b2

    picked = q[np.arange(batch), actions]
    diff = picked - targets
    loss = float(np.mean(diff**2))

    dq = np.zeros_like(q)
    dq[np.arange(batch), actions] = 2.0 * diff / batch
    dw2 = h.T @ dq
    db2 = dq.sum(axis=0)
    dh = dq @ net.w2.T
    dpre = dh * (pre_h > 0.0)
    dw1 = states.T @ dpre
    db1 = dpre.sum(axis=0)
    return loss, [dw1, db1, dw2, db2]


def select_action(net: QNetwork, s: np.ndarray, epsilon: float, rng: random.Random) -> int:
    """Epsilon-greedy over q_forward; argmax ties break to the lowest index."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    if epsilon > 0.0 and rng.random() < epsilon:
        return rng.randrange(net.n_actions)
    return int(np.argmax(q_forward(net, s)))


def sync_target(net: QNetwork, target_net: QNetwork) -> None:
    """Bit-exact weight copy into the target network."""
    if (net.input_dim, net.hidden, net.n_actions) != (
        target_net.input_dim, target_net.hidden, target_net.n_actions
    ):
        raise ValueError("network architectures differ")
    target_net.copy_from(net)


class ReplayBuffer:
    """Ring buffer of (s, a, r, s', terminal) with uniform sampling."""

    def __init__(self, capacity: int = 10_000):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._items = []
        self._cursor = 0

    def push(self, s, a, r, s2, terminal) -> None:
        item = (np.asarray(s, dtype=float), int(a), float(r), np.asarray(s2, dtype=float), bool(terminal))
        if len(self._items) < self.capacity:
            self._items.append(item)
        else:
            self._items[self._cursor] = item
        self._cursor = (self._cursor + 1) % self.capacity

    def __len__(self) -> int:
        return len(self._items)

    def sample(self, batch_size: int, rng: random.Random) -> list:
        return [self._items[rng.randrange(len(self._items))] for _ in range(batch_size)]


@dataclass
class Hyperparams:
    gamma: float = 0.9
    # 5e-2 is tuned for the default clipped SGD; use ~1e-3 with adam.
    learning_rate: float = 5e-2
    batch_size: int = 16
    eps_start: float = 0.2
    eps_end: float = 0.01
    buffer_capacity: int = 10_000
    warm_start_dialogues: int = 100
    grad_clip: float = 1.0
    optimizer: str = "sgd"  # or "adam"

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, data: dict) -> "Hyperparams":
        return cls(**data)


def train_step(
    net: QNetwork,
    target_net: QNetwork,
    buffer: ReplayBuffer,
    hp: Hyperparams,
    rng: random.Random,
    opt_state: dict | None = None,
) -> float | None:
    """One uniform-batch TD update; returns the batch loss, or None when
    the buffer holds fewer transitions than a batch (no update)."""
    if len(buffer) < hp.batch_size:
        return None
    batch = buffer.sample(hp.batch_size, rng)
    states = np.stack([b[0] for b in batch])
    actions = np.array([b[1] for b in batch])
    rewards = np.array([b[2] for b in batch])
    next_states = np.stack([b[3] for b in batch])
    terminal = np.array([b[4] for b in batch])

    next_q = q_forward(target_net, next_states).max(axis=1)
    targets = rewards + hp.gamma * next_q * (~terminal)

    loss, grads = q_gradients(net, states, actions, targets)

    total_norm = np.sqrt(sum(float((g**2).sum()) for g in grads))
    if hp.grad_clip > 0 and total_norm > hp.grad_clip:
        grads = [g * (hp.grad_clip / total_norm) for g in grads]

    params = net.params()
    if hp.optimizer == "adam" and opt_state is not None:
        _adam_update(params, grads, hp.learning_rate, opt_state)
    else:
        for p, g in zip(params, grads):
            p -= hp.learning_rate * g
    return loss


def _adam_update(params, grads, lr, state, beta1=0.9, beta2=0.999, eps=1e-8):
    if "m" not in state:
        state["m"] = [np.zeros_like(p) for p in params]
        state["v"] = [np.zeros_like(p) for p in params]
        state["t"] = 0
    state["t"] += 1
    t = state["t"]
    for p, g, m, v in zip(params, grads, state["m"], state["v"]):
        m *= beta1
        m += (1 - beta1) * g
        v *= beta2
        v += (1 - beta2) * g**2
        m_hat = m / (1 - beta1**t)
        v_hat = v / (1 - beta2**t)
        p -= lr * m_hat / (np.sqrt(v_hat) + eps)


def reward(outcome: str | None, max_turns: int) -> float:
    """Per-transition reward: big terminal bonus/penalty, -1 per ordinary turn."""
    if outcome == "success":
        return 2.0 * max_turns
    if outcome in ("failure", "terminated"):
        return -float(max_turns)
    return -1.0


class RuleAgent:
    """Deterministic warm-start policy: narrow the knowledge base by
    requesting unheard informable slots, then answer outstanding requests."""

    def __init__(self, domain: Domain):
        self.domain = domain
        self.actions = build_action_set(domain.schema)
        self._index = {a: i for i, a in enumerate(self.actions)}

    def select(self, view: AgentDialogueView) -> int:
        matches = view.kb_match_count()
        outstanding = view.outstanding_requests
        if outstanding and matches <= 5:
            return self._index[("inform", outstanding[0])]
        candidates = [
            s for s in view.kb_slots
            if s not in view.user_constraints
            and s not in view.user_requested
            and s not in view.agent_requested
        ]
        if candidates and matches > 1:
            return self._index[("request", candidates[0])]
        if outstanding:
            return self._index[("inform", outstanding[0])]
        return self._index[("taskcomplete", None)]


class DQNAgent:
    """Q-network policy plus its target net, replay buffer, and exploration."""

    def __init__(self, domain: Domain, hp: Hyperparams | None = None, seed: int = 0,
                 max_turns: int = 40, hidden: int = HIDDEN_SIZE):
        self.domain = domain
        self.hp = hp or Hyperparams()
        self.rng = random.Random(seed)
        self.seed = seed
        self.max_turns = max_turns
        self.actions = build_action_set(domain.schema)
        dim = feature_dim(domain)
        self.net = QNetwork(dim, len(self.actions), hidden=hidden, rng=self.rng)
        self.target_net = QNetwork(dim, len(self.actions), hidden=hidden, rng=self.rng)
        sync_target(self.net, self.target_net)
        self.buffer = ReplayBuffer(self.hp.buffer_capacity)
        self.epsilon = self.hp.eps_start
        self.epoch = 0
        self.opt_state = {}

    def new_view(self) -> AgentDialogueView:
        return AgentDialogueView(self.domain, self.max_turns)

    def select(self, view: AgentDialogueView, greedy: bool = False) -> int:
        eps = 0.0 if greedy else self.epsilon
        return select_action(self.net, featurize(view), eps, self.rng)

    def set_epoch(self, epoch: int, total_epochs: int) -> None:
        """Linear epsilon anneal from eps_start to eps_end over training."""
        self.epoch = epoch
        if total_epochs <= 1:
            self.epsilon = self.hp.eps_end
        else:
            frac = min(epoch / (total_epochs - 1), 1.0)
            self.epsilon = self.hp.eps_start + frac * (self.hp.eps_end - self.hp.eps_start)

    def train(self, n_steps: int) -> float | None:
        last = None
        for _ in range(n_steps):
            loss = train_step(self.net, self.target_net, self.buffer, self.hp, self.rng, self.opt_state)
            if loss is not None:
                last = loss
        return last

    def sync(self) -> None:
        sync_target(self.net, self.target_net)

    # ---- checkpointing ---------------------------------------------------

    def save(self, path) -> None:
        payload = {
            "domain": self.domain.name,
            "hidden": self.net.hidden,
            "input_dim": self.net.input_dim,
            "n_actions": self.net.n_actions,
            "weights": {
                "w1": self.net.w1.tolist(),
                "b1": self.net.b1.tolist(),
                "w2": self.net.w2.tolist(),
                "b2": self.net.b2.tolist(),
            },
            "hyperparams": self.hp.to_dict(),
            "seed": self.seed,
            "epoch": self.epoch,
            "max_turns": self.max_turns,
        }
        Path(path).write_text(json.dumps(payload) + "\n")

    @classmethod
    def load(cls, path, domain: Domain) -> "DQNAgent":
        data = json.loads(Path(path).read_text())
        if data["domain"] != domain.name:
            raise ValueError(f"checkpoint is for domain {data['domain']!r}, not {domain.name!r}")
        agent = cls(
            domain,
            hp=Hyperparams.from_dict(data["hyperparams"]),
            seed=data["seed"],
            max_turns=data["max_turns"],
            hidden=data["hidden"],
        )
        agent.net.w1 = np.array(data["weights"]["w1"])
        agent.net.b1 = np.array(data["weights"]["b1"])
        agent.net.w2 = np.array(data["weights"]["w2"])
        agent.net.b2 = np.array(data["weights"]["b2"])
        agent.sync()
        agent.epoch = data["epoch"]
        return agent
