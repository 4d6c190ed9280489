"""Experimental protocol: multi-epoch training, multi-seed averaging,
per-epoch metrics, p_term sweeps, and delimited export.

An epoch rolls a fixed number of dialogues between the policy agent and
the emotion-aware simulated user, interleaving Q-network updates, and
aggregates success rate, turn counts, emotion means (per-dialogue final
normalized intensities) and trigger shares.  Experiments repeat the loop
over a list of seeds and emit one CSV row per (seed, epoch) plus averaged
rows; a sibling CSV carries per-turn emotion means, the other reading of
the aggregation.  Figures are rendered by :mod:`affectsim.plots`.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .domain import Domain, load_domain
from .emotion import EmotionProfile, Personality, default_profile, normalized
from .policy import (
    AgentDialogueView,
    DQNAgent,
    Hyperparams,
    RuleAgent,
    featurize,
    materialize,
    reward,
)
from .simulator import ONGOING, UserSimulator, trace_record

METRIC_FIELDS = (
    "epoch", "success_rate", "avg_turns",
    "angry", "disgust", "happy", "surprise",
    "od_share", "ir_share", "rq_share", "rr_share", "in_share",
)


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    success_rate: float
    avg_turns: float
    angry: float
    disgust: float
    happy: float
    surprise: float
    od_share: float
    ir_share: float
    rq_share: float
    rr_share: float
    in_share: float

    def row(self) -> list:
        return [getattr(self, f) for f in METRIC_FIELDS]


@dataclass
class DialogueRecord:
    """Per-dialogue rollout summary feeding the epoch aggregates."""

    status: str
    turns: int
    final_emotion: np.ndarray  # normalized 6-vector
    turn_emotions: list
    trigger_counts: np.ndarray
    trace: list


@dataclass
class ExperimentConfig:
    domain: str = "movie"
    personality_name: str = "uA"
    personalities: dict = field(default_factory=dict)
    profile: EmotionProfile | None = None
    p_term: float | None = None  # overrides the profile value when set
    epochs: int = 300
    dialogues_per_epoch: int = 100
    seeds: tuple = (101, 102, 103, 104, 105)
    out_dir: str | None = None
    max_turns: int = 40
    unsat_prob: float = 0.1
    hyperparams: Hyperparams = field(default_factory=Hyperparams)
    train: bool = True
    train_steps_per_transition: int = 1
    resume_checkpoint: str | None = None

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.p_term is not None and not 0.0 <= self.p_term <= 1.0:
            raise ValueError("p_term must lie in [0, 1]")
        if self.resume_checkpoint is not None and len(self.seeds) != 1:
            raise ValueError("resuming from a checkpoint requires exactly one seed")

    def resolve_profile(self) -> EmotionProfile:
        profile = self.profile if self.profile is not None else default_profile(self.domain)
        if self.p_term is not None:
            profile = profile.replace(p_term=self.p_term)
        return profile

    def resolve_personality(self) -> Personality:
        if self.personality_name in self.personalities:
            return self.personalities[self.personality_name]
        from .calibration import load_personalities  # default presets

        presets = load_personalities()
        if self.personality_name not in presets:
            raise KeyError(f"unknown personality {self.personality_name!r}")
        return presets[self.personality_name]


def run_dialogue(agent, sim: UserSimulator, train: bool = False, collect_trace: bool = False) -> DialogueRecord:
    """One full dialogue; pushes transitions into the agent buffer when training."""
    state, user_act = sim.reset()
    if hasattr(agent, "new_view"):
        view = agent.new_view()
    else:
        view = AgentDialogueView(sim.domain, sim.max_turns)
    view.observe_user(user_act)

    trigger_counts = np.zeros(5)
    turn_emotions = []
    trace = []
    n_transitions = 0

    while state.status == ONGOING:
        agent_turn = state.turn_count + 1  # act index the simulator will assign
        view.turn = agent_turn
        s_feat = featurize(view) if train else None
        action_index = agent.select(view)
        agent_act = materialize(view, agent.actions[action_index])
        view.observe_agent(agent_act)

        result = sim.step(state, agent_act)
        view.observe_user(result.user_action)
        view.turn = state.turn_count

        trigger_counts += result.triggers.as_array()
        turn_emotions.append(normalized(result.emotion))
        if collect_trace:
            trace.append(trace_record(agent_turn, agent_act, result))

        if train:
            terminal = result.status != ONGOING
            r = reward(result.status if terminal else None, sim.max_turns)
            agent.buffer.push(s_feat, action_index, r, featurize(view), terminal)
            n_transitions += 1

    if train and hasattr(agent, "train"):
        agent.train(n_transitions)

    return DialogueRecord(
        status=state.status,
        turns=state.turn_count,
        final_emotion=normalized(state.emotion),
        turn_emotions=turn_emotions,
        trigger_counts=trigger_counts,
        trace=trace,
    )


def aggregate(epoch: int, records: list) -> EpochMetrics:
    n = len(records)
    success_rate = sum(r.status == "success" for r in records) / n
    avg_turns = sum(r.turns for r in records) / n
    finals = np.stack([r.final_emotion for r in records]).mean(axis=0)
    triggers = np.stack([r.trigger_counts for r in records]).sum(axis=0)
    total = triggers.sum()
    shares = triggers / total if total > 0 else np.zeros(5)
    return EpochMetrics(
        epoch=epoch,
        success_rate=success_rate,
        avg_turns=avg_turns,
        angry=float(finals[0]),
        disgust=float(finals[1]),
        happy=float(finals[3]),
        surprise=float(finals[5]),
        od_share=float(shares[0]),
        ir_share=float(shares[1]),
        rq_share=float(shares[3]),
        rr_share=float(shares[2]),
        in_share=float(shares[4]),
    )


def turn_level_means(epoch: int, records: list) -> EpochMetrics:
    """The same row shape with emotions averaged over every turn instead of
    dialogue finals; trigger shares and success/turns are unchanged."""
    base = aggregate(epoch, records)
    all_turns = [e for r in records for e in r.turn_emotions]
    means = np.stack(all_turns).mean(axis=0) if all_turns else np.zeros(6)
    return EpochMetrics(
        **{
            **{f.name: getattr(base, f.name) for f in fields(EpochMetrics)},
            "angry": float(means[0]),
            "disgust": float(means[1]),
            "happy": float(means[3]),
            "surprise": float(means[5]),
        }
    )


def run_epoch(agent, sim_factory, n_dialogues: int, rng: random.Random,
              epoch: int = 1, train: bool = True, collect_trace: bool = False):
    """Roll ``n_dialogues`` dialogues and aggregate; returns the metrics row
    and the raw dialogue records."""
    sim = sim_factory(rng)
    records = [run_dialogue(agent, sim, train=train, collect_trace=collect_trace) for _ in range(n_dialogues)]
    return aggregate(epoch, records), records


def _make_sim_factory(domain: Domain, personality: Personality, profile: EmotionProfile,
                      max_turns: int, unsat_prob: float):
    def factory(rng: random.Random) -> UserSimulator:
        return UserSimulator(
            domain, personality, profile,
            rng=random.Random(rng.getrandbits(64)),
            term_rng=random.Random(rng.getrandbits(64)),
            max_turns=max_turns,
            unsat_prob=unsat_prob,
        )

    return factory


def run_seed(config: ExperimentConfig, seed: int, domain: Domain,
             personality: Personality, profile: EmotionProfile) -> list:
    """Train one agent for `epochs` epochs under a single seed."""
    master = random.Random(seed)
    agent_seed = master.getrandbits(64)
    if config.resume_checkpoint is not None:
        agent = DQNAgent.load(config.resume_checkpoint, domain)
    else:
        agent = DQNAgent(
            domain, hp=config.hyperparams, seed=agent_seed, max_turns=config.max_turns,
        )
    factory = _make_sim_factory(domain, personality, profile, config.max_turns, config.unsat_prob)
    epoch_rng = random.Random(master.getrandbits(64))

    fresh_start = config.resume_checkpoint is None
    if config.train and fresh_start and config.hyperparams.warm_start_dialogues > 0:
        rule = RuleAgent(domain)
        warm_sim = factory(epoch_rng)
        for _ in range(config.hyperparams.warm_start_dialogues):
            _warm_start_dialogue(rule, warm_sim, agent)

    rows = []
    for epoch in range(1, config.epochs + 1):
        if config.train:
            agent.set_epoch(epoch - 1, config.epochs)
        metrics, records = run_epoch(
            agent, factory, config.dialogues_per_epoch, epoch_rng,
            epoch=epoch, train=config.train,
        )
        if config.train:
            agent.sync()
        rows.append((metrics, turn_level_means(epoch, records)))
    return rows, agent


def _warm_start_dialogue(rule: RuleAgent, sim: UserSimulator, learner: DQNAgent) -> None:
    """Fill the replay buffer from a rule-based policy rollout."""
    state, user_act = sim.reset()
    view = learner.new_view()
    view.observe_user(user_act)
    while state.status == ONGOING:
        view.turn = state.turn_count + 1
        s_feat = featurize(view)
        action_index = rule.select(view)
        agent_act = materialize(view, rule.actions[action_index])
        view.observe_agent(agent_act)
        result = sim.step(state, agent_act)
        view.observe_user(result.user_action)
        view.turn = state.turn_count
        terminal = result.status != ONGOING
        r = reward(result.status if terminal else None, sim.max_turns)
        learner.buffer.push(s_feat, action_index, r, featurize(view), terminal)


def run_experiment(config: ExperimentConfig):
    """Per-seed learning curves plus the seed-averaged curve; writes CSVs
    when the config names an output directory."""
    domain = load_domain(config.domain)
    profile = config.resolve_profile()
    personality = config.resolve_personality()

    by_seed = {}
    turn_by_seed = {}
    final_agent = None
    for seed in config.seeds:
        rows, agent = run_seed(config, seed, domain, personality, profile)
        by_seed[seed] = [m for m, _ in rows]
        turn_by_seed[seed] = [t for _, t in rows]
        final_agent = agent

    averaged = average_rows(by_seed)
    turn_averaged = average_rows(turn_by_seed)

    if config.out_dir is not None:
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_metrics_csv(out / "metrics.csv", by_seed, averaged)
        write_metrics_csv(out / "metrics_turns.csv", turn_by_seed, turn_averaged)

    return ExperimentResult(
        config=config, by_seed=by_seed, averaged=averaged,
        turn_by_seed=turn_by_seed, turn_averaged=turn_averaged, agent=final_agent,
    )


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    by_seed: dict
    averaged: list
    turn_by_seed: dict
    turn_averaged: list
    agent: DQNAgent | None

    def success_curve(self) -> np.ndarray:
        return np.array([m.success_rate for m in self.averaged])


def average_rows(by_seed: dict) -> list:
    """Arithmetic mean across seeds, epoch by epoch."""
    seeds = sorted(by_seed)
    n_epochs = len(by_seed[seeds[0]])
    averaged = []
    for i in range(n_epochs):
        rows = [by_seed[s][i] for s in seeds]
        values = {
            f: (rows[0].epoch if f == "epoch" else sum(getattr(r, f) for r in rows) / len(rows))
            for f in METRIC_FIELDS
        }
        averaged.append(EpochMetrics(**values))
    return averaged


# ---- CSV export ---------------------------------------------------------


def _format(value) -> str:
    return repr(float(value)) if isinstance(value, float) else str(value)


def write_metrics_csv(path, by_seed: dict, averaged: list) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("seed",) + METRIC_FIELDS)
        for seed in sorted(by_seed):
            for m in by_seed[seed]:
                writer.writerow([str(seed)] + [_format(v) for v in m.row()])
        for m in averaged:
            writer.writerow(["avg"] + [_format(v) for v in m.row()])


def read_metrics_csv(path):
    """Inverse of write_metrics_csv: row dicts keyed by (seed, epoch)."""
    by_seed: dict = {}
    averaged = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            metrics = EpochMetrics(
                epoch=int(row["epoch"]),
                **{f: float(row[f]) for f in METRIC_FIELDS if f != "epoch"},
            )
            if row["seed"] == "avg":
                averaged.append(metrics)
            else:
                by_seed.setdefault(int(row["seed"]), []).append(metrics)
    return by_seed, averaged


def compare_curves(curve_a, curve_b) -> float:
    """Root-mean-square pointwise gap between two success curves; curves of
    different lengths are truncated to the shorter one."""
    a = np.asarray(curve_a, dtype=float)
    b = np.asarray(curve_b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("cannot compare empty curves")
    n = min(a.size, b.size)
    return float(np.sqrt(np.mean((a[:n] - b[:n]) ** 2)))


def rank_by_similarity(reference, candidates: dict) -> list:
    """Candidate labels ordered most-similar-first against the reference curve."""
    scored = [(compare_curves(reference, curve), label) for label, curve in candidates.items()]
    scored.sort(key=lambda pair: (pair[0], str(pair[1])))
    return [label for _, label in scored]
