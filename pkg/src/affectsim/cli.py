"""Command-line entry points for training, sweeps, curve comparison,
calibration reports, asset regeneration, and the HIL service."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import click

from .calibration import (
    AnnotatedSession,
    format_report,
    load_personalities,
    replay_and_diff,
    suggest_scaling,
    write_report_csv,
    write_suggestions,
)
from .domain import load_domain
from .emotion import EmotionProfile, default_profile
from .harness import (
    ExperimentConfig,
    compare_curves,
    read_metrics_csv,
    run_experiment,
)
from .policy import Hyperparams


def _seed_list(count: int, base: int) -> tuple:
    return tuple(base + i for i in range(count))


def _resolve_profile(profile_path, domain: str, p_term) -> EmotionProfile:
    profile = EmotionProfile.load(profile_path) if profile_path else default_profile(domain)
    if p_term is not None:
        profile = profile.replace(p_term=p_term)
    return profile


@click.group()
def main():
    """Emotion-aware user simulation workbench."""


@main.command()
@click.option("--domain", default="movie", show_default=True)
@click.option("--profile", "profile_path", type=click.Path(exists=True), default=None,
              help="Emotion profile JSON; defaults to the built-in domain profile.")
@click.option("--personality", default="uA", show_default=True)
@click.option("--p-term", type=float, default=None, help="Override the profile's termination probability.")
@click.option("--epochs", type=int, default=300, show_default=True)
@click.option("--dialogues", type=int, default=100, show_default=True, help="Dialogues per epoch.")
@click.option("--seeds", type=int, default=5, show_default=True, help="Number of repeated runs.")
@click.option("--seed-base", type=int, default=101, show_default=True)
@click.option("--max-turns", type=int, default=40, show_default=True)
@click.option("--unsat-prob", type=float, default=0.1, show_default=True)
@click.option("--learning-rate", type=float, default=None)
@click.option("--optimizer", type=click.Choice(["sgd", "adam"]), default=None)
@click.option("--no-train", is_flag=True, help="Roll dialogues without learning (fixed policy).")
@click.option("--no-plots", is_flag=True)
@click.option("--resume", "resume_checkpoint", type=click.Path(exists=True), default=None,
              help="Continue training from a checkpoint (single seed only).")
@click.option("--out", "out_dir", type=click.Path(), required=True)
def train(domain, profile_path, personality, p_term, epochs, dialogues, seeds,
          seed_base, max_turns, unsat_prob, learning_rate, optimizer, no_train,
          no_plots, resume_checkpoint, out_dir):
    """Train the deep-Q policy against the emotion-aware simulator."""
    profile = _resolve_profile(profile_path, domain, p_term)
    hp = Hyperparams()
    if learning_rate is not None:
        hp.learning_rate = learning_rate
    if optimizer is not None:
        hp.optimizer = optimizer
    config = ExperimentConfig(
        domain=domain,
        personality_name=personality,
        profile=profile,
        epochs=epochs,
        dialogues_per_epoch=dialogues,
        seeds=_seed_list(seeds, seed_base),
        out_dir=out_dir,
        max_turns=max_turns,
        unsat_prob=unsat_prob,
        hyperparams=hp,
        train=not no_train,
        resume_checkpoint=resume_checkpoint,
    )
    result = run_experiment(config)
    if result.agent is not None:
        result.agent.save(Path(out_dir) / "checkpoint.json")
    if not no_plots:
        from .plots import export_plots

        label = profile.p_term
        export_plots({label: result.averaged}, Path(out_dir) / "figures", domain=domain)
    final = result.averaged[-1]
    click.echo(f"{domain}/{personality}: epoch {final.epoch} success={final.success_rate:.3f} "
               f"turns={final.avg_turns:.2f}")
    click.echo(f"metrics: {Path(out_dir) / 'metrics.csv'}")


@main.command()
@click.option("--domain", default="movie", show_default=True)
@click.option("--profile", "profile_path", type=click.Path(exists=True), default=None)
@click.option("--personality", default="uA", show_default=True)
@click.option("--p-term", "p_term_grid", default="0,0.01,0.03,0.05,0.10", show_default=True,
              help="Comma-separated termination probabilities to sweep.")
@click.option("--epochs", type=int, default=300, show_default=True)
@click.option("--dialogues", type=int, default=100, show_default=True)
@click.option("--seeds", type=int, default=5, show_default=True)
@click.option("--seed-base", type=int, default=101, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def sweep(domain, profile_path, personality, p_term_grid, epochs, dialogues, seeds, seed_base, out_dir):
    """Run the training experiment once per termination probability."""
    grid = [float(v) for v in p_term_grid.split(",") if v.strip() != ""]
    out = Path(out_dir)
    curves = {}
    metrics_by_setting = {}
    for p_term in grid:
        profile = _resolve_profile(profile_path, domain, p_term)
        run_dir = out / f"p_term_{p_term:g}"
        config = ExperimentConfig(
            domain=domain, personality_name=personality, profile=profile,
            epochs=epochs, dialogues_per_epoch=dialogues,
            seeds=_seed_list(seeds, seed_base), out_dir=str(run_dir),
        )
        result = run_experiment(config)
        curves[f"p_term={p_term:g}"] = result.success_curve()
        metrics_by_setting[f"{p_term:g}"] = result.averaged
        click.echo(f"p_term={p_term:g}: final success={result.averaged[-1].success_rate:.3f}")
    from .plots import export_comparison_plot, export_plots

    export_plots(metrics_by_setting, out / "figures", domain=domain)
    export_comparison_plot(curves, out / "figures" / f"{domain}_learning_curves.svg")
    click.echo(f"sweep figures: {out / 'figures'}")


def _load_curve(path: str) -> list:
    """Success-rate curve from either a metrics CSV (averaged rows) or a
    HIL human_curve CSV (cumulative success rate)."""
    with open(path, newline="") as fh:
        header = next(csv.reader(fh))
    if "cumulative_success_rate" in header:
        with open(path, newline="") as fh:
            return [float(row["cumulative_success_rate"]) for row in csv.DictReader(fh)]
    _, averaged = read_metrics_csv(path)
    if not averaged:
        raise click.ClickException(f"{path} contains no averaged rows")
    return [m.success_rate for m in averaged]


@main.command()
@click.option("--human", "human_path", type=click.Path(exists=True), required=True,
              help="Reference curve CSV (HIL export or metrics CSV).")
@click.option("--sim", "sim_paths", type=click.Path(exists=True), multiple=True)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.argument("extra_sims", type=click.Path(exists=True), nargs=-1)
def compare(human_path, sim_paths, out_dir, extra_sims):
    """Rank simulated runs by learning-curve similarity to the reference.

    Shell globs work directly: `--sim runs/sweep/*/metrics.csv` expands so
    that the extra paths arrive as trailing arguments.
    """
    all_sims = list(sim_paths) + list(extra_sims)
    if not all_sims:
        raise click.UsageError("provide at least one simulated curve (--sim or positional)")
    human = _load_curve(human_path)
    ranked = []
    curves = {"human": human}
    for path in all_sims:
        curve = _load_curve(path)
        label = Path(path).parent.name or Path(path).stem
        curves[label] = curve
        ranked.append((compare_curves(human, curve), label, path))
    ranked.sort(key=lambda r: (r[0], r[1]))
    for distance, label, path in ranked:
        click.echo(f"{distance:.6f}  {label}  {path}")
    click.echo(f"best match: {ranked[0][1]}")
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with (out / "ranking.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["rmse", "label", "path"])
            for distance, label, path in ranked:
                writer.writerow([repr(distance), label, path])
        from .plots import export_comparison_plot

        export_comparison_plot(curves, out / "curve_comparison.svg")


@main.group()
def calibrate():
    """Replay annotated sessions and derive matrix adjustment advice."""


@calibrate.command("replay")
@click.option("--session", "session_path", type=click.Path(exists=True), required=True)
@click.option("--domain", default=None, help="Defaults to the session's own domain.")
@click.option("--profile", "profile_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None)
def calibrate_replay(session_path, domain, profile_path, out_dir):
    """Diff one annotated session against its simulated replay."""
    session = AnnotatedSession.load(session_path)
    domain_name = domain or session.domain
    dom = load_domain(domain_name)
    profile = EmotionProfile.load(profile_path) if profile_path else default_profile(domain_name)
    report = replay_and_diff(session, profile, dom)
    click.echo(format_report(report))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_report_csv(report, out / f"report_{session.session_id or 'session'}.csv")
        (out / f"report_{session.session_id or 'session'}.txt").write_text(format_report(report) + "\n")


@calibrate.command("suggest")
@click.option("--sessions", "session_dir", type=click.Path(exists=True), required=True,
              help="Directory of session JSONL files.")
@click.option("--domain", default=None)
@click.option("--profile", "profile_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", type=click.Path(), required=True)
def calibrate_suggest(session_dir, domain, profile_path, out_path):
    """Aggregate replays into per-cell m_te scaling suggestions."""
    paths = sorted(Path(session_dir).glob("*.jsonl"))
    if not paths:
        raise click.ClickException(f"no session files under {session_dir}")
    sessions = [AnnotatedSession.load(p) for p in paths]
    domain_name = domain or sessions[0].domain
    dom = load_domain(domain_name)
    profile = EmotionProfile.load(profile_path) if profile_path else default_profile(domain_name)
    reports = [replay_and_diff(s, profile, dom) for s in sessions]
    suggestions = suggest_scaling(reports)
    write_suggestions(suggestions, out_path)
    click.echo(f"wrote {out_path} ({sum(len(v) for v in suggestions.values())} cells "
               f"from {len(sessions)} sessions)")


@main.command()
@click.option("--domain", default="movie", show_default=True)
@click.option("--checkpoint", type=click.Path(exists=True), required=True)
@click.option("--data-dir", type=click.Path(), default="hil_data", show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8321, show_default=True)
@click.option("--static-dir", type=click.Path(), default=None,
              help="Built web console assets to serve at /.")
def serve(domain, checkpoint, data_dir, host, port, static_dir):
    """Run the human-in-the-loop session service."""
    import uvicorn

    from .service import HilService, create_app

    service = HilService(data_dir, default_domain=domain, default_checkpoint=checkpoint)
    app = create_app(service, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.option("--domain", default="movie", show_default=True)
@click.option("--personality", default="uA", show_default=True)
@click.option("--profile", "profile_path", type=click.Path(exists=True), default=None)
@click.option("--p-term", type=float, default=None)
@click.option("--checkpoint", type=click.Path(exists=True), default=None,
              help="Policy checkpoint; defaults to the built-in rule agent.")
@click.option("--dialogues", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--unsat-prob", type=float, default=0.1, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="Trace log (JSON lines, one record per exchange).")
def simulate(domain, personality, profile_path, p_term, checkpoint, dialogues,
             seed, unsat_prob, out_path):
    """Roll dialogues against a fixed policy and write the turn trace log."""
    import json as _json
    import random as _random

    from .harness import run_dialogue
    from .policy import DQNAgent, RuleAgent
    from .simulator import UserSimulator

    dom = load_domain(domain)
    profile = _resolve_profile(profile_path, domain, p_term)
    presets = load_personalities()
    if personality not in presets:
        raise click.ClickException(f"unknown personality {personality!r}")
    agent = DQNAgent.load(checkpoint, dom) if checkpoint else RuleAgent(dom)
    sim = UserSimulator(
        dom, presets[personality], profile,
        rng=_random.Random(seed), unsat_prob=unsat_prob,
    )
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    successes = 0
    with out.open("w") as fh:
        for index in range(dialogues):
            record = run_dialogue(agent, sim, train=False, collect_trace=True)
            successes += record.status == "success"
            for row in record.trace:
                fh.write(_json.dumps({"dialogue": index, **row}) + "\n")
    click.echo(f"wrote {out_path}: {dialogues} dialogues, "
               f"success rate {successes / dialogues:.2f}")


@main.command("gen-assets")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--seed", type=int, default=7, show_default=True)
def gen_assets(out_dir, seed):
    """Regenerate the synthetic domain assets and default profiles."""
    from .assets import write_domain_assets

    for path in write_domain_assets(out_dir, seed=seed):
        click.echo(str(path))


@main.command()
@click.option("--domain", default="movie", show_default=True)
def info(domain):
    """Print the loaded schema, KB size, and default profile summary."""
    dom = load_domain(domain)
    profile = default_profile(domain)
    personalities = load_personalities()
    click.echo(json.dumps({
        "domain": dom.name,
        "intents": sorted(dom.schema.intents),
        "slots": sorted(dom.schema.slots),
        "kb_records": len(dom.kb),
        "goal_templates": len(dom.goal_templates),
        "profile": {"eta_b": profile.eta_b, "p_term": profile.p_term, "tau": profile.tau},
        "personalities": sorted(personalities),
    }, indent=2))


if __name__ == "__main__":
    main()
