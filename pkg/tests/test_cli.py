"""CLI surface: train/sweep/compare/calibrate/gen-assets round trips."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from affectsim.cli import main
from affectsim.domain import load_domain

from conftest import grid_profile, roll_annotated_session


@pytest.fixture()
def runner():
    return CliRunner()


TRAIN_ARGS = [
    "train", "--domain", "movie", "--personality", "uA", "--p-term", "0",
    "--epochs", "2", "--dialogues", "6", "--seeds", "1", "--seed-base", "301",
    "--unsat-prob", "0", "--no-plots",
]


def test_train_writes_outputs(runner, tmp_path):
    out = tmp_path / "run"
    result = runner.invoke(main, TRAIN_ARGS + ["--out", str(out)])
    assert result.exit_code == 0, result.output
    assert (out / "metrics.csv").exists()
    assert (out / "metrics_turns.csv").exists()
    assert (out / "checkpoint.json").exists()
    assert "success=" in result.output


def test_train_repeat_is_byte_identical(runner, tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert runner.invoke(main, TRAIN_ARGS + ["--out", str(out_a)]).exit_code == 0
    assert runner.invoke(main, TRAIN_ARGS + ["--out", str(out_b)]).exit_code == 0
    for name in ("metrics.csv", "metrics_turns.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_train_emits_figures(runner, tmp_path):
    out = tmp_path / "figrun"
    result = runner.invoke(main, [a for a in TRAIN_ARGS if a != "--no-plots"] + ["--out", str(out)])
    assert result.exit_code == 0, result.output
    figures = sorted(p.name for p in (out / "figures").glob("*.svg"))
    assert figures == ["movie_pterm0.0_emotion.svg", "movie_pterm0.0_triggers.svg"]


def test_sweep_produces_runs_and_figures(runner, tmp_path):
    out = tmp_path / "sweep"
    result = runner.invoke(main, [
        "sweep", "--domain", "movie", "--p-term", "0,0.5",
        "--epochs", "2", "--dialogues", "5", "--seeds", "1", "--seed-base", "11",
        "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    assert (out / "p_term_0" / "metrics.csv").exists()
    assert (out / "p_term_0.5" / "metrics.csv").exists()
    figures = sorted(p.name for p in (out / "figures").glob("*.svg"))
    assert len(figures) == 5  # 2 quantities x 2 settings + learning curves
    assert "movie_learning_curves.svg" in figures


def test_compare_ranks_identical_curve_first(runner, tmp_path):
    human = tmp_path / "human.csv"
    human.write_text(
        "session_index,session_id,success,cumulative_success_rate\n"
        + "".join(f"{i},s{i},1,{0.1 * i}\n" for i in range(1, 6))
    )
    twin = tmp_path / "twin" / "human.csv"
    twin.parent.mkdir()
    twin.write_text(human.read_text())
    off = tmp_path / "off" / "curve.csv"
    off.parent.mkdir()
    off.write_text(
        "session_index,session_id,success,cumulative_success_rate\n"
        + "".join(f"{i},s{i},0,{0.05 * i}\n" for i in range(1, 6))
    )
    result = runner.invoke(main, [
        "compare", "--human", str(human), "--sim", str(twin), "--sim", str(off),
        "--out", str(tmp_path / "cmp"),
    ])
    assert result.exit_code == 0, result.output
    assert "best match: twin" in result.output
    assert result.output.startswith("0.000000  twin")
    assert (tmp_path / "cmp" / "ranking.csv").exists()
    assert (tmp_path / "cmp" / "curve_comparison.svg").exists()


def test_gen_assets_reproduces_checked_in_data(runner, tmp_path):
    out = tmp_path / "assets"
    result = runner.invoke(main, ["gen-assets", "--out", str(out)])
    assert result.exit_code == 0, result.output
    package_data = Path("src/affectsim/data")
    for rel in (
        "movie/schema.json", "movie/kb.json", "movie/goal_templates.json",
        "taxi/schema.json", "taxi/kb.json", "taxi/goal_templates.json",
        "profiles/movie.json", "profiles/taxi.json", "personalities.json",
    ):
        assert (out / rel).read_bytes() == (package_data / rel).read_bytes(), rel


def test_calibrate_replay_and_suggest(runner, tmp_path):
    movie = load_domain("movie")
    profile = grid_profile()
    profile_path = tmp_path / "grid_profile.json"
    profile.save(profile_path)
    session_dir = tmp_path / "sessions"
    session_dir.mkdir()
    for seed in range(2):
        session = roll_annotated_session(movie, profile, seed=seed, session_id=f"s{seed}")
        session.save(session_dir / f"s{seed}.jsonl")

    result = runner.invoke(main, [
        "calibrate", "replay",
        "--session", str(session_dir / "s0.jsonl"),
        "--profile", str(profile_path),
        "--out", str(tmp_path / "report"),
    ])
    assert result.exit_code == 0, result.output
    assert "overall rmse: 0.000000" in result.output

    out_path = tmp_path / "suggestions.json"
    result = runner.invoke(main, [
        "calibrate", "suggest",
        "--sessions", str(session_dir),
        "--profile", str(profile_path),
        "--out", str(out_path),
    ])
    assert result.exit_code == 0, result.output
    suggestions = json.loads(out_path.read_text())
    assert suggestions
    for cells in suggestions.values():
        for ratio in cells.values():
            assert ratio == 1.0


def test_info_reports_domain_summary(runner):
    result = runner.invoke(main, ["info", "--domain", "taxi"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["kb_records"] == 200
    assert payload["profile"]["tau"] == 26
    assert "uB" in payload["personalities"]
