"""Deterministic matplotlib figure export for experiment reports.

One SVG line chart per (quantity, termination-probability) pair — emotion
means on the left-style chart, trigger shares on the right-style chart —
plus a success-rate comparison chart across settings.  Output bytes are
reproducible for identical inputs: the SVG hash salt is pinned and date
metadata is stripped.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "affectsim"

EMOTION_SERIES = ("angry", "disgust", "happy", "surprise")
TRIGGER_SERIES = ("od_share", "ir_share", "rq_share", "rr_share", "in_share")
TRIGGER_LABELS = {"od_share": "OD", "ir_share": "IR", "rq_share": "RQ", "rr_share": "RR", "in_share": "IN"}

# Upward markers flag quantities that track a pleasant experience, downward
# ones those that track user frustration.
_POSITIVE = {"happy", "surprise", "rr_share", "in_share"}


def _save(fig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _line_chart(rows, series, labels, title, ylabel, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    epochs = [m.epoch for m in rows]
    for name in series:
        marker = "^" if name in _POSITIVE else "v"
        ax.plot(epochs, [getattr(m, name) for m in rows], marker=marker,
                markersize=3, linewidth=1.2, label=labels.get(name, name))
    ax.set_xlabel("epoch")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def export_plots(metrics_by_setting: dict, out_dir, domain: str = "") -> list:
    """Emit the emotion and trigger chart per setting; returns written paths.

    ``metrics_by_setting`` maps a setting label (typically the p_term value)
    to a list of averaged epoch rows.  Empty input writes nothing.
    """
    out_dir = Path(out_dir)
    written = []
    prefix = f"{domain}_" if domain else ""
    for setting in sorted(metrics_by_setting, key=str):
        rows = metrics_by_setting[setting]
        if not rows:
            continue
        tag = f"pterm{setting}"
        emotion_path = out_dir / f"{prefix}{tag}_emotion.svg"
        _line_chart(
            rows, EMOTION_SERIES, {}, f"{domain or 'simulated'} emotion (p_term={setting})",
            "mean normalized intensity", emotion_path,
        )
        written.append(emotion_path)
        trigger_path = out_dir / f"{prefix}{tag}_triggers.svg"
        _line_chart(
            rows, TRIGGER_SERIES, TRIGGER_LABELS, f"{domain or 'simulated'} triggers (p_term={setting})",
            "share of detected triggers", trigger_path,
        )
        written.append(trigger_path)
    return written


def export_comparison_plot(curves: dict, path) -> Path:
    """Success-rate learning curves overlaid for p_term selection."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label in sorted(curves, key=str):
        values = curves[label]
        ax.plot(range(1, len(values) + 1), values, linewidth=1.4, label=str(label))
    ax.set_xlabel("epoch")
    ax.set_ylabel("success rate")
    ax.set_title("learning curves")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    _save(fig, path)
    return path
