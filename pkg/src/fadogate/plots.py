"""Figure rendering for evaluation reports and grid searches.

Figures are written next to the report files they belong to; everything
uses the Agg backend so headless runs work.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .evaluation import EvalReport

_CLASS_NAMES = ("fado", "other")


def _fig_path(report_path, kind: str) -> Path:
    p = Path(report_path)
    base = p.with_suffix("") if p.suffix == ".json" else p
    return Path(f"{base}.{kind}.png")


def save_confusion_figure(report: EvalReport, report_path) -> Path:
    cm = report.confusion
    counts = np.array([[cm.tp, cm.fp], [cm.fn, cm.tn]])
    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    im = ax.imshow(counts, cmap="Blues")
    for (r, c), value in np.ndenumerate(counts):
        ax.text(c, r, str(value), ha="center", va="center",
                color="black" if value < counts.max() * 0.6 else "white")
    ax.set_xticks([0, 1], _CLASS_NAMES)
    ax.set_yticks([0, 1], _CLASS_NAMES)
    ax.set_xlabel("actual")
    ax.set_ylabel("predicted")
    ax.set_title(f"accuracy {report.accuracy:.1f}%")
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    out = _fig_path(report_path, "confusion")
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def save_decision_figure(report: EvalReport, report_path) -> Path:
    pos = [r.decision_value for r in report.per_item if r.actual > 0]
    neg = [r.decision_value for r in report.per_item if r.actual < 0]
    lo = min(pos + neg)
    hi = max(pos + neg)
    bins = np.linspace(lo, hi, 41) if hi > lo else 10
    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    ax.hist(pos, bins=bins, alpha=0.65, label="actual fado")
    ax.hist(neg, bins=bins, alpha=0.65, label="actual other")
    ax.axvline(0.0, color="k", linewidth=1, linestyle="--")
    ax.set_xlabel("decision value")
    ax.set_ylabel("songs")
    ax.legend()
    fig.tight_layout()
    out = _fig_path(report_path, "decisions")
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def save_report_figures(report: EvalReport, report_path) -> list:
    return [
        save_confusion_figure(report, report_path),
        save_decision_figure(report, report_path),
    ]


def save_grid_figure(points, report_path) -> Path:
    """Heatmap of CV accuracy over the (C, gamma) grid."""
    cs = sorted({p[0] for p in points})
    gs = sorted({p[1] for p in points})
    acc = np.full((len(gs), len(cs)), np.nan)
    for c, g, a in points:
        acc[gs.index(g), cs.index(c)] = a
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    im = ax.imshow(acc, origin="lower", aspect="auto", cmap="viridis")
    ax.set_xticks(range(len(cs)), [f"{np.log2(c):.0f}" for c in cs])
    ax.set_yticks(range(len(gs)), [f"{np.log2(g):.0f}" for g in gs])
    ax.set_xlabel("log2 C")
    ax.set_ylabel("log2 gamma")
    ax.set_title("cross-validated accuracy (%)")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    out = _fig_path(report_path, "grid")
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out
