"""Rendering: metrics tables, confusion heatmaps, distribution charts,
and highlighted-explanation HTML."""

from __future__ import annotations

import html
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .corpus import CLASSES, DECISIONS
from .diagnostics.explain import Explanation
from .metrics import MetricsReport

CLASS_TITLES = {
    "religio": "Religio-communal",
    "ethno": "Ethno-communal",
    "nondenominational": "Nondenominational",
    "noncommunal": "Noncommunal",
}


def render_metrics_table(report: MetricsReport, title: str = "Model") -> str:
    """Plain-text table with per-class P/R/F1 rows and a macro F1 column."""
    lines = [
        f"{title}",
        f"{'Class':<20}{'Prec.':>8}{'Recall':>8}{'F1':>8}{'Macro F1':>10}",
    ]
    first = True
    for name in CLASSES:
        p, r, f = report.per_class[name]
        macro = f"{report.macro_f1:.2f}" if first else ""
        lines.append(f"{CLASS_TITLES[name]:<20}{p:>8.2f}{r:>8.2f}{f:>8.2f}{macro:>10}")
        first = False
    return "\n".join(lines) + "\n"


def confusion_to_csv(confusion: np.ndarray) -> str:
    header = "gold\\pred," + ",".join(DECISIONS)
    rows = [
        f"{DECISIONS[i]}," + ",".join(str(int(x)) for x in confusion[i])
        for i in range(len(DECISIONS))
    ]
    return "\n".join([header, *rows]) + "\n"


def plot_confusion_heatmap(confusion: np.ndarray, out_path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(confusion, cmap="Blues")
    ax.set_xticks(range(5), DECISIONS, rotation=45, ha="right")
    ax.set_yticks(range(5), DECISIONS)
    ax.set_xlabel("Predicted")
    ax.set_ylabel("Gold")
    for i in range(5):
        for j in range(5):
            ax.text(j, i, int(confusion[i, j]), ha="center", va="center",
                    color="black" if confusion[i, j] < confusion.max() / 2 else "white")
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_class_distribution(fractions: dict[str, float], out_path, title="Class distribution") -> Path:
    names = list(fractions)
    values = [fractions[n] * 100 for n in names]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(names, values, color="#4878b0")
    ax.set_ylabel("Share (%)")
    ax.set_title(title)
    for i, v in enumerate(values):
        ax.text(i, v, f"{v:.1f}%", ha="center", va="bottom", fontsize=9)
    plt.setp(ax.get_xticklabels(), rotation=30, ha="right")
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def explanation_to_html(explanation: Explanation) -> str:
    """Standalone HTML with per-token highlighting: green for weights that
    push toward the target class, red for weights that push away."""
    weights = dict(explanation.features)
    max_abs = max((abs(w) for w in weights.values()), default=1.0) or 1.0
    spans = []
    for token in explanation.text.split():
        w = weights.get(token)
        if w is None:
            spans.append(html.escape(token))
            continue
        alpha = min(abs(w) / max_abs, 1.0)
        color = f"rgba(46,160,67,{alpha:.2f})" if w > 0 else f"rgba(218,54,51,{alpha:.2f})"
        spans.append(
            f'<span style="background:{color}" title="{w:+.4f}">'
            f"{html.escape(token)}</span>"
        )
    rows = "".join(
        f"<tr><td>{html.escape(t)}</td><td>{w:+.4f}</td></tr>"
        for t, w in explanation.features
    )
    return f"""<!DOCTYPE html>
<html><head><meta charset="utf-8"><title>Explanation</title>
<style>body{{font-family:sans-serif;max-width:48em;margin:2em auto}}
span{{padding:0 .15em;border-radius:3px}}
table{{border-collapse:collapse}}td{{border:1px solid #ccc;padding:.2em .6em}}</style>
</head><body>
<h2>Target class {explanation.target_class} (seed {explanation.seed},
surrogate fit {explanation.surrogate_fit:.3f})</h2>
<p>{' '.join(spans)}</p>
<h3>Top features</h3>
<table><tr><th>token</th><th>weight</th></tr>{rows}</table>
</body></html>
"""
