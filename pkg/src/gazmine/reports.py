"""Figure rendering for evaluation reports.

Every report path writes a PNG chart next to its TSV so batch runs leave
both machine-readable and eyeball-ready artifacts.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .evaluation import ZoneReport  # noqa: E402
from .segmenter import SegmentationScore  # noqa: E402


def render_prf_chart(rows: dict, path: str | Path, title: str) -> Path:
    """Grouped precision/recall/F1 bars, one group per tag or entity kind."""
    path = Path(path)
    labels = [k.name if hasattr(k, "name") else str(k) for k in rows]
    precision = [rows[k].precision for k in rows]
    recall = [rows[k].recall for k in rows]
    f1 = [rows[k].f1 for k in rows]
    x = range(len(labels))
    width = 0.27
    fig, ax = plt.subplots(figsize=(max(4.0, 1.1 * len(labels)), 3.2))
    ax.bar([i - width for i in x], precision, width, label="precision")
    ax.bar(list(x), recall, width, label="recall")
    ax.bar([i + width for i in x], f1, width, label="F1")
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels)
    ax.set_ylim(0, 1.05)
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_zone_chart(report: ZoneReport, path: str | Path) -> Path:
    """Per-zone verified proportion, falling with the confidence rank."""
    path = Path(path)
    zones = range(1, len(report.zones) + 1)
    props = [r.proportion for r in report.zones]
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.plot(list(zones), props, marker="o")
    ax.set_xticks(list(zones))
    ax.set_xlabel("zone (by decreasing score)")
    ax.set_ylabel("verified proportion")
    ax.set_ylim(0, 1.05)
    ax.set_title(f"zone analysis: overall rate {report.overall_rate:.4f}")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_segmentation_chart(score: SegmentationScore,
                              path: str | Path) -> Path:
    path = Path(path)
    names = ["X1", "X2", "X3", "Y1", "Y2"]
    values = [score.x1, score.x2, score.x3, score.y1, score.y2]
    fig, ax = plt.subplots(figsize=(4.2, 3.0))
    ax.bar(names, values)
    ax.set_ylim(0, 1.05)
    ax.set_title(f"segmentation over {score.n_pairs} pairs "
                 f"({score.n_excluded} excluded)")
    for i, v in enumerate(values):
        ax.text(i, v + 0.02, f"{v:.3f}", ha="center", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
