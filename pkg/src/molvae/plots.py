"""Training-curve figures from metrics logs.

One figure, six panels: KL weight, KL, reconstruction loss, mutual
information, reconstruction accuracy, and prior validity. Several runs
can be overlaid; each gets one color across all panels.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .metrics import MetricsRecord, read_records  # noqa: E402

PANELS = (
    ("beta", "train", "KL weight"),
    ("kl", "valid", "KL (nats)"),
    ("recon_per_token", "valid", "recon loss / token"),
    ("mutual_info", "valid", "mutual information (nats)"),
    ("seq_accuracy", "eval", "sequence accuracy"),
    ("validity", "eval", "prior validity"),
)


def _series(records: list[MetricsRecord], field: str, split: str
            ) -> tuple[list[int], list[float]]:
    xs, ys = [], []
    for r in records:
        value = getattr(r, field)
        if r.split == split and value is not None:
            xs.append(r.step)
            ys.append(value)
    return xs, ys


def plot_metrics(metrics_paths: list[str | Path], out_path: str | Path,
                 labels: list[str] | None = None) -> None:
    """Render the six-panel figure; refuses to write an empty plot."""
    if not metrics_paths:
        raise ValueError("no metrics files given")
    if labels is None:
        labels = [Path(p).parent.name or str(p) for p in metrics_paths]
    if len(labels) != len(metrics_paths):
        raise ValueError("labels and metrics files differ in length")

    runs = [read_records(p) for p in metrics_paths]
    if all(not records for records in runs):
        raise ValueError("all metrics files are empty, nothing to plot")

    fig, axes = plt.subplots(2, 3, figsize=(15, 8))
    for ax, (fld, split, title) in zip(axes.flat, PANELS):
        drew = False
        for records, label in zip(runs, labels):
            xs, ys = _series(records, fld, split)
            # fall back to the training split when the preferred one is absent
            if not xs and split != "train":
                xs, ys = _series(records, fld, "train")
            if xs:
                ax.plot(xs, ys, marker="o", markersize=2.5, label=label)
                drew = True
        ax.set_title(title)
        ax.set_xlabel("step")
        ax.grid(True, alpha=0.3)
        if drew:
            ax.legend(fontsize=8)
        else:
            ax.text(0.5, 0.5, "no data", ha="center", va="center",
                    transform=ax.transAxes, color="gray")
    fig.tight_layout()
    fig.savefig(out_path, dpi=110)
    plt.close(fig)
