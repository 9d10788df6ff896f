"""Report rendering: delimited files plus matplotlib figures.

The agree and eval paths can write their results to a directory as a CSV next
to a PNG chart. Figures visualize only computed statistics (agreement rates,
accuracies, mean distances); asset imagery is never touched.
"""

from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def write_agreement_report(payload: dict, out_dir: str | Path) -> list[Path]:
    """Write agreement.csv and agreement.png under out_dir; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "agreement.csv"
    png_path = out / "agreement.png"

    rows = [("tag_level", payload["tag_level"])]
    rows += [(f"top_{row['k']}", row) for row in payload["topk"]]

    with csv_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["row", "subjects_agreeing", "subjects_total", "rate"])
        for name, report in rows:
            writer.writerow(
                [name, report["subjects_agreeing"], report["subjects_total"], report["rate"]]
            )

    labels = [name for name, _ in rows]
    values = [float(Fraction(report["rate"])) * 100 for _, report in rows]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    bars = ax.bar(labels, values, color=["#777777"] + ["#4878cf"] * (len(labels) - 1))
    ax.set_ylabel("agreement rate (%)")
    ax.set_ylim(0, 105)
    ax.set_title(f"Annotator agreement ({payload['catalog_id']})")
    ax.bar_label(bars, fmt="%.1f")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [csv_path, png_path]


def write_eval_report(payload: dict, out_dir: str | Path) -> list[Path]:
    """Write eval.csv and eval.png under out_dir; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "eval.csv"
    png_path = out / "eval.png"

    k = payload["k"]
    with csv_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["metric", "value"])
        for key in (
            "top1_accuracy",
            "topk_accuracy",
            "tag_accuracy",
            "mean_distance_top1",
            "mean_distance_topk",
            "annotation_floor_top1",
            "annotation_floor_topk",
        ):
            value = payload[key]
            writer.writerow([key, "" if value is None else value])
        writer.writerow(["k", k])
        writer.writerow(["subjects_evaluated", payload["subjects_evaluated"]])
        writer.writerow(["subjects_excluded", payload["subjects_excluded"]])

    fig, (ax_acc, ax_dist) = plt.subplots(1, 2, figsize=(8, 3.5))
    acc_labels = ["Top-1", f"Top-{k}"]
    acc_values = [
        float(Fraction(payload["top1_accuracy"])) * 100,
        float(Fraction(payload["topk_accuracy"])) * 100,
    ]
    if payload["tag_accuracy"] is not None:
        acc_labels.append("Tag")
        acc_values.append(float(Fraction(payload["tag_accuracy"])) * 100)
    bars = ax_acc.bar(acc_labels, acc_values, color="#4878cf")
    ax_acc.set_ylabel("accuracy (%)")
    ax_acc.set_ylim(0, 105)
    ax_acc.set_title("Accuracy")
    ax_acc.bar_label(bars, fmt="%.1f")

    dist_labels = ["Pred Top-1", f"Pred Top-{k}", "Floor Top-1", f"Floor Top-{k}"]
    dist_values = [
        float(Fraction(payload["mean_distance_top1"])),
        float(Fraction(payload["mean_distance_topk"])),
        float(Fraction(payload["annotation_floor_top1"])),
        float(Fraction(payload["annotation_floor_topk"])),
    ]
    bars = ax_dist.bar(dist_labels, dist_values, color=["#4878cf", "#4878cf", "#777777", "#777777"])
    ax_dist.set_ylabel("mean tag distance")
    ax_dist.set_title("Match distance (lower is better)")
    ax_dist.bar_label(bars, fmt="%.2f")
    ax_dist.tick_params(axis="x", labelrotation=20)

    fig.suptitle(f"Evaluation ({payload['catalog_id']})")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [csv_path, png_path]
