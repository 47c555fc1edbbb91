#!/usr/bin/env python3
"""End-to-end lab experiment over the primary CLI.

Builds the three-class synthetic corpus, trains the patch classifier,
runs the shuffled-label control and the deletion-robustness sweep,
exports grad-CAM saliency (and feeds it back to `een stats`), embeds the
sweep weights of the periodic corpus with t-SNE, and writes a run-report
JSON plus plot images.

Usage: python scripts/run_experiment.py --out runs/exp1 [--duration 100]
"""

import argparse
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from eenlab.cli import een
from eenlab.corpus import build_three_class_dataset
from eenlab.dataset import EenImageDataset
from eenlab.embed import read_sweep_weights, tsne_embed, write_embedding_csv
from eenlab.gradcam import gradcam_export
from eenlab.model import shuffled_label_dataset, train_classifier
from eenlab.sweeps import deletion_sweep

PATCH = (42, 19)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True)
    ap.add_argument("--duration", type=float, default=100.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--epochs", type=int, default=20)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    print("building corpora via een ...")
    paths = build_three_class_dataset(out / "corpus", args.duration, args.seed)
    labeled = [(p["image"], name) for name, p in paths.items()]
    sources = [(p["words"], name) for name, p in paths.items()]
    ds = EenImageDataset.from_exports(labeled, PATCH, sources=sources,
                                      min_per_class=100)
    print("patch counts:", ds.per_class_counts())

    print("training ...")
    model, accuracy = train_classifier(ds, PATCH, seed=args.seed,
                                       epochs=args.epochs)
    print(f"test accuracy: {accuracy:.4f}")
    _, shuffled_acc = train_classifier(
        shuffled_label_dataset(ds, args.seed + 99), PATCH, seed=args.seed,
        epochs=args.epochs,
    )
    print(f"shuffled-label control: {shuffled_acc:.4f}")

    print("deletion sweep ...")
    rates = [round(0.1 * i, 1) for i in range(10)]
    sweep = deletion_sweep(model, ds, rates, args.seed, out / "sweep_work",
                           split_seed=args.seed)

    print("grad-CAM export ...")
    cam = gradcam_export(model, ds.items[0][0], out / "gradcam.csv")
    stats = {}
    for stat in ("density", "skew"):
        res = een("stats", stat, out / "gradcam.csv")
        name, value = res.stdout.strip().split(",")
        stats[name] = float(value)
    print("primary stats on saliency:", stats)

    print("t-SNE of sweep weights ...")
    een("optimize", paths["periodic"]["grid"], "-o", out / "periodic_sweep.csv",
        "--jobs", 1)
    weights = read_sweep_weights(out / "periodic_sweep.csv", qualifying_only=True)
    coords = tsne_embed(weights, seed=args.seed) if len(weights) >= 5 else None
    if coords is not None:
        write_embedding_csv(coords, out / "tsne.csv")

    fig, ax1 = plt.subplots(figsize=(6, 4))
    rr = [r for r, _, _ in sweep]
    ax1.plot(rr, [a for _, a, _ in sweep], "o-", label="accuracy")
    ax1.set_xlabel("loss rate")
    ax1.set_ylabel("accuracy")
    ax2 = ax1.twinx()
    ax2.plot(rr, [h for _, _, h in sweep], "s--", color="tab:orange",
             label="mean softmax entropy")
    ax2.set_ylabel("entropy (nats)")
    fig.tight_layout()
    fig.savefig(out / "deletion_sweep.png", dpi=120)

    if coords is not None:
        fig, ax = plt.subplots(figsize=(5, 5))
        ax.scatter(coords[:, 0], coords[:, 1], s=8)
        ax.set_title("t-SNE of qualifying sweep weights")
        fig.tight_layout()
        fig.savefig(out / "tsne.png", dpi=120)

    report = {
        "patch": list(PATCH),
        "seed": args.seed,
        "duration_sec": args.duration,
        "patch_counts": ds.per_class_counts(),
        "test_accuracy": accuracy,
        "shuffled_label_accuracy": shuffled_acc,
        "deletion_sweep": [
            {"loss_rate": r, "accuracy": a, "mean_entropy": h}
            for r, a, h in sweep
        ],
        "gradcam_stats": stats,
        "tsne_points": None if coords is None else len(coords),
    }
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True))
    print("report written to", out / "report.json")


if __name__ == "__main__":
    main()
