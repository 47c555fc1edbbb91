"""Deletion-robustness sweeps.

Word removal always happens through the primary's `perturb` command and
images are re-rendered with its `image` command, so every intermediate
artifact carries primary provenance.  The lab only classifies the
resulting patches and reads out accuracy and mean softmax entropy.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from eenlab.cli import een
from eenlab.dataset import EenImageDataset, cut_patches, load_image_csv
from eenlab.model import PatchClassifier, _split_indices, predict_proba


def softmax_entropy(probs: np.ndarray) -> float:
    """-sum(p ln p) per row, averaged; 0 ln 0 = 0 (matches `een stats entropy`)."""
    out = 0.0
    for row in probs:
        nz = row[row > 0]
        out += float(-(nz * np.log(nz)).sum())
    return out / len(probs)


def deletion_sweep(model: PatchClassifier, ds: EenImageDataset, rates,
                   seed: int, workdir: str | Path,
                   split_seed: int | None = None):
    """Per-rate (loss_rate, accuracy, mean softmax entropy).

    ds.sources must hold the (words_csv, class_name) pair behind each
    image given to from_exports, in the same order, so the re-rendered
    patches line up index-for-index with ds.items.  With split_seed the
    sweep scores only the held-out patches of that training split, making
    rate 0 reproduce the baseline test accuracy exactly.
    """
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    if not ds.sources:
        raise ValueError("dataset carries no word-map sources to perturb")
    labels = np.array([label for _, label in ds.items])
    if split_seed is None:
        eval_idx = np.arange(labels.size)
    else:
        _, eval_idx = _split_indices(labels, split_seed)

    out = []
    for ri, rate in enumerate(rates):
        patches = []
        for si, (words_csv, _name) in enumerate(ds.sources):
            thin = workdir / f"thin_r{ri}_s{si}.csv"
            img = workdir / f"img_r{ri}_s{si}.csv"
            een("perturb", words_csv, "-o", thin,
                "--loss-rate", rate, "--seed", seed)
            een("image", thin, "-o", img)
            values, mask = load_image_csv(img)
            patches.extend(cut_patches(values, mask, ds.patch))
        if len(patches) != labels.size:
            raise ValueError(
                f"perturbed corpus yielded {len(patches)} patches, "
                f"dataset has {labels.size}"
            )
        probs = predict_proba(model, [patches[i] for i in eval_idx])
        pred = probs.argmax(axis=1)
        accuracy = float((pred == labels[eval_idx]).mean())
        entropy = softmax_entropy(probs)
        assert -1e-12 <= entropy <= math.log(probs.shape[1]) + 1e-9
        out.append((float(rate), accuracy, entropy))
    return out
