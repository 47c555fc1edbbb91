"""t-SNE embedding of (w1..w4, theta) vectors from sweep CSVs."""

from __future__ import annotations

import io
import os
from pathlib import Path

import numpy as np
from sklearn.manifold import TSNE

from eenlab import TooFewVectors
from eenlab.dataset import check_manifest


def read_sweep_weights(path: str | Path, qualifying_only: bool = True) -> np.ndarray:
    """(n, 5) array of (w1..w4, theta) rows from a primary sweep CSV."""
    check_manifest(path)
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("idx,"):
                continue
            parts = line.split(",")
            if qualifying_only and parts[8] != "1":
                continue
            rows.append([float(v) for v in parts[1:6]])
    return np.asarray(rows, dtype=np.float64)


def tsne_embed(vectors: np.ndarray, seed: int = 0) -> np.ndarray:
    """Deterministic 2D embedding; perplexity = min(30, n/3).

    Fully identical inputs are indistinguishable, so they embed at a
    single point (sklearn's optimizer cannot represent the zero-variance
    limit and must not be fed it).
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    n = vectors.shape[0]
    if n < 5:
        raise TooFewVectors(f"need >= 5 vectors, got {n}")
    if np.all(vectors == vectors[0]):
        return np.zeros((n, 2))
    tsne = TSNE(
        n_components=2,
        perplexity=min(30.0, n / 3.0),
        random_state=seed,
        init="pca",
    )
    return tsne.fit_transform(vectors)


def write_embedding_csv(coords: np.ndarray, path: str | os.PathLike) -> None:
    buf = io.StringIO()
    buf.write("# eenlab t-sne embedding\n")
    buf.write("x,y\n")
    for x, y in coords:
        buf.write(f"{float(x)!r},{float(y)!r}\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(buf.getvalue())
