"""Dense word-image loading and patch datasets.

Images are the primary tool's dense 2D CSV exports: one row per scale,
6-decimal word values, empty cells inactive.  Patches are cut without
padding on a regular grid.  Each patch becomes a 2-channel array
(values with inactive as 0, plus an activity mask) so a word of value 0
stays distinguishable from an absent cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from eenlab import InsufficientData, MissingProvenance


def check_manifest(path: str | Path) -> None:
    """Require the primary tool's provenance comment in a CSV export."""
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# manifest "):
                return
            if not line.startswith("#"):
                break
    raise MissingProvenance(f"{path} has no `# manifest` line from een")


def load_image_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """(values, mask) arrays of an image CSV; inactive cells are 0/False."""
    check_manifest(path)
    values, mask = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            cells = line.split(",")
            values.append([0.0 if c == "" else float(c) for c in cells])
            mask.append([c != "" for c in cells])
    return np.asarray(values, dtype=np.float32), np.asarray(mask, dtype=np.float32)


def cut_patches(values: np.ndarray, mask: np.ndarray,
                patch: tuple[int, int]) -> list[np.ndarray]:
    """Non-overlapping (n_scales_sub, n_frames_sub) patches, no padding."""
    ps, pt = patch
    h, w = values.shape
    out = []
    for s0 in range(0, h - ps + 1, ps):
        for t0 in range(0, w - pt + 1, pt):
            v = values[s0:s0 + ps, t0:t0 + pt]
            m = mask[s0:s0 + ps, t0:t0 + pt]
            out.append(np.stack([v, m]).astype(np.float32))
    return out


@dataclass
class EenImageDataset:
    """Patches cut from primary image exports, with class labels."""

    items: list[tuple[np.ndarray, int]]
    patch: tuple[int, int]
    class_names: list[str]
    sources: list[tuple[str, str]] = field(default_factory=list)  # (words_csv, class)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def per_class_counts(self) -> dict[str, int]:
        counts = {name: 0 for name in self.class_names}
        for _, label in self.items:
            counts[self.class_names[label]] += 1
        return counts

    @classmethod
    def from_exports(cls, labeled_paths: list[tuple[str, str]],
                     patch: tuple[int, int],
                     sources: list[tuple[str, str]] | None = None,
                     min_per_class: int = 0) -> "EenImageDataset":
        """labeled_paths: (image_csv, class_name) pairs."""
        class_names = sorted({name for _, name in labeled_paths})
        index = {name: i for i, name in enumerate(class_names)}
        items = []
        shape = None
        for path, name in labeled_paths:
            values, mask = load_image_csv(path)
            if shape is None:
                shape = values.shape
            elif values.shape != shape:
                raise ValueError(
                    f"{path}: image shape {values.shape} != {shape}"
                )
            for arr in cut_patches(values, mask, patch):
                items.append((arr, index[name]))
        ds = cls(items, patch, class_names, sources=list(sources or []))
        if min_per_class:
            bad = {k: v for k, v in ds.per_class_counts().items()
                   if v < min_per_class}
            if len(class_names) < 3 or bad:
                raise InsufficientData(
                    f"need >= 3 classes with >= {min_per_class} patches, "
                    f"counts: {ds.per_class_counts()}"
                )
        return ds


def count_words_csv(path: str | Path) -> int:
    """Number of word rows in a primary words CSV (provenance checked)."""
    check_manifest(path)
    n = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("scale,") or not line.strip():
                continue
            n += 1
    return n
