"""A small fixed CNN for word-image patch classification.

Two conv blocks feeding a linear head; deliberately minimal so the
benchmark measures the information in the images, not the architecture.
All randomness (init, split, batching) derives from one seed and torch
runs single-threaded, so a given (dataset, seed) always reproduces the
same trained model and accuracy.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from eenlab import InsufficientData
from eenlab.dataset import EenImageDataset


class PatchClassifier(nn.Module):
    def __init__(self, n_classes: int):
        super().__init__()
        self.features = nn.Sequential(
            nn.Conv2d(2, 16, 3, padding=1),
            nn.ReLU(),
            nn.MaxPool2d(2),
            nn.Conv2d(16, 32, 3, padding=1),
            nn.ReLU(),
            nn.AdaptiveAvgPool2d((4, 4)),
        )
        self.head = nn.Linear(32 * 4 * 4, n_classes)

    def forward(self, x):
        z = self.features(x)
        return self.head(z.flatten(1))


def _split_indices(labels: np.ndarray, seed: int, test_frac: float = 0.25):
    """Seeded stratified split: the same seed always yields the same sets."""
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in np.unique(labels):
        idx = np.nonzero(labels == c)[0]
        idx = idx[rng.permutation(idx.size)]
        n_test = max(1, int(round(test_frac * idx.size)))
        test.extend(idx[:n_test])
        train.extend(idx[n_test:])
    return np.sort(np.array(train)), np.sort(np.array(test))


def train_classifier(ds: EenImageDataset, patch: tuple[int, int] | None = None,
                     seed: int = 0, epochs: int = 12, batch_size: int = 32,
                     min_per_class: int = 100):
    """Train to convergence on a seeded split; returns (model, test accuracy)."""
    if patch is not None and tuple(patch) != tuple(ds.patch):
        raise ValueError(f"dataset was cut at {ds.patch}, not {patch}")
    counts = ds.per_class_counts()
    if ds.n_classes < 3 or any(v < min_per_class for v in counts.values()):
        raise InsufficientData(
            f"need >= 3 classes with >= {min_per_class} patches each, got {counts}"
        )

    torch.manual_seed(seed)
    torch.set_num_threads(1)
    x = torch.from_numpy(np.stack([arr for arr, _ in ds.items]))
    y = torch.from_numpy(np.array([label for _, label in ds.items]))
    train_idx, test_idx = _split_indices(y.numpy(), seed)

    model = PatchClassifier(ds.n_classes)
    opt = torch.optim.Adam(model.parameters(), lr=1e-3)
    loss_fn = nn.CrossEntropyLoss()
    order_rng = np.random.default_rng(seed + 1)
    model.train()
    for _ in range(epochs):
        order = train_idx[order_rng.permutation(train_idx.size)]
        for lo in range(0, order.size, batch_size):
            sel = torch.from_numpy(order[lo:lo + batch_size])
            opt.zero_grad()
            loss = loss_fn(model(x[sel]), y[sel])
            loss.backward()
            opt.step()

    model.eval()
    with torch.no_grad():
        pred = model(x[torch.from_numpy(test_idx)]).argmax(dim=1)
    hits = (pred == y[torch.from_numpy(test_idx)]).numpy()
    return model, float(hits.mean())


def predict_proba(model: PatchClassifier, patches: list[np.ndarray]) -> np.ndarray:
    """Softmax class probabilities per patch."""
    model.eval()
    with torch.no_grad():
        logits = model(torch.from_numpy(np.stack(patches)))
        return torch.softmax(logits, dim=1).numpy()


def shuffled_label_dataset(ds: EenImageDataset, seed: int) -> EenImageDataset:
    """Same patches, labels permuted; the chance-level control."""
    rng = np.random.default_rng(seed)
    labels = np.array([label for _, label in ds.items])
    labels = labels[rng.permutation(labels.size)]
    items = [(arr, int(lab)) for (arr, _), lab in zip(ds.items, labels)]
    return EenImageDataset(items, ds.patch, ds.class_names, sources=ds.sources)
