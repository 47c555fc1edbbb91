"""Gradient-weighted class activation maps over the patch classifier.

Saliency comes from the last convolutional stage: channel weights are the
spatial mean of the class-score gradients, the weighted activation sum is
rectified, bilinearly upsampled to the input resolution, and normalized
to sum to 1.  Export format is the primary tool's `x,y,score` CSV.
"""

from __future__ import annotations

import io
import os

import numpy as np
import torch
from torch.nn import functional as F

from eenlab.model import PatchClassifier


def gradcam(model: PatchClassifier, patch: np.ndarray,
            target: int | None = None) -> np.ndarray:
    """Per-pixel saliency for one (2, H, W) patch; sums to 1."""
    model.eval()
    x = torch.from_numpy(patch[None]).requires_grad_(True)

    activations = {}

    def hook(_module, _inp, out):
        activations["a"] = out
        out.retain_grad()

    # last conv stage = the second Conv2d in the feature stack
    convs = [m for m in model.features if isinstance(m, torch.nn.Conv2d)]
    handle = convs[-1].register_forward_hook(hook)
    try:
        logits = model(x)
        cls = int(logits.argmax(dim=1)) if target is None else target
        model.zero_grad()
        logits[0, cls].backward()
    finally:
        handle.remove()

    act = activations["a"]
    weights = act.grad.mean(dim=(2, 3), keepdim=True)
    cam = F.relu((weights * act).sum(dim=1, keepdim=True))
    cam = F.interpolate(cam, size=patch.shape[1:], mode="bilinear",
                        align_corners=False)
    cam = cam[0, 0].detach().numpy().astype(np.float64)
    total = cam.sum()
    if total > 0:
        cam /= total
    else:
        cam[:] = 1.0 / cam.size  # flat input: uniform saliency
    return cam


def export_score_points(cam: np.ndarray, path: str | os.PathLike) -> None:
    """Write saliency as the primary's score-point CSV (x=time, y=scale)."""
    buf = io.StringIO()
    buf.write("# eenlab grad-cam export\n")
    buf.write("x,y,score\n")
    for s in range(cam.shape[0]):
        for t in range(cam.shape[1]):
            buf.write(f"{float(t)!r},{float(s)!r},{float(cam[s, t])!r}\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(buf.getvalue())


def gradcam_export(model: PatchClassifier, patch: np.ndarray,
                   path: str | os.PathLike, target: int | None = None) -> np.ndarray:
    cam = gradcam(model, patch, target)
    export_score_points(cam, path)
    return cam
