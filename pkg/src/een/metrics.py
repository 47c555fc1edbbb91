"""Downstream statistics: entropy, skewness, point density, deciles,
seeded word deletion, and Welch's t-test.

The t-test p-value is computed from the regularized incomplete beta
function, evaluated with the modified-Lentz continued fraction, so the
package carries no statistics dependency in the main path.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from een.errors import (
    DegenerateSample,
    EmptySet,
    NotNormalized,
    TooFewPoints,
)
from een.ingest import _atomic_write_text
from een.network import WordMap


@dataclass
class ScorePointSet:
    """Saliency points in 2D coordinates, e.g. grad-CAM exports."""

    xs: np.ndarray
    ys: np.ndarray
    scores: np.ndarray

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=np.float64)
        self.ys = np.asarray(self.ys, dtype=np.float64)
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if not (self.xs.shape == self.ys.shape == self.scores.shape):
            raise ValueError("xs, ys, scores must have equal length")
        if self.xs.size and not (
            np.all(np.isfinite(self.xs)) and np.all(np.isfinite(self.ys))
        ):
            raise ValueError("coordinates must be finite")

    def __len__(self) -> int:
        return int(self.xs.size)

    @classmethod
    def from_csv(cls, path: str | os.PathLike) -> "ScorePointSet":
        xs, ys, ss = [], [], []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or line.startswith("x,"):
                    continue
                x, y, s = line.split(",")
                xs.append(float(x))
                ys.append(float(y))
                ss.append(float(s))
        return cls(np.array(xs), np.array(ys), np.array(ss))

    def to_csv(self, path: str | os.PathLike,
               extra_comments: list[str] | None = None) -> None:
        buf = io.StringIO()
        for line in extra_comments or []:
            buf.write(f"# {line}\n")
        buf.write("x,y,score\n")
        for x, y, s in zip(self.xs, self.ys, self.scores):
            buf.write(f"{float(x)!r},{float(y)!r},{float(s)!r}\n")
        _atomic_write_text(path, buf.getvalue())


def shannon_entropy(probs: Sequence[float], base: float | None = None) -> float:
    """-sum(p * log p) with 0*log 0 = 0; nats unless a base is given."""
    p = np.asarray(probs, dtype=np.float64)
    if np.any(p < 0) or abs(float(p.sum()) - 1.0) > 1e-9:
        raise NotNormalized("entries must be >= 0 and sum to 1 within 1e-9")
    nz = p[p > 0]
    h = float(-(nz * np.log(nz)).sum())
    if base is not None:
        h /= math.log(base)
    return h


def skewness(samples: Sequence[float]) -> float:
    """Population skewness g1 = m3 / m2^1.5 (biased central moments)."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 3:
        raise DegenerateSample("need at least 3 samples")
    d = x - x.mean()
    m2 = float((d ** 2).mean())
    if m2 <= 0:
        raise DegenerateSample("zero variance")
    m3 = float((d ** 3).mean())
    return m3 / m2 ** 1.5


def _pairwise_distances(ps: ScorePointSet) -> np.ndarray:
    """Condensed upper-triangle Euclidean distances over (x, y)."""
    pts = np.stack([ps.xs, ps.ys], axis=1)
    iu, ju = np.triu_indices(len(ps), k=1)
    diff = pts[iu] - pts[ju]
    return np.sqrt((diff ** 2).sum(axis=1))


def point_density(ps: ScorePointSet, per_point_mean: bool = False) -> float:
    """Graph density 2L/(N(N-1)) with links below the mean separation.

    Default reading: one global threshold, the mean over all pairwise
    distances.  With per_point_mean, pair (i, j) links when its distance
    is strictly below the average of i's and j's own mean separations.
    """
    n = len(ps)
    if n < 2:
        raise TooFewPoints("need at least 2 points")
    dists = _pairwise_distances(ps)
    if per_point_mean:
        pts = np.stack([ps.xs, ps.ys], axis=1)
        full = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
        means = full.sum(axis=1) / (n - 1)
        iu, ju = np.triu_indices(n, k=1)
        links = int((dists < 0.5 * (means[iu] + means[ju])).sum())
    else:
        links = int((dists < dists.mean()).sum())
    return 2.0 * links / (n * (n - 1))


def decile_proportions(ps: ScorePointSet) -> list[float]:
    """Min-max normalize scores and bin into 10 equal parts.

    Bin k covers [k/10, (k+1)/10) with the last bin closed; a flat score
    distribution puts all mass in the top bin.
    """
    n = len(ps)
    if n == 0:
        raise EmptySet("no score points")
    lo = float(ps.scores.min())
    hi = float(ps.scores.max())
    if hi == lo:
        return [0.0] * 9 + [1.0]
    norm = (ps.scores - lo) / (hi - lo)
    bins = np.minimum((norm * 10).astype(np.int64), 9)  # top bin closed
    counts = np.bincount(bins, minlength=10)
    return [float(c) / n for c in counts]


def random_deletion(wm: WordMap, loss_rate: float, seed: int) -> WordMap:
    """Remove exactly floor(loss_rate * N) pixels, chosen reproducibly.

    Procedure (fixed so any implementation can replay it): sort pixels by
    (scale, time); Fisher-Yates shuffle driven by PCG64(seed) taking
    j = integers(0, i+1) for i = N-1 .. 1; delete the first floor(p*N)
    entries of the shuffled list.  Surviving cc values are untouched.
    """
    if not (0.0 <= loss_rate <= 1.0):
        raise ValueError("loss_rate must be in [0, 1]")
    keys = sorted(wm.cc)
    n = len(keys)
    k = math.floor(loss_rate * n)
    rng = np.random.Generator(np.random.PCG64(seed))
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        keys[i], keys[j] = keys[j], keys[i]
    dropped = set(keys[:k])
    kept = {pix: frac for pix, frac in wm.cc.items() if pix not in dropped}
    return WordMap(kept, wm.n_scales, wm.n_frames, wm.weights)


class TTestResult(NamedTuple):
    t: float
    df: float
    p: float


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Welch's unequal-variance t-test with a two-sided p-value."""
    xa = np.asarray(a, dtype=np.float64)
    xb = np.asarray(b, dtype=np.float64)
    if xa.size < 2 or xb.size < 2:
        raise DegenerateSample("each sample needs n >= 2")
    va = float(xa.var(ddof=1))
    vb = float(xb.var(ddof=1))
    if not (math.isfinite(va) and math.isfinite(vb)):
        raise DegenerateSample("non-finite variance")
    sa = va / xa.size
    sb = vb / xb.size
    se2 = sa + sb
    if se2 <= 0:
        raise DegenerateSample("both samples have zero variance")
    t = (float(xa.mean()) - float(xb.mean())) / math.sqrt(se2)
    df = se2 ** 2 / (sa ** 2 / (xa.size - 1) + sb ** 2 / (xb.size - 1))
    # P(|T| > |t|) = I_x(df/2, 1/2) with x = df / (df + t^2)
    p = _betainc_reg(df / 2.0, 0.5, df / (df + t * t))
    return TTestResult(t, df, min(1.0, max(0.0, p)))


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h


def _betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b
