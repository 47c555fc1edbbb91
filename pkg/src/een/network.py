"""Link network over active pixels and per-pixel clustering coefficients.

Two pixels exchange an amount of information

    I = w1*|dS| + w2*|dT| + w3*|dV| + w4*(V1 + V2)

and are linked when I falls strictly below the threshold.  The clustering
coefficient of a pixel (fraction of realized links among its neighbors,
kept as an exact reduced rational) is the pixel's word.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import isfinite
from typing import Iterator, NamedTuple

from een.errors import EmptyGrid, UnsupportedFormat
from een.ingest import ScaleTimeGrid, _atomic_write_text

WORDS_FORMAT = "een-words v1"


class Pixel(NamedTuple):
    scale: int
    time: int
    volume: int


@dataclass(frozen=True)
class WeightConfig:
    """Weights on scale/time/volume differences and volume sum, plus threshold."""

    w1: float
    w2: float
    w3: float
    w4: float
    theta: float

    def __post_init__(self):
        for name in ("w1", "w2", "w3", "w4"):
            w = getattr(self, name)
            if not (isfinite(w) and w >= 0):
                raise ValueError(f"{name} must be finite and >= 0")
        # theta=0 is legal and yields an edgeless network (linking is strict <)
        if not (isfinite(self.theta) and self.theta >= 0):
            raise ValueError("theta must be finite and >= 0")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.w1, self.w2, self.w3, self.w4, self.theta)


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Which pixel pairs are even considered for linking."""

    mode: str = "windowed"  # "windowed" or "global"
    r_scale: int = 12
    r_time: int = 10

    def __post_init__(self):
        if self.mode not in ("windowed", "global"):
            raise ValueError("mode must be 'windowed' or 'global'")
        if self.mode == "windowed" and (self.r_scale < 1 or self.r_time < 1):
            raise ValueError("windowed mode requires r_scale >= 1 and r_time >= 1")


def information(p: Pixel, q: Pixel, w: WeightConfig) -> float:
    """Information distance between two pixels; symmetric in (p, q)."""
    return (
        w.w1 * abs(p.scale - q.scale)
        + w.w2 * abs(p.time - q.time)
        + w.w3 * abs(p.volume - q.volume)
        + w.w4 * abs(p.volume + q.volume)
    )


@dataclass
class EenNetwork:
    """Undirected graph over the active pixels of a grid."""

    nodes: list[Pixel]
    neighbors: list[set[int]]
    n_scales: int = 0
    n_frames: int = 0

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])

    @property
    def n_edges(self) -> int:
        return sum(len(nb) for nb in self.neighbors) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for i, nb in enumerate(self.neighbors):
            for j in nb:
                if i < j:
                    yield (i, j)

    @classmethod
    def from_edges(cls, nodes: list[Pixel], edges) -> "EenNetwork":
        neighbors: list[set[int]] = [set() for _ in nodes]
        for i, j in edges:
            if i == j:
                raise ValueError("self-loops are not allowed")
            neighbors[i].add(j)
            neighbors[j].add(i)
        n_scales = 1 + max((p.scale for p in nodes), default=0)
        n_frames = 1 + max((p.time for p in nodes), default=0)
        return cls(nodes, neighbors, n_scales, n_frames)


def candidate_offsets(nb: NeighborhoodSpec, n_scales: int, n_frames: int):
    """Raster-positive offsets (ds, dt) covering each unordered pair once."""
    r_s = nb.r_scale if nb.mode == "windowed" else n_scales - 1
    r_t = nb.r_time if nb.mode == "windowed" else n_frames - 1
    offs = [(0, dt) for dt in range(1, r_t + 1)]
    for ds in range(1, r_s + 1):
        for dt in range(-r_t, r_t + 1):
            offs.append((ds, dt))
    return offs


def build_network(grid: ScaleTimeGrid, w: WeightConfig,
                  nb: NeighborhoodSpec | None = None) -> EenNetwork:
    """Link candidate pixel pairs whose information is strictly below theta."""
    if nb is None:
        nb = NeighborhoodSpec()
    if not grid.pixels:
        raise EmptyGrid("grid has no active pixels")
    nodes = [Pixel(s, t, v) for (s, t), v in grid.items_sorted()]
    index = {(p.scale, p.time): i for i, p in enumerate(nodes)}
    neighbors: list[set[int]] = [set() for _ in nodes]
    offsets = candidate_offsets(nb, grid.config.n_scales, grid.n_frames)
    for i, p in enumerate(nodes):
        for ds, dt in offsets:
            j = index.get((p.scale + ds, p.time + dt))
            if j is None:
                continue
            if information(p, nodes[j], w) < w.theta:
                neighbors[i].add(j)
                neighbors[j].add(i)
    return EenNetwork(nodes, neighbors, grid.config.n_scales, grid.n_frames)


@dataclass
class WordMap:
    """Per-pixel clustering coefficient stored as an exact reduced rational."""

    cc: dict[tuple[int, int], Fraction]
    n_scales: int
    n_frames: int
    weights: WeightConfig | None = field(default=None, compare=False)

    @property
    def n_words(self) -> int:
        return len(self.cc)

    def items_sorted(self):
        return sorted(self.cc.items())


def clustering_coefficients(net: EenNetwork) -> WordMap:
    """cc_i = 2*e_i / (d_i*(d_i-1)) with e_i = links among i's neighbors.

    Nodes of degree < 2 get cc = 0.  Values are exact Fractions so word
    identity is exact equality.
    """
    cc: dict[tuple[int, int], Fraction] = {}
    for i, p in enumerate(net.nodes):
        nbrs = net.neighbors[i]
        d = len(nbrs)
        if d < 2:
            cc[(p.scale, p.time)] = Fraction(0)
            continue
        e = sum(len(net.neighbors[u] & nbrs) for u in nbrs) // 2
        cc[(p.scale, p.time)] = Fraction(2 * e, d * (d - 1))
    return WordMap(cc, net.n_scales, net.n_frames)


def write_words(wm: WordMap, path: str | os.PathLike,
                extra_comments: list[str] | None = None) -> None:
    """Write the `een-words v1` CSV, rows sorted by (scale, time)."""
    buf = io.StringIO()
    buf.write(f"# {WORDS_FORMAT}\n")
    buf.write(f"# scales={wm.n_scales} frames={wm.n_frames}\n")
    if wm.weights is not None:
        w = wm.weights
        buf.write(
            f"# w1={w.w1!r} w2={w.w2!r} w3={w.w3!r} w4={w.w4!r} theta={w.theta!r}\n"
        )
    for line in extra_comments or []:
        buf.write(f"# {line}\n")
    buf.write("scale,time,cc_num,cc_den\n")
    for (s, t), frac in wm.items_sorted():
        buf.write(f"{s},{t},{frac.numerator},{frac.denominator}\n")
    _atomic_write_text(path, buf.getvalue())


def read_words(path: str | os.PathLike) -> WordMap:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != f"# {WORDS_FORMAT}":
        raise UnsupportedFormat(f"{path}: not a {WORDS_FORMAT} file")
    meta: dict[str, str] = {}
    body_start = None
    for i, line in enumerate(lines[1:], start=1):
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" in token:
                    key, val = token.split("=", 1)
                    meta.setdefault(key, val)
            continue
        if line != "scale,time,cc_num,cc_den":
            raise UnsupportedFormat(f"{path}: bad header line {line!r}")
        body_start = i + 1
        break
    if body_start is None:
        raise UnsupportedFormat(f"{path}: missing header")
    try:
        n_scales = int(meta["scales"])
        n_frames = int(meta["frames"])
    except KeyError as exc:
        raise UnsupportedFormat(f"{path}: missing word-map metadata {exc}") from exc
    weights = None
    if all(k in meta for k in ("w1", "w2", "w3", "w4", "theta")):
        weights = WeightConfig(
            float(meta["w1"]), float(meta["w2"]), float(meta["w3"]),
            float(meta["w4"]), float(meta["theta"]),
        )
    cc: dict[tuple[int, int], Fraction] = {}
    for line in lines[body_start:]:
        if not line:
            continue
        s, t, num, den = (int(f) for f in line.split(","))
        cc[(int(s), int(t))] = Fraction(num, den)
    return WordMap(cc, n_scales, n_frames, weights)
