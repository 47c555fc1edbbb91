"""Exhaustive weight/threshold search with the two selection criteria:
a rank-frequency power-law fit with R^2 above 0.8 (after deleting the
first rank), and, among qualifying combinations, the largest number of
distinct word types.
"""

from __future__ import annotations

import io
import itertools
import json
import multiprocessing
import os
from dataclasses import dataclass, field

import numpy as np

from een._engine import PairTable, evaluate_block
from een.errors import EmptyGrid, InsufficientData, NoQualifyingCombo
from een.ingest import ScaleTimeGrid, _atomic_write_text
from een.network import (
    NeighborhoodSpec,
    WeightConfig,
    build_network,
    clustering_coefficients,
)
from een.words import rank_table, zipf_fit

QUALIFY_R2 = 0.8

DEFAULT_W_VALUES = tuple(float(v) for v in range(1, 9))
DEFAULT_THETA_PERCENTILES = tuple(range(10, 100, 10))


@dataclass(frozen=True)
class GridSpec:
    """Candidate value lists; the sweep is their Cartesian product."""

    values_w1: tuple[float, ...]
    values_w2: tuple[float, ...]
    values_w3: tuple[float, ...]
    values_w4: tuple[float, ...]
    values_theta: tuple[float, ...]
    neighborhood: NeighborhoodSpec = field(default_factory=NeighborhoodSpec)

    def __post_init__(self):
        for name in ("values_w1", "values_w2", "values_w3", "values_w4", "values_theta"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not vals:
                raise ValueError(f"{name} must be nonempty")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ValueError(f"{name} must be strictly ascending")
            object.__setattr__(self, name, vals)

    @property
    def n_combos(self) -> int:
        return (
            len(self.values_w1) * len(self.values_w2) * len(self.values_w3)
            * len(self.values_w4) * len(self.values_theta)
        )

    def to_json(self) -> str:
        obj = {
            "values_w1": list(self.values_w1),
            "values_w2": list(self.values_w2),
            "values_w3": list(self.values_w3),
            "values_w4": list(self.values_w4),
            "values_theta": list(self.values_theta),
            "neighborhood": {
                "mode": self.neighborhood.mode,
                "r_scale": self.neighborhood.r_scale,
                "r_time": self.neighborhood.r_time,
            },
        }
        return json.dumps(obj, sort_keys=True)


def grid_spec_from_json(text: str, grid: ScaleTimeGrid | None = None) -> GridSpec:
    """Parse a GridSpec; `theta_percentiles` entries are materialized
    against the grid's information distribution (needs `grid`)."""
    obj = json.loads(text)
    nb_obj = obj.get("neighborhood", {})
    nb = NeighborhoodSpec(
        mode=nb_obj.get("mode", "windowed"),
        r_scale=int(nb_obj.get("r_scale", 12)),
        r_time=int(nb_obj.get("r_time", 10)),
    )
    kwargs = {
        name: tuple(float(v) for v in obj[name])
        for name in ("values_w1", "values_w2", "values_w3", "values_w4")
    }
    if "values_theta" in obj:
        thetas = tuple(float(v) for v in obj["values_theta"])
    elif "theta_percentiles" in obj:
        if grid is None:
            raise ValueError("theta_percentiles requires a grid to materialize")
        thetas = _percentile_thetas(
            grid, nb, kwargs, tuple(float(p) for p in obj["theta_percentiles"])
        )
    else:
        raise ValueError("grid spec needs values_theta or theta_percentiles")
    return GridSpec(values_theta=thetas, neighborhood=nb, **kwargs)


def _percentile_thetas(grid, nb, w_lists, percentiles) -> tuple[float, ...]:
    """Thresholds at percentiles of pairwise information, measured under the
    midpoint weights of the sweep (duplicates are collapsed)."""
    table = PairTable(grid, nb)
    if table.n_pairs == 0:
        raise InsufficientData("no candidate pairs to draw thresholds from")
    ref = WeightConfig(
        float(np.mean(w_lists["values_w1"])),
        float(np.mean(w_lists["values_w2"])),
        float(np.mean(w_lists["values_w3"])),
        float(np.mean(w_lists["values_w4"])),
        theta=1.0,
    )
    info = table.pair_information(ref)
    thetas = np.unique(np.percentile(info, list(percentiles)))
    return tuple(float(v) for v in thetas)


def default_grid_spec(grid: ScaleTimeGrid,
                      nb: NeighborhoodSpec | None = None) -> GridSpec:
    """The desk-scale default: w1..w4 in {1..8}, thresholds at the
    {10,...,90} percentiles of the pairwise information distribution."""
    if nb is None:
        nb = NeighborhoodSpec()
    w_lists = {f"values_w{i}": DEFAULT_W_VALUES for i in (1, 2, 3, 4)}
    thetas = _percentile_thetas(grid, nb, w_lists, DEFAULT_THETA_PERCENTILES)
    return GridSpec(
        values_w1=DEFAULT_W_VALUES,
        values_w2=DEFAULT_W_VALUES,
        values_w3=DEFAULT_W_VALUES,
        values_w4=DEFAULT_W_VALUES,
        values_theta=thetas,
        neighborhood=nb,
    )


@dataclass(frozen=True)
class EvalResult:
    """One combination's fit quality and vocabulary size."""

    config: WeightConfig
    r2: float
    word_types: int
    qualifies: bool
    zipf_a: float | None = None
    zipf_b: float | None = None


def enumerate_grid(spec: GridSpec) -> list[WeightConfig]:
    """Cartesian product, w1 slowest and theta fastest."""
    return [
        WeightConfig(w1, w2, w3, w4, theta)
        for w1, w2, w3, w4, theta in itertools.product(
            spec.values_w1, spec.values_w2, spec.values_w3,
            spec.values_w4, spec.values_theta,
        )
    ]


def evaluate_config(grid: ScaleTimeGrid, w: WeightConfig,
                    nb: NeighborhoodSpec | None = None) -> EvalResult:
    """build_network -> clustering_coefficients -> rank_table -> zipf_fit."""
    net = build_network(grid, w, nb)
    wm = clustering_coefficients(net)
    rt = rank_table(wm)
    word_types = len(rt)
    try:
        fit = zipf_fit(rt, drop_top=1)
    except InsufficientData:
        return EvalResult(w, 0.0, word_types, False)
    return EvalResult(w, fit.r2, word_types, fit.r2 > QUALIFY_R2, fit.a, fit.b)


# Sweep state shared with forked workers (set before the pool is created,
# inherited by fork; never mutated while the pool lives).
_SWEEP_TABLE: PairTable | None = None
_SWEEP_WEIGHTS: list[tuple[float, float, float, float]] | None = None
_SWEEP_THETAS: tuple[float, ...] | None = None


def _eval_blocks(bounds: tuple[int, int]) -> list[EvalResult]:
    """Evaluate weight blocks [lo, hi); each block spans every theta."""
    lo, hi = bounds
    thetas = np.asarray(_SWEEP_THETAS, dtype=np.float64)
    out = []
    for bi in range(lo, hi):
        w1, w2, w3, w4 = _SWEEP_WEIGHTS[bi]
        rows = evaluate_block(_SWEEP_TABLE, w1, w2, w3, w4, thetas, QUALIFY_R2)
        for theta, (r2, word_types, qualifies, a, b) in zip(_SWEEP_THETAS, rows):
            out.append(EvalResult(
                WeightConfig(w1, w2, w3, w4, theta),
                r2, word_types, qualifies, a, b,
            ))
    return out


def self_organize(grid: ScaleTimeGrid, spec: GridSpec,
                  jobs: int = 1) -> tuple[EvalResult, list[EvalResult]]:
    """Evaluate every combination and pick the self-organized optimum.

    Winner: among qualifying results (r2 > 0.8), the most word types;
    ties broken by higher r2, then by enumeration order.  Results come
    back in enumeration order for any job count.  Raises
    NoQualifyingCombo (with .results) when nothing qualifies.
    """
    global _SWEEP_TABLE, _SWEEP_WEIGHTS, _SWEEP_THETAS
    if not grid.pixels:
        raise EmptyGrid("grid has no active pixels")
    table = PairTable(grid, spec.neighborhood)
    table.prepare()  # build triangles once, before any fork
    weights = list(itertools.product(
        spec.values_w1, spec.values_w2, spec.values_w3, spec.values_w4
    ))
    _SWEEP_TABLE = table
    _SWEEP_WEIGHTS = weights
    _SWEEP_THETAS = spec.values_theta

    n_blocks = len(weights)
    try:
        if jobs <= 1 or n_blocks < 16:
            results = _eval_blocks((0, n_blocks))
        else:
            chunk = max(1, -(-n_blocks // (jobs * 8)))
            bounds = [
                (lo, min(lo + chunk, n_blocks))
                for lo in range(0, n_blocks, chunk)
            ]
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(processes=jobs) as pool:
                results = [r for part in pool.map(_eval_blocks, bounds) for r in part]
    finally:
        _SWEEP_TABLE = None
        _SWEEP_WEIGHTS = None
        _SWEEP_THETAS = None
    n = len(results)

    best = None
    for r in results:
        if not r.qualifies:
            continue
        if (
            best is None
            or r.word_types > best.word_types
            or (r.word_types == best.word_types and r.r2 > best.r2)
        ):
            best = r
    if best is None:
        raise NoQualifyingCombo(
            f"none of {n} combinations reached r2 > {QUALIFY_R2}", results
        )
    return best, results


def write_sweep_csv(results: list[EvalResult], path: str | os.PathLike,
                    extra_comments: list[str] | None = None) -> None:
    buf = io.StringIO()
    for line in extra_comments or []:
        buf.write(f"# {line}\n")
    buf.write("idx,w1,w2,w3,w4,theta,r2,word_types,qualifies\n")
    for i, r in enumerate(results):
        w = r.config
        buf.write(
            f"{i},{w.w1!r},{w.w2!r},{w.w3!r},{w.w4!r},{w.theta!r},"
            f"{r.r2!r},{r.word_types},{1 if r.qualifies else 0}\n"
        )
    _atomic_write_text(path, buf.getvalue())


def winner_json_obj(best: EvalResult) -> dict:
    w = best.config
    return {
        "w1": w.w1,
        "w2": w.w2,
        "w3": w.w3,
        "w4": w.w4,
        "theta": w.theta,
        "r2": best.r2,
        "zipf_a": best.zipf_a,
        "zipf_b": best.zipf_b,
        "word_types": best.word_types,
    }


def write_winner_json(best: EvalResult, path: str | os.PathLike,
                      manifest: dict | None = None) -> None:
    obj = winner_json_obj(best)
    if manifest is not None:
        obj["_manifest"] = manifest
    _atomic_write_text(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")
