"""Word statistics: rank-frequency tables, power-law fits, 1D and 2D layouts."""

from __future__ import annotations

import io
import os
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from een.errors import EmptyWordMap, InsufficientData, UnsupportedFormat
from een.ingest import _atomic_write_text
from een.network import WordMap


class RankEntry(NamedTuple):
    rank: int
    word: Fraction
    frequency: int


@dataclass
class RankTable:
    """Word frequencies sorted by count descending, ties by word ascending."""

    entries: list[RankEntry]

    def frequencies(self) -> list[int]:
        return [e.frequency for e in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


class ZipfFit(NamedTuple):
    a: float
    b: float
    r2: float
    n_points: int


def rank_table(wm: WordMap) -> RankTable:
    if not wm.cc:
        raise EmptyWordMap("word map has no pixels")
    counts = Counter(wm.cc.values())
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return RankTable([RankEntry(r, word, n) for r, (word, n) in enumerate(ordered, 1)])


def _fit_loglog(freqs: np.ndarray, drop_top: int) -> ZipfFit:
    """OLS of log10(frequency) on log10(rank) over ranks > drop_top."""
    ranks = np.arange(1, freqs.size + 1, dtype=np.float64)
    x = np.log10(ranks[drop_top:])
    y = np.log10(freqs[drop_top:])
    xm = float(x.mean())
    ym = float(y.mean())
    sxx = float(((x - xm) ** 2).sum())
    sxy = float(((x - xm) * (y - ym)).sum())
    slope = sxy / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    ss_res = float((resid ** 2).sum())
    ss_tot = float(((y - ym) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    r2 = min(1.0, max(0.0, r2))
    return ZipfFit(a=10.0 ** intercept, b=-slope, r2=r2, n_points=int(x.size))


def zipf_fit(table: RankTable | Sequence[float], drop_top: int = 1) -> ZipfFit:
    """Fit y = a / x^b to a rank-frequency sequence in log-log space.

    Accepts a RankTable or a plain rank-ordered frequency sequence (the
    latter lets tests use exact real-valued power laws).  The first
    `drop_top` ranks are excluded from the regression.
    """
    if drop_top < 0:
        raise ValueError("drop_top must be >= 0")
    if isinstance(table, RankTable):
        freqs = np.asarray(table.frequencies(), dtype=np.float64)
    else:
        freqs = np.asarray(list(table), dtype=np.float64)
    if freqs.size - drop_top < 2:
        raise InsufficientData(
            f"need at least {drop_top + 2} ranks, got {freqs.size}"
        )
    if np.any(freqs <= 0):
        raise ValueError("frequencies must be positive")
    return _fit_loglog(freqs, drop_top)


def sequence_1d(wm: WordMap, include_inactive: bool = False,
                time_major: bool = False) -> list[Fraction | None]:
    """Raster scan of the word map (scale-major by default).

    Active pixels emit their cc; with include_inactive, absent cells emit
    None so the sequence covers the whole grid.
    """
    if include_inactive:
        if time_major:
            cells = ((s, t) for t in range(wm.n_frames) for s in range(wm.n_scales))
        else:
            cells = ((s, t) for s in range(wm.n_scales) for t in range(wm.n_frames))
        return [wm.cc.get(cell) for cell in cells]
    if time_major:
        keys = sorted(wm.cc, key=lambda st: (st[1], st[0]))
    else:
        keys = sorted(wm.cc)
    return [wm.cc[key] for key in keys]


def word_grid_2d(wm: WordMap) -> list[list[Fraction | None]]:
    """Dense n_scales x n_frames matrix of cc values, None where inactive."""
    dense: list[list[Fraction | None]] = [
        [None] * wm.n_frames for _ in range(wm.n_scales)
    ]
    for (s, t), frac in wm.cc.items():
        dense[s][t] = frac
    return dense


def word_map_from_dense(dense: list[list[Fraction | None]],
                        weights=None) -> WordMap:
    """Inverse of word_grid_2d (exact round trip on Fraction matrices)."""
    n_scales = len(dense)
    n_frames = len(dense[0]) if dense else 0
    cc = {}
    for s, row in enumerate(dense):
        if len(row) != n_frames:
            raise ValueError("ragged dense matrix")
        for t, val in enumerate(row):
            if val is not None:
                cc[(s, t)] = val if isinstance(val, Fraction) else Fraction(val)
    return WordMap(cc, n_scales, n_frames, weights)


# ---------------------------------------------------------------------------
# CSV formats


def write_rank_table(rt: RankTable, path: str | os.PathLike,
                     extra_comments: list[str] | None = None) -> None:
    buf = io.StringIO()
    for line in extra_comments or []:
        buf.write(f"# {line}\n")
    buf.write("rank,cc_num,cc_den,frequency\n")
    for e in rt.entries:
        buf.write(f"{e.rank},{e.word.numerator},{e.word.denominator},{e.frequency}\n")
    _atomic_write_text(path, buf.getvalue())


def read_rank_table(path: str | os.PathLike) -> RankTable:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("rank,"):
                continue
            rank, num, den, freq = line.split(",")
            entries.append(RankEntry(int(rank), Fraction(int(num), int(den)), int(freq)))
    if not entries:
        raise UnsupportedFormat(f"{path}: no rank entries")
    return RankTable(entries)


def write_sequence(seq: list[Fraction | None], path: str | os.PathLike,
                   extra_comments: list[str] | None = None) -> None:
    """`index,cc_num,cc_den` rows; None emits empty num/den fields."""
    buf = io.StringIO()
    for line in extra_comments or []:
        buf.write(f"# {line}\n")
    buf.write("index,cc_num,cc_den\n")
    for i, val in enumerate(seq):
        if val is None:
            buf.write(f"{i},,\n")
        else:
            buf.write(f"{i},{val.numerator},{val.denominator}\n")
    _atomic_write_text(path, buf.getvalue())


def write_image(dense: list[list[Fraction | None]], path: str | os.PathLike,
                extra_comments: list[str] | None = None) -> None:
    """Dense 2D CSV: one row per scale, cc as 6-decimal floats, nulls empty."""
    buf = io.StringIO()
    n_scales = len(dense)
    n_frames = len(dense[0]) if dense else 0
    buf.write("# een-image v1\n")
    buf.write(f"# scales={n_scales} frames={n_frames}\n")
    for line in extra_comments or []:
        buf.write(f"# {line}\n")
    for row in dense:
        buf.write(",".join("" if v is None else f"{float(v):.6f}" for v in row))
        buf.write("\n")
    _atomic_write_text(path, buf.getvalue())


def read_image(path: str | os.PathLike) -> list[list[float | None]]:
    rows: list[list[float | None]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            rows.append([None if f == "" else float(f) for f in line.split(",")])
    return rows
