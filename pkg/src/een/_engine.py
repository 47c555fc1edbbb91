"""Vectorized evaluation engine for weight sweeps.

For a fixed grid and neighborhood, the candidate pairs and candidate
triangles never change across weight combinations, and the information
metric depends only on the small tuple (|dS|, |dT|, Vlo, Vhi).  The engine
precomputes one "interaction class" per distinct tuple, the candidate pair
list, and the candidate triangle list (triples of pair indices found by
sorted-adjacency intersection).  Because linking is monotone in theta, a
single pass over the triangles bins each one by the smallest threshold
that activates it, which serves every theta of a sweep block at once.

Results are bit-identical to composing build_network ->
clustering_coefficients -> rank_table -> zipf_fit (the test suite checks
this); the comparisons use exactly the same float values in the same
order, and all counting is integer-exact.
"""

from __future__ import annotations

import numpy as np

from fractions import Fraction

from een.errors import EmptyGrid, InsufficientData
from een.ingest import ScaleTimeGrid
from een.network import NeighborhoodSpec, WeightConfig, WordMap, candidate_offsets
from een.words import zipf_fit

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


@njit(cache=True)
def _tri_pass(indptr, nbr, pidx, out, fill):
    """Count (fill=0) or emit (fill=1) triangles u < v < w over the
    forward adjacency; out rows are (pair_uv, pair_uw, pair_vw, u, v, w)."""
    n = indptr.size - 1
    count = 0
    for u in range(n):
        for a in range(indptr[u], indptr[u + 1]):
            v = nbr[a]
            i = a + 1  # w > v and fwd(u) is sorted, so start past v
            j = indptr[v]
            hi_u = indptr[u + 1]
            hi_v = indptr[v + 1]
            while i < hi_u and j < hi_v:
                wu = nbr[i]
                wv = nbr[j]
                if wu == wv:
                    if fill == 1:
                        out[count, 0] = pidx[a]
                        out[count, 1] = pidx[i]
                        out[count, 2] = pidx[j]
                        out[count, 3] = u
                        out[count, 4] = v
                        out[count, 5] = wu
                    count += 1
                    i += 1
                    j += 1
                elif wu < wv:
                    i += 1
                else:
                    j += 1
    return count


def _tri_pass_py(indptr, nbr, pidx, out, fill):
    # pure-python twin of _tri_pass, used when numba is unavailable
    n = indptr.size - 1
    count = 0
    for u in range(n):
        for a in range(indptr[u], indptr[u + 1]):
            v = nbr[a]
            i = a + 1
            j = indptr[v]
            hi_u = indptr[u + 1]
            hi_v = indptr[v + 1]
            while i < hi_u and j < hi_v:
                wu = nbr[i]
                wv = nbr[j]
                if wu == wv:
                    if fill == 1:
                        out[count] = (pidx[a], pidx[i], pidx[j], u, v, wu)
                    count += 1
                    i += 1
                    j += 1
                elif wu < wv:
                    i += 1
                else:
                    j += 1
    return count


@njit(cache=True)
def _tri_count_alive(indptr, nbr, tri):
    """Per-node triangle counts over an already-thresholded forward
    adjacency, without materializing the triangle list (single-combo
    path; stays memory-bounded on dense grids)."""
    n = indptr.size - 1
    for u in range(n):
        for a in range(indptr[u], indptr[u + 1]):
            v = nbr[a]
            i = a + 1
            j = indptr[v]
            hi_u = indptr[u + 1]
            hi_v = indptr[v + 1]
            while i < hi_u and j < hi_v:
                wu = nbr[i]
                wv = nbr[j]
                if wu == wv:
                    tri[u] += 1
                    tri[v] += 1
                    tri[wu] += 1
                    i += 1
                    j += 1
                elif wu < wv:
                    i += 1
                else:
                    j += 1


def _tri_count_alive_py(indptr, nbr, tri):
    # pure-python twin of _tri_count_alive
    n = indptr.size - 1
    for u in range(n):
        for a in range(indptr[u], indptr[u + 1]):
            v = nbr[a]
            i = a + 1
            j = indptr[v]
            hi_u = indptr[u + 1]
            hi_v = indptr[v + 1]
            while i < hi_u and j < hi_v:
                wu = nbr[i]
                wv = nbr[j]
                if wu == wv:
                    tri[u] += 1
                    tri[v] += 1
                    tri[wu] += 1
                    i += 1
                    j += 1
                elif wu < wv:
                    i += 1
                else:
                    j += 1


@njit(cache=True)
def _bin_tri_counts(bin_pair, k_max, tp0, tp1, tp2, tn0, tn1, tn2, tri_bins):
    """Bin triangles by the first theta that links all three pairs.

    bin_pair[k] is the pair's theta bin (count of thetas <= its info, so
    the pair is alive from that bin on; linking is strict I < theta).  A
    triangle activates at the max of its three pair bins; bins >= k_max
    mean never alive within this block.  Cumulative sums of tri_bins over
    the theta axis yield triangle counts at every threshold.
    """
    for k in range(tp0.size):
        b = bin_pair[tp0[k]]
        b1 = bin_pair[tp1[k]]
        if b1 > b:
            b = b1
        b2 = bin_pair[tp2[k]]
        if b2 > b:
            b = b2
        if b < k_max:
            tri_bins[tn0[k], b] += 1
            tri_bins[tn1[k], b] += 1
            tri_bins[tn2[k], b] += 1


def _bin_tri_counts_np(bin_pair, k_max, tp0, tp1, tp2, tn0, tn1, tn2, tri_bins):
    # numpy twin of _bin_tri_counts
    n = tri_bins.shape[0]
    bt = np.maximum(np.maximum(bin_pair[tp0], bin_pair[tp1]), bin_pair[tp2])
    ok = bt < k_max
    bt = bt[ok].astype(np.int64)
    for nodes in (tn0, tn1, tn2):
        flat = np.bincount(nodes[ok] * k_max + bt, minlength=n * k_max)
        tri_bins += flat.reshape(n, k_max)


class PairTable:
    """Precomputed pair/triangle structure of one (grid, neighborhood)."""

    def __init__(self, grid: ScaleTimeGrid, nb: NeighborhoodSpec | None = None):
        if nb is None:
            nb = NeighborhoodSpec()
        if not grid.pixels:
            raise EmptyGrid("grid has no active pixels")
        self.nb = nb
        self.vmax = grid.config.vmax
        items = grid.items_sorted()
        self.n_nodes = len(items)
        h, w = grid.config.n_scales, grid.n_frames
        self._shape = (h, w)
        self._idx = np.full((h, w), -1, dtype=np.int64)
        self._vol = np.zeros((h, w), dtype=np.int64)
        for i, ((s, t), v) in enumerate(items):
            self._idx[s, t] = i
            self._vol[s, t] = v
        self._build_pairs(candidate_offsets(nb, h, w))
        self._triangles_built = False

    def prepare(self) -> None:
        """Build the triangle list now (e.g. before forking sweep workers)."""
        if not self._triangles_built:
            self._build_triangles()

    def _encode(self, ds, dt, va, vb):
        vlo = np.minimum(va, vb)
        vhi = np.maximum(va, vb)
        q = self.vmax + 1
        return ((ds * (self._r_t_enc + 1) + dt) * q + vlo) * q + vhi

    def _build_pairs(self, offs) -> None:
        h, w = self._shape
        idx = self._idx
        vol = self._vol
        self._r_t_enc = max((abs(dt) for _, dt in offs), default=0)
        ii_parts, jj_parts, key_parts = [], [], []
        for ds, dt in offs:
            if ds >= h or abs(dt) >= w:
                continue
            if dt >= 0:
                a, va = idx[: h - ds, : w - dt], vol[: h - ds, : w - dt]
                b, vb = idx[ds:, dt:], vol[ds:, dt:]
            else:
                a, va = idx[: h - ds, -dt:], vol[: h - ds, -dt:]
                b, vb = idx[ds:, : w + dt], vol[ds:, : w + dt]
            mask = (a >= 0) & (b >= 0)
            if not mask.any():
                continue
            ii_parts.append(a[mask])
            jj_parts.append(b[mask])
            key_parts.append(self._encode(ds, abs(dt), va[mask], vb[mask]))
        if ii_parts:
            ii = np.concatenate(ii_parts)
            jj = np.concatenate(jj_parts)
            keys = np.concatenate(key_parts)
        else:
            ii = jj = keys = np.zeros(0, dtype=np.int64)
        self.n_pairs = int(ii.size)

        # compact interaction classes and their feature vectors
        self._cls_keys = np.unique(keys)
        self.pair_cls = np.searchsorted(self._cls_keys, keys)
        q = self.vmax + 1
        rest, vhi = divmod(self._cls_keys, q)
        rest, vlo = divmod(rest, q)
        ds_c, dt_c = divmod(rest, self._r_t_enc + 1)
        self._f_scale = ds_c.astype(np.float64)
        self._f_time = dt_c.astype(np.float64)
        self._f_vdiff = (vhi - vlo).astype(np.float64)
        self._f_vsum = (vhi + vlo).astype(np.float64)
        self.n_classes = int(self._cls_keys.size)

        self.pair_i = ii.astype(np.int32)
        self.pair_j = jj.astype(np.int32)

    def _build_triangles(self) -> None:
        # forward adjacency in node order: neighbor lists sorted, with the
        # originating pair index carried along
        order = np.lexsort((self.pair_j, self.pair_i))
        nbr = self.pair_j[order]
        pidx = order.astype(np.int32)
        counts = np.bincount(self.pair_i[order], minlength=self.n_nodes)
        indptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])

        tri_pass = _tri_pass if HAVE_NUMBA else _tri_pass_py
        dummy = np.zeros((1, 6), dtype=np.int32)
        n_tri = int(tri_pass(indptr, nbr, pidx, dummy, 0))
        out = np.zeros((max(n_tri, 1), 6), dtype=np.int32)
        if n_tri:
            tri_pass(indptr, nbr, pidx, out, 1)
        self.n_triangles = n_tri
        self._tp0 = out[:n_tri, 0].copy()
        self._tp1 = out[:n_tri, 1].copy()
        self._tp2 = out[:n_tri, 2].copy()
        self._tn0 = out[:n_tri, 3].copy()
        self._tn1 = out[:n_tri, 4].copy()
        self._tn2 = out[:n_tri, 5].copy()
        self._triangles_built = True

    # -- per-combination evaluation ----------------------------------------

    def information_per_class(self, w1: float, w2: float, w3: float,
                              w4: float) -> np.ndarray:
        # same operation order as network.information so floats agree bitwise
        out = w1 * self._f_scale
        out += w2 * self._f_time
        out += w3 * self._f_vdiff
        out += w4 * self._f_vsum
        return out

    def pair_information(self, w: WeightConfig) -> np.ndarray:
        """Information value of every candidate pair (for threshold percentiles)."""
        return self.information_per_class(w.w1, w.w2, w.w3, w.w4)[self.pair_cls]

    def counts_block(self, w1: float, w2: float, w3: float, w4: float,
                     thetas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Degrees and triangle counts per node for every theta of a block.

        thetas must be strictly ascending; returns two (n_nodes, len(thetas))
        integer arrays.
        """
        if not self._triangles_built:
            self._build_triangles()
        thetas = np.asarray(thetas, dtype=np.float64)
        k_max = len(thetas)
        info_cls = self.information_per_class(w1, w2, w3, w4)
        # bin = count of thetas <= info: the smallest theta index with
        # info < theta, i.e. the bin where the pair becomes alive
        bin_cls = np.searchsorted(thetas, info_cls, side="right")
        bin_dtype = np.uint8 if k_max < 256 else np.int64
        bin_pair = bin_cls[self.pair_cls].astype(bin_dtype)

        n, k = self.n_nodes, k_max
        deg_bins = np.zeros((n, k), dtype=np.int64)
        ok = bin_pair < k_max
        bp = bin_pair[ok].astype(np.int64)
        for nodes in (self.pair_i, self.pair_j):
            flat = np.bincount(nodes[ok] * k + bp, minlength=n * k)
            deg_bins += flat.reshape(n, k)

        tri_bins = np.zeros((n, k), dtype=np.int64)
        kernel = _bin_tri_counts if HAVE_NUMBA else _bin_tri_counts_np
        kernel(
            bin_pair, k_max,
            self._tp0, self._tp1, self._tp2,
            self._tn0, self._tn1, self._tn2,
            tri_bins,
        )
        return deg_bins.cumsum(axis=1), tri_bins.cumsum(axis=1)

    def word_rationals(self, w: WeightConfig) -> tuple[np.ndarray, np.ndarray]:
        """Per-node reduced (numerator, denominator) of the cc word."""
        deg, tri = self.counts_block(
            w.w1, w.w2, w.w3, w.w4, np.array([w.theta], dtype=np.float64)
        )
        return _reduce_rationals(deg[:, 0], tri[:, 0])

    def word_rationals_single(self, w: WeightConfig) -> tuple[np.ndarray, np.ndarray]:
        """Like word_rationals, but thresholds the pairs first and counts
        triangles on the live adjacency only.  Preferred for one-shot word
        maps: dense grids can hold billions of candidate triangles, and
        this path never materializes them."""
        info = self.information_per_class(w.w1, w.w2, w.w3, w.w4)
        alive = info[self.pair_cls] < w.theta
        pi = self.pair_i[alive]
        pj = self.pair_j[alive]
        deg = (np.bincount(pi, minlength=self.n_nodes)
               + np.bincount(pj, minlength=self.n_nodes)).astype(np.int64)
        order = np.lexsort((pj, pi))
        nbr = pj[order]
        counts = np.bincount(pi[order], minlength=self.n_nodes)
        indptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        tri = np.zeros(self.n_nodes, dtype=np.int64)
        kernel = _tri_count_alive if HAVE_NUMBA else _tri_count_alive_py
        kernel(indptr, nbr, tri)
        return _reduce_rationals(deg, tri)

    def word_frequencies(self, w: WeightConfig) -> np.ndarray:
        """Distinct-word counts sorted descending (the rank-table frequencies)."""
        return _word_frequencies(*self.word_rationals(w))


def _reduce_rationals(deg: np.ndarray, tri: np.ndarray):
    num = 2 * tri
    num[deg < 2] = 0
    den = np.where(num == 0, 1, deg * (deg - 1))
    g = np.gcd(num, den)
    return num // g, den // g


def _word_frequencies(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    m = int(den.max()) + 1 if den.size else 1
    _, counts = np.unique(num * m + den, return_counts=True)
    return np.sort(counts)[::-1]


def _fit_summary(freqs: np.ndarray, qualify_r2: float):
    word_types = int(freqs.size)
    try:
        fit = zipf_fit(freqs.astype(np.float64), drop_top=1)
    except InsufficientData:
        return 0.0, word_types, False, None, None
    return fit.r2, word_types, fit.r2 > qualify_r2, fit.a, fit.b


def evaluate_block(table: PairTable, w1: float, w2: float, w3: float,
                   w4: float, thetas: np.ndarray, qualify_r2: float) -> list:
    """(r2, word_types, qualifies, a, b) per theta, sharing one count pass."""
    deg, tri = table.counts_block(w1, w2, w3, w4, thetas)
    out = []
    for j in range(len(thetas)):
        num, den = _reduce_rationals(deg[:, j].copy(), tri[:, j])
        out.append(_fit_summary(_word_frequencies(num, den), qualify_r2))
    return out


def evaluate_with_table(table: PairTable, w: WeightConfig, qualify_r2: float):
    """(r2, word_types, qualifies, a, b) exactly as the composed pipeline."""
    return evaluate_block(
        table, w.w1, w.w2, w.w3, w.w4,
        np.array([w.theta], dtype=np.float64), qualify_r2
    )[0]


def word_map_fast(grid: ScaleTimeGrid, w: WeightConfig,
                  nb: NeighborhoodSpec | None = None) -> WordMap:
    """WordMap equal to clustering_coefficients(build_network(grid, w, nb))
    via the memory-bounded single-combo engine path."""
    table = PairTable(grid, nb)
    num, den = table.word_rationals_single(w)
    cc = {
        (s, t): Fraction(int(n), int(d))
        for ((s, t), _), n, d in zip(grid.items_sorted(), num, den)
    }
    return WordMap(cc, grid.config.n_scales, grid.n_frames, w)
