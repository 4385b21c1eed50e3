"""Intersection counts between walk trajectories.

An intersection of X and Y over a window [lo, hi) is a pair (i, j) of times
in the window with X_i = Y_j. Counts are aggregated per vertex,
sum_u visits_X(u) * visits_Y(u), which is O(t) instead of the O(t^2) double
loop. The weighted variant divides each term by deg(u).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .walks import WalkTrace, lazy_steps

log = logging.getLogger(__name__)


class IntersectionError(ValueError):
    pass


@dataclass(frozen=True)
class WindowSpec:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 0 or self.hi <= self.lo:
            raise IntersectionError(f"invalid window [{self.lo}, {self.hi})")

    @property
    def width(self) -> int:
        return self.hi - self.lo


def _steps(trace) -> np.ndarray:
    return np.asarray(trace.steps if isinstance(trace, WalkTrace) else trace)


def _check_pair(X, Y, w: WindowSpec, g: Graph | None = None):
    if isinstance(X, WalkTrace) and isinstance(Y, WalkTrace):
        if X.graph_fingerprint != Y.graph_fingerprint:
            raise IntersectionError("traces come from different graphs")
    for tr in (X, Y):
        if g is not None and isinstance(tr, WalkTrace) and tr.graph_fingerprint != g.fingerprint:
            raise IntersectionError("trace does not belong to the given graph")
    xs, ys = _steps(X), _steps(Y)
    if w.hi > len(xs) or w.hi > len(ys):
        raise IntersectionError(f"window [{w.lo}, {w.hi}) exceeds trace lengths {len(xs)}, {len(ys)}")
    return xs[w.lo : w.hi], ys[w.lo : w.hi]


def visit_counts(trace, w: WindowSpec) -> dict[int, int]:
    """Visits per vertex within the window; the values sum to ``w.width``."""
    xs = _steps(trace)
    if w.hi > len(xs):
        raise IntersectionError("window exceeds trace length")
    vals, cnt = np.unique(xs[w.lo : w.hi], return_counts=True)
    return dict(zip(vals.tolist(), cnt.tolist()))


def _shared(xs: np.ndarray, ys: np.ndarray):
    vx, cx = np.unique(xs, return_counts=True)
    vy, cy = np.unique(ys, return_counts=True)
    common, ix, iy = np.intersect1d(vx, vy, assume_unique=True, return_indices=True)
    return common, cx[ix].astype(np.int64) * cy[iy]


def count_intersections(X, Y, w: WindowSpec) -> int:
    xs, ys = _check_pair(X, Y, w)
    return int(_shared(xs, ys)[1].sum())


def count_weighted_intersections(X, Y, w: WindowSpec, g: Graph) -> float:
    """Sum over matching pairs of 1/deg(X_i)."""
    xs, ys = _check_pair(X, Y, w, g)
    common, prod = _shared(xs, ys)
    if g.is_regular():
        return int(prod.sum()) / int(g.degrees[0])
    return float(np.sum(prod / g.degrees[common]))


def count_J(X, Y, t: int, burn_in: int, g: Graph) -> float:
    """Weighted intersections over [burn_in, burn_in + t) on both traces."""
    if burn_in < 0 or t < 1:
        raise IntersectionError("need t >= 1 and burn_in >= 0")
    n_x, n_y = len(_steps(X)), len(_steps(Y))
    if min(n_x, n_y) < burn_in + t:
        raise IntersectionError(f"traces shorter than burn_in + t = {burn_in + t}")
    return count_weighted_intersections(X, Y, WindowSpec(burn_in, burn_in + t), g)


def count_L_pairwise(traces, t: int, g: Graph) -> float:
    """Mean over unordered pairs of weighted intersections on [t, 2t)."""
    if len(traces) < 2:
        raise IntersectionError("need at least two traces")
    arr = np.stack([_steps(tr) for tr in traces])
    if arr.shape[1] < 2 * t:
        raise IntersectionError(f"traces shorter than 2t = {2 * t}")
    if len({_steps(tr).tobytes() for tr in traces}) < len(traces):
        log.warning("count_L_pairwise: duplicate traces in batch (seed reuse?)")
    return float(L_statistic(arr[None, :, t : 2 * t], g)[0])


# --- batched counting on id arrays ----------------------------------------


def count_matrix(ids: np.ndarray, n: int) -> np.ndarray:
    """counts[r, u] = occurrences of u in row r of ``ids``."""
    rows, L = ids.shape
    flat = (np.arange(rows)[:, None] * n + ids).ravel()
    return np.bincount(flat, minlength=rows * n).reshape(rows, n)


def pairwise_products(cx: np.ndarray, cy: np.ndarray, g: Graph, weighted: bool) -> np.ndarray:
    """Row-wise sum_u cx*cy (optionally / deg u); exact integers on regular graphs."""
    prod = cx.astype(np.int64) * cy
    if not weighted:
        return prod.sum(axis=1)
    if g.is_regular():
        return prod.sum(axis=1) / int(g.degrees[0])
    return (prod / g.degrees).sum(axis=1)


def pair_intersections(xs: np.ndarray, ys: np.ndarray, g: Graph, weighted: bool = True) -> np.ndarray:
    """Per-row intersection counts of two (rows, len) trajectory arrays."""
    n = g.vertex_count
    return pairwise_products(count_matrix(xs, n), count_matrix(ys, n), g, weighted)


def _L_from_counts(c: np.ndarray, g: Graph) -> np.ndarray:
    # sum_{l<k} <c_l, c_k>_w = (|sum_l c_l|_w^2 - sum_l |c_l|_w^2) / 2
    K = c.shape[1]
    tot = c.sum(axis=1)
    if g.is_regular():
        num = (tot * tot).sum(axis=1) - (c * c).sum(axis=(1, 2))
        pair_sum = num / (2 * int(g.degrees[0]))
    else:
        inv = 1.0 / g.degrees
        pair_sum = (((tot * tot) * inv).sum(axis=1) - ((c * c) * inv).sum(axis=(1, 2))) / 2
    return pair_sum / (K * (K - 1) / 2)


def L_statistic(windows: np.ndarray, g: Graph) -> np.ndarray:
    """For ``windows`` of shape (B, K, w): mean over pairs l<k of weighted intersections."""
    B, K, w = windows.shape
    c = count_matrix(windows.reshape(B * K, w), g.vertex_count).reshape(B, K, -1)
    return _L_from_counts(c.astype(np.int64), g)


def window_visit_counts(
    g: Graph, starts, lo: int, hi: int, rng: np.random.Generator
) -> np.ndarray:
    """Visit counts over [lo, hi) for lazy walks from ``starts``, without storing paths."""
    starts = np.asarray(starts, dtype=np.int64)
    W, n = len(starts), g.vertex_count
    counts = np.zeros((W, n), dtype=np.int64)
    rows = np.arange(W)
    for i, pos in enumerate(lazy_steps(g, starts, hi, rng)):
        if i >= lo:
            counts[rows, pos] += 1
    return counts


def sample_intersections(
    g: Graph, x: int, t: int, pairs: int, rng: np.random.Generator,
    weighted: bool = True, burn_in: int = 0,
) -> np.ndarray:
    """Intersection counts on [burn_in, burn_in+t) for ``pairs`` fresh walk pairs from x."""
    c = window_visit_counts(g, np.full(2 * pairs, x), burn_in, burn_in + t, rng)
    return pairwise_products(c[:pairs], c[pairs:], g, weighted)


def sample_L(g: Graph, x: int, t: int, K: int, batches: int, rng: np.random.Generator) -> np.ndarray:
    """``batches`` independent draws of the pairwise-average statistic with K walks each."""
    c = window_visit_counts(g, np.full(batches * K, x), t, 2 * t, rng)
    return _L_from_counts(c.reshape(batches, K, -1), g)
