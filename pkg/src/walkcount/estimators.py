"""Fixed-horizon estimators of edge and vertex counts.

Estimators only look at profiles (first-occurrence ranks plus degrees) of
walk pairs; raw vertex ids never reach the arithmetic. The adapter
:func:`pair_profiles` turns simulated trajectories into that form.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import Graph
from .seeding import make_rng
from .walks import first_occurrence_ranks, simulate_lazy_walks

DEFAULT_K = 400


class InsufficientIntersectionsError(RuntimeError):
    """No intersections observed; the estimate would be infinite. Increase t or K."""


@dataclass
class EstimateResult:
    value: float
    t: int
    K: int
    seed: int
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PairProfiles:
    """Profiles of K walk pairs: ranks/degrees of the concatenation X|Y per row."""

    ranks: np.ndarray  # (K, 2L), values in 1..2L
    degrees: np.ndarray  # (K, 2L)

    @property
    def length(self) -> int:
        return self.ranks.shape[1] // 2


def pair_profiles(xs: np.ndarray, ys: np.ndarray, g: Graph) -> PairProfiles:
    both = np.concatenate([xs, ys], axis=1)
    return PairProfiles(first_occurrence_ranks(both), g.degrees[both])


def profile_intersections(pp: PairProfiles, weighted: bool) -> np.ndarray:
    """Per-pair intersection counts computed from ranks and degrees alone."""
    K, L2 = pp.ranks.shape
    L = L2 // 2
    width = L2 + 1
    base = np.arange(K)[:, None] * width
    cx = np.bincount((base + pp.ranks[:, :L]).ravel(), minlength=K * width).reshape(K, width)
    cy = np.bincount((base + pp.ranks[:, L:]).ravel(), minlength=K * width).reshape(K, width)
    prod = cx * cy
    if not weighted:
        return prod.sum(axis=1)
    deg_of_rank = np.ones((K, width), dtype=np.int64)
    np.put_along_axis(deg_of_rank, pp.ranks, pp.degrees, axis=1)
    return (prod / deg_of_rank).sum(axis=1)


def _simulate_pairs(g: Graph, x: int, hi: int, K: int, seed: int):
    walks = simulate_lazy_walks(g, np.full(2 * K, x), hi, make_rng(seed))
    return walks[:K], walks[K:]


def _finish(counts: np.ndarray, numerator: float, t: int, K: int, seed: int, **diag) -> EstimateResult:
    mean = float(counts.mean())
    var = float(counts.var(ddof=1)) if len(counts) > 1 else 0.0
    if mean <= 0:
        raise InsufficientIntersectionsError(
            f"no intersections in {K} walk pairs of length {t}; increase t or K"
        )
    diag.update(mean_intersections=mean, sample_variance=var)
    return EstimateResult(numerator / mean, t, K, seed, diag)


def estimate_vertices_regular(g: Graph, x: int, t: int, K: int = DEFAULT_K, seed: int = 0, check_regular: bool = True) -> EstimateResult:
    """n_hat = t^2 / mean unweighted intersections over [0, t)."""
    if t < 1 or K < 1:
        raise ValueError("t and K must be >= 1")
    if check_regular and not g.is_regular():
        raise ValueError("estimate_vertices_regular needs a regular graph")
    xs, ys = _simulate_pairs(g, x, t, K, seed)
    counts = profile_intersections(pair_profiles(xs, ys, g), weighted=False)
    return _finish(counts, t * t, t, K, seed, burn_in=0, steps=2 * K * t)


def estimate_edges(g: Graph, x: int, t: int, K: int = DEFAULT_K, seed: int = 0) -> EstimateResult:
    """m_hat = t^2 / (2 * mean weighted intersections over [0, t))."""
    return estimate_edges_burnin(g, x, t, K, 0, seed)


def estimate_edges_burnin(g: Graph, x: int, t: int, K: int = DEFAULT_K, burn_in: int = 0, seed: int = 0) -> EstimateResult:
    """m_tilde = t^2 / (2 * mean weighted intersections over [burn_in, burn_in + t))."""
    if t < 1 or K < 1 or burn_in < 0:
        raise ValueError("need t, K >= 1 and burn_in >= 0")
    xs, ys = _simulate_pairs(g, x, burn_in + t, K, seed)
    pp = pair_profiles(xs[:, burn_in:], ys[:, burn_in:], g)
    counts = profile_intersections(pp, weighted=True)
    return _finish(
        counts, t * t / 2, t, K, seed,
        burn_in=burn_in, steps_per_walk=burn_in + t, steps=2 * K * (burn_in + t),
    )


def estimate_vertices_general(g: Graph, x: int, m_hat: float, burn_in: int, t: int, seed: int = 0) -> EstimateResult:
    """n_hat = 2 m_hat * time-average of 1/deg along one walk over [r, r + t)."""
    if m_hat <= 0 or t < 1 or burn_in < 0:
        raise ValueError("need m_hat > 0, t >= 1, burn_in >= 0")
    walk = simulate_lazy_walks(g, [x], burn_in + t, make_rng(seed))[0]
    degs = g.degrees[walk[burn_in:]]
    if g.is_regular():
        avg_inv = 1.0 / int(degs[0])
    else:
        avg_inv = float(np.mean(1.0 / degs))
    return EstimateResult(
        2.0 * m_hat * avg_inv, t, 1, seed,
        {"burn_in": burn_in, "mean_inverse_degree": avg_inv, "m_hat": m_hat, "steps": burn_in + t},
    )


# --- horizon helpers ------------------------------------------------------


def vertices_regular_horizon(t_rel: int, n: int) -> int:
    """Smallest integer t >= 2 sqrt(6) t_rel^{3/4} sqrt(n)."""
    return math.ceil(2 * math.sqrt(6) * t_rel**0.75 * math.sqrt(n))


def edges_horizon(t_rel: int, m: int, d: int) -> int:
    """Smallest integer t >= 4 sqrt(3) t_rel^{3/4} sqrt(m/d)."""
    return math.ceil(4 * math.sqrt(3) * t_rel**0.75 * math.sqrt(m / d))


def mean_degree_horizon(g: Graph, t_rel: int, eps: float) -> int:
    """t >= 16 Var_pi(f) t_rel / (eps E_pi(f)^2) for f = 1/deg."""
    pi = g.degrees / (2 * g.edge_count)
    f = 1.0 / g.degrees
    mean = float(pi @ f)
    var = float(pi @ (f - mean) ** 2)
    return max(1, math.ceil(16 * var * t_rel / (eps * mean * mean)))
