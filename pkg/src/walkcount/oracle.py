"""Exact dense-matrix quantities for the lazy random walk on small graphs.

Everything here is deterministic linear algebra in double precision and
serves as ground truth for the Monte Carlo code paths. Graphs larger than
:func:`oracle_cap` vertices are refused.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .graph import Graph, min_degree, stationary_measure

DEFAULT_ORACLE_CAP = 4096
ORACLE_CAP_ENV = "WALKCOUNT_ORACLE_CAP"
# slack for float comparisons against exact thresholds (1/4 in t_unif, ceil in t_rel)
_EPS = 1e-9


class OracleError(RuntimeError):
    pass


class OracleCapExceeded(OracleError):
    pass


def oracle_cap() -> int:
    return int(os.environ.get(ORACLE_CAP_ENV, DEFAULT_ORACLE_CAP))


def _check_cap(g: Graph) -> None:
    cap = oracle_cap()
    if g.vertex_count > cap:
        raise OracleCapExceeded(
            f"graph has {g.vertex_count} vertices; dense oracle is capped at {cap} "
            f"(set {ORACLE_CAP_ENV} to raise it)"
        )


def lazy_transition_matrix(g: Graph) -> np.ndarray:
    """P(u,u) = 1/2 and P(u,v) = 1/(2 deg u) for each neighbor v."""
    _check_cap(g)
    n = g.vertex_count
    P = np.zeros((n, n))
    rows = np.repeat(np.arange(n), g.degrees)
    P[rows, g.indices] = 0.5 / g.degrees[rows]
    P[np.arange(n), np.arange(n)] = 0.5
    return P


@lru_cache(maxsize=32)
def _cached_P(g: Graph) -> np.ndarray:
    P = lazy_transition_matrix(g)
    P.setflags(write=False)
    return P


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray
    # columns: orthonormal eigenvectors of D^{1/2} P D^{-1/2}
    sym_eigenvectors: np.ndarray
    t_rel: int
    t_unif: int | None
    pi: np.ndarray

    @property
    def lambda2(self) -> float:
        return float(self.eigenvalues[1]) if len(self.eigenvalues) > 1 else 0.0

    @property
    def eigenvectors(self) -> np.ndarray:
        """Right eigenvectors Psi_j of P, normalized in l2(pi)."""
        return self.sym_eigenvectors / np.sqrt(self.pi)[:, None]

    def residual(self, P: np.ndarray) -> float:
        psi = self.eigenvectors
        return float(np.abs(P @ psi - psi * self.eigenvalues).max())

    def to_dict(self) -> dict:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "lambda2": self.lambda2,
            "t_rel": self.t_rel,
            "t_unif": self.t_unif,
            "pi": self.pi.tolist(),
        }


def relaxation_time(lambda2: float) -> int:
    if lambda2 >= 1 - 1e-15:
        raise OracleError("lambda2 = 1: graph is not connected")
    return max(1, math.ceil(1.0 / (1.0 - lambda2) - _EPS))


def uniform_mixing_time(g: Graph, threshold: float = 0.25, max_t: int = 10**7) -> int:
    """Smallest t with max_{x,y} |P^t(x,y)/pi(y) - 1| <= threshold."""
    P = _cached_P(g)
    pi = stationary_measure(g)
    Pt = np.eye(g.vertex_count)
    for t in range(max_t + 1):
        if np.abs(Pt / pi - 1.0).max() <= threshold + _EPS:
            return t
        Pt = Pt @ P
    raise OracleError(f"t_unif exceeds {max_t}")


@lru_cache(maxsize=32)
def _spectrum(g: Graph):
    _check_cap(g)
    d = g.degrees.astype(float)
    n = g.vertex_count
    rows = np.repeat(np.arange(n), g.degrees)
    S = np.zeros((n, n))
    S[rows, g.indices] = 0.5 / np.sqrt(d[rows] * d[g.indices])
    S[np.arange(n), np.arange(n)] = 0.5
    try:
        vals, vecs = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise OracleError(f"eigensolver failed: {exc}") from exc
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return vals, vecs


@lru_cache(maxsize=32)
def _summary(g: Graph, with_t_unif: bool) -> SpectralSummary:
    vals, vecs = _spectrum(g)
    if vals.min() < -1e-9 or abs(vals[0] - 1) > 1e-9:
        raise OracleError(f"lazy spectrum out of range: [{vals.min()}, {vals[0]}]")
    t_rel = relaxation_time(float(vals[1])) if len(vals) > 1 else 1
    t_unif = uniform_mixing_time(g) if with_t_unif else None
    pi = stationary_measure(g)
    pi.setflags(write=False)
    return SpectralSummary(vals, vecs, t_rel, t_unif, pi)


def spectral_summary(g: Graph, with_t_unif: bool = True) -> SpectralSummary:
    """Eigenvalues (descending), t_rel, t_unif and pi for the lazy walk."""
    return _summary(g, with_t_unif)


# --- return probabilities, Green's function, expectations -----------------


def walk_distribution(g: Graph, x: int, t: int) -> np.ndarray:
    """Row P^t(x, .) by repeated vector-matrix products."""
    P = _cached_P(g)
    v = np.zeros(g.vertex_count)
    v[x] = 1.0
    for _ in range(t):
        v = v @ P
    return v


def return_probabilities(g: Graph, x: int, smax: int) -> np.ndarray:
    """Array ``r`` with ``r[s] = P^s(x, x)`` for ``s = 0..smax``."""
    P = _cached_P(g)
    v = np.zeros(g.vertex_count)
    v[x] = 1.0
    r = np.empty(smax + 1)
    for s in range(smax + 1):
        r[s] = v[x]
        v = v @ P
    return r


def _green_from(P: np.ndarray, init: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """sum_{i=lo}^{hi-1} init P^i."""
    v = init.copy()
    for _ in range(lo):
        v = v @ P
    acc = np.zeros_like(v)
    for _ in range(lo, hi):
        acc += v
        v = v @ P
    return acc


@dataclass(frozen=True)
class GreenRow:
    x: int
    t: int
    values: np.ndarray


def green_row(g: Graph, x: int, t: int) -> GreenRow:
    """g_t(x, u) = expected visits to u during steps 0..t-1 from x."""
    if t < 1:
        raise ValueError("t must be >= 1")
    P = _cached_P(g)
    init = np.zeros(g.vertex_count)
    init[x] = 1.0
    return GreenRow(x, t, _green_from(P, init, 0, t))


def _pair_counts(lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """For i, j in [lo, hi): the distinct sums s = i+j and their multiplicities."""
    w = hi - lo
    s = np.arange(2 * lo, 2 * hi - 1)
    k = s - 2 * lo
    return s, np.minimum(k, 2 * w - 2 - k) + 1


def expected_weighted_intersections(g: Graph, x: int, t: int, form: str = "green") -> float:
    """Exact E_x[weighted intersections over [0, t)].

    ``form="green"``: sum_u g_t(x,u)^2 / deg(u).
    ``form="return"``: sum_{i,j<t} P^{i+j}(x,x) / deg(x).
    """
    return expected_window_intersections(g, x, 0, t, form)


def expected_window_intersections(g: Graph, x: int, lo: int, hi: int, form: str = "green") -> float:
    """Exact expected weighted intersections of two walks from x over [lo, hi)."""
    if hi <= lo:
        raise ValueError("empty window")
    if form == "green":
        P = _cached_P(g)
        init = np.zeros(g.vertex_count)
        init[x] = 1.0
        gr = _green_from(P, init, lo, hi)
        return float(np.sum(gr**2 / g.degrees))
    if form == "return":
        r = return_probabilities(g, x, 2 * hi - 2)
        s, mult = _pair_counts(lo, hi)
        return float(np.dot(r[s], mult) / g.degrees[x])
    raise ValueError(f"unknown form {form!r}")


def expected_weighted_intersections_between(g: Graph, x: int, y: int, t: int) -> float:
    """E_{x,y}: walks started at different vertices."""
    P = _cached_P(g)
    ex = np.zeros(g.vertex_count)
    ey = np.zeros(g.vertex_count)
    ex[x] = 1.0
    ey[y] = 1.0
    return float(np.sum(_green_from(P, ex, 0, t) * _green_from(P, ey, 0, t) / g.degrees))


def expected_J(g: Graph, x: int, t: int, burn_in: int) -> float:
    """E_x of weighted intersections over [burn_in, burn_in + t) on both walks.

    Computed as sum_u (a G_t)(u)^2 / deg(u) with a = P^burn_in(x, .).
    """
    return expected_window_intersections(g, x, burn_in, burn_in + t, "green")


def l2_distance_sq(g: Graph, x: int, t: int, form: str = "direct") -> float:
    """d_x(t)^2, the squared l2(pi) distance of P^t(x,.)/pi from 1.

    ``form="direct"`` evaluates the weighted sum; ``form="return"`` uses
    P^{2t}(x,x)/pi(x) - 1.
    """
    pi = stationary_measure(g)
    if form == "direct":
        p = walk_distribution(g, x, t)
        return float(np.sum(pi * (p / pi - 1.0) ** 2))
    if form == "return":
        return float(walk_distribution(g, x, 2 * t)[x] / pi[x] - 1.0)
    raise ValueError(f"unknown form {form!r}")


def l2_distance_sq_series(g: Graph, x: int, tmax: int) -> np.ndarray:
    """d_x(t)^2 for t = 0..tmax via return probabilities."""
    pi_x = g.degrees[x] / (2 * g.edge_count)
    r = return_probabilities(g, x, 2 * tmax)
    return r[::2] / pi_x - 1.0


def mixing_time_from(g: Graph, x: int, delta: float, max_t: int = 10**7) -> int:
    """t_x(delta): smallest t >= 0 with d_x(t)^2 <= delta."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    P = _cached_P(g)
    pi_x = g.degrees[x] / (2 * g.edge_count)
    v = np.zeros(g.vertex_count)
    v[x] = 1.0
    # v holds P^{2t}(x, .)
    for t in range(max_t + 1):
        if v[x] / pi_x - 1.0 <= delta:
            return t
        v = (v @ P) @ P
    raise OracleError(f"t_x({delta}) exceeds {max_t}")


def expected_L(g: Graph, x: int, t: int, form: str = "distance") -> float:
    """Exact E_x of weighted intersections over [t, 2t).

    ``form="distance"``: sum_{i,j=t}^{2t-1} (d_x((i+j)/2)^2 + 1) / 2m with the
    half-integer distance read as P^{i+j}(x,x)/pi(x) - 1.
    ``form="green"``: sum_u g_{t->2t}(x,u)^2 / deg(u).
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if form == "green":
        return expected_window_intersections(g, x, t, 2 * t, "green")
    if form != "distance":
        raise ValueError(f"unknown form {form!r}")
    two_m = 2 * g.edge_count
    pi_x = g.degrees[x] / two_m
    r = return_probabilities(g, x, 4 * t - 2)
    s, mult = _pair_counts(t, 2 * t)
    dist_sq = r[s] / pi_x - 1.0
    return float(np.dot(dist_sq + 1.0, mult) / two_m)


# --- second moments -------------------------------------------------------


def visit_moment_matrix(g: Graph, init: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """M[u,v] = sum_{i,k in [lo,hi)} P(X_i = u, X_k = v) for X_0 ~ init.

    Uses P(X_i=u, X_k=v) = p_i(u) P^{k-i}(u,v) for i <= k.
    """
    P = _cached_P(g)
    n = g.vertex_count
    w = hi - lo
    # partial Green matrices G_j = sum_{l<j} P^l for j = 1..w
    greens = np.empty((w + 1, n, n))
    greens[0] = 0.0
    Pl = np.eye(n)
    for j in range(1, w + 1):
        greens[j] = greens[j - 1] + Pl
        Pl = Pl @ P
    p = init.copy()
    for _ in range(lo):
        p = p @ P
    upper = np.zeros((n, n))
    diag = np.zeros(n)
    for i in range(lo, hi):
        upper += p[:, None] * greens[hi - i]
        diag += p
        p = p @ P
    return upper + upper.T - np.diag(diag)


def _second_moment(g: Graph, M: np.ndarray) -> float:
    d = g.degrees.astype(float)
    return float(np.sum(M**2 / np.outer(d, d)))


def second_moment_window(g: Graph, x: int, lo: int, hi: int) -> float:
    """Exact E_x[W^2] for W the weighted intersections of two walks over [lo, hi)."""
    init = np.zeros(g.vertex_count)
    init[x] = 1.0
    return _second_moment(g, visit_moment_matrix(g, init, lo, hi))


def second_moment_I(g: Graph, x: int, t: int) -> float:
    return second_moment_window(g, x, 0, t)


def covariance_L_shared(g: Graph, x: int, t: int) -> float:
    """Cov_x(L^{(X,Y)}, L^{(X,Z)}) for three independent walks from x, windows [t, 2t)."""
    init = np.zeros(g.vertex_count)
    init[x] = 1.0
    M = visit_moment_matrix(g, init, t, 2 * t)
    gr = _green_from(_cached_P(g), init, t, 2 * t) / g.degrees
    joint = float(gr @ M @ gr)
    return joint - expected_L(g, x, t, "green") ** 2


# --- bound verification ---------------------------------------------------

SWEEP_TS = (1, 2, 4, 8, 16, 32, 64, 128)
SECOND_MOMENT_MAX_N = 16
SECOND_MOMENT_MAX_T = 8


@dataclass
class BoundCheck:
    name: str
    x: int | None
    t: int | None
    lhs: float
    rhs: float
    passed: bool

    def __post_init__(self):
        self.lhs, self.rhs, self.passed = float(self.lhs), float(self.rhs), bool(self.passed)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("name", "x", "t", "lhs", "rhs", "passed")}


@dataclass
class BoundReport:
    checks: list[BoundCheck] = field(default_factory=list)
    # ratio LHS / (bound without constant), maximized over the sweep; informational only
    fitted_constants: dict[str, float] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[BoundCheck]:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> dict[str, bool]:
        out: dict[str, bool] = {}
        for c in self.checks:
            out[c.name] = out.get(c.name, True) and c.passed
        return out

    def to_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "summary": self.summary(),
            "fitted_constants": self.fitted_constants,
            "checks": [c.to_dict() for c in self.checks],
        }


def _le(lhs: float, rhs: float) -> bool:
    return lhs <= rhs + 1e-9 * max(1.0, abs(rhs))


def centered_returns(g: Graph, smax: int) -> np.ndarray:
    """C[x, s] = P^s(x,x)/pi(x) - 1 via the spectral expansion, s = 0..smax."""
    vals, vecs = _spectrum(g)
    pi = stationary_measure(g)
    lam = np.clip(vals[1:], 0.0, None)
    powers = lam[:, None] ** np.arange(smax + 1)[None, :]
    return (vecs[:, 1:] ** 2 / pi[:, None]) @ powers


def truncated_sum_sides(g: Graph, x: int, tol: float = 1e-12) -> tuple[float, float]:
    """Both sides of the truncated-sum inequality for f = 1_x / pi(x)."""
    summ = spectral_summary(g, with_t_unif=False)
    lam2 = summ.lambda2
    S = 1 if lam2 <= 0 else max(1, math.ceil(math.log(tol) / math.log(lam2)))
    c = centered_returns(g, max(S, summ.t_rel))[x]
    lhs = float(np.dot(np.arange(1, S + 2), c[: S + 1]))
    rhs = summ.t_rel / (1 - 1 / math.e) ** 2 * float(c[: summ.t_rel].sum())
    return lhs, rhs


def verify_bounds(
    g: Graph,
    xs=None,
    ts=SWEEP_TS,
    trace_tmax: int = 128,
    second_moment: bool | None = None,
) -> BoundReport:
    """Check every clean-constant inequality on ``g`` with exact oracle values.

    Hard checks: first-moment sandwich for the weighted intersections, the
    burn-in sandwich at t_unif, the Green bound for t <= 36 m^2 / d, the
    return-probability trace bound, t_rel <= 12 m n / d, the truncated-sum
    inequality, and (small graphs) the second-moment bound. Bounds stated
    only up to constants are reported as fitted constants.
    """
    summ = spectral_summary(g)
    n, m, d = g.vertex_count, g.edge_count, min_degree(g)
    deg = g.degrees
    xs = range(n) if xs is None else xs
    rep = BoundReport()
    add = rep.checks.append
    if second_moment is None:
        second_moment = n <= SECOND_MOMENT_MAX_N

    add(BoundCheck("relaxation_time_bound", None, None, summ.t_rel, 12 * m * n / d, summ.t_rel <= 12 * m * n / d))

    P = _cached_P(g)
    Pt = np.eye(n)
    for t in range(trace_tmax + 1):
        tr = float(np.trace(Pt))
        rhs = 1 + 13 * n / (t + 1) ** (1 / 3)
        add(BoundCheck("return_trace_bound", None, t, tr, rhs, _le(tr, rhs)))
        Pt = Pt @ P

    burn = summ.t_unif
    P_burn = np.linalg.matrix_power(P, burn)
    tmax = max(ts)
    mean_I = {}
    for x in xs:
        r = return_probabilities(g, x, 2 * tmax)
        cum_r = np.cumsum(r)
        for t in ts:
            s, mult = _pair_counts(0, t)
            e_i = float(np.dot(r[s], mult) / deg[x])
            mean_I[x, t] = e_i
            base = t * t / (2 * m)
            add(BoundCheck("intersections_lower", x, t, base, e_i, _le(base, e_i)))
            up = base + 16 * summ.t_rel**1.5 / d
            add(BoundCheck("intersections_upper", x, t, e_i, up, _le(e_i, up)))
            e_j = float(np.sum(_green_from(P, P_burn[x], 0, t) ** 2 / deg))
            lo_j, hi_j = (3 / 4) ** 2 * base, (5 / 4) ** 2 * base
            add(BoundCheck("burnin_intersections_lower", x, t, lo_j, e_j, _le(lo_j, e_j)))
            add(BoundCheck("burnin_intersections_upper", x, t, e_j, hi_j, _le(e_j, hi_j)))
            if t <= 36 * m * m / d:
                gxx = float(cum_r[t - 1])
                rhs = 6 * deg[x] * math.sqrt(t) / d
                add(BoundCheck("green_diagonal_bound", x, t, gxx, rhs, _le(gxx, rhs)))
        lhs, rhs = truncated_sum_sides(g, x)
        add(BoundCheck("truncated_sum_bound", x, None, lhs, rhs, _le(lhs, rhs)))

    if second_moment:
        small_ts = [t for t in ts if t <= SECOND_MOMENT_MAX_T]
        max_a = {t: max(expected_weighted_intersections(g, a, t, "return") for a in range(n)) for t in small_ts}
        fit_j = fit_var_l = fit_cov_l = 0.0
        for x in xs:
            for t in small_ts:
                e_i = mean_I.get((x, t)) or expected_weighted_intersections(g, x, t, "return")
                sm = second_moment_I(g, x, t)
                rhs = 4 * max_a[t] * e_i
                add(BoundCheck("intersections_second_moment", x, t, sm, rhs, _le(sm, rhs)))
                sm_j = second_moment_window(g, x, burn, burn + t)
                fit_j = max(fit_j, sm_j / ((t * t / m**2) * (t * t + n * summ.t_rel ** (5 / 3))))
                e_l = expected_L(g, x, t, "green")
                var_l = second_moment_window(g, x, t, 2 * t) - e_l**2
                fit_var_l = max(fit_var_l, var_l / (e_l * max_a[t]))
                cov = covariance_L_shared(g, x, t)
                fit_cov_l = max(fit_cov_l, cov / (e_l**1.5 * math.sqrt(max_a[t])))
        rep.fitted_constants = {
            "burnin_second_moment": fit_j,
            "window_variance": fit_var_l,
            "window_covariance": fit_cov_l,
        }
    return rep
