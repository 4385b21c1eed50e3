"""Self-stopping doubling searches for the edge count and the l2 mixing time.

Round q draws its randomness from ``make_rng(seed, q, chunk)``; experiments
inside a round are simulated together in a fixed layout, so replaying a
round from the log reproduces its success count exactly.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .estimators import estimate_edges
from .graph import Graph
from .intersections import _L_from_counts, pairwise_products, window_visit_counts
from .seeding import RNG_NAME, derive_seed, make_rng

DEFAULT_K = 32
DEFAULT_C = 4.0
DEFAULT_MAX_Q = 60
DEFAULT_REFINE_K = 100
# cap on walks * vertices held in one visit-count block
_BLOCK_CELLS = 20_000_000


class RoundBudgetExceeded(RuntimeError):
    pass


@dataclass
class RoundRecord:
    q: int
    t: int
    K: int
    R: int
    successes: int
    stopped: bool
    steps: int


@dataclass
class StoppingLog:
    algorithm: str
    params: dict
    rounds: list[RoundRecord] = field(default_factory=list)
    final_value: int | None = None
    total_steps: int = 0
    metadata: dict = field(
        default_factory=lambda: {"rng": RNG_NAME, "log_base": "e", "stop_rule": "successes > R/2"}
    )

    def to_dict(self) -> dict:
        return asdict(self)


def repetitions(q: int, eps: float) -> int:
    """R_q = ceil(8 ln(4/eps) + 16 ln(q+1))."""
    return math.ceil(8 * math.log(4 / eps) + 16 * math.log(q + 1))


def edges_horizon(q: int, tau: float) -> int:
    return math.ceil(tau**0.75 * math.sqrt(2 * 2**q))


def mixing_walk_count(q: int, m: float, delta: float, C: float) -> int:
    t = 2**q
    return math.ceil(C * delta**-2 * math.ceil(math.sqrt(m) * t**-0.25))


def _blocks(R: int, walks_per_exp: int, n: int) -> list[range]:
    per = max(1, _BLOCK_CELLS // max(1, walks_per_exp * n))
    return [range(lo, min(R, lo + per)) for lo in range(0, R, per)]


def edge_round_statistics(g: Graph, x: int, t: int, K: int, R: int, seed: int, q: int) -> np.ndarray:
    """Q_t for each of the R experiments of round q (K walk pairs each)."""
    out = []
    for b, blk in enumerate(_blocks(R, 2 * K, g.vertex_count)):
        E = len(blk)
        c = window_visit_counts(g, np.full(2 * K * E, x), 0, t, make_rng(seed, q, b))
        c = c.reshape(E, 2, K, -1)
        vals = pairwise_products(c[:, 0].reshape(E * K, -1), c[:, 1].reshape(E * K, -1), g, True)
        out.append(vals.reshape(E, K).mean(axis=1))
    return np.concatenate(out)


def mixing_round_statistics(g: Graph, x: int, t: int, K: int, R: int, seed: int, q: int) -> np.ndarray:
    """L_t for each of the R experiments of round q (K walks of length 2t each)."""
    out = []
    for b, blk in enumerate(_blocks(R, K, g.vertex_count)):
        E = len(blk)
        c = window_visit_counts(g, np.full(K * E, x), t, 2 * t, make_rng(seed, q, b))
        out.append(_L_from_counts(c.reshape(E, K, -1), g))
    return np.concatenate(out)


def selfstop_edges(
    g: Graph, x: int, tau: float, eps: float, K: int = DEFAULT_K, seed: int = 0,
    max_q: int = DEFAULT_MAX_Q, threshold_factor: float = 18.0,
) -> tuple[int, StoppingLog]:
    """Doubling search over guesses 2^q for the edge count, given tau >= t_rel.

    Round q runs R_q experiments at horizon ceil(tau^{3/4} sqrt(2^{q+1})); an
    experiment succeeds when the mean weighted intersection count of K walk
    pairs reaches ``threshold_factor * tau^{3/2}``. Stops at the first round
    with strictly more than R_q/2 successes and returns 2^q.
    """
    if tau < 1 or not 0 < eps < 1 or K < 1:
        raise ValueError("need tau >= 1, 0 < eps < 1, K >= 1")
    log = StoppingLog(
        "selfstop_edges",
        {"x": x, "tau": tau, "eps": eps, "K": K, "seed": seed, "max_q": max_q,
         "threshold_factor": threshold_factor},
    )
    threshold = threshold_factor * tau**1.5
    for q in range(max_q + 1):
        t, R = edges_horizon(q, tau), repetitions(q, eps)
        stats = edge_round_statistics(g, x, t, K, R, seed, q)
        wins = int((stats >= threshold).sum())
        stop = wins > R / 2
        steps = R * 2 * K * t
        log.rounds.append(RoundRecord(q, t, K, R, wins, stop, steps))
        log.total_steps += steps
        if stop:
            log.final_value = 2**q
            return 2**q, log
    raise RoundBudgetExceeded(f"selfstop_edges did not stop within q <= {max_q}")


def selfstop_mixing(
    g: Graph, x: int, m: float, delta: float, eps: float, C: float = DEFAULT_C,
    seed: int = 0, max_q: int = DEFAULT_MAX_Q,
) -> tuple[int, StoppingLog]:
    """Doubling search over t = 2^q for the l2 mixing time t_x(delta), given m.

    Each experiment runs K_q walks of length 2t and succeeds when the
    pairwise-average weighted intersections over [t, 2t) is at most
    (1 + delta/2) t^2 / 2m.
    """
    if m <= 0 or not 0 < delta < 1 or not 0 < eps < 1 or C <= 0:
        raise ValueError("need m > 0, 0 < delta < 1, 0 < eps < 1, C > 0")
    log = StoppingLog(
        "selfstop_mixing",
        {"x": x, "m": m, "delta": delta, "eps": eps, "C": C, "seed": seed, "max_q": max_q},
    )
    for q in range(max_q + 1):
        t = 2**q
        K, R = max(2, mixing_walk_count(q, m, delta, C)), repetitions(q, eps)
        stats = mixing_round_statistics(g, x, t, K, R, seed, q)
        wins = int((stats <= (1 + delta / 2) * t * t / (2 * m)).sum())
        stop = wins > R / 2
        steps = R * K * 2 * t
        log.rounds.append(RoundRecord(q, t, K, R, wins, stop, steps))
        log.total_steps += steps
        if stop:
            log.final_value = t
            return t, log
    raise RoundBudgetExceeded(f"selfstop_mixing did not stop within q <= {max_q}")


def replay_round(g: Graph, log: StoppingLog, q: int) -> int:
    """Recompute the success count of round q from the log's parameters."""
    p = log.params
    rec = log.rounds[q]
    if log.algorithm == "selfstop_edges":
        stats = edge_round_statistics(g, p["x"], rec.t, rec.K, rec.R, p["seed"], q)
        return int((stats >= p["threshold_factor"] * p["tau"] ** 1.5).sum())
    stats = mixing_round_statistics(g, p["x"], rec.t, rec.K, rec.R, p["seed"], q)
    return int((stats <= (1 + p["delta"] / 2) * rec.t**2 / (2 * p["m"])).sum())


def pipeline_edges_then_mixing(
    g: Graph, x: int, tau: float, delta: float, eps: float, K: int = DEFAULT_K,
    C: float = DEFAULT_C, seed: int = 0, max_q: int = DEFAULT_MAX_Q, refine_K: int = DEFAULT_REFINE_K,
):
    """Edge search, a refinement of its answer, then the mixing-time search.

    The edge search only pins m within a factor 38 from above, while the
    mixing search needs m to within a factor 1 + delta/2 (with a larger value
    its success test can never pass). The returned 2^q is an upper bound on
    m, so a fixed-horizon estimate at t = 4 sqrt(3) tau^{3/4} sqrt(2^q) is
    past its accuracy threshold for every minimum degree; that estimate is
    what the mixing search receives.
    """
    m_upper, log_e = selfstop_edges(g, x, tau, eps, K, seed, max_q)
    t_ref = math.ceil(4 * math.sqrt(3) * tau**0.75 * math.sqrt(m_upper))
    ref = estimate_edges(g, x, t_ref, refine_K, derive_seed(seed, 2))
    log_e.metadata.update(refined_m=ref.value, refine_t=t_ref, refine_K=refine_K,
                          refine_steps=ref.diagnostics["steps"])
    log_e.total_steps += ref.diagnostics["steps"]
    t_hat, log_m = selfstop_mixing(g, x, ref.value, delta, eps, C, derive_seed(seed, 1), max_q)
    return ref.value, t_hat, log_e, log_m
