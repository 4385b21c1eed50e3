"""Graph families used as examples, tight instances and lower-bound constructions."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .graph import Graph, GraphError
from .seeding import make_rng

log = logging.getLogger(__name__)

DEFAULT_MAX_ATTEMPTS = 1000
EXPANDER_MIN_K = 16
# lazy-walk lambda2 cap; equals 0.95 for the non-lazy walk (Ramanujan limit is ~0.943)
EXPANDER_LAMBDA2 = 0.975


class GenerationError(RuntimeError):
    """Rejection sampling ran out of attempts."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise GraphError(msg)


def gen_cycle(n: int) -> Graph:
    _require(n >= 3, f"cycle needs n >= 3, got {n}")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def gen_complete(n: int) -> Graph:
    _require(n >= 2, f"complete graph needs n >= 2, got {n}")
    return Graph.from_edges(n, combinations(range(n), 2))


def gen_barbell(clique_size: int, path_length: int) -> Graph:
    """Two cliques whose vertices ``c-1`` and ``c+p-1`` are joined by a path of p edges."""
    c, p = clique_size, path_length
    _require(c >= 3, f"clique_size must be >= 3, got {c}")
    _require(p >= 1, f"path_length must be >= 1, got {p}")
    right = c + p - 1
    edges = list(combinations(range(c), 2))
    edges += list(combinations(range(right, right + c), 2))
    chain = [c - 1, *range(c, c + p - 1), right]
    edges += list(zip(chain[:-1], chain[1:]))
    return Graph.from_edges(2 * c + p - 1, edges)


def gen_clique_with_paths(ell: int, q: int) -> Graph:
    """Clique K_ell with a pendant path of q edges hanging off every clique vertex."""
    _require(ell >= 3, f"ell must be >= 3, got {ell}")
    _require(q >= 1, f"q must be >= 1, got {q}")
    edges = list(combinations(range(ell), 2))
    nxt = ell
    for v in range(ell):
        prev = v
        for _ in range(q):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return Graph.from_edges(ell * (q + 1), edges)


def _pair_half_edges(k: int, rng: np.random.Generator):
    stubs = np.repeat(np.arange(k), 3)
    pairs = rng.permutation(stubs).reshape(-1, 2)
    if (pairs[:, 0] == pairs[:, 1]).any():
        return None
    lo = pairs.min(axis=1)
    hi = pairs.max(axis=1)
    if len(np.unique(lo * k + hi)) != len(lo):
        return None
    return np.stack([lo, hi], axis=1)


def _lazy_lambda2(g: Graph) -> float:
    from .oracle import spectral_summary

    return float(spectral_summary(g, with_t_unif=False).eigenvalues[1])


@dataclass
class RegularSampleLog:
    attempts: int = 0
    rejected_multigraph: int = 0
    rejected_disconnected: int = 0
    rejected_spectral: int = 0
    lambda2: float | None = None
    spectral_checked: bool = False


def gen_random_regular_3(
    k: int,
    seed: int,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    expander_check: bool | None = None,
    stats: RegularSampleLog | None = None,
) -> Graph:
    """Uniform simple connected 3-regular graph via the configuration model.

    Half-edges are paired by a uniform random permutation; multigraphs and
    disconnected outcomes are rejected and resampled. When ``expander_check``
    is on (default for ``16 <= k <= oracle cap``), samples whose lazy-walk
    second eigenvalue exceeds ``EXPANDER_LAMBDA2`` are also rejected.
    """
    from .oracle import oracle_cap

    _require(k >= 4 and k % 2 == 0, f"k must be an even integer >= 4, got {k}")
    if expander_check is None:
        expander_check = EXPANDER_MIN_K <= k <= oracle_cap()
    st = stats if stats is not None else RegularSampleLog()
    st.spectral_checked = expander_check
    rng = make_rng(seed, 3, k)
    for attempt in range(1, max_attempts + 1):
        st.attempts = attempt
        pairs = _pair_half_edges(k, rng)
        if pairs is None:
            st.rejected_multigraph += 1
            continue
        try:
            g = Graph.from_edges(k, map(tuple, pairs))
        except GraphError:
            st.rejected_disconnected += 1
            continue
        if expander_check:
            lam2 = _lazy_lambda2(g)
            if lam2 > EXPANDER_LAMBDA2:
                st.rejected_spectral += 1
                continue
            st.lambda2 = lam2
        log.debug("random_regular_3(k=%d, seed=%d) accepted after %d attempts", k, seed, attempt)
        return g
    raise GenerationError(
        f"random_regular_3(k={k}, seed={seed}): no acceptable sample in {max_attempts} attempts"
    )


def gen_subdivided_expander(k: int, ell: int, seed: int, **kw) -> Graph:
    """Replace every edge of a random cubic graph by a path of ``ell`` edges.

    Interior path vertices ``i1..i_{ell-1}`` get chords ``{i1,i3}, {i2,i4}``,
    ``{i5,i7}, {i6,i8}``, ... so the result is 3-regular again.
    """
    _require(ell >= 5 and (ell - 1) % 4 == 0, f"ell must be >= 5 with ell-1 divisible by 4, got {ell}")
    base = gen_random_regular_3(k, seed, **kw)
    edges = []
    nxt = k
    for a, b in base.edges():
        interior = list(range(nxt, nxt + ell - 1))
        nxt += ell - 1
        chain = [a, *interior, b]
        edges += list(zip(chain[:-1], chain[1:]))
        for blk in range(0, ell - 1, 4):
            i1, i2, i3, i4 = interior[blk : blk + 4]
            edges += [(i1, i3), (i2, i4)]
    return Graph.from_edges(nxt, edges)


def gen_clique_expander(k: int, q: int, seed: int, **kw) -> Graph:
    """Blow each vertex of a random cubic graph up to K_q and each edge to a q-edge path.

    Base vertex ``v`` owns clique vertices ``v*q .. v*q+q-1``; the path to its
    j-th neighbor (sorted order) leaves from clique vertex ``j mod q``.
    """
    _require(q >= 2, f"q must be >= 2, got {q}")
    base = gen_random_regular_3(k, seed, **kw)
    nbr = base.adjacency
    edges = []
    for v in range(k):
        edges += list(combinations(range(v * q, v * q + q), 2))
    nxt = k * q
    for a, b in base.edges():
        ja, jb = nbr[a].index(b), nbr[b].index(a)
        interior = list(range(nxt, nxt + q - 1))
        nxt += q - 1
        chain = [a * q + ja % q, *interior, b * q + jb % q]
        edges += list(zip(chain[:-1], chain[1:]))
    return Graph.from_edges(nxt, edges)


FAMILIES = {
    "cycle": (gen_cycle, ("n",)),
    "complete": (gen_complete, ("n",)),
    "barbell": (gen_barbell, ("clique_size", "path_length")),
    "random_regular_3": (gen_random_regular_3, ("k",)),
    "subdivided_expander": (gen_subdivided_expander, ("k", "ell")),
    "clique_expander": (gen_clique_expander, ("k", "q")),
    "clique_with_paths": (gen_clique_with_paths, ("ell", "q")),
}
RANDOM_FAMILIES = {"random_regular_3", "subdivided_expander", "clique_expander"}


@dataclass(frozen=True)
class GenSpec:
    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def build(self) -> Graph:
        if self.family not in FAMILIES:
            raise GraphError(f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}")
        fn, names = FAMILIES[self.family]
        missing = [p for p in names if p not in self.params]
        extra = [p for p in self.params if p not in names]
        if missing or extra:
            raise GraphError(
                f"{self.family} takes parameters {list(names)}; missing {missing}, unexpected {extra}"
            )
        args = [int(self.params[p]) for p in names]
        if self.family in RANDOM_FAMILIES:
            return fn(*args, seed=self.seed)
        return fn(*args)

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "seed": self.seed}


def parse_params(text: str) -> dict:
    """``"k=8,ell=5"`` -> ``{"k": 8, "ell": 5}``."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, val = item.partition("=")
        if not sep:
            raise GraphError(f"bad parameter {item!r}, expected key=value")
        out[key.strip()] = int(val)
    return out
