"""Lazy random walk simulation, trajectory profiles, and revelation experiments."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import Graph
from .seeding import make_rng


class WalkError(ValueError):
    pass


def lazy_steps(g: Graph, starts: np.ndarray, t: int, rng: np.random.Generator):
    """Yield the positions of ``len(starts)`` independent lazy walks at times 0..t-1.

    One step per walk: hold with probability exactly 1/2 (``random() < 0.5``),
    otherwise jump to ``neighbors[integers(0, deg)]``. Both draws are made for
    every walk at every step so the stream layout is fixed.
    """
    cur = np.array(starts, dtype=np.int64)
    indptr, indices, deg = g.indptr, g.indices, g.degrees
    regular = g.is_regular()
    d0 = int(deg[0])
    w = len(cur)
    for step in range(t):
        yield cur
        if step == t - 1:
            break
        hold = rng.random(w) < 0.5
        if regular:
            pick = rng.integers(0, d0, size=w)
        else:
            pick = rng.integers(0, deg[cur])
        nxt = indices[indptr[cur] + pick]
        cur = np.where(hold, cur, nxt)


def simulate_lazy_walks(g: Graph, starts, t: int, rng: np.random.Generator) -> np.ndarray:
    """Trajectories of independent lazy walks, shape ``(len(starts), t)``."""
    starts = np.atleast_1d(np.asarray(starts, dtype=np.int64))
    if t < 1:
        raise WalkError("t must be >= 1")
    if starts.size and (starts.min() < 0 or starts.max() >= g.vertex_count):
        raise WalkError(f"start vertex out of range [0, {g.vertex_count})")
    out = np.empty((len(starts), t), dtype=np.int64)
    for i, pos in enumerate(lazy_steps(g, starts, t, rng)):
        out[:, i] = pos
    return out


@dataclass(frozen=True)
class WalkTrace:
    start: int
    steps: np.ndarray
    seed: int
    graph_fingerprint: str

    def __len__(self) -> int:
        return len(self.steps)

    def is_valid_on(self, g: Graph) -> bool:
        s = self.steps
        if s[0] != self.start or g.fingerprint != self.graph_fingerprint:
            return False
        return all(a == b or g.has_edge(int(a), int(b)) for a, b in zip(s[:-1], s[1:]))


def simulate_lazy_walk(g: Graph, start: int, t: int, seed: int) -> WalkTrace:
    """One lazy walk of ``t`` positions (``t - 1`` transitions) from ``start``."""
    if not 0 <= start < g.vertex_count:
        raise WalkError(f"start vertex {start} out of range [0, {g.vertex_count})")
    steps = simulate_lazy_walks(g, [start], t, make_rng(seed))[0]
    steps.setflags(write=False)
    return WalkTrace(int(start), steps, int(seed), g.fingerprint)


def simulate_lazy_walk_batch(g: Graph, start: int, t: int, count: int, seed: int) -> list[WalkTrace]:
    """``count`` traces from ``start`` sharing one seeded stream (fixed layout)."""
    arr = simulate_lazy_walks(g, np.full(count, start), t, make_rng(seed))
    arr.setflags(write=False)
    return [WalkTrace(int(start), arr[i], int(seed), g.fingerprint) for i in range(count)]


# --- profiles -------------------------------------------------------------


@dataclass(frozen=True)
class Profile:
    """First-occurrence ranks (1-based) and visited degrees of a vertex sequence."""

    ranks: np.ndarray
    degree_seq: np.ndarray

    def __len__(self) -> int:
        return len(self.ranks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Profile):
            return NotImplemented
        return np.array_equal(self.ranks, other.ranks) and np.array_equal(
            self.degree_seq, other.degree_seq
        )

    def to_csv(self) -> str:
        rows = ["rank,degree"]
        rows += [f"{r},{d}" for r, d in zip(self.ranks.tolist(), self.degree_seq.tolist())]
        return "\n".join(rows) + "\n"


def first_occurrence_ranks(seqs: np.ndarray) -> np.ndarray:
    """Row-wise first-occurrence ranks for a 2-D integer array (vectorized)."""
    seqs = np.atleast_2d(np.asarray(seqs))
    rows, L = seqs.shape
    if L == 0:
        return np.zeros((rows, 0), dtype=np.int64)
    order = np.argsort(seqs, axis=1, kind="stable")
    srt = np.take_along_axis(seqs, order, axis=1)
    is_head = np.ones((rows, L), dtype=bool)
    is_head[:, 1:] = srt[:, 1:] != srt[:, :-1]
    head_idx = np.where(is_head, np.arange(L), 0)
    np.maximum.accumulate(head_idx, axis=1, out=head_idx)
    # position (in the original order) of each element's first occurrence
    first_pos_sorted = np.take_along_axis(order, head_idx, axis=1)
    first_pos = np.empty_like(first_pos_sorted)
    np.put_along_axis(first_pos, order, first_pos_sorted, axis=1)
    is_first = first_pos == np.arange(L)
    rank_at = np.cumsum(is_first, axis=1)
    return np.take_along_axis(rank_at, first_pos, axis=1)


def profile_of_sequence(seq: Sequence, degree_of) -> Profile:
    """Profile of an arbitrary hashable sequence given a degree lookup."""
    index: dict = {}
    ranks = [index.setdefault(v, len(index) + 1) for v in seq]
    return Profile(np.asarray(ranks, dtype=np.int64), np.asarray([degree_of(v) for v in seq], dtype=np.int64))


def compute_profile(traces: Sequence[WalkTrace], g: Graph) -> Profile:
    """Profile of the concatenation of ``traces``."""
    if not traces:
        raise WalkError("need at least one trace")
    for tr in traces:
        if tr.graph_fingerprint != g.fingerprint:
            raise WalkError(
                f"trace recorded on graph {tr.graph_fingerprint}, profile requested on {g.fingerprint}"
            )
    seq = np.concatenate([tr.steps for tr in traces])
    return Profile(first_occurrence_ranks(seq)[0], g.degrees[seq])


def relabel(g: Graph, perm: np.ndarray) -> Graph:
    """Graph with vertex v renamed perm[v]."""
    perm = np.asarray(perm)
    return Graph.from_edges(g.vertex_count, [(int(perm[u]), int(perm[v])) for u, v in g.edges()])


# --- revealed subgraph experiments ----------------------------------------


class _DSU:
    def __init__(self):
        self.parent: dict = {}

    def find(self, a):
        p = self.parent.setdefault(a, a)
        while p != a:
            self.parent[a] = self.parent.setdefault(p, p)
            a, p = p, self.parent[p]
        return a

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def traversed_edges(traces: Sequence, s: int) -> set[tuple[int, int]]:
    """Distinct edges crossed within the first ``s`` positions of the concatenation.

    Holds (repeated vertex) and the jump between consecutive traces are ignored.
    """
    edges = set()
    left = s
    for tr in traces:
        steps = np.asarray(getattr(tr, "steps", tr))[:left]
        left -= len(steps)
        for a, b in zip(steps[:-1].tolist(), steps[1:].tolist()):
            if a != b:
                edges.add((min(a, b), max(a, b)))
        if left <= 0:
            break
    return edges


def visited_edge_subgraph_is_tree(traces: Sequence, s: int) -> bool:
    """True iff the distinct traversed edges in the first ``s`` positions are acyclic."""
    if s < 1:
        raise WalkError("s must be >= 1")
    dsu = _DSU()
    return all(dsu.union(a, b) for a, b in sorted(traversed_edges(traces, s)))


def simulate_simple_walk(g: Graph, start: int, t: int, rng: np.random.Generator) -> np.ndarray:
    """Non-lazy walk of ``t`` positions."""
    out = np.empty(t, dtype=np.int64)
    cur = start
    for i in range(t):
        out[i] = cur
        nb = g.neighbors(cur)
        cur = int(nb[rng.integers(0, len(nb))])
    return out


def tree_revelation_trial(g: Graph, x: int, s: int, t: int, seed: int) -> bool:
    """Concatenate independent non-lazy walks of length ``t`` from ``x`` and test
    whether the edges revealed during the first ``s`` positions form a tree."""
    rng = make_rng(seed)
    walks = [simulate_simple_walk(g, x, t, rng) for _ in range(-(-s // t))]
    return visited_edge_subgraph_is_tree(walks, s)


def configuration_model_revelation(k: int, x: int, s: int, t: int, seed: int) -> bool:
    """Grow a cubic configuration-model graph and a walk on it simultaneously.

    Half-edges are paired only when the walk first tries to cross them. Returns
    True iff no pairing in the first ``s`` positions lands on a half-edge of an
    already visited vertex (the revealed edges stay a tree). Multigraph
    outcomes are not conditioned away, so this estimates the annealed
    probability.
    """
    rng = make_rng(seed)
    partner = np.full(3 * k, -1, dtype=np.int64)
    unpaired = list(range(3 * k))
    where = list(range(3 * k))  # where[h] = index of h in unpaired while unpaired
    visited = {x}

    def take(h):
        i = where[h]
        last = unpaired[-1]
        unpaired[i] = last
        where[last] = i
        unpaired.pop()

    cur = x
    for pos in range(1, s):
        if pos % t == 0:
            cur = x
            continue
        h = 3 * cur + int(rng.integers(0, 3))
        if partner[h] < 0:
            take(h)
            other = unpaired[int(rng.integers(0, len(unpaired)))]
            take(other)
            partner[h], partner[other] = other, h
            nxt = other // 3
            if nxt in visited:
                return False
        else:
            nxt = int(partner[h]) // 3
        visited.add(nxt)
        cur = nxt
    return True


# --- first intersection time ----------------------------------------------


def first_intersection_times(g: Graph, x: int, y: int, cap: int, trials: int, seed: int) -> np.ndarray:
    """First t with {X_0..X_t} and {Y_0..Y_t} overlapping, for ``trials`` walk pairs.

    Entries equal to ``-1`` mean the cap was exceeded.
    """
    n = g.vertex_count
    out = np.full(trials, -1, dtype=np.int64)
    if x == y:
        out[:] = 0
        return out
    rng = make_rng(seed)
    seen_x = np.zeros((trials, n), dtype=bool)
    seen_y = np.zeros((trials, n), dtype=bool)
    rows = np.arange(trials)
    starts = np.concatenate([np.full(trials, x), np.full(trials, y)])
    for t, pos in enumerate(lazy_steps(g, starts, cap + 1, rng)):
        px, py = pos[:trials], pos[trials:]
        seen_x[rows, px] = True
        seen_y[rows, py] = True
        hit = (seen_y[rows, px] | seen_x[rows, py]) & (out < 0)
        out[hit] = t
        if (out >= 0).all():
            break
    return out


def first_intersection_time(g: Graph, x: int, y: int, cap: int, seed: int) -> int | None:
    """Single-trial first intersection time; ``None`` when it exceeds ``cap``."""
    for v in (x, y):
        if not 0 <= v < g.vertex_count:
            raise WalkError(f"vertex {v} out of range")
    if cap < 1:
        raise WalkError("cap must be >= 1")
    tau = int(first_intersection_times(g, x, y, cap, 1, seed)[0])
    return None if tau < 0 else tau
