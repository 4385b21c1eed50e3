"""Immutable undirected simple graphs stored in CSR form."""
from __future__ import annotations

import hashlib
from fractions import Fraction
from typing import Iterable, TextIO

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


class GraphError(ValueError):
    """Base class for graph construction and parsing failures."""


class GraphParseError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class EdgeCountMismatchError(GraphError):
    pass


class Graph:
    """Connected simple graph on vertices ``0..n-1``.

    Neighbors of ``u`` are ``indices[indptr[u]:indptr[u+1]]``, sorted
    ascending. Instances are read-only; the backing arrays are flagged
    non-writeable so a graph can be shared between walkers freely.
    """

    __slots__ = ("indptr", "indices", "degrees", "_fingerprint")

    def __init__(self, indptr: np.ndarray, indices: np.ndarray):
        indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        indices = np.ascontiguousarray(indices, dtype=np.int64)
        degrees = np.diff(indptr)
        for arr in (indptr, indices, degrees):
            arr.setflags(write=False)
        self.indptr = indptr
        self.indices = indices
        self.degrees = degrees
        self._fingerprint = None
        self._validate()

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build from an undirected edge list; rejects loops and repeats."""
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        if e.size and (e.min() < 0 or e.max() >= n):
            raise GraphError(f"edge endpoint out of range [0, {n})")
        loops = e[:, 0] == e[:, 1]
        if loops.any():
            u = int(e[loops][0, 0])
            raise SelfLoopError(f"self-loop at vertex {u}")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        keys = lo * n + hi
        uniq, counts = np.unique(keys, return_counts=True)
        if (counts > 1).any():
            k = int(uniq[counts > 1][0])
            raise DuplicateEdgeError(f"duplicate edge {{{k // n}, {k % n}}}")
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(indptr, dst)

    def _validate(self) -> None:
        n = self.vertex_count
        if (self.degrees < 1).any():
            u = int(np.flatnonzero(self.degrees < 1)[0])
            raise DisconnectedGraphError(f"vertex {u} is isolated")
        if n > 1:
            adj = csr_matrix(
                (np.ones(len(self.indices), dtype=np.int8), self.indices, self.indptr),
                shape=(n, n),
            )
            if (adj != adj.T).nnz:
                raise GraphError("adjacency is not symmetric")
            ncomp, _ = connected_components(adj, directed=False)
            if ncomp != 1:
                raise DisconnectedGraphError(f"graph has {ncomp} connected components")

    @property
    def vertex_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def adjacency(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in self.neighbors(u)) for u in range(self.vertex_count)]

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def edges(self) -> list[tuple[int, int]]:
        """Sorted list of edges ``(u, v)`` with ``u < v``."""
        src = np.repeat(np.arange(self.vertex_count), self.degrees)
        keep = src < self.indices
        return list(zip(src[keep].tolist(), self.indices[keep].tolist()))

    def is_regular(self) -> bool:
        return bool((self.degrees == self.degrees[0]).all())

    def serialize(self) -> str:
        """Canonical edge-list text; round-trips bit-exactly through load_graph."""
        lines = [f"{self.vertex_count} {self.edge_count}"]
        lines.extend(f"{u} {v}" for u, v in self.edges())
        return "\n".join(lines) + "\n"

    @property
    def fingerprint(self) -> str:
        if self._fingerprint is None:
            self._fingerprint = hashlib.sha256(self.serialize().encode()).hexdigest()[:16]
        return self._fingerprint

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.indptr, other.indptr) and np.array_equal(
            self.indices, other.indices
        )

    def __hash__(self) -> int:
        return hash(self.fingerprint)

    def __repr__(self) -> str:
        return f"Graph(n={self.vertex_count}, m={self.edge_count})"


def load_graph(source: TextIO | str) -> Graph:
    """Parse the edge-list format: a header ``n m`` then one ``u v`` per line.

    Blank lines and ``#`` comments are skipped. Each failure mode raises its
    own :class:`GraphError` subclass naming the offending line.
    """
    text = source if isinstance(source, str) else source.read()
    lines = [
        (no, ln.split("#", 1)[0].strip())
        for no, ln in enumerate(text.splitlines(), start=1)
    ]
    lines = [(no, ln) for no, ln in lines if ln]
    if not lines:
        raise GraphParseError("empty graph file")
    no, header = lines[0]
    try:
        n, m = (int(tok) for tok in header.split())
    except ValueError:
        raise GraphParseError(f"line {no}: expected header 'n m', got {header!r}") from None
    if n < 1 or m < 0:
        raise GraphParseError(f"line {no}: invalid header {header!r}")
    edges = []
    seen = {}
    for no, ln in lines[1:]:
        parts = ln.split()
        try:
            u, v = (int(tok) for tok in parts)
        except ValueError:
            raise GraphParseError(f"line {no}: expected 'u v', got {ln!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"line {no}: vertex out of range [0, {n}) in {ln!r}")
        if u == v:
            raise SelfLoopError(f"line {no}: self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdgeError(
                f"line {no}: duplicate edge {key} (first seen on line {seen[key]})"
            )
        seen[key] = no
        edges.append(key)
    if len(edges) != m:
        raise EdgeCountMismatchError(f"header declares m={m} but file has {len(edges)} edges")
    return Graph.from_edges(n, edges)


def read_graph_file(path) -> Graph:
    with open(path) as fh:
        return load_graph(fh)


def write_graph_file(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(g.serialize())


def min_degree(g: Graph) -> int:
    return int(g.degrees.min())


def stationary_measure(g: Graph, exact: bool = False):
    """pi(u) = deg(u) / 2m, as floats or (``exact=True``) as Fractions."""
    two_m = 2 * g.edge_count
    if exact:
        return [Fraction(int(d), two_m) for d in g.degrees]
    return g.degrees / two_m
