"""Simple undirected labeled graphs and k-vertex-connectivity decisions."""

from __future__ import annotations

import enum
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

BRUTEFORCE_MAX_NODES = 20


class ConnectivityPolicy(enum.Enum):
    """How graphs too small to be separated are classified.

    ``EMPTY_DISCONNECTED`` (default) is the textbook convention: the empty
    graph is disconnected and a graph is k-connected only with at least k+1
    nodes. ``EMPTY_CONNECTED`` is the vacuous reading of "connected after
    removing any fewer than k nodes", under which the empty graph is connected
    and a graph on at most k nodes is k-connected iff it is complete.
    """

    EMPTY_DISCONNECTED = "empty-graph-is-disconnected"
    EMPTY_CONNECTED = "empty-graph-is-connected"


DEFAULT_POLICY = ConnectivityPolicy.EMPTY_DISCONNECTED


class Graph:
    """Immutable simple undirected graph on nodes ``0..node_count-1``.

    Stored as CSR arrays: the neighbors of ``i`` are
    ``indices[indptr[i]:indptr[i+1]]``, sorted ascending.
    """

    __slots__ = ("node_count", "indptr", "indices")

    def __init__(self, node_count: int, adjacency: Sequence[Iterable[int]] | None = None):
        if node_count < 0:
            raise ValueError("node_count must be non-negative")
        adjacency = adjacency if adjacency is not None else [[] for _ in range(node_count)]
        if len(adjacency) != node_count:
            raise ValueError("adjacency must have one list per node")
        lists = [sorted(int(j) for j in nbrs) for nbrs in adjacency]
        for i, nbrs in enumerate(lists):
            for a, b in zip(nbrs, nbrs[1:]):
                if a == b:
                    raise ValueError(f"duplicate neighbor {a} of node {i}")
            for j in nbrs:
                if not 0 <= j < node_count:
                    raise ValueError(f"neighbor {j} of node {i} out of range")
                if j == i:
                    raise ValueError(f"self-loop at node {i}")
        for i, nbrs in enumerate(lists):
            for j in nbrs:
                if i not in lists[j]:
                    raise ValueError(f"asymmetric adjacency between {i} and {j}")
        indptr = np.zeros(node_count + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(x) for x in lists]) if lists else []
        indices = np.fromiter((j for nbrs in lists for j in nbrs), dtype=np.int64,
                              count=int(indptr[-1]))
        self._set(node_count, indptr, indices)

    def _set(self, node_count: int, indptr: np.ndarray, indices: np.ndarray) -> None:
        indptr.flags.writeable = False
        indices.flags.writeable = False
        object.__setattr__(self, "node_count", int(node_count))
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    @classmethod
    def _from_csr(cls, node_count: int, indptr: np.ndarray, indices: np.ndarray) -> "Graph":
        g = object.__new__(cls)
        g._set(node_count, indptr, indices)
        return g

    @classmethod
    def from_edges(cls, node_count: int, us, vs, dedupe: bool = False) -> "Graph":
        """Build from parallel endpoint arrays. Self-loops are rejected."""
        us = np.asarray(us, dtype=np.int64).ravel()
        vs = np.asarray(vs, dtype=np.int64).ravel()
        if us.shape != vs.shape:
            raise ValueError("endpoint arrays differ in length")
        if us.size:
            if (us == vs).any():
                raise ValueError("self-loops are not allowed")
            if min(us.min(), vs.min()) < 0 or max(us.max(), vs.max()) >= node_count:
                raise ValueError("edge endpoint out of range")
        n = int(node_count)
        src = np.concatenate([us, vs])
        dst = np.concatenate([vs, us])
        key = np.sort(src * n + dst) if n else src
        if dedupe:
            key = np.unique(key)
        elif key.size > 1 and (key[1:] == key[:-1]).any():
            raise ValueError("duplicate edge")
        counts = np.bincount(key // n, minlength=n) if n else np.zeros(0, dtype=np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = (key % n) if n else key
        return cls._from_csr(n, indptr, indices.astype(np.int64, copy=False))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, [[j for j in range(n) if j != i] for i in range(n)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            raise ValueError("cycle needs at least 3 nodes")
        return cls(n, [[(i - 1) % n, (i + 1) % n] for i in range(n)])

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, [[j for j in (i - 1, i + 1) if 0 <= j < n] for i in range(n)])

    @classmethod
    def star(cls, n: int) -> "Graph":
        return cls(n, [list(range(1, n))] + [[0] for _ in range(1, n)])

    @classmethod
    def petersen(cls) -> "Graph":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        us, vs = zip(*(outer + spokes + inner))
        return cls.from_edges(10, us, vs)

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.indices[self.indptr[i]:self.indptr[i + 1]].tolist()
                for i in range(self.node_count)]

    @property
    def edge_count(self) -> int:
        return int(self.indices.shape[0] // 2)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def has_edge(self, i: int, j: int) -> bool:
        nbrs = self.neighbors(i)
        pos = int(np.searchsorted(nbrs, j))
        return pos < nbrs.shape[0] and int(nbrs[pos]) == j

    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges ``u < v`` in ascending lexicographic order."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees())
        upper = src < self.indices
        return np.stack([src[upper], self.indices[upper]], axis=1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.node_count == other.node_count
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((self.node_count, self.indices.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(node_count={self.node_count}, edges={self.edge_count})"

    def to_edgelist(self) -> str:
        """Text form: header ``"n m"`` then one ``"u v"`` line per edge, u < v, sorted."""
        lines = [f"{self.node_count} {self.edge_count}"]
        lines.extend(f"{u} {v}" for u, v in self.edges().tolist())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text: str) -> "Graph":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows:
            raise ValueError("missing header line")
        n, m = (int(x) for x in rows[0])
        body = rows[1:]
        if len(body) != m:
            raise ValueError(f"header promises {m} edges, found {len(body)}")
        pairs = [(int(a), int(b)) for a, b in body]
        us = [a for a, _ in pairs]
        vs = [b for _, b in pairs]
        return cls.from_edges(n, us, vs)


def min_degree(g: Graph) -> int:
    if g.node_count == 0:
        raise ValueError("min_degree undefined on empty graph")
    return int(g.degrees().min())


def is_connected(g: Graph, policy: ConnectivityPolicy = DEFAULT_POLICY) -> bool:
    if g.node_count == 0:
        return policy is ConnectivityPolicy.EMPTY_CONNECTED
    if g.node_count == 1:
        return True
    e = g.edges()
    return _kernels.component_count(g.node_count, e[:, 0].copy(), e[:, 1].copy()) == 1


def local_vertex_connectivity(g: Graph, s: int, t: int) -> int:
    """Maximum number of internally vertex-disjoint s-t paths for non-adjacent s != t."""
    n = g.node_count
    if not (0 <= s < n and 0 <= t < n):
        raise ValueError("node out of range")
    if s == t:
        raise ValueError("local connectivity needs two distinct nodes")
    if g.has_edge(s, t):
        raise ValueError("local connectivity undefined for adjacent pair")
    return int(_kernels.local_connectivity(g.indptr, g.indices, s, t, n))


def _check_k(k: int) -> None:
    if k < 1:
        raise ValueError("k must be positive")


def _tiny(g: Graph, k: int, policy: ConnectivityPolicy) -> bool | None:
    # verdict for graphs with at most k nodes, else None
    n = g.node_count
    if n > k:
        return None
    if policy is ConnectivityPolicy.EMPTY_DISCONNECTED:
        return False
    return g.edge_count == n * (n - 1) // 2


def is_k_connected(g: Graph, k: int, policy: ConnectivityPolicy = DEFAULT_POLICY) -> bool:
    _check_k(k)
    tiny = _tiny(g, k, policy)
    if tiny is not None:
        return tiny
    if k == 1:
        return is_connected(g, policy)
    return bool(_kernels.has_min_vertex_connectivity(g.indptr, g.indices, k))


def _bitmask_adjacency(g: Graph) -> list[int]:
    masks = []
    for nbrs in g.adjacency:
        m = 0
        for j in nbrs:
            m |= 1 << j
        masks.append(m)
    return masks


def _mask_connected(adj: list[int], alive: int) -> bool:
    if alive == 0:
        return False
    start = alive & -alive
    seen = start
    frontier = start
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        new = adj[low.bit_length() - 1] & alive & ~seen
        seen |= new
        frontier |= new
    return seen == alive


def is_k_connected_bruteforce(g: Graph, k: int,
                              policy: ConnectivityPolicy = DEFAULT_POLICY) -> bool:
    """Exhaustive oracle: remove every node subset of size < k and test what is left."""
    _check_k(k)
    n = g.node_count
    if n > BRUTEFORCE_MAX_NODES:
        raise ValueError(f"brute force limited to {BRUTEFORCE_MAX_NODES} nodes, got {n}")
    if n < k + 1 and policy is ConnectivityPolicy.EMPTY_DISCONNECTED:
        return False
    adj = _bitmask_adjacency(g)
    full = (1 << n) - 1
    for size in range(min(k - 1, n) + 1):
        for removed in combinations(range(n), size):
            alive = full
            for v in removed:
                alive &= ~(1 << v)
            if alive == 0:
                continue  # only reachable under EMPTY_CONNECTED
            if not _mask_connected(adj, alive):
                return False
    return True


def induced_subgraph(g: Graph, keep) -> Graph:
    """Subgraph on ``keep``, relabeled 0.. in ascending order of the kept original indices."""
    n = g.node_count
    mask = np.zeros(n, dtype=bool)
    keep_arr = np.fromiter((int(v) for v in keep), dtype=np.int64)
    if keep_arr.size and (keep_arr.min() < 0 or keep_arr.max() >= n):
        raise ValueError("node in keep set out of range")
    mask[keep_arr] = True
    return _induced_by_mask(g, mask)


def _induced_by_mask(g: Graph, mask: np.ndarray) -> Graph:
    n = g.node_count
    relabel = np.cumsum(mask) - 1
    src = np.repeat(np.arange(n, dtype=np.int64), g.degrees())
    arc_keep = mask[src] & mask[g.indices]
    s = int(mask.sum())
    counts = np.bincount(relabel[src[arc_keep]], minlength=s) if s else np.zeros(0, np.int64)
    indptr = np.zeros(s + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = relabel[g.indices[arc_keep]].astype(np.int64)
    return Graph._from_csr(s, indptr, indices)
