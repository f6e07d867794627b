"""Graph types, seeded random generators and deterministic gadgets.

Graphs are immutable once built: a sorted edge array is the source of
truth, CSR adjacency is derived.  Edge ids are the row indices of the
sorted edge array, so they are dense in [0, m).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels


@dataclass(frozen=True)
class GnpParams:
    """Parameters of a G(n, p) draw."""

    n: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError("p must lie in [0, 1]")


class Graph:
    """Undirected simple graph with dense integer edge ids."""

    def __init__(self, n: int, edges: np.ndarray, _validated: bool = False):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if not _validated and edges.size:
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            if np.any(lo == hi):
                raise ValueError("self-loops are not allowed")
            if lo.min() < 0 or hi.max() >= n:
                raise ValueError("endpoint out of range")
            edges = np.stack([lo, hi], axis=1)
            order = np.lexsort((edges[:, 1], edges[:, 0]))
            edges = edges[order]
            keys = edges[:, 0] * n + edges[:, 1]
            if np.any(np.diff(keys) == 0):
                raise ValueError("duplicate edges are not allowed")
        self.n = int(n)
        self.edges = edges
        self._keys = edges[:, 0] * n + edges[:, 1] if edges.size else np.empty(0, np.int64)
        self._csr = None

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    def _build_csr(self):
        m = self.m
        u = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        v = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        eid = np.concatenate([np.arange(m, dtype=np.int64)] * 2)
        order = np.lexsort((v, u))
        indices = v[order]
        eids = eid[order]
        counts = np.bincount(u, minlength=self.n)
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        self._csr = (indptr, indices, eids)

    @property
    def csr(self):
        if self._csr is None:
            self._build_csr()
        return self._csr

    @property
    def degrees(self) -> np.ndarray:
        indptr = self.csr[0]
        return np.diff(indptr)

    def neighbors(self, v: int) -> np.ndarray:
        indptr, indices, _ = self.csr
        return indices[indptr[v]:indptr[v + 1]]

    def incident_edge_ids(self, v: int) -> np.ndarray:
        indptr, _, eids = self.csr
        return eids[indptr[v]:indptr[v + 1]]

    def edge_id(self, u: int, v: int) -> int:
        """Dense id of edge {u, v}, or -1 if absent."""
        if u > v:
            u, v = v, u
        key = u * self.n + v
        i = np.searchsorted(self._keys, key)
        if i < self._keys.shape[0] and self._keys[i] == key:
            return int(i)
        return -1

    def has_edge(self, u: int, v: int) -> bool:
        return self.edge_id(u, v) >= 0

    def subgraph_edges(self, vertex_mask: np.ndarray) -> np.ndarray:
        """Ids of edges with both endpoints flagged in vertex_mask."""
        keep = vertex_mask[self.edges[:, 0]] & vertex_mask[self.edges[:, 1]]
        return np.nonzero(keep)[0]


class BipartiteGraph(Graph):
    """Graph whose vertices split into parts [0, half) and [half, n)."""

    def __init__(self, n: int, edges: np.ndarray, _validated: bool = False):
        if n % 2 != 0:
            raise ValueError("bipartite boards here have equal parts: n must be even")
        super().__init__(n, edges, _validated)
        self.half = n // 2
        if self.m:
            left = np.minimum(self.edges[:, 0], self.edges[:, 1])
            right = np.maximum(self.edges[:, 0], self.edges[:, 1])
            if np.any(left >= self.half) or np.any(right < self.half):
                raise ValueError("every edge must cross the two parts")

    def left(self) -> np.ndarray:
        return np.arange(self.half, dtype=np.int64)

    def right(self) -> np.ndarray:
        return np.arange(self.half, self.n, dtype=np.int64)


class Digraph:
    """Directed graph; at most one arc per ordered pair, no loops."""

    def __init__(self, n: int, arcs: np.ndarray):
        arcs = np.asarray(arcs, dtype=np.int64).reshape(-1, 2)
        if arcs.size:
            if np.any(arcs[:, 0] == arcs[:, 1]):
                raise ValueError("self-loops are not allowed")
            if arcs.min() < 0 or arcs.max() >= n:
                raise ValueError("endpoint out of range")
            order = np.lexsort((arcs[:, 1], arcs[:, 0]))
            arcs = arcs[order]
            keys = arcs[:, 0] * n + arcs[:, 1]
            if np.any(np.diff(keys) == 0):
                raise ValueError("duplicate arcs are not allowed")
        self.n = int(n)
        self.arcs = arcs
        counts = np.bincount(arcs[:, 0], minlength=n) if arcs.size else np.zeros(n, np.int64)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self.indices = arcs[:, 1].copy() if arcs.size else np.empty(0, np.int64)

    @property
    def m(self) -> int:
        return self.arcs.shape[0]

    def has_arc(self, u: int, v: int) -> bool:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        i = lo + np.searchsorted(self.indices[lo:hi], v)
        return i < hi and self.indices[i] == v


def _bernoulli_positions(total: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Positions of successes in `total` independent Bernoulli(p) trials."""
    if total == 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    chunks = []
    pos = -1
    batch = int(total * p * 1.1) + 64
    while True:
        gaps = rng.geometric(p, size=batch).astype(np.int64)
        cum = np.cumsum(gaps) + pos
        inside = cum[cum < total]
        chunks.append(inside)
        if inside.size < cum.size:
            break
        pos = int(cum[-1])
    return np.concatenate(chunks)


def _decode_pair_positions(pos: np.ndarray, n: int):
    """Invert lexicographic linearization of pairs (u, v), u < v."""
    # base(u) = u*(2n - u - 1) / 2; solve base(u) <= pos < base(u+1)
    f = pos.astype(np.float64)
    u = np.floor((2 * n - 1 - np.sqrt((2 * n - 1) ** 2 - 8.0 * f)) / 2.0).astype(np.int64)
    u = np.clip(u, 0, n - 2)
    for _ in range(3):  # fix float rounding, error is at most a step or two
        base = u * (2 * n - u - 1) // 2
        too_high = base > pos
        u = np.where(too_high, u - 1, u)
        base = u * (2 * n - u - 1) // 2
        nxt = (u + 1) * (2 * n - u - 2) // 2
        too_low = nxt <= pos
        u = np.where(too_low, u + 1, u)
    base = u * (2 * n - u - 1) // 2
    v = pos - base + u + 1
    return u, v


def gen_gnp(params: GnpParams) -> Graph:
    """Erdős–Rényi G(n, p) draw, reproducible per seed."""
    n = params.n
    rng = np.random.default_rng(params.seed)
    total = n * (n - 1) // 2
    pos = _bernoulli_positions(total, params.p, rng)
    if pos.size == 0:
        return Graph(n, np.empty((0, 2), np.int64), _validated=True)
    u, v = _decode_pair_positions(pos, n)
    return Graph(n, np.stack([u, v], axis=1), _validated=True)


def gen_bipartite(n: int, p: float, seed: int = 0) -> BipartiteGraph:
    """Random bipartite board with two parts of size n/2."""
    if n % 2 != 0:
        raise ValueError("n must be even for a balanced bipartite board")
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")
    h = n // 2
    rng = np.random.default_rng(seed)
    pos = _bernoulli_positions(h * h, p, rng)
    if pos.size == 0:
        return BipartiteGraph(n, np.empty((0, 2), np.int64))
    u = pos // h
    v = h + pos % h
    return BipartiteGraph(n, np.stack([u, v], axis=1))


@dataclass
class GadgetSpec:
    """Construction plan for the layered cycles-plus-matchings gadget."""

    k: int
    n: int
    m: int
    cycles: list = field(default_factory=list)      # k-1 vertex lists, each of length m
    matchings: dict = field(default_factory=dict)   # (i, j) -> permutation of range(m)


def gadget_spec(k: int, n: int, *, seed: int = 0, random_matchings: bool = False) -> GadgetSpec:
    if k < 2:
        raise ValueError("k must be >= 2")
    if n < 3 * (k - 1):
        raise ValueError("n must be >= 3*(k-1)")
    if n % (k - 1) != 0:
        raise ValueError("k-1 must divide n")
    m = n // (k - 1)
    cycles = [list(range(i * m, (i + 1) * m)) for i in range(k - 1)]
    rng = np.random.default_rng(seed)
    matchings = {}
    for i in range(k - 1):
        for j in range(i + 1, k - 1):
            if random_matchings:
                matchings[(i, j)] = rng.permutation(m).astype(np.int64)
            else:
                matchings[(i, j)] = np.arange(m, dtype=np.int64)
    return GadgetSpec(k=k, n=n, m=m, cycles=cycles, matchings=matchings)


def kconnected_gadget(k: int, n: int, *, seed: int = 0, random_matchings: bool = False) -> Graph:
    """k-regular, k-vertex-connected gadget: k-1 disjoint cycles of equal
    length plus a perfect matching between every pair of cycles."""
    spec = gadget_spec(k, n, seed=seed, random_matchings=random_matchings)
    edges = []
    for cyc in spec.cycles:
        m = len(cyc)
        for t in range(m):
            edges.append((cyc[t], cyc[(t + 1) % m]))
    for (i, j), perm in spec.matchings.items():
        ci, cj = spec.cycles[i], spec.cycles[j]
        for t in range(spec.m):
            edges.append((ci[t], cj[int(perm[t])]))
    return Graph(n, np.array(edges, dtype=np.int64))


def long_directed_path(d: Digraph, m: int = 1) -> list:
    """Directed path via DFS, tracking the deepest recursion stack.

    When every two disjoint m-sets of vertices are joined by an arc, the
    returned path has at least d.n - 2*m + 2 vertices; without that
    hypothesis the path is still valid, just unbounded.
    """
    if d.n == 0:
        return []
    best = np.empty(d.n, dtype=np.int64)
    ln = kernels.dfs_longest_path(d.indptr, d.indices, d.n, best)
    return [int(v) for v in best[:ln]]


def verify_directed_path(d: Digraph, path) -> bool:
    """Simple directed path: distinct vertices, consecutive arcs present."""
    if len(path) != len(set(path)):
        return False
    return all(d.has_arc(path[t], path[t + 1]) for t in range(len(path) - 1))


def sample_pair_arc_property(d: Digraph, m: int, samples: int, seed: int = 0):
    """Spot-check the m-set pair hypothesis on random disjoint pairs.

    Returns None if every sampled pair (S, T) has an arc S -> T, else a
    violating (S, T) pair.
    """
    rng = np.random.default_rng(seed)
    arc_set = set(map(tuple, d.arcs.tolist()))
    for _ in range(samples):
        pick = rng.choice(d.n, size=2 * m, replace=False)
        s, t = pick[:m], pick[m:]
        if not any((int(a), int(b)) in arc_set for a in s for b in t):
            return [int(v) for v in s], [int(v) for v in t]
    return None


def random_tournament(n: int, seed: int = 0) -> Digraph:
    """Uniformly oriented complete graph."""
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, k=1)
    flip = rng.random(iu.shape[0]) < 0.5
    src = np.where(flip, iv, iu)
    dst = np.where(flip, iu, iv)
    return Digraph(n, np.stack([src, dst], axis=1))


def save_graph(g, path) -> None:
    """JSON-lines header then one 0-indexed pair per line (u < v for
    undirected graphs, ordered pairs for digraphs)."""
    with open(path, "w") as fh:
        if isinstance(g, BipartiteGraph):
            header = {"kind": "bipartite", "n": g.n, "edges": g.m, "half": g.half}
            rows = g.edges
        elif isinstance(g, Graph):
            header = {"kind": "graph", "n": g.n, "edges": g.m}
            rows = g.edges
        elif isinstance(g, Digraph):
            header = {"kind": "digraph", "n": g.n, "edges": g.m}
            rows = g.arcs
        else:
            raise TypeError(f"cannot serialize {type(g)!r}")
        fh.write(json.dumps(header) + "\n")
        for u, v in rows:
            fh.write(f"{u} {v}\n")


def load_graph(path):
    with open(path) as fh:
        header = json.loads(fh.readline())
        rows = [tuple(map(int, line.split())) for line in fh if line.strip()]
    arr = np.array(rows, dtype=np.int64).reshape(-1, 2)
    kind = header.get("kind", "graph")
    if arr.shape[0] != header["edges"]:
        raise ValueError("edge count does not match header")
    if kind == "graph":
        return Graph(header["n"], arr)
    if kind == "bipartite":
        g = BipartiteGraph(header["n"], arr)
        if g.half != header.get("half", g.half):
            raise ValueError("half does not match header")
        return g
    if kind == "digraph":
        return Digraph(header["n"], arr)
    raise ValueError(f"unknown graph kind {kind!r}")
