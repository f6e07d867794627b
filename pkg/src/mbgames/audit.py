"""Pseudo-randomness audit for G(n, p) boards.

Three families of checks: degree concentration (A1), subset edge
density (A2), and cross-density of large disjoint pairs (A3).  A2/A3
are exponential to verify exactly, so beyond tiny n they run as seeded
sampling plus greedy witness search; the audits are diagnostics, not
proofs, and every failure carries an independently checkable witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .graphs import Graph

EXACT_DENSITY_LIMIT = 16


@dataclass(frozen=True)
class AuditConfig:
    """Constants for the audit bands.

    The hidden constants of the concentration statements are not fixed
    by theory; the defaults mirror the usual Chernoff proof (degree
    band [1/2, 2] of the mean scale, cross counts at half expectation).
    """

    K: float
    alpha: float = 1.0
    f: float = 1.0
    sample_budget: int = 200
    seed: int = 0
    degree_lo: float = 0.5
    degree_hi: float = 2.0
    density_const: float = 100.0
    cross_fraction: float = 0.5
    p: float | None = None  # per-edge probability; defaults to ln^K(n) / n
    a3_size: int | None = None  # override the formula-derived pair size

    def __post_init__(self):
        if not (1.0 <= self.alpha < self.K):
            raise ValueError("need 1 <= alpha < K")
        if self.sample_budget < 1:
            raise ValueError("sample_budget must be >= 1")


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: object = None
    details: dict = field(default_factory=dict)


@dataclass
class AuditReport:
    a1: CheckResult
    a2: CheckResult
    a3: CheckResult

    @property
    def passed(self) -> bool:
        return self.a1.passed and self.a2.passed and self.a3.passed

    def as_dict(self) -> dict:
        out = {}
        for c in (self.a1, self.a2, self.a3):
            out[c.name] = {"passed": c.passed, "witness": c.witness, "details": c.details}
        return out


def _edge_probability(g: Graph, cfg: AuditConfig) -> float:
    if cfg.p is not None:
        return cfg.p
    return min(1.0, math.log(g.n) ** cfg.K / g.n)


def _density_bound(t: float, n: int, p: float, const: float) -> float:
    return max(const * t * math.log(n), const * t * t * p)


def _check_degrees(g: Graph, cfg: AuditConfig) -> CheckResult:
    scale = math.log(g.n) ** cfg.K if g.n > 1 else 1.0
    lo = cfg.degree_lo * scale
    hi = cfg.degree_hi * scale
    degs = g.degrees if g.n else np.zeros(0, np.int64)
    if g.n == 0:
        return CheckResult("A1", True, details={"lo": lo, "hi": hi})
    dmin, dmax = int(degs.min()), int(degs.max())
    if dmin < lo:
        v = int(np.argmin(degs))
        return CheckResult("A1", False, witness={"vertex": v, "degree": dmin, "bound": lo},
                           details={"lo": lo, "hi": hi, "min": dmin, "max": dmax})
    if dmax > hi:
        v = int(np.argmax(degs))
        return CheckResult("A1", False, witness={"vertex": v, "degree": dmax, "bound": hi},
                           details={"lo": lo, "hi": hi, "min": dmin, "max": dmax})
    return CheckResult("A1", True, details={"lo": lo, "hi": hi, "min": dmin, "max": dmax})


def _adjacency_masks(g: Graph) -> np.ndarray:
    masks = np.zeros(g.n, dtype=np.int64)
    for u, v in g.edges:
        masks[u] |= np.int64(1) << v
        masks[v] |= np.int64(1) << u
    return masks


def _mask_vertices(mask: int) -> list:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def _gather_neighbors(g: Graph, members: np.ndarray) -> np.ndarray:
    indptr, indices, _ = g.csr
    return np.concatenate([indices[indptr[v]:indptr[v + 1]] for v in members]) \
        if len(members) else np.empty(0, np.int64)


def _count_internal(g: Graph, members: np.ndarray) -> int:
    in_u = np.zeros(g.n, dtype=bool)
    in_u[members] = True
    return int(in_u[_gather_neighbors(g, members)].sum()) // 2


def _count_cross(g: Graph, a: np.ndarray, b: np.ndarray) -> int:
    in_b = np.zeros(g.n, dtype=bool)
    in_b[b] = True
    return int(in_b[_gather_neighbors(g, a)].sum())


def _check_density(g: Graph, cfg: AuditConfig) -> CheckResult:
    n, p = g.n, _edge_probability(g, cfg)
    bound = lambda t: _density_bound(t, n, p, cfg.density_const)
    if n <= EXACT_DENSITY_LIMIT:
        masks = _adjacency_masks(g)
        bounds = np.array([bound(t) for t in range(n + 1)], dtype=np.float64)
        bad = int(kernels.edge_density_scan(masks, n, bounds))
        if bad:
            members = _mask_vertices(bad)
            e = _count_internal(g, np.array(members, np.int64))
            return CheckResult("A2", False,
                               witness={"subset": members, "edges": e, "bound": bound(len(members))},
                               details={"mode": "exact"})
        return CheckResult("A2", True, details={"mode": "exact"})
    # sampled mode: random subsets across a size ladder plus greedy growth
    rng = np.random.default_rng(cfg.seed)
    indptr, indices, _ = g.csr
    sizes = []
    t = 2
    while t < n:
        sizes.append(t)
        t *= 2
    sizes.append(n)
    per_size = max(1, cfg.sample_budget // max(1, len(sizes)))
    worst = None
    for t in sizes:
        for _ in range(per_size):
            members = rng.choice(n, size=t, replace=False)
            e = _count_internal(g, members)
            slack = e - bound(t)
            if worst is None or slack > worst[0]:
                worst = (slack, members, e)
            if slack > 0:
                return CheckResult("A2", False,
                                   witness={"subset": sorted(int(v) for v in members),
                                            "edges": int(e), "bound": bound(t)},
                                   details={"mode": "sampled"})
    # greedy ascent from the densest sample: repeatedly add the vertex
    # with the most neighbors inside (gains kept incrementally)
    _, members, e = worst
    in_u = np.zeros(n, dtype=bool)
    in_u[members] = True
    gains = np.zeros(n, dtype=np.int64)
    np.add.at(gains, _gather_neighbors(g, members), 1)
    gains[in_u] = -1
    t = len(members)
    indptr, indices, _ = g.csr
    for _ in range(min(n - t, 4 * cfg.sample_budget)):
        w = int(np.argmax(gains))
        if gains[w] < 0:
            break
        in_u[w] = True
        e += int(gains[w])
        t += 1
        nb = indices[indptr[w]:indptr[w + 1]]
        gains[nb] += 1
        gains[in_u] = -1
        if e > bound(t):
            return CheckResult("A2", False,
                               witness={"subset": [int(v) for v in np.nonzero(in_u)[0]],
                                        "edges": int(e), "bound": bound(t)},
                               details={"mode": "sampled+greedy"})
    return CheckResult("A2", True, details={"mode": "sampled"})


def _check_cross(g: Graph, cfg: AuditConfig) -> CheckResult:
    n, p = g.n, _edge_probability(g, cfg)
    if n < 2:
        return CheckResult("A3", True, details={"size": 0})
    if cfg.a3_size is not None:
        s = cfg.a3_size
        if s > n:
            raise ValueError(f"A3 subset size {s} exceeds n={n}")
        if 2 * s > n:
            raise ValueError(f"A3 needs two disjoint subsets: size {s} exceeds n/2={n // 2}")
    else:
        s = int(round(n / (cfg.f * math.log(n) ** cfg.alpha)))
        s = min(max(1, s), n // 2)  # the formula overflows tiny boards
    cross_floor = cfg.cross_fraction * s * s * p
    internal_floor = cfg.cross_fraction * (s * (s - 1) / 2) * p
    rng = np.random.default_rng(cfg.seed + 1)
    for _ in range(cfg.sample_budget):
        pick = rng.choice(n, size=2 * s, replace=False)
        u_side, w_side = pick[:s], pick[s:]
        cross = _count_cross(g, u_side, w_side)
        if cross < cross_floor:
            return CheckResult("A3", False,
                               witness={"U": sorted(map(int, u_side)), "W": sorted(map(int, w_side)),
                                        "cross_edges": int(cross), "floor": cross_floor},
                               details={"size": s})
        internal = _count_internal(g, u_side)
        if internal < internal_floor:
            return CheckResult("A3", False,
                               witness={"U": sorted(map(int, u_side)),
                                        "internal_edges": int(internal), "floor": internal_floor},
                               details={"size": s})
    return CheckResult("A3", True, details={"size": s, "cross_floor": cross_floor})


def audit_gnp(g: Graph, cfg: AuditConfig) -> AuditReport:
    """Run the three pseudo-randomness checks and report witnesses."""
    return AuditReport(
        a1=_check_degrees(g, cfg),
        a2=_check_density(g, cfg),
        a3=_check_cross(g, cfg),
    )
