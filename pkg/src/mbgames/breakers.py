"""Adversaries: the potential-function Breaker for explicit hypergraphs
plus graph-aware heuristic Breakers for stress-testing Maker."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .engine import BREAKER, MAKER, Board
from .graphs import Graph


@dataclass
class Hypergraph:
    """Explicit winning-set family over a ground set of edge ids."""

    ground: list
    sets: list  # list of lists of edge ids

    def __post_init__(self):
        gset = set(self.ground)
        for f in self.sets:
            if not set(f) <= gset:
                raise ValueError("winning set leaves the ground set")
            if len(set(f)) != len(f):
                raise ValueError("winning sets must not repeat elements")


def abstract_board(m: int) -> Graph:
    """A host graph whose m edges are pairwise disjoint, for games on
    abstract ground sets: edge i joins vertices 2i and 2i+1."""
    return Graph(2 * m, [(2 * i, 2 * i + 1) for i in range(m)])


def beck_criterion(h: Hypergraph, a: int, b: int) -> float:
    """sum over F of (1+b)^(-|F|/a); Breaker wins when < 1/(1+b)."""
    return float(sum((1.0 + b) ** (-len(f) / a) for f in h.sets))


class PotentialState:
    """Erdős–Selfridge bookkeeping for the Breaker side.

    A set leaves the game once Breaker owns one of its elements; its
    danger while alive is (1+b)^(-(free+maker-remaining)/a), i.e. the
    fewer elements Maker still needs, the heavier the set.
    """

    def __init__(self, h: Hypergraph, a: int, b: int):
        self.h = h
        self.a = a
        self.b = b
        self.alive = [True] * len(h.sets)
        self.remaining = [len(f) for f in h.sets]
        self.sets_at: dict = {}
        for i, f in enumerate(h.sets):
            for e in f:
                self.sets_at.setdefault(e, []).append(i)
        self._cursor = 0

    def weight(self, i: int) -> float:
        return (1.0 + self.b) ** (-self.remaining[i] / self.a)

    def potential(self) -> float:
        return sum(self.weight(i) for i in range(len(self.h.sets)) if self.alive[i])

    def potential_scratch(self, board: Board) -> float:
        """Recompute from board ownership; must match potential()."""
        total = 0.0
        for f in self.h.sets:
            if any(board.owner[e] == BREAKER for e in f):
                continue
            rem = sum(1 for e in f if board.owner[e] != MAKER)
            total += (1.0 + self.b) ** (-rem / self.a)
        return total

    def observe(self, board: Board) -> None:
        log = board.log
        while self._cursor < len(log):
            side, edge = log[self._cursor]
            self._cursor += 1
            for i in self.sets_at.get(edge, ()):
                if not self.alive[i]:
                    continue
                if side == BREAKER:
                    self.alive[i] = False
                else:
                    self.remaining[i] -= 1

    def element_value(self, e: int) -> float:
        return sum(self.weight(i) for i in self.sets_at.get(e, ()) if self.alive[i])


class PotentialBreaker:
    """Greedy potential minimizer: claim the free ground element whose
    removal kills the most danger, recomputing within the turn."""

    tag = "potential"

    def __init__(self, h: Hypergraph, a: int = 1, b: int = 1):
        self.h = h
        self.state = PotentialState(h, a, b)

    def take_turn(self, board: Board, rng, count: int) -> list:
        claims = []
        for _ in range(count):
            self.state.observe(board)
            best_e, best_v = -1, -1.0
            for e in self.h.ground:
                if board.owner[e] != 0:
                    continue
                val = self.state.element_value(e)
                if val > best_v or (val == best_v and (best_e == -1 or e < best_e)):
                    best_e, best_v = e, val
            if best_e == -1:
                # ground set exhausted; claim any free board edge
                free = np.nonzero(board.owner == 0)[0]
                if free.size == 0:
                    break
                best_e = int(free[0])
            board.apply_claim(BREAKER, best_e)
            claims.append(best_e)
        return claims


def potential_breaker_move(h: Hypergraph, ps: PotentialState, board: Board, b: int) -> list:
    """One Breaker turn of b greedy max-potential claims."""
    pb = PotentialBreaker.__new__(PotentialBreaker)
    pb.h = h
    pb.state = ps
    return pb.take_turn(board, None, b)


def greedy_potential_claims(h: Hypergraph, a: int, b: int, owner, count: int) -> list:
    """Stateless form of the potential Breaker's turn.

    Recomputes weights from the ownership array alone; must pick the
    same elements as the incremental PotentialBreaker (property-tested).
    """
    owner = list(owner)
    claims = []
    for _ in range(count):
        alive = []
        for f in h.sets:
            if any(owner[e] == BREAKER for e in f):
                continue
            rem = sum(1 for e in f if owner[e] != MAKER)
            alive.append((set(f), (1.0 + b) ** (-rem / a)))
        best_e, best_v = -1, -1.0
        for e in h.ground:
            if owner[e] != 0:
                continue
            val = sum(w for fs, w in alive if e in fs)
            if val > best_v or (val == best_v and (best_e == -1 or e < best_e)):
                best_e, best_v = e, val
        if best_e == -1:
            break
        owner[best_e] = BREAKER
        claims.append(best_e)
    return claims


class RandomBreaker:
    """Uniform over free edges, without replacement, seeded."""

    tag = "random"

    def __init__(self, m: int | None = None):
        self._free: np.ndarray | None = None
        self._pos: np.ndarray | None = None
        self._size = 0
        self._cursor = 0

    def _sync(self, board: Board) -> None:
        if self._free is None:
            m = board.graph.m
            self._free = np.arange(m, dtype=np.int64)
            self._pos = np.arange(m, dtype=np.int64)
            self._size = m
            # account for claims that happened before we first moved
        log = board.log
        while self._cursor < len(log):
            _, edge = log[self._cursor]
            self._cursor += 1
            self._remove(edge)

    def _remove(self, edge: int) -> None:
        i = self._pos[edge]
        if i < 0 or i >= self._size or self._free[i] != edge:
            return
        last = self._free[self._size - 1]
        self._free[i] = last
        self._pos[last] = i
        self._pos[edge] = -1
        self._size -= 1

    def take_turn(self, board: Board, rng, count: int) -> list:
        self._sync(board)
        claims = []
        for _ in range(min(count, self._size)):
            i = int(rng.integers(self._size))
            e = int(self._free[i])
            self._remove(e)
            board.apply_claim(BREAKER, e)
            claims.append(e)
        return claims


def random_breaker_move(board: Board, b: int, rng) -> list:
    free = np.nonzero(board.owner == 0)[0]
    if free.size == 0:
        return []
    picks = rng.choice(free, size=min(b, free.size), replace=False)
    out = []
    for e in picks:
        board.apply_claim(BREAKER, int(e))
        out.append(int(e))
    return out


class DegreeAttacker:
    """Grind the vertex Maker has invested in least.

    Targets the minimum-Maker-degree vertex that still has free edges,
    preferring the one with the most free edges (ties to the lowest
    index), and claims its lowest-id free edge.
    """

    tag = "degree-attacker"

    def take_turn(self, board: Board, rng, count: int) -> list:
        claims = []
        g = board.graph
        big = np.int64(g.n + g.m + 2)
        for _ in range(count):
            has_free = board.free_deg > 0
            if not has_free.any():
                break
            score = board.maker_deg * big - board.free_deg
            score[~has_free] = np.iinfo(np.int64).max
            v = int(np.argmin(score))
            indptr, _, eids = g.csr
            chunk = eids[indptr[v]:indptr[v + 1]]
            free_ids = chunk[board.owner[chunk] == 0]
            e = int(free_ids.min())
            board.apply_claim(BREAKER, e)
            claims.append(e)
        return claims


def degree_attacker_move(board: Board, b: int) -> list:
    return DegreeAttacker().take_turn(board, None, b)


BREAKER_ROSTER = {
    "random": RandomBreaker,
    "degree-attacker": DegreeAttacker,
}


def make_breaker(name: str):
    try:
        return BREAKER_ROSTER[name]()
    except KeyError:
        raise ValueError(f"unknown breaker {name!r}; roster: {sorted(BREAKER_ROSTER)}")
