"""Box game with resets, and the degree game built on top of it.

BoxBreaker's reset-heaviest rule keeps every box weight within
b*(1 + ln(m + k)) during the first k rounds; the bound is monitored by
the tests rather than assumed.  The degree game treats the star of each
watched vertex as a box: Breaker claims into the star add weight, a
Maker claim at the vertex resets it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import BREAKER, MAKER, Board


@dataclass
class BoxState:
    """Weights of m boxes plus the round counter."""

    weights: np.ndarray
    round: int = 0

    @classmethod
    def fresh(cls, m: int) -> "BoxState":
        if m < 1:
            raise ValueError("need at least one box")
        return cls(weights=np.zeros(m, dtype=np.int64))

    def add(self, box: int, amount: int = 1) -> None:
        self.weights[box] += amount

    def reset(self, box: int) -> None:
        self.weights[box] = 0


def boxbreaker_move(state: BoxState) -> int:
    """Index of the box to reset: heaviest, ties to the lowest index."""
    return int(np.argmax(state.weights))


def rbox_weight_bound(m: int, b: int, k: int) -> float:
    return b * (1.0 + math.log(m + k))


def play_rbox(m: int, b: int, rounds: int, boxmaker, seed: int = 0):
    """Drive a reset Box game; returns (max weight seen, violations).

    ``boxmaker(state, rng)`` returns the b box indices to fill this
    round.  Weights are checked against the bound right after
    BoxMaker's move, before the reset.
    """
    state = BoxState.fresh(m)
    rng = np.random.default_rng(seed)
    max_seen = 0
    violations = []
    for k in range(1, rounds + 1):
        state.round = k
        picks = boxmaker(state, rng)
        assert len(picks) == b
        for box in picks:
            state.add(int(box))
        peak = int(state.weights.max())
        max_seen = max(max_seen, peak)
        if peak > rbox_weight_bound(m, b, k):
            violations.append((k, peak, rbox_weight_bound(m, b, k)))
        reset = boxbreaker_move(state)
        state.reset(reset)
        assert state.weights[reset] == 0
    return max_seen, violations


class DegreeGame:
    """Maker's tool for keeping Breaker's degree at watched vertices in
    check (and, in proactive mode, for building degree outright).

    weight(v) counts Breaker claims from v into the target side since
    Maker's last claim at v.  ``move`` answers the heaviest watched
    vertex once its weight reaches ``answer_threshold``; with a
    positive ``proactive_target`` it additionally claims at watched
    vertices whose Maker degree into the target side is still below
    target, lowest current degree first.
    """

    def __init__(self, board: Board, watched, target_mask: np.ndarray, *,
                 answer_threshold: int = 1, proactive_target: int = 0,
                 claim_mask: np.ndarray | None = None,
                 start_at_end: bool = False,
                 initial_maker_degrees: np.ndarray | None = None,
                 prefer_needy_partner: bool = False,
                 reactive_dm_cap: int = 0):
        n = board.graph.n
        self.board = board
        self.watched = np.asarray(sorted(int(v) for v in watched), dtype=np.int64)
        self.is_watched = np.zeros(n, dtype=bool)
        self.is_watched[self.watched] = True
        self.target_mask = target_mask.astype(bool)
        self.answer_threshold = answer_threshold
        self.proactive_target = proactive_target
        self.claim_mask = claim_mask
        self.weight = np.zeros(n, dtype=np.int64)
        self.dm = np.zeros(n, dtype=np.int64)  # maker degree into target side
        self.db = np.zeros(n, dtype=np.int64)  # breaker degree into target side
        if initial_maker_degrees is not None:
            self.dm += initial_maker_degrees
        self.prefer_needy_partner = prefer_needy_partner
        self.reactive_dm_cap = reactive_dm_cap
        self._cursor = len(board.log) if start_at_end else 0

    def _counts(self, edge: int):
        u, v = self.board.graph.edges[edge]
        out = []
        if self.is_watched[u] and self.target_mask[v]:
            out.append(int(u))
        if self.is_watched[v] and self.target_mask[u]:
            out.append(int(v))
        return out

    def observe(self) -> None:
        """Fold new board claims into weights and degree tallies."""
        log = self.board.log
        while self._cursor < len(log):
            side, edge = log[self._cursor]
            self._cursor += 1
            for v in self._counts(edge):
                if side == BREAKER:
                    self.weight[v] += 1
                    self.db[v] += 1
                else:
                    self.weight[v] = 0
                    self.dm[v] += 1

    def _free_edge_at(self, v: int):
        """Claimable free edge from v into the target side: lowest id,
        or (when building degree) lowest id among least-served partners."""
        g = self.board.graph
        indptr, indices, eids = g.csr
        best = None  # (partner_dm, edge) or (edge,)
        for ii in range(indptr[v], indptr[v + 1]):
            e = int(eids[ii])
            if self.claim_mask is not None and not self.claim_mask[e]:
                continue
            if self.board.owner[e] == 0 and self.target_mask[indices[ii]]:
                if self.prefer_needy_partner:
                    key = (int(self.dm[indices[ii]]), e)
                else:
                    key = (e,)
                if best is None or key < best:
                    best = key
        return None if best is None else best[-1]

    def move(self):
        """Edge to claim, or None to pass.

        Vertices are answered by decreasing weight (ties to lowest
        index); a vertex with no free edge into the target side is
        skipped.  Without any weight at ``answer_threshold``, proactive
        mode serves the watched vertex of least Maker degree that is
        still below target.
        """
        self.observe()
        w = self.weight[self.watched]
        order = np.argsort(-w, kind="stable")
        for idx in order:
            v = int(self.watched[idx])
            if self.weight[v] < self.answer_threshold:
                break
            if self.reactive_dm_cap and self.dm[v] >= self.reactive_dm_cap:
                continue  # enough banked at v; stop rewarding the grinder
            e = self._free_edge_at(v)
            if e is not None:
                return e
        if self.proactive_target > 0:
            dm = self.dm[self.watched]
            for idx in np.argsort(dm, kind="stable"):
                v = int(self.watched[idx])
                if self.dm[v] >= self.proactive_target:
                    break
                e = self._free_edge_at(v)
                if e is not None:
                    return e
        return None

    def satisfied(self) -> bool:
        """Watched vertices reached the proactive target degree, except
        those with no claimable edge left (nothing more can be done)."""
        self.observe()
        for v in self.watched:
            v = int(v)
            if self.dm[v] < self.proactive_target and self._free_edge_at(v) is not None:
                return False
        return True


def degree_game_move(view: DegreeGame):
    """One degree-game claim (or None for a pass)."""
    return view.move()


def audit_degree_bound(graph, claim_log, watched, target_mask: np.ndarray,
                       b_eff: int) -> list:
    """Recompute d_B(v, T) <= 4 * b_eff * ln n * (d_M(v, T) + 1) from a
    raw claim log; returns violating vertices (independent of the live
    DegreeGame counters)."""
    n = graph.n
    dm = np.zeros(n, dtype=np.int64)
    db = np.zeros(n, dtype=np.int64)
    is_watched = np.zeros(n, dtype=bool)
    is_watched[list(watched)] = True
    for side, edge in claim_log:
        u, v = graph.edges[edge]
        for a, bb in ((u, v), (v, u)):
            if is_watched[a] and target_mask[bb]:
                if side == MAKER:
                    dm[a] += 1
                else:
                    db[a] += 1
    bound = 4.0 * b_eff * math.log(max(n, 2))
    bad = []
    for v in np.nonzero(is_watched)[0]:
        if db[v] > bound * (dm[v] + 1):
            bad.append({"vertex": int(v), "d_B": int(db[v]), "d_M": int(dm[v]),
                        "bound": bound * (dm[v] + 1)})
    return bad
