"""Endgame sub-strategy: claim a sparse expanding subgraph on the
leftover board.

Plays two interleaved roles on a sparsified pool of the leftover free
edges: degree moves lift every leftover vertex to a target Maker
degree, pair moves hit each of a sampled family of set-pair
"connection demands" (the tractable surrogate for the exponentially
many pair winning sets).  Whatever structure the caller extracts at the
end is verified unconditionally, so the surrogate never has to be
trusted.
"""

from __future__ import annotations

import math

import numpy as np

from ..boxgame import DegreeGame
from ..engine import BREAKER, FREE, MAKER, Board
from .common import SetupError
from .constants import StrategyConstants


class ExpanderBuilder:
    def __init__(self, board: Board, vh: np.ndarray, consts: StrategyConstants,
                 rng, *, pair_bias: int = 1, halves=None, tag: str = "builder"):
        g = board.graph
        self.g = g
        self.consts = consts
        self.tag = tag
        self.vh = np.sort(np.asarray(vh, dtype=np.int64))
        nh = self.vh.shape[0]
        self.nh = nh
        self.vh_mask = np.zeros(g.n, dtype=bool)
        self.vh_mask[self.vh] = True
        self.local_of = np.full(g.n, -1, dtype=np.int64)
        self.local_of[self.vh] = np.arange(nh)
        self.halves = halves  # (left_mask, right_mask) over host vertices

        ids = g.subgraph_edges(self.vh_mask)
        self.h_free = ids[board.owner[ids] == FREE]
        self.h_maker = ids[board.owner[ids] == MAKER]
        self._sparsify(board, rng)

        maker_deg = np.zeros(g.n, dtype=np.int64)
        for e in self.h_maker:
            u, v = g.edges[e]
            maker_deg[u] += 1
            maker_deg[v] += 1
        self.claim_mask = np.zeros(g.m, dtype=bool)
        self.claim_mask[self.e1_ids] = True
        self.target = consts.builder_degree_target
        self.dg = DegreeGame(board, self.vh, self.vh_mask,
                             answer_threshold=1, proactive_target=self.target,
                             claim_mask=self.claim_mask, start_at_end=True,
                             initial_maker_degrees=maker_deg,
                             prefer_needy_partner=True)
        self._init_pairs(rng, pair_bias)
        self._cursor = len(board.log)
        self._parity = 0
        self.board = board

    # -- setup ---------------------------------------------------------

    def _sparsify(self, board: Board, rng) -> None:
        """Random sub-pool of the free leftover edges; density and
        degree of the sample are validated, with fresh draws on failure.
        """
        g = board.graph
        free = self.h_free
        if self.consts.sparsify_rho is not None:
            rho = self.consts.sparsify_rho
        else:
            avg_deg = 2 * max(1, free.shape[0]) / max(1, self.nh)
            rho = min(1.0, max(1.0 / math.log(max(g.n, 3)), 40.0 / max(avg_deg, 1.0)))
        deg_free = np.zeros(g.n, dtype=np.int64)
        for e in free:
            u, v = g.edges[e]
            deg_free[u] += 1
            deg_free[v] += 1
        for _ in range(max(1, self.consts.sparsify_resamples)):
            keep = rng.random(free.shape[0]) < rho
            e1 = free[keep]
            deg1 = np.zeros(g.n, dtype=np.int64)
            for e in e1:
                u, v = g.edges[e]
                deg1[u] += 1
                deg1[v] += 1
            ok = True
            for v in self.vh:
                want = min(deg_free[v], max(1, math.floor(0.5 * rho * deg_free[v])))
                if deg1[v] < want:
                    ok = False
                    break
            lo = 0.8 * rho * free.shape[0] - 10
            hi = 1.2 * rho * free.shape[0] + 10
            if ok and not (lo <= e1.shape[0] <= hi):
                ok = False
            if ok:
                self.rho = rho
                self.e1_ids = e1
                return
        raise SetupError(f"sparsified pool failed validation at rho={rho}")

    def _init_pairs(self, rng, pair_bias: int) -> None:
        nh = self.nh
        n_pairs = self.consts.pair_sample_count
        if self.consts.expander_r is not None:
            r = self.consts.expander_r
        else:
            r = max(2, math.ceil(nh / math.log(max(nh, 3))))
        if self.halves is not None:
            left = np.nonzero(self.halves[0][self.vh])[0]
            right = np.nonzero(self.halves[1][self.vh])[0]
            r = min(r, left.shape[0], right.shape[0])
        else:
            r = min(r, nh // 2)
        self.pair_r = max(1, r)
        self.pair_a = max(1.0, 2.0 * pair_bias)
        if nh < 2 or r < 1 or (self.halves is None and nh < 2 * r):
            n_pairs = 0
        self.u_mat = np.zeros((n_pairs, nh), dtype=bool)
        self.w_mat = np.zeros((n_pairs, nh), dtype=bool)
        for i in range(n_pairs):
            if self.halves is not None:
                left = np.nonzero(self.halves[0][self.vh])[0]
                right = np.nonzero(self.halves[1][self.vh])[0]
                self.u_mat[i, rng.choice(left, size=self.pair_r, replace=False)] = True
                self.w_mat[i, rng.choice(right, size=self.pair_r, replace=False)] = True
            else:
                perm = rng.permutation(nh)
                self.u_mat[i, perm[:self.pair_r]] = True
                self.w_mat[i, perm[self.pair_r:2 * self.pair_r]] = True
        # membership of each pool edge in each pair demand
        lu = self.local_of[self.g.edges[self.e1_ids, 0]]
        lv = self.local_of[self.g.edges[self.e1_ids, 1]]
        if n_pairs:
            self.member = (self.u_mat[:, lu] & self.w_mat[:, lv]
                           | self.u_mat[:, lv] & self.w_mat[:, lu]).T.copy()
        else:
            self.member = np.zeros((self.e1_ids.shape[0], 0), dtype=bool)
        self.rem = self.member.sum(axis=0).astype(np.int64)
        self.hit = np.zeros(n_pairs, dtype=bool)
        self.e1_free = np.ones(self.e1_ids.shape[0], dtype=bool)
        self.row_of = {int(e): i for i, e in enumerate(self.e1_ids)}

    # -- play ----------------------------------------------------------

    def _edge_pair_vector(self, edge: int) -> np.ndarray:
        u, v = self.g.edges[edge]
        lu, lv = self.local_of[u], self.local_of[v]
        return (self.u_mat[:, lu] & self.w_mat[:, lv]
                | self.u_mat[:, lv] & self.w_mat[:, lu])

    def observe(self) -> None:
        log = self.board.log
        while self._cursor < len(log):
            side, edge = log[self._cursor]
            self._cursor += 1
            row = self.row_of.get(edge)
            if row is not None and self.e1_free[row]:
                self.e1_free[row] = False
                self.rem[self.member[row]] -= 1
                if side == MAKER:
                    self.hit |= self.member[row]
            elif side == MAKER and self.hit.shape[0] and self.vh_mask[self.g.edges[edge, 0]] \
                    and self.vh_mask[self.g.edges[edge, 1]]:
                self.hit |= self._edge_pair_vector(edge)

    def _pair_move(self):
        alive = ~self.hit & (self.rem > 0)
        if not alive.any():
            return None
        weights = np.where(alive, np.exp2(-self.rem / self.pair_a), 0.0)
        scores = self.member[self.e1_free] @ weights
        if scores.size == 0 or scores.max() <= 0.0:
            return None
        pick = int(np.argmax(scores))  # first maximum == lowest edge id
        return int(self.e1_ids[np.nonzero(self.e1_free)[0][pick]])

    def _fallback_move(self):
        """Any free leftover edge at a vertex still under target."""
        indptr, indices, eids = self.g.csr
        best = -1
        self.dg.observe()
        for v in self.vh:
            v = int(v)
            if self.dg.dm[v] >= self.target:
                continue
            for ii in range(indptr[v], indptr[v + 1]):
                e = int(eids[ii])
                if self.board.owner[e] == FREE and self.vh_mask[indices[ii]]:
                    if best == -1 or e < best:
                        best = e
                    break
        return None if best == -1 else best

    def next_claim(self, rng):
        """Host edge id of the next useful claim, or None."""
        self.observe()
        self._parity ^= 1
        first, second = (self.dg.move, self._pair_move) if self._parity else \
            (self._pair_move, self.dg.move)
        e = first()
        if e is None:
            e = second()
        if e is None:
            e = self._fallback_move()
        return e

    def connector_move(self):
        """Free leftover edge joining two components of Maker's current
        leftover subgraph (smallest component first), or None if the
        subgraph is connected or no such edge is free."""
        comp = {int(v): int(v) for v in self.vh}

        def find(x):
            while comp[x] != x:
                comp[x] = comp[comp[x]]
                x = comp[x]
            return x

        sizes = {int(v): 1 for v in self.vh}
        ids = self.g.subgraph_edges(self.vh_mask)
        for e in ids[self.board.owner[ids] == MAKER]:
            u, v = (int(x) for x in self.g.edges[e])
            ru, rv = find(u), find(v)
            if ru != rv:
                comp[ru] = rv
                sizes[rv] += sizes.pop(ru)
        roots = {find(int(v)) for v in self.vh}
        if len(roots) <= 1:
            return None
        smallest = min(roots, key=lambda r: (sizes[r], r))
        indptr, indices, eids = self.g.csr
        best = -1
        for v in self.vh:
            v = int(v)
            if find(v) != smallest:
                continue
            for ii in range(indptr[v], indptr[v + 1]):
                e = int(eids[ii])
                w = int(indices[ii])
                if self.board.owner[e] == FREE and self.vh_mask[w] and find(w) != smallest:
                    if best == -1 or e < best:
                        best = e
        return None if best == -1 else best

    def satisfied(self) -> bool:
        self.observe()
        if (~self.hit & (self.rem > 0)).any():
            return False
        return self.dg.satisfied()

    def raise_target(self) -> bool:
        if self.target >= self.consts.builder_max_target:
            return False
        self.target += 1
        self.dg.proactive_target = self.target
        return True

    @property
    def budget(self) -> int:
        return int(self.e1_ids.shape[0]) + 4 * self.nh + 16
