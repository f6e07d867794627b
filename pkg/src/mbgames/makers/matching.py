"""Maker strategy for the perfect matching game.

Stage one greedily collects a near-perfect matching while steering
clear of a small protected reserve; stage two runs the expander builder
on the leftover vertices and extracts the missing matching edges from
Maker's own subgraph.  The final certificate is the edge list, always
re-verified by the caller's oracle.
"""

from __future__ import annotations

import numpy as np

from ..engine import Board, MakerMove
from ..graphs import BipartiteGraph, Graph
from ..oracles import bipartite_matching_arrays, max_matching
from .builder import ExpanderBuilder
from .common import GreedyMatchingStage, ReserveGuard, SetupError, maker_subgraph, pick_reserve
from .constants import StrategyConstants


class PerfectMatchingMaker:
    """Wins the (1:b) perfect matching game on dense-enough boards."""

    def __init__(self, g: Graph, consts: StrategyConstants | None = None, *,
                 setup_seed: int = 0, reserve: np.ndarray | None = None,
                 pair_bias: int = 1):
        self.g = g
        density = g.m / max(1, g.n * (g.n - 1) // 2)
        self.consts = consts or StrategyConstants.desk(g.n, max(density, 1e-9))
        self.bipartite = isinstance(g, BipartiteGraph)
        self.tag = "pm-bipartite" if self.bipartite else "pm"
        self._setup_rng = np.random.default_rng([setup_seed, 101])
        self._given_reserve = reserve
        self.pair_bias = pair_bias
        self.stage = 0
        self.moves = 0
        self.matching: list = []
        self._builder: ExpanderBuilder | None = None
        self._claims_stage2 = 0
        self._pair_stalled = False
        self._last_extract_at = -(10 ** 9)

    # -- certificate -----------------------------------------------------

    def certificate(self):
        return {"matching": sorted(self.matching)} if self.matching else None

    # -- setup -----------------------------------------------------------

    def _setup(self, board: Board) -> None:
        c = self.consts
        if self._given_reserve is not None:
            self.reserve = np.asarray(sorted(self._given_reserve), dtype=np.int64)
        else:
            size = c.reserve_size
            if self.bipartite:
                size = max(2, size + size % 2)
            self.reserve = pick_reserve(self.g, size, c.reserve_degree_floor,
                                        c.reserve_resamples, self._setup_rng)
        self.guard = ReserveGuard(board, self.reserve, c)
        leftover = len(self.reserve) + 2 * c.stage1_gap
        if self.bipartite:
            # equal leftovers per part: stage-one edges cover one vertex
            # of each part, so only the reserve split needs balancing
            per_side = len(self.reserve) // 2 + (c.stage1_gap + 1) // 2
            self.target1 = self.g.half - per_side
        else:
            self.target1 = max(0, (self.g.n - leftover) // 2)
        blocked = self.guard.reserve_mask.copy()
        self.matcher = GreedyMatchingStage(self.g, blocked, self.target1)
        self.stage = 1

    def _enter_stage2(self, board: Board, rng) -> None:
        covered = np.zeros(self.g.n, dtype=bool)
        for e in self.matcher.edges:
            u, v = self.g.edges[e]
            covered[u] = covered[v] = True
        vh = np.nonzero(~covered)[0]
        halves = None
        if self.bipartite:
            left_mask = np.zeros(self.g.n, dtype=bool)
            left_mask[:self.g.half] = True
            halves = (left_mask, ~left_mask)
        self._builder = ExpanderBuilder(board, vh, self.consts, rng,
                                        pair_bias=self.pair_bias, halves=halves,
                                        tag=f"{self.tag}-endgame")
        # pair the leftovers off directly while edges allow; the builder
        # only has to absorb whatever stays uncovered
        self.pairer = GreedyMatchingStage(self.g, covered, len(vh) // 2)
        self.vh = vh
        self._extract_every = min(self.consts.check_interval, max(2, len(vh) // 8))
        self.stage = 2

    # -- extraction --------------------------------------------------------

    def _try_extract(self, board: Board):
        ids = maker_subgraph(self.g, board, self._builder.vh_mask)
        vh = self.vh
        local_of = self._builder.local_of
        local_edges = np.stack([local_of[self.g.edges[ids, 0]],
                                local_of[self.g.edges[ids, 1]]], axis=1)
        need = len(vh) // 2
        if self.bipartite:
            # vh is sorted, so left-part vertices take locals [0, n_left)
            n_left = int((vh < self.g.half).sum())
            if 2 * n_left != len(vh):
                return None
            lg = BipartiteGraph(len(vh), local_edges)
            size, match_l, _ = bipartite_matching_arrays(lg)
            if size < need:
                return None
            pairs = [(u, int(match_l[u]) + n_left) for u in range(n_left) if match_l[u] != -1]
        else:
            lg = Graph(len(vh), local_edges)
            matched = max_matching(lg)
            if len(matched) < need:
                return None
            pairs = [tuple(lg.edges[e]) for e in matched]
        out = []
        for lu, lv in pairs:
            e = self.g.edge_id(int(vh[lu]), int(vh[lv]))
            assert e >= 0 and board.owner[e] == 1
            out.append(e)
        return out

    # -- main ------------------------------------------------------------

    def take_move(self, board: Board, rng) -> MakerMove:
        self.moves += 1
        try:
            if self.stage == 0:
                self._setup(board)
            guard_edge = self.guard.maybe_answer(self.moves)
            if guard_edge is not None:
                return MakerMove("claim", guard_edge, tag=self.tag, note="degree-game")
            if self.stage == 1:
                if self.matcher.complete:
                    self._enter_stage2(board, rng)
                else:
                    e = self.matcher.next_edge(board)
                    if e is None:
                        return MakerMove("forfeit", tag=self.tag, note="stage-1-stuck")
                    self.matcher.claimed(e)
                    return MakerMove("claim", e, tag=self.tag, note="stage-1")
            if self.stage == 2:
                b = self._builder
                if board.free_count <= 4 and self._claims_stage2 != self._last_extract_at:
                    self._last_extract_at = self._claims_stage2
                    got = self._try_extract(board)
                    if got is not None:
                        self.matching = self.matcher.edges + got
                        self.stage = 9
                        return MakerMove("done", tag=self.tag, note="pm-complete")
                if (self.pairer.complete or self._pair_stalled or b.satisfied()) and \
                        self._claims_stage2 - self._last_extract_at >= self._extract_every:
                    self._last_extract_at = self._claims_stage2
                    got = self._try_extract(board)
                    if got is not None:
                        self.matching = self.matcher.edges + got
                        self.stage = 9
                        return MakerMove("done", tag=self.tag, note="pm-complete")
                    if b.satisfied() and not b.raise_target():
                        return MakerMove("forfeit", tag=self.tag, note="extraction-failed")
                if not self.pairer.complete:
                    e = self.pairer.next_edge(board)
                    if e is not None:
                        self.pairer.claimed(e)
                        self._claims_stage2 += 1
                        return MakerMove("claim", e, tag=self.tag, note="stage-2-pair")
                    self._pair_stalled = True
                e = b.next_claim(rng)
                while e is None:
                    # builder sees nothing useful at this target: extract
                    # or escalate before giving up
                    got = self._try_extract(board)
                    if got is not None:
                        self.matching = self.matcher.edges + got
                        self.stage = 9
                        return MakerMove("done", tag=self.tag, note="pm-complete")
                    if not b.raise_target():
                        return MakerMove("forfeit", tag=self.tag, note="expander-incomplete")
                    e = b.next_claim(rng)
                if self._claims_stage2 > b.budget:
                    return MakerMove("forfeit", tag=self.tag, note="expander-incomplete")
                self._claims_stage2 += 1
                return MakerMove("claim", e, tag=self.tag, note="stage-2")
            return MakerMove("done", tag=self.tag, note="pm-complete")
        except SetupError as err:
            return MakerMove("forfeit", tag=self.tag, note=f"setup: {err}")


def verify_matching_certificate(g: Graph, board_owner: np.ndarray, matching) -> bool:
    """Disjointness + cover + Maker ownership for a claimed matching."""
    seen = np.zeros(g.n, dtype=bool)
    for e in matching:
        if board_owner[e] != 1:
            return False
        u, v = g.edges[e]
        if seen[u] or seen[v]:
            return False
        seen[u] = seen[v] = True
    return int(seen.sum()) >= 2 * (g.n // 2)
