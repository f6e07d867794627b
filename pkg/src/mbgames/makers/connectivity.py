"""Maker strategy for the k-connectivity game.

The vertex set is split into k-1 equal parts plus a remainder W; Maker
round-robins between a Hamiltonicity game inside every part, a
bipartite perfect matching game across every pair of parts, and a
degree game claiming k edges from each remainder vertex into the
parts.  Each sub-strategy sees its own board through a bias-adapted
view (virtual Breaker claims top its opposition up to b*k^2 per visit),
and boards Maker has already won are never offered again.
"""

from __future__ import annotations

import numpy as np

from ..boxgame import DegreeGame
from ..engine import BREAKER, MAKER, Board, BoardView, MakerMove, MultiBoard
from ..graphs import BipartiteGraph, Graph
from .common import SetupError
from .constants import StrategyConstants
from .hamilton import HamiltonMaker
from .matching import PerfectMatchingMaker


class _GraphSubBoard:
    """A sub-game on an induced local graph, synced from the host."""

    def __init__(self, host: Graph, vertices, inner_cls, tag: str,
                 setup_seed: int, b_virtual: int, bipartite_halves=None):
        self.host = host
        self.tag = tag
        self.b_virtual = b_virtual
        if bipartite_halves is not None:
            vi, vj = (np.sort(np.asarray(s, dtype=np.int64)) for s in bipartite_halves)
            self.vertices = np.concatenate([vi, vj])
            self.local_of = np.full(host.n, -1, dtype=np.int64)
            self.local_of[self.vertices] = np.arange(self.vertices.shape[0])
            mask_i = np.zeros(host.n, dtype=bool)
            mask_i[vi] = True
            mask_j = np.zeros(host.n, dtype=bool)
            mask_j[vj] = True
            keep = (mask_i[host.edges[:, 0]] & mask_j[host.edges[:, 1]]) | \
                   (mask_j[host.edges[:, 0]] & mask_i[host.edges[:, 1]])
            self.host_edges = np.nonzero(keep)[0]
            lu = self.local_of[host.edges[self.host_edges, 0]]
            lv = self.local_of[host.edges[self.host_edges, 1]]
            self.graph = BipartiteGraph(self.vertices.shape[0], np.stack([lu, lv], axis=1))
        else:
            self.vertices = np.sort(np.asarray(vertices, dtype=np.int64))
            self.local_of = np.full(host.n, -1, dtype=np.int64)
            self.local_of[self.vertices] = np.arange(self.vertices.shape[0])
            mask = np.zeros(host.n, dtype=bool)
            mask[self.vertices] = True
            self.host_edges = host.subgraph_edges(mask)
            lu = self.local_of[host.edges[self.host_edges, 0]]
            lv = self.local_of[host.edges[self.host_edges, 1]]
            self.graph = Graph(self.vertices.shape[0], np.stack([lu, lv], axis=1))
        # local edge ids come from the sorted local pair order
        order = np.empty(self.host_edges.shape[0], dtype=np.int64)
        for k, he in enumerate(self.host_edges):
            u, v = sorted((int(lu[k]), int(lv[k])))
            order[k] = self.graph.edge_id(u, v)
        self.host_of_local = np.empty(self.host_edges.shape[0], dtype=np.int64)
        self.host_of_local[order] = self.host_edges
        density = self.graph.m / max(1, self.graph.n * (self.graph.n - 1) // 2)
        consts = StrategyConstants.desk(self.graph.n, max(density, 1e-9))
        self.inner = inner_cls(self.graph, consts, setup_seed=setup_seed,
                               pair_bias=b_virtual)
        self.local_board = Board(self.graph)
        self.view: BoardView | None = None

    def push(self, side: int, host_edge: int) -> None:
        local = self.graph.edge_id(int(self.local_of[self.host.edges[host_edge, 0]]),
                                   int(self.local_of[self.host.edges[host_edge, 1]]))
        if self.local_board.is_free(local):
            self.local_board.apply_claim(side, local)

    def visit(self, rng) -> MakerMove:
        if self.view is None:
            self.view = BoardView(self.local_board)
        new_b = self.view.sync()
        top_up = max(0, self.b_virtual - new_b)
        if top_up:
            self.view.add_virtual_breaker(rng, top_up)
        act = self.inner.take_move(self.view, rng)
        if act.kind == "claim":
            if not self.view.is_free(act.edge):
                return MakerMove("forfeit", tag=self.tag, note="sub-strategy claimed a dead edge")
            host_e = int(self.host_of_local[act.edge])
            return MakerMove("claim", host_e, tag=self.tag, note=act.note)
        return MakerMove(act.kind, tag=self.tag, note=act.note)

    def certificate(self):
        cert = self.inner.certificate()
        if cert is None:
            return None
        out = {}
        if "cycle" in cert:
            out["cycle"] = [int(self.vertices[v]) for v in cert["cycle"]]
        if "matching" in cert:
            out["matching"] = [int(self.host_of_local[e]) for e in cert["matching"]]
        return out


class _RemainderSubBoard:
    """Degree game for one remainder vertex: k distinct edges into the
    parts, played on a virtual-bias view of the host board."""

    def __init__(self, host: Graph, w: int, target_mask: np.ndarray, k: int,
                 tag: str, b_virtual: int):
        self.host = host
        self.w = w
        self.k = k
        self.tag = tag
        self.b_virtual = b_virtual
        self.target_mask = target_mask
        star = host.incident_edge_ids(w)
        self.universe = np.zeros(host.m, dtype=bool)
        self.universe[star] = True
        self.view: BoardView | None = None
        self.game: DegreeGame | None = None

    def visit_host(self, host_board: Board, rng) -> MakerMove:
        if self.view is None:
            self.view = BoardView(host_board)
            self.game = DegreeGame(self.view, [self.w], self.target_mask,
                                   answer_threshold=1, proactive_target=self.k,
                                   claim_mask=self.universe)
        new_b = self.view.sync()
        top_up = max(0, self.b_virtual - new_b)
        if top_up:
            self.view.add_virtual_breaker(rng, top_up, within=self.universe)
        if self.game.dm[self.w] >= self.k:
            return MakerMove("done", tag=self.tag, note="degree-met")
        e = self.game.move()
        if e is None:
            if self.game.dm[self.w] >= self.k:
                return MakerMove("done", tag=self.tag, note="degree-met")
            return MakerMove("forfeit", tag=self.tag, note="remainder-vertex-starved")
        return MakerMove("claim", int(e), tag=self.tag, note="degree-game")

    def certificate(self):
        if self.game is None or self.game.dm[self.w] < self.k:
            return None
        return {"vertex": int(self.w), "degree": int(self.game.dm[self.w])}


class ConnectivityMaker:
    tag = "kconn"

    def __init__(self, g: Graph, k: int, consts: StrategyConstants | None = None, *,
                 setup_seed: int = 0, b: int = 1):
        if k < 2:
            raise ValueError("k must be >= 2")
        self.g = g
        self.k = k
        self.b = b
        rng = np.random.default_rng([setup_seed, 107])
        perm = rng.permutation(g.n)
        h = g.n // (k - 1)
        if h < 3:
            raise ValueError("parts would be too small for Hamilton cycles")
        self.parts = [np.sort(perm[i * h:(i + 1) * h]) for i in range(k - 1)]
        self.remainder = np.sort(perm[(k - 1) * h:])
        b_virtual = b * k * k
        self.subs = []
        for i, part in enumerate(self.parts):
            self.subs.append(_GraphSubBoard(g, part, HamiltonMaker, f"ham-{i}",
                                            setup_seed * 31 + i, b_virtual))
        for i in range(k - 1):
            for j in range(i + 1, k - 1):
                self.subs.append(_GraphSubBoard(
                    g, None, PerfectMatchingMaker, f"pm-{i}-{j}",
                    setup_seed * 31 + 7 + i * k + j, b_virtual,
                    bipartite_halves=(self.parts[i], self.parts[j])))
        not_w = np.ones(g.n, dtype=bool)
        not_w[self.remainder] = False
        for w in self.remainder:
            self.subs.append(_RemainderSubBoard(g, int(w), not_w, k, f"deg-{int(w)}",
                                                b_virtual))
        assert len(self.subs) <= k * k, "multiplexer exceeds its board cap"
        self.mb = MultiBoard(len(self.subs))
        self.board_of_edge = np.full(g.m, -1, dtype=np.int64)
        for idx, sub in enumerate(self.subs):
            if isinstance(sub, _GraphSubBoard):
                self.board_of_edge[sub.host_edges] = idx
        self._cursor = 0
        self.certs: dict = {}

    def certificate(self):
        return self.certs if self.mb.all_done else None

    def _sync(self, board: Board) -> None:
        log = board.log
        while self._cursor < len(log):
            side, edge = log[self._cursor]
            self._cursor += 1
            idx = int(self.board_of_edge[edge])
            if idx >= 0 and isinstance(self.subs[idx], _GraphSubBoard):
                self.subs[idx].push(side, edge)

    def take_move(self, board: Board, rng) -> MakerMove:
        self._sync(board)
        for _ in range(len(self.subs)):
            idx = self.mb.next_live()
            if idx is None:
                break
            sub = self.subs[idx]
            if isinstance(sub, _GraphSubBoard):
                act = sub.visit(rng)
            else:
                act = sub.visit_host(board, rng)
            if act.kind == "claim":
                return act
            if act.kind == "forfeit":
                return act
            self.mb.mark_done(idx)
            self.certs[sub.tag] = sub.certificate()
        return MakerMove("done", tag=self.tag, note="all-boards-complete")
