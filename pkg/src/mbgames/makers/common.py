"""Shared plumbing for the Maker strategies: the protected reserve set,
the cadence degree guard, and the greedy first-stage matching."""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..boxgame import DegreeGame
from ..engine import Board
from ..graphs import BipartiteGraph, Graph
from .constants import StrategyConstants


class SetupError(RuntimeError):
    """A strategy precondition failed; reported as a forfeit."""


def cross_degrees(g: Graph, members: np.ndarray) -> np.ndarray:
    """d(v, members) for every vertex v."""
    indptr, indices, _ = g.csr
    if len(members) == 0:
        return np.zeros(g.n, dtype=np.int64)
    nbrs = np.concatenate([indices[indptr[v]:indptr[v + 1]] for v in members])
    return np.bincount(nbrs, minlength=g.n).astype(np.int64)


def pick_reserve(g: Graph, size: int, floor: int, resamples: int, rng) -> np.ndarray:
    """Uniform vertex sample whose cross-degree is at least ``floor``
    for every vertex of the graph; resampled until it is, up to
    ``resamples`` attempts, then SetupError.

    Bipartite boards get an equal split across the parts, and the
    cross-degree is measured into the opposite part's share.
    """
    if size < 1 or size > g.n:
        raise SetupError(f"reserve size {size} infeasible for n={g.n}")
    bip = isinstance(g, BipartiteGraph)
    for _ in range(max(1, resamples)):
        if bip:
            half = size // 2
            if half < 1 or half > g.half:
                raise SetupError("reserve does not fit the parts")
            left = rng.choice(g.half, size=half, replace=False)
            right = rng.choice(np.arange(g.half, g.n), size=half, replace=False)
            members = np.sort(np.concatenate([left, right]))
            deg_l = cross_degrees(g, np.sort(left))    # hits right-part vertices
            deg_r = cross_degrees(g, np.sort(right))   # hits left-part vertices
            ok = (deg_r[:g.half].min(initial=np.iinfo(np.int64).max) >= floor
                  and deg_l[g.half:].min(initial=np.iinfo(np.int64).max) >= floor)
        else:
            members = np.sort(rng.choice(g.n, size=size, replace=False))
            ok = cross_degrees(g, members).min() >= floor
        if ok:
            return members.astype(np.int64)
    raise SetupError(f"no reserve of size {size} with cross-degree >= {floor} "
                     f"found in {resamples} samples")


class ReserveGuard:
    """Cadence-scheduled degree game protecting the reserve set.

    Every watched vertex's unanswered Breaker pressure toward the
    reserve is tracked; on cadence rounds the heaviest vertex above the
    answer threshold gets a Maker edge into the reserve.
    """

    def __init__(self, board: Board, reserve: np.ndarray, consts: StrategyConstants):
        mask = np.zeros(board.graph.n, dtype=bool)
        mask[reserve] = True
        self.game = DegreeGame(board, np.arange(board.graph.n), mask,
                               answer_threshold=consts.answer_threshold,
                               reactive_dm_cap=consts.answer_bank_cap)
        self.cadence = consts.cadence
        self.reserve_mask = mask

    def maybe_answer(self, move_index: int):
        """Edge to claim on cadence rounds when a threat is pending."""
        if move_index % self.cadence != 0:
            return None
        return self.game.move()


class GreedyMatchingStage:
    """Build a matching of lowest-id free edges avoiding blocked
    vertices; blockedness and ownership are monotone, so a single
    advancing scan pointer suffices for the whole stage."""

    def __init__(self, g: Graph, blocked_mask: np.ndarray, target: int):
        self.g = g
        self.blocked = blocked_mask.astype(np.int8).copy()
        self.target = target
        self.edges: list = []
        self._ptr = np.int64(0)

    @property
    def complete(self) -> bool:
        return len(self.edges) >= self.target

    def next_edge(self, board: Board):
        e = kernels.scan_free_disjoint_edge(self.g.edges[:, 0], self.g.edges[:, 1],
                                            board.owner, self.blocked, self._ptr)
        if e < 0:
            return None
        self._ptr = e + 1
        return int(e)

    def claimed(self, edge: int) -> None:
        u, v = self.g.edges[edge]
        assert not self.blocked[u] and not self.blocked[v], "matching touched a blocked vertex"
        self.blocked[u] = 1
        self.blocked[v] = 1
        self.edges.append(int(edge))


def maker_subgraph(g: Graph, board: Board, vertex_mask: np.ndarray):
    """Maker-owned edges with both endpoints inside the mask."""
    ids = g.subgraph_edges(vertex_mask)
    return ids[board.owner[ids] == 1]
