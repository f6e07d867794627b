"""Maker strategy for the Hamiltonicity game.

Four stages: (1) greedy near-perfect matching avoiding the reserve,
(2) merge the matching edges into few vertex-disjoint paths by claiming
edges between path endpoints, (3) connect the surviving paths near
their ends: claim edges between the entry/exit windows until the
path-splice digraph supports a long directed path, then splice, and
(4) absorb everything left (reserve, trims, skipped paths) with the
endgame builder and close the cycle through a rotation-extension
Hamilton path between the spliced path's endpoints.
"""

from __future__ import annotations

import heapq
from collections import deque

import numpy as np

from ..engine import FREE, MAKER, Board, MakerMove
from ..graphs import Digraph, Graph, long_directed_path
from ..oracles import check_hamilton_cycle, posa_ham_path
from .builder import ExpanderBuilder
from .common import GreedyMatchingStage, ReserveGuard, SetupError, maker_subgraph, pick_reserve
from .constants import StrategyConstants


class HamiltonMaker:
    tag = "ham"

    def __init__(self, g: Graph, consts: StrategyConstants | None = None, *,
                 setup_seed: int = 0, reserve: np.ndarray | None = None,
                 pair_bias: int = 1):
        self.g = g
        density = g.m / max(1, g.n * (g.n - 1) // 2)
        self.consts = consts or StrategyConstants.desk(g.n, max(density, 1e-9))
        self._setup_rng = np.random.default_rng([setup_seed, 103])
        self._given_reserve = reserve
        self.pair_bias = pair_bias
        self.stage = 0
        self.moves = 0
        self.cycle: list = []
        self._claims_stage2 = 0
        self._claims_stage3 = 0
        self._claims_stage4 = 0
        self._last_extract_at = -(10 ** 9)

    def certificate(self):
        return {"cycle": self.cycle} if self.cycle else None

    # -- setup -----------------------------------------------------------

    def _setup(self, board: Board) -> None:
        c = self.consts
        if self.g.n < 3:
            raise SetupError("Hamilton cycles need at least 3 vertices")
        if self._given_reserve is not None:
            self.reserve = np.asarray(sorted(self._given_reserve), dtype=np.int64)
        else:
            self.reserve = pick_reserve(self.g, min(c.reserve_size, max(1, self.g.n // 4)),
                                        c.reserve_degree_floor, c.reserve_resamples,
                                        self._setup_rng)
        self.guard = ReserveGuard(board, self.reserve, c)
        leftover = len(self.reserve) + 2 * c.stage1_gap
        self.target1 = max(1, (self.g.n - leftover) // 2)
        self.matcher = GreedyMatchingStage(self.g, self.guard.reserve_mask.copy(), self.target1)
        self.stage = 1

    # -- stage 2: merge matching edges into few disjoint paths -----------

    def _enter_stage2(self) -> None:
        self.paths: dict = {}
        n = self.g.n
        self.path_of = np.full(n, -1, dtype=np.int64)
        self.is_end = np.zeros(n, dtype=bool)
        self.live: set = set()
        self.retired: set = set()
        self.heap: list = []
        for pid, e in enumerate(self.matcher.edges):
            u, v = (int(x) for x in self.g.edges[e])
            self.paths[pid] = deque((u, v))
            self.path_of[u] = self.path_of[v] = pid
            self.is_end[u] = self.is_end[v] = True
            self.live.add(pid)
            heapq.heappush(self.heap, (1, pid))
        self.path_count = len(self.paths)
        self.stage = 2

    def _plen(self, pid: int) -> int:
        return len(self.paths[pid]) - 1  # edges

    def _retire_if_long(self, pid: int) -> None:
        if pid in self.live and self._plen(pid) >= self.consts.retire_length:
            self.live.discard(pid)
            self.retired.add(pid)
            dq = self.paths[pid]
            self.is_end[dq[0]] = self.is_end[dq[-1]] = False

    def _find_merge_edge(self, board: Board):
        """Free endpoint-to-endpoint edge whose shorter side is the
        shortest live path (lowest edge id among its options)."""
        indptr, indices, eids = self.g.csr
        deferred = []
        found = None
        while self.heap:
            length, pid = heapq.heappop(self.heap)
            if pid not in self.live or self._plen(pid) != length:
                continue  # stale entry
            deferred.append((length, pid))
            dq = self.paths[pid]
            best = None
            for z in (dq[0], dq[-1]):
                for ii in range(indptr[z], indptr[z + 1]):
                    e = int(eids[ii])
                    w = int(indices[ii])
                    if board.owner[e] == FREE and self.is_end[w] and self.path_of[w] != pid:
                        if best is None or e < best[0]:
                            best = (e, z, w)
            if best is not None:
                found = best
                break
        for item in deferred:
            heapq.heappush(self.heap, item)
        return found

    def _merge(self, e: int, z: int, w: int) -> None:
        pid, qid = int(self.path_of[z]), int(self.path_of[w])
        assert pid != qid and pid in self.live and qid in self.live
        p, q = self.paths[pid], self.paths[qid]
        if len(q) > len(p):
            pid, qid, p, q, z, w = qid, pid, q, p, w, z
        # orient q to start at w, then attach at p's z side
        if q[0] != w:
            q.reverse()
        assert q[0] == w
        self.is_end[z] = self.is_end[w] = False
        for x in q:
            self.path_of[x] = pid
        if p[-1] == z:
            p.extend(q)
        else:
            assert p[0] == z
            p.extendleft(q)  # reverses q: final order ..q[1], w, z==p[0]..
        del self.paths[qid]
        self.live.discard(qid)
        self.path_count -= 1
        self._retire_if_long(pid)
        if pid in self.live:
            heapq.heappush(self.heap, (self._plen(pid), pid))

    # -- stage 3: window game and splice ----------------------------------

    def _enter_stage3(self, rng) -> None:
        c = self.consts
        threshold = c.discard_length
        kept_mass = sum(len(self.paths[pid]) for pid in self.paths
                        if self._plen(pid) >= threshold)
        if kept_mass < max(1, self.g.n - c.cover_slack // 2):
            threshold = 1  # discarding would starve the splice: keep all
        keep = sorted(pid for pid in self.paths if self._plen(pid) >= threshold)
        if len(keep) == 0:
            raise SetupError("no paths survive the short-path discard")
        self.spaths = keep                       # compact index -> pid
        t = len(keep)
        self.sidx = {pid: i for i, pid in enumerate(keep)}
        n = self.g.n
        l_off = np.full(n, -1, dtype=np.int64)
        r_off = np.full(n, -1, dtype=np.int64)
        win_path = np.full(n, -1, dtype=np.int64)
        for i, pid in enumerate(keep):
            seq = list(self.paths[pid])
            w = min(c.window, len(seq) // 2)  # windows never overlap
            for off in range(w):
                head = seq[off]
                tail = seq[len(seq) - 1 - off]
                win_path[head] = i
                l_off[head] = off
                win_path[tail] = i
                r_off[tail] = off
        self._win = (win_path, l_off, r_off)
        # candidate pool: free window-to-window edges usable as splices
        indptr, indices, eids = self.g.csr
        pool = {}
        self.d_adj = np.zeros((t, t), dtype=bool)
        self.best_arc_edge: dict = {}
        win_vertices = np.nonzero(win_path >= 0)[0]
        board = self._board
        for u in win_vertices:
            for ii in range(indptr[u], indptr[u + 1]):
                v = int(indices[ii])
                e = int(eids[ii])
                arc = self._arc_of(int(u), v)
                if arc is None:
                    continue
                if board.owner[e] == FREE:
                    pool[e] = arc
                elif board.owner[e] == MAKER:
                    self._record_arc(arc, e)
        self.x_ids = np.array(sorted(pool), dtype=np.int64)
        self.x_arcs = [pool[int(e)] for e in self.x_ids]
        self.x_free = np.ones(self.x_ids.shape[0], dtype=bool)
        self.x_row = {int(e): i for i, e in enumerate(self.x_ids)}
        m_side = max(1, min(c.pair_paths, t // 2))
        self.splice_m = m_side
        n_fam = min(c.pair_sample_count, 4 * t * t)
        self.fam_a = np.zeros((n_fam, t), dtype=bool)
        self.fam_b = np.zeros((n_fam, t), dtype=bool)
        for i in range(n_fam):
            perm = rng.permutation(t)
            self.fam_a[i, perm[:m_side]] = True
            self.fam_b[i, perm[m_side:2 * m_side]] = True
        self.fam_member = np.zeros((self.x_ids.shape[0], n_fam), dtype=bool)
        for row, (pi, qi, _) in enumerate(self.x_arcs):
            self.fam_member[row] = self.fam_a[:, pi] & self.fam_b[:, qi]
        self.fam_rem = self.fam_member.sum(axis=0).astype(np.int64)
        self.fam_hit = np.zeros(n_fam, dtype=bool)
        self._x_cursor = len(board.log)
        self.stage = 3

    def _arc_of(self, u: int, v: int):
        """Directed splice support of edge (u, v): (from, to, offsets)."""
        win_path, l_off, r_off = self._win
        pu, pv = win_path[u], win_path[v]
        if pu < 0 or pv < 0 or pu == pv:
            return None
        if r_off[u] >= 0 and l_off[v] >= 0:
            return (int(pu), int(pv), int(r_off[u] + l_off[v]))
        if l_off[u] >= 0 and r_off[v] >= 0:
            return (int(pv), int(pu), int(r_off[v] + l_off[u]))
        return None

    def _record_arc(self, arc, edge: int) -> None:
        pi, qi, off = arc
        self.d_adj[pi, qi] = True
        cur = self.best_arc_edge.get((pi, qi))
        if cur is None or off < cur[0]:
            self.best_arc_edge[(pi, qi)] = (off, edge)

    def _observe_stage3(self, board: Board) -> None:
        log = board.log
        while self._x_cursor < len(log):
            side, edge = log[self._x_cursor]
            self._x_cursor += 1
            row = self.x_row.get(edge)
            if row is None or not self.x_free[row]:
                continue
            self.x_free[row] = False
            self.fam_rem[self.fam_member[row]] -= 1
            if side == MAKER:
                arc = self.x_arcs[row]
                self._record_arc(arc, edge)
                self.fam_hit |= self.fam_member[row]

    def _window_move(self, board: Board):
        self._observe_stage3(board)
        alive = ~self.fam_hit & (self.fam_rem > 0)
        rows = np.nonzero(self.x_free)[0]
        if rows.size == 0:
            return None
        if alive.any():
            weights = np.where(alive, np.exp2(-self.fam_rem / max(1.0, 2.0 * self.pair_bias)), 0.0)
            scores = self.fam_member[rows] @ weights
            if scores.max() > 0:
                top = scores == scores.max()
                cands = rows[top]
                # among equal demand coverage prefer the cheapest splice
                key = [(self.x_arcs[r][2], self.x_ids[r]) for r in cands]
                return int(self.x_ids[cands[int(np.argmin(np.array([k[0] * (self.g.m + 1) + k[1] for k in key])))]])
        # demands all hit: claim toward missing splice-digraph arcs
        best = None
        for r in rows:
            pi, qi, off = self.x_arcs[r]
            if not self.d_adj[pi, qi]:
                cand = (off, int(self.x_ids[r]))
                if best is None or cand < best:
                    best = cand
        return best[1] if best is not None else None

    def _splice_plan(self):
        t = len(self.spaths)
        arcs = np.argwhere(self.d_adj)
        d = Digraph(t, arcs) if arcs.size else Digraph(t, np.empty((0, 2), np.int64))
        order = long_directed_path(d, self.splice_m)
        if len(order) < 1:
            return None
        kept = 0
        for j, i in enumerate(order):
            seq_len = len(self.paths[self.spaths[i]])
            lt = 0
            rt = 0
            if j > 0:
                off, edge = self.best_arc_edge[(order[j - 1], i)]
                u, v = self.g.edges[edge]
                lt = self._l_offset_of(int(u), int(v), i)
            if j + 1 < len(order):
                off, edge = self.best_arc_edge[(i, order[j + 1])]
                u, v = self.g.edges[edge]
                rt = self._r_offset_of(int(u), int(v), i)
            kept += seq_len - lt - rt
        return order, kept

    def _l_offset_of(self, u: int, v: int, path_idx: int) -> int:
        win_path, l_off, _ = self._win
        if win_path[u] == path_idx and l_off[u] >= 0:
            return int(l_off[u])
        assert win_path[v] == path_idx and l_off[v] >= 0
        return int(l_off[v])

    def _r_offset_of(self, u: int, v: int, path_idx: int) -> int:
        win_path, _, r_off = self._win
        if win_path[u] == path_idx and r_off[u] >= 0:
            return int(r_off[u])
        assert win_path[v] == path_idx and r_off[v] >= 0
        return int(r_off[v])

    def _execute_splice(self, order, board: Board) -> None:
        pieces = []
        for j, i in enumerate(order):
            seq = list(self.paths[self.spaths[i]])
            lt = 0 if j == 0 else self._l_offset_of(*map(int, self.g.edges[self.best_arc_edge[(order[j - 1], i)][1]]), i)
            rt = 0 if j + 1 == len(order) else self._r_offset_of(*map(int, self.g.edges[self.best_arc_edge[(i, order[j + 1])][1]]), i)
            pieces.append(seq[lt:len(seq) - rt])
        path = [v for piece in pieces for v in piece]
        assert len(path) == len(set(path)), "spliced path repeats a vertex"
        for a, b in zip(path, path[1:]):
            e = self.g.edge_id(a, b)
            assert e >= 0 and board.owner[e] == MAKER, "splice walk left Maker's graph"
        self.long_path = path
        self.x_end = path[0]
        self.y_end = path[-1]

    # -- stage 4: absorb the leftovers, close the cycle -------------------

    def _enter_stage4(self, board: Board, rng) -> None:
        on_path = np.zeros(self.g.n, dtype=bool)
        on_path[self.long_path] = True
        vh_mask = ~on_path
        vh_mask[self.x_end] = True
        vh_mask[self.y_end] = True
        self.vh = np.nonzero(vh_mask)[0]
        # rotation-extension needs some expansion to work with: never
        # enter the endgame below degree target 2
        consts4 = self.consts.override(
            builder_degree_target=max(2, self.consts.builder_degree_target))
        self._builder = ExpanderBuilder(board, self.vh, consts4, rng,
                                        pair_bias=self.pair_bias, tag="ham-endgame")
        self._extract_every = min(self.consts.check_interval, max(2, len(self.vh) // 8))
        self.stage = 4

    def _try_close(self, board: Board, rng):
        ids = maker_subgraph(self.g, board, self._builder.vh_mask)
        local_of = self._builder.local_of
        vh = self.vh
        lg = Graph(len(vh), np.stack([local_of[self.g.edges[ids, 0]],
                                      local_of[self.g.edges[ids, 1]]], axis=1))
        lx, ly = int(local_of[self.x_end]), int(local_of[self.y_end])
        if len(vh) == 2:
            q = [self.x_end, self.y_end] if lg.m == 1 else None
        else:
            got = posa_ham_path(lg, lx, ly,
                                max_rotations=self.consts.posa_rotation_factor * len(vh),
                                restarts=self.consts.posa_restarts,
                                seed=int(rng.integers(2 ** 31)))
            q = [int(vh[v]) for v in got] if got is not None else None
        if q is None:
            return None
        cycle = self.long_path + q[::-1][1:-1]
        maker_g = Graph(self.g.n, self.g.edges[board.maker_edge_ids()], _validated=True)
        verdict = check_hamilton_cycle(maker_g, cycle)
        assert verdict.passed, f"assembled cycle failed verification: {verdict.witness}"
        return cycle

    # -- main --------------------------------------------------------------

    def take_move(self, board: Board, rng) -> MakerMove:
        self.moves += 1
        self._board = board
        try:
            if self.stage == 0:
                self._setup(board)
            guard_edge = self.guard.maybe_answer(self.moves)
            if guard_edge is not None:
                return MakerMove("claim", guard_edge, tag=self.tag, note="degree-game")
            if self.stage == 1:
                if self.matcher.complete:
                    self._enter_stage2()
                else:
                    e = self.matcher.next_edge(board)
                    if e is None:
                        return MakerMove("forfeit", tag=self.tag, note="stage-1-stuck")
                    self.matcher.claimed(e)
                    return MakerMove("claim", e, tag=self.tag, note="stage-1")
            if self.stage == 2:
                if self.path_count <= self.consts.path_count_target:
                    self._enter_stage3(rng)
                else:
                    found = self._find_merge_edge(board)
                    if found is None:
                        return MakerMove("forfeit", tag=self.tag, note="stage-2-stuck")
                    e, z, w = found
                    self._merge(e, z, w)
                    self._claims_stage2 += 1
                    return MakerMove("claim", e, tag=self.tag, note="stage-2")
            if self.stage == 3:
                if self._claims_stage3 % self.consts.splice_check_interval == 0 or \
                        not self.x_free.any():
                    plan = self._splice_plan()
                    if plan is not None and plan[1] >= self.g.n - self.consts.cover_slack:
                        self._execute_splice(plan[0], board)
                        self._enter_stage4(board, rng)
                if self.stage == 3:
                    e = self._window_move(board)
                    if e is None:
                        plan = self._splice_plan()
                        if plan is not None and plan[1] >= self.g.n - self.consts.cover_slack:
                            self._execute_splice(plan[0], board)
                            self._enter_stage4(board, rng)
                        else:
                            return MakerMove("forfeit", tag=self.tag, note="stage-3-short")
                    else:
                        self._claims_stage3 += 1
                        return MakerMove("claim", e, tag=self.tag, note="stage-3")
            if self.stage == 4:
                b = self._builder
                if board.free_count <= 4 and self._claims_stage4 != self._last_extract_at:
                    # the board is about to run dry: last realistic chance
                    self._last_extract_at = self._claims_stage4
                    cycle = self._try_close(board, rng)
                    if cycle is not None:
                        self.cycle = cycle
                        self.stage = 9
                        return MakerMove("done", tag=self.tag, note="ham-complete")
                if b.satisfied() and \
                        self._claims_stage4 - self._last_extract_at >= self._extract_every:
                    self._last_extract_at = self._claims_stage4
                    cycle = self._try_close(board, rng)
                    if cycle is not None:
                        self.cycle = cycle
                        self.stage = 9
                        return MakerMove("done", tag=self.tag, note="ham-complete")
                    conn = b.connector_move()
                    if conn is not None:
                        self._claims_stage4 += 1
                        # retry the closing attempt as soon as connected
                        self._last_extract_at = self._claims_stage4 - self._extract_every
                        return MakerMove("claim", conn, tag=self.tag, note="stage-4")
                    if not b.raise_target():
                        return MakerMove("forfeit", tag=self.tag, note="stage-4-no-path")
                e = b.next_claim(rng)
                while e is None:
                    cycle = self._try_close(board, rng)
                    if cycle is not None:
                        self.cycle = cycle
                        self.stage = 9
                        return MakerMove("done", tag=self.tag, note="ham-complete")
                    e = b.connector_move()
                    if e is not None:
                        break
                    if not b.raise_target():
                        return MakerMove("forfeit", tag=self.tag, note="stage-4-no-path")
                    e = b.next_claim(rng)
                if self._claims_stage4 > b.budget:
                    return MakerMove("forfeit", tag=self.tag, note="stage-4-no-path")
                self._claims_stage4 += 1
                return MakerMove("claim", e, tag=self.tag, note="stage-4")
            return MakerMove("done", tag=self.tag, note="ham-complete")
        except SetupError as err:
            return MakerMove("forfeit", tag=self.tag, note=f"setup: {err}")
