"""The (a:b) game referee: ownership bookkeeping, turn order, bias
adaptation, board views, transcripts and forfeits.

Maker moves second by default.  An edge's owner never changes once set;
the engine forfeits a side that claims an owned or foreign edge rather
than raising, so experiments can distinguish forfeits from real wins.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .graphs import Graph

FREE, MAKER, BREAKER = 0, 1, 2
_SIDE_NAME = {MAKER: "M", BREAKER: "B"}


@dataclass(frozen=True)
class GameConfig:
    a: int = 1
    b: int = 1
    maker_first: bool = False
    move_limit: int | None = None

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise ValueError("both biases must be >= 1")


class Board:
    """Ownership state over a host graph's edge set.

    Keeps an append-only claim log (side, edge) so strategies can
    consume opponent moves incrementally, plus per-vertex degree
    tallies used by degree-based strategies.
    """

    def __init__(self, graph: Graph):
        self.graph = graph
        self.owner = np.zeros(graph.m, dtype=np.int8)
        self.free_count = graph.m
        self.maker_count = 0
        self.breaker_count = 0
        self.log: list = []  # (side, edge_id)
        self.maker_deg = np.zeros(graph.n, dtype=np.int64)
        self.breaker_deg = np.zeros(graph.n, dtype=np.int64)
        self.free_deg = graph.degrees.astype(np.int64).copy() if graph.m else np.zeros(graph.n, np.int64)

    def is_free(self, edge: int) -> bool:
        return self.owner[edge] == FREE

    def apply_claim(self, side: int, edge: int) -> None:
        if self.owner[edge] != FREE:
            raise ValueError(f"edge {edge} already owned")
        self.owner[edge] = side
        u, v = self.graph.edges[edge]
        self.free_count -= 1
        self.free_deg[u] -= 1
        self.free_deg[v] -= 1
        if side == MAKER:
            self.maker_count += 1
            self.maker_deg[u] += 1
            self.maker_deg[v] += 1
        else:
            self.breaker_count += 1
            self.breaker_deg[u] += 1
            self.breaker_deg[v] += 1
        self.log.append((side, edge))
        assert self.maker_count + self.breaker_count + self.free_count == self.graph.m

    def maker_edge_ids(self) -> np.ndarray:
        return np.nonzero(self.owner == MAKER)[0]

    def maker_graph(self) -> Graph:
        ids = self.maker_edge_ids()
        return Graph(self.graph.n, self.graph.edges[ids], _validated=True)

    def ownership_digest(self) -> str:
        import hashlib

        return hashlib.sha256(self.owner.tobytes()).hexdigest()


class MakerMove(NamedTuple):
    kind: str        # "claim" | "done" | "forfeit"
    edge: int = -1
    tag: str = ""    # sub-board / stage attribution
    note: str = ""


@dataclass
class MoveRecord:
    round: int
    side: str
    edges: list
    board: str = ""
    note: str = ""


@dataclass
class Transcript:
    config: GameConfig
    seed: int
    n: int
    outcome: str = ""
    reason: str = ""
    maker_moves: int = 0
    moves: list = field(default_factory=list)
    constants: dict | None = None
    final_digest: str = ""

    def to_jsonl(self) -> str:
        header = {
            "a": self.config.a, "b": self.config.b,
            "maker_first": self.config.maker_first,
            "move_limit": self.config.move_limit,
            "seed": self.seed, "n": self.n,
        }
        if self.constants is not None:
            header["constants"] = self.constants
        lines = [json.dumps(header)]
        for mv in self.moves:
            lines.append(json.dumps({"r": mv.round, "side": mv.side, "edges": mv.edges,
                                     "board": mv.board, "note": mv.note}))
        lines.append(json.dumps({"outcome": self.outcome, "reason": self.reason,
                                 "maker_moves": self.maker_moves,
                                 "final_digest": self.final_digest}))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "Transcript":
        lines = [json.loads(line) for line in text.splitlines() if line.strip()]
        header, tail = lines[0], lines[-1]
        cfg = GameConfig(a=header["a"], b=header["b"], maker_first=header["maker_first"],
                         move_limit=header["move_limit"])
        t = cls(config=cfg, seed=header["seed"], n=header["n"],
                constants=header.get("constants"))
        for row in lines[1:-1]:
            t.moves.append(MoveRecord(round=row["r"], side=row["side"], edges=row["edges"],
                                      board=row.get("board", ""), note=row.get("note", "")))
        t.outcome = tail["outcome"]
        t.reason = tail.get("reason", "")
        t.maker_moves = tail["maker_moves"]
        t.final_digest = tail.get("final_digest", "")
        return t


def play(host: Graph, cfg: GameConfig, maker, breaker, seed: int,
         winning_test=None, constants: dict | None = None) -> Transcript:
    """Referee a full game; returns a replayable transcript.

    Breaker moves first unless cfg.maker_first.  Each side claims its
    bias of free edges per turn, fewer only on exhaustion.  An illegal
    claim forfeits the offending side.  ``winning_test(board)``, when
    given, is evaluated after every Maker claim and on exhaustion.
    """
    board = Board(host)
    rng_m = np.random.default_rng([seed, 11])
    rng_b = np.random.default_rng([seed, 13])
    t = Transcript(config=cfg, seed=seed, n=host.n, constants=constants)

    def finish(outcome, reason=""):
        t.outcome = outcome
        t.reason = reason
        t.final_digest = board.ownership_digest()
        return t

    rnd = 0
    while True:
        rnd += 1
        if cfg.move_limit is not None and rnd > cfg.move_limit:
            return finish("exhausted", "move-limit")
        order = ("M", "B") if cfg.maker_first else ("B", "M")
        for side in order:
            if side == "B":
                want = min(cfg.b, board.free_count)
                if want > 0:
                    before = board.breaker_count
                    try:
                        # breakers claim directly: multi-edge turns need
                        # the board state to advance between picks
                        edges = [int(e) for e in breaker.take_turn(board, rng_b, want)]
                    except ValueError as err:
                        t.moves.append(MoveRecord(rnd, "B", [], note=str(err)))
                        return finish("forfeit", f"breaker illegal claim: {err}")
                    applied = board.breaker_count - before
                    if applied != len(edges) or applied != want:
                        t.moves.append(MoveRecord(rnd, "B", edges, note="short-claim"))
                        return finish("forfeit", "breaker claimed fewer edges than required")
                    t.moves.append(MoveRecord(rnd, "B", edges, board=getattr(breaker, "tag", ""),
                                              note=""))
            else:
                want = min(cfg.a, board.free_count)
                for _ in range(want):
                    act = maker.take_move(board, rng_m)
                    if act.kind == "done":
                        t.maker_moves = board.maker_count
                        t.moves.append(MoveRecord(rnd, "M", [], board=act.tag, note=act.note))
                        return finish("maker-win", act.note)
                    if act.kind == "forfeit":
                        t.maker_moves = board.maker_count
                        t.moves.append(MoveRecord(rnd, "M", [], board=act.tag, note=act.note))
                        return finish("forfeit", f"maker: {act.note}")
                    e = int(act.edge)
                    if e < 0 or e >= host.m or not board.is_free(e):
                        return finish("forfeit", f"maker illegal claim {e}")
                    board.apply_claim(MAKER, e)
                    t.maker_moves = board.maker_count
                    t.moves.append(MoveRecord(rnd, "M", [e], board=act.tag, note=act.note))
                    if winning_test is not None and winning_test(board):
                        return finish("maker-win", "winning-set")
            if board.free_count == 0:
                t.maker_moves = board.maker_count
                if winning_test is not None:
                    return finish("maker-win" if winning_test(board) else "breaker-win",
                                  "exhausted-board")
                return finish("exhausted", "")


def replay_board(host: Graph, transcript: Transcript) -> Board:
    """Reapply the transcript's claims; raises on the first illegal move."""
    board = Board(host)
    for idx, mv in enumerate(transcript.moves):
        side = MAKER if mv.side == "M" else BREAKER
        for e in mv.edges:
            if not (0 <= e < host.m) or not board.is_free(e):
                raise ValueError(f"replay mismatch at move index {idx}: edge {e}")
            board.apply_claim(side, e)
    return board


class BoardView(Board):
    """A strategy-private overlay of a base board.

    Real claims flow in through sync(); the view can additionally hold
    virtual Breaker claims that exist only for the wrapped strategy.
    The base board never sees virtual edges.
    """

    def __init__(self, base: Board):
        super().__init__(base.graph)
        self.base = base
        self._cursor = 0
        self.virtual_edges: list = []

    def sync(self) -> int:
        """Pull new real claims from the base log; returns how many of
        them were Breaker claims."""
        new_breaker = 0
        while self._cursor < len(self.base.log):
            side, edge = self.base.log[self._cursor]
            self._cursor += 1
            if self.owner[edge] == FREE:
                self.apply_claim(side, edge)
            elif self.owner[edge] != side and side == MAKER:
                # a virtually-claimed edge was really claimed by Maker:
                # impossible by construction (the wrapped strategy never
                # claims virtual edges and owns this view)
                raise AssertionError("maker claimed a virtually owned edge")
            if side == BREAKER:
                new_breaker += 1
        return new_breaker

    def add_virtual_breaker(self, rng, count: int, within: np.ndarray | None = None) -> list:
        """Mark ``count`` uniformly random free edges (optionally only
        within a sub-universe mask) as Breaker-owned in this view only."""
        added = []
        free = self.owner == FREE
        if within is not None:
            free &= within
        free_ids = np.nonzero(free)[0]
        count = min(count, free_ids.shape[0])
        if count > 0:
            picks = rng.choice(free_ids, size=count, replace=False)
            for e in picks:
                self.apply_claim(BREAKER, int(e))
                self.virtual_edges.append(int(e))
                added.append(int(e))
        return added


class FakeMovesMaker:
    """Play a strategy designed for a larger Breaker bias at a smaller
    real one by feeding it virtual Breaker claims.

    Between two of the wrapped strategy's moves the view receives
    exactly ``b_virtual`` new Breaker claims: the real ones plus a
    uniformly random virtual top-up.
    """

    def __init__(self, inner, b_real: int, b_virtual: int):
        if b_virtual < b_real:
            raise ValueError("b_virtual must be >= b_real")
        self.inner = inner
        self.b_real = b_real
        self.b_virtual = b_virtual
        self.view: BoardView | None = None
        self._claim_carry = 0
        self.tag = getattr(inner, "tag", "")

    def take_move(self, board: Board, rng) -> MakerMove:
        if self.view is None:
            self.view = BoardView(board)
        self._claim_carry += self.view.sync()
        turns, self._claim_carry = divmod(self._claim_carry, self.b_real)
        if turns > 0 and self.b_virtual > self.b_real:
            self.view.add_virtual_breaker(rng, turns * (self.b_virtual - self.b_real))
        act = self.inner.take_move(self.view, rng)
        if act.kind == "claim" and not self.view.is_free(act.edge):
            return MakerMove("forfeit", tag=act.tag,
                             note="inner strategy claimed an unavailable edge")
        return act

    def certificate(self):
        return getattr(self.inner, "certificate", lambda: None)()


def fake_moves_adapter(inner, b_real: int, b_virtual: int):
    """Bias adapter; identity when b_virtual == b_real."""
    if b_virtual == b_real:
        return inner
    return FakeMovesMaker(inner, b_real, b_virtual)


class MultiBoard:
    """Round-robin multiplexer over sub-boards with done flags."""

    def __init__(self, count: int):
        if count < 1:
            raise ValueError("need at least one board")
        self.count = count
        self.done = [False] * count
        self._pos = count - 1

    @property
    def all_done(self) -> bool:
        return all(self.done)

    def mark_done(self, idx: int) -> None:
        self.done[idx] = True

    def next_live(self):
        """Next unfinished board in round-robin order, or None."""
        if self.all_done:
            return None
        for _ in range(self.count):
            self._pos = (self._pos + 1) % self.count
            if not self.done[self._pos]:
                return self._pos
        return None


def multiboard_dispatch(mb: MultiBoard):
    return mb.next_live()
