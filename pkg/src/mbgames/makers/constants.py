"""Tunable constants behind the Maker strategies.

The source formulas put the edge probability at ln^K(n)/n with K
beyond any feasible desk scale, so every threshold here is a knob: the
``desk`` constructor calibrates for p = polylog(n)/n boards of a few
thousand vertices, and ``paper_regime`` exposes the symbolic-scale
values for audits.  Runs embed the resolved constants in transcripts.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class StrategyConstants:
    # protected hub pool (sampled before the game starts)
    reserve_size: int
    reserve_degree_floor: int
    reserve_resamples: int
    # degree-game interleave: check every `cadence` own moves, answer a
    # watched vertex only once its unanswered weight reaches the
    # threshold, and stop once it banked `answer_bank_cap` reserve edges
    cadence: int
    answer_threshold: int
    answer_bank_cap: int
    # stage I leaves this many extra uncovered pairs for the endgame board
    stage1_gap: int
    # endgame builder
    builder_degree_target: int
    pair_sample_count: int
    expander_r: int | None     # None: |V_H| / ln |V_H|
    expander_c: float
    check_interval: int
    sparsify_rho: float | None  # None: max(1/ln n, 40/avg degree), capped at 1
    sparsify_resamples: int
    builder_max_target: int
    # Hamilton path machinery
    path_count_target: int
    retire_length: int
    discard_length: int
    window: int
    pair_paths: int
    splice_check_interval: int
    cover_slack: int
    # rotation-extension budgets
    posa_rotation_factor: int
    posa_restarts: int
    paper_regime: bool = False

    @classmethod
    def desk(cls, n: int, p: float) -> "StrategyConstants":
        """Calibrated defaults for a board of n vertices at density p."""
        if not (0 < p <= 1):
            raise ValueError("p must lie in (0, 1]")
        ln = math.log(max(n, 3))
        reserve = max(2, min(math.ceil(1.2 * ln / p), n // 4))
        window = max(2, math.ceil(ln))
        paths = int(min(max(8, math.ceil(n / ln ** 3) + 4), 24))
        return cls(
            reserve_size=reserve,
            reserve_degree_floor=1,
            reserve_resamples=100,
            cadence=max(2, int(ln)),
            answer_threshold=4,
            answer_bank_cap=2,
            stage1_gap=(reserve + 1) // 2,
            builder_degree_target=1,
            pair_sample_count=192,
            expander_r=None,
            expander_c=1.0,
            check_interval=16,
            sparsify_rho=None,
            sparsify_resamples=10,
            builder_max_target=5,
            path_count_target=paths,
            retire_length=max(8, math.ceil(2.5 * n / paths)),
            discard_length=2 * window + 1,
            window=window,
            pair_paths=max(1, paths // 6),
            splice_check_interval=8,
            cover_slack=max(24, 2 * reserve + 6 * paths + 32),
            posa_rotation_factor=50,
            posa_restarts=32,
        )

    @classmethod
    def paper_regime(cls, n: int, K: float, *, f: float = 1.0) -> "StrategyConstants":
        """Symbolic-scale values: only meaningful for formula audits,
        since p = ln^K(n)/n exceeds 1 for any desk-sized n."""
        ln = math.log(max(n, 3))
        reserve = math.ceil(n / ln ** 4)
        window = math.ceil(ln ** (K / 4))
        paths = math.ceil(n / ln ** (K / 3))
        return cls(
            reserve_size=reserve,
            reserve_degree_floor=math.ceil(0.5 * ln ** (K - 4) * reserve / max(n, 1)),
            reserve_resamples=100,
            cadence=max(2, int(ln)),
            answer_threshold=1,
            answer_bank_cap=0,
            stage1_gap=(reserve + 1) // 2,
            builder_degree_target=math.ceil(ln ** 2),
            pair_sample_count=192,
            expander_r=None,
            expander_c=max(1.0, math.log(max(math.e, ln))),
            check_interval=16,
            sparsify_rho=min(1.0, ln ** (7 - K)),
            sparsify_resamples=10,
            builder_max_target=max(3, math.ceil(ln ** 2)),
            path_count_target=max(2, paths),
            retire_length=math.ceil(10 * ln ** (K / 3)),
            discard_length=math.ceil(3 * ln ** (K / 4)),
            window=window,
            pair_paths=max(1, math.ceil(n / ln ** (K / 2))),
            splice_check_interval=8,
            cover_slack=math.ceil(n / ln ** 4),
            posa_rotation_factor=50,
            posa_restarts=32,
            paper_regime=True,
        )

    def override(self, **changes) -> "StrategyConstants":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, text: str, n: int, p: float) -> "StrategyConstants":
        """Desk defaults for (n, p) with JSON-object field overrides."""
        base = cls.desk(n, p)
        data = json.loads(text) if text else {}
        unknown = set(data) - set(asdict(base))
        if unknown:
            raise ValueError(f"unknown constants: {sorted(unknown)}")
        return base.override(**data)
