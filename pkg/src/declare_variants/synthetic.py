"""Synthetic variant pairs for benchmarks and scaling experiments.

Both variants draw their traces from one shared pool of distinct traces, so
the pair looks like a real process split on a case attribute: a few hundred
trace shapes, heavily skewed frequencies and a controlled behavioural shift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .log_io import EventLog, Trace


@dataclass(frozen=True)
class SyntheticConfig:
    traces_a: int = 75_000
    traces_b: int = 75_000
    activities: int = 11
    distinct: int = 200
    max_length: int = 10
    shift: float = 0.5  # 0 gives identically distributed variants
    seed: int = 0

    def __post_init__(self):
        if self.traces_a < 1 or self.traces_b < 1:
            raise ValueError("each variant needs at least one trace")
        if self.activities < 2 or self.distinct < 1 or self.max_length < 2:
            raise ValueError("need >= 2 activities, >= 1 distinct trace and max_length >= 2")
        if not 0.0 <= self.shift <= 1.0:
            raise ValueError(f"shift={self.shift} out of range: must lie in [0, 1]")


def activity_names(n: int) -> list[str]:
    return [f"act_{i:02d}" for i in range(n)]


def _trace_pool(cfg: SyntheticConfig, rng: np.random.Generator) -> list[Trace]:
    names = activity_names(cfg.activities)
    pool: dict[Trace, None] = {}
    attempts = 0
    while len(pool) < cfg.distinct and attempts < 50 * cfg.distinct:
        attempts += 1
        length = int(rng.integers(2, cfg.max_length + 1))
        # mostly forward moves with occasional repeats and jumps back
        steps = rng.choice([0, 1, 1, 1, 2, -1], size=length - 1)
        pos = np.clip(np.concatenate(([0], np.cumsum(steps))), 0, cfg.activities - 1)
        pool[tuple(names[p] for p in pos)] = None
    return list(pool)


def generate_variants(cfg: SyntheticConfig = SyntheticConfig()) -> tuple[EventLog, EventLog]:
    """Two logs sharing a trace pool; ``shift`` blends B's frequencies away from A's."""
    rng = np.random.default_rng(cfg.seed)
    pool = _trace_pool(cfg, rng)
    ranks = np.arange(1, len(pool) + 1, dtype=float)
    w_a = 1.0 / ranks  # Zipf-like
    w_b = (1 - cfg.shift) * w_a / w_a.sum() + cfg.shift * rng.dirichlet(np.full(len(pool), 0.3))
    logs = []
    for n, w, name in ((cfg.traces_a, w_a, "synthetic_A"), (cfg.traces_b, w_b, "synthetic_B")):
        counts = rng.multinomial(n, w / w.sum())
        logs.append(EventLog({t: int(c) for t, c in zip(pool, counts) if c}, source_id=name))
    return logs[0], logs[1]
