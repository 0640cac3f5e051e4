"""Threshold greedy maximization of the summary objective under a matroid."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .constraints import MatroidOracle
from .errors import ValidationError
from .objective import ObjectiveConfig, SummaryState, objective_value, singleton_values
from .simsem import SimilarityModel


@dataclass(frozen=True)
class SolverConfig:
    delta: float = 0.1
    max_rounds_guard: int = 100_000

    def __post_init__(self):
        if not self.delta > 0:
            raise ValidationError("delta must be positive")
        if self.max_rounds_guard < 1:
            raise ValidationError("max_rounds_guard must be positive")


@dataclass
class SolveResult:
    """Output of a summarization run.

    ``selected`` holds unit indices in insertion order; ``accepted_at`` and
    ``gains`` are aligned with it.
    """

    selected: list[int]
    value: float
    group_counts: dict[str, int]
    thresholds: list[float] = field(default_factory=list)
    accepted_at: list[float] = field(default_factory=list)
    gains: list[float] = field(default_factory=list)
    wall_time: float = 0.0
    diagnostic: str | None = None

    def __len__(self):
        return len(self.selected)


def threshold_schedule(d: float, n: int, delta: float, guard: int) -> list[float]:
    """``d / (1 + delta)^t`` down to the first value <= ``delta * d / n``, then 0."""
    floor = delta * d / n
    out = []
    w = d
    t = 0
    while True:
        out.append(w)
        if w <= floor:
            break
        t += 1
        if t >= guard:
            raise ValidationError(f"threshold schedule exceeds {guard} rounds; raise delta")
        w = d / (1.0 + delta) ** t
    out.append(0.0)
    return out


def fairsumm(
    model: SimilarityModel,
    objective: ObjectiveConfig,
    oracle,
    solver: SolverConfig = SolverConfig(),
) -> SolveResult:
    """Greedy over a decreasing threshold schedule.

    At each threshold every unselected unit is scanned in index order and
    added when it keeps the set independent and its marginal gain reaches the
    threshold. The final zero threshold fills any remaining capacity.
    """
    start = time.perf_counter()
    n = model.n
    if n == 0:
        return SolveResult([], 0.0, {}, diagnostic="empty corpus")
    singles = singleton_values(model, objective)
    d = float(singles.max())
    if d <= 0.0:
        return SolveResult([], 0.0, _counts(oracle, []), wall_time=time.perf_counter() - start,
                           diagnostic="every singleton value is zero; nothing to select")
    schedule = threshold_schedule(d, n, solver.delta, solver.max_rounds_guard)
    state = SummaryState(model, objective)
    tracker = oracle.tracker()
    target = oracle.rank
    visited, accepted_at, gains = [], [], []
    for w in schedule:
        if len(state) >= target:
            break
        visited.append(w)
        for z in range(n):
            if z in state or not tracker.fits(z):
                continue
            g = state.gain(z)
            if g >= w:
                state.add(z)
                tracker.take(z)
                accepted_at.append(w)
                gains.append(g)
                if len(state) >= target:
                    break
    state.resync()
    return SolveResult(
        selected=list(state.selected),
        value=objective_value(state.selected, model, objective),
        group_counts=_counts(oracle, state.selected),
        thresholds=visited,
        accepted_at=accepted_at,
        gains=gains,
        wall_time=time.perf_counter() - start,
    )


def _counts(oracle, selected):
    if isinstance(oracle, MatroidOracle):
        return oracle.counts(selected)
    return {"*": len(selected)}


def dicosumm(
    model: SimilarityModel,
    objective: ObjectiveConfig,
    k: int,
    solver: SolverConfig = SolverConfig(),
) -> SolveResult:
    """Coverage/diversity summary of at most ``k`` units, no fairness constraint."""
    if k < 0:
        raise ValidationError("k must be nonnegative")
    return fairsumm(model, objective, MatroidOracle.uniform(model.n, k), solver)


def first_pick(model: SimilarityModel, objective: ObjectiveConfig) -> int:
    """Index the greedy must select first when its group has room."""
    return int(np.argmax(singleton_values(model, objective)))
