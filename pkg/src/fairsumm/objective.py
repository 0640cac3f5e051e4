"""Coverage + diversity objective ``F = lambda1 * L + lambda2 * R``.

``L(S) = sum_{i in S} sum_{j in V} sim(i, j)`` is modular in S, and
``R(S) = sum_k sqrt(sum_{j in P_k & S} r_j)`` rewards picking from many
clusters. Both are monotone submodular, hence so is F for nonnegative
weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ValidationError
from .simsem import SimilarityModel

DRIFT_TOLERANCE = 1e-9
_RESYNC_EVERY = 256


@dataclass(frozen=True)
class ObjectiveConfig:
    lambda1: float = 1.0
    lambda2: float = 1.0

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValidationError("objective weights must be nonnegative")
        if self.lambda1 == 0 and self.lambda2 == 0:
            raise ValidationError("at least one objective weight must be positive")


def _as_indices(S) -> np.ndarray:
    return np.fromiter(S, dtype=np.int64) if not isinstance(S, np.ndarray) else S.astype(np.int64)


def coverage(S: Iterable[int], model: SimilarityModel) -> float:
    idx = _as_indices(S)
    return float(model.row_totals[idx].sum()) if idx.size else 0.0


def diversity_reward(S: Iterable[int], model: SimilarityModel) -> float:
    idx = _as_indices(S)
    if not idx.size:
        return 0.0
    sums = np.bincount(model.partitions[idx], weights=model.singleton_reward[idx],
                       minlength=model.K)
    return float(np.sqrt(sums).sum())


def objective_value(S: Iterable[int], model: SimilarityModel, config: ObjectiveConfig) -> float:
    S = list(S)
    return config.lambda1 * coverage(S, model) + config.lambda2 * diversity_reward(S, model)


class SummaryState:
    """Mutable selection with cached per-cluster reward sums.

    ``gain`` is O(1); ``value`` is maintained incrementally and periodically
    checked against a from-scratch recomputation.
    """

    def __init__(self, model: SimilarityModel, config: ObjectiveConfig):
        self.model = model
        self.config = config
        self.selected: list[int] = []
        self._members: set[int] = set()
        # plain lists: scalar indexing into numpy arrays is slow in the hot loop
        self._rt = model.row_totals.tolist()
        self._r = model.singleton_reward.tolist()
        self._part = model.partitions.tolist()
        self.cluster_sums = [0.0] * model.K
        self.value = 0.0

    def __contains__(self, z):
        return z in self._members

    def __len__(self):
        return len(self.selected)

    def gain(self, z: int) -> float:
        if z in self._members:
            raise ValidationError(f"unit {z} is already selected")
        q = self.cluster_sums[self._part[z]]
        return (self.config.lambda1 * self._rt[z]
                + self.config.lambda2 * (math.sqrt(q + self._r[z]) - math.sqrt(q)))

    def add(self, z: int) -> float:
        g = self.gain(z)
        self.selected.append(z)
        self._members.add(z)
        self.cluster_sums[self._part[z]] += self._r[z]
        self.value += g
        if len(self.selected) % _RESYNC_EVERY == 0:
            self.resync()
        return g

    def resync(self) -> float:
        """Rebuild caches if they drifted; returns the observed drift."""
        m = self.model
        idx = np.asarray(self.selected, dtype=np.int64)
        fresh = np.bincount(m.partitions[idx], weights=m.singleton_reward[idx], minlength=m.K)
        exact = objective_value(self.selected, m, self.config)
        drift = max(abs(exact - self.value),
                    float(np.abs(fresh - np.asarray(self.cluster_sums)).max(initial=0.0)))
        if drift > DRIFT_TOLERANCE:
            self.cluster_sums = fresh.tolist()
            self.value = exact
        return drift


def marginal_gain(state: SummaryState, z: int, model=None, config=None) -> float:
    """``F(S + z) - F(S)`` for the state's current selection."""
    return state.gain(z)


def singleton_values(model: SimilarityModel, config: ObjectiveConfig) -> np.ndarray:
    return config.lambda1 * model.row_totals + config.lambda2 * np.sqrt(model.singleton_reward)


def curvature(model: SimilarityModel, config: ObjectiveConfig) -> float:
    """``max_j (F(j) - F(j | V - j)) / F(j)`` over units with ``F(j) > 0``."""
    if model.n < 2:
        raise ValidationError("curvature needs at least two units")
    single = singleton_values(model, config)
    totals = np.bincount(model.partitions, weights=model.singleton_reward, minlength=model.K)
    q_full = totals[model.partitions]
    q_rest = np.maximum(q_full - model.singleton_reward, 0.0)
    last = config.lambda1 * model.row_totals + config.lambda2 * (np.sqrt(q_full) - np.sqrt(q_rest))
    mask = single > 0
    if not mask.any():
        raise ValidationError("curvature undefined: every singleton value is zero")
    ratios = (single[mask] - last[mask]) / single[mask]
    return float(np.clip(ratios.max(), 0.0, 1.0))
