"""Fairness quotas, partition-matroid independence, and representation audits."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import UNKNOWN_GROUP
from .errors import InfeasibleError, ValidationError

NOTIONS = ("equal", "proportional", "custom")

OK = "ok"
UNDER_EQUAL = "under_equal"
UNDER_PROPORTIONAL = "under_proportional"
ADVERSE_IMPACT = "adverse_impact"
ZERO_CENSUS = "zero_census"


def _labeled(census: Mapping[str, int]) -> dict[str, int]:
    return {g: int(c) for g, c in sorted(census.items()) if g != UNKNOWN_GROUP}


def _by_size(census):
    """Groups ordered largest census first, ties by name."""
    return sorted(census, key=lambda g: (-census[g], g))


def equal_quotas(k: int, census: Mapping[str, int]) -> dict[str, int]:
    census = _labeled(census)
    t = len(census)
    base, extra = divmod(k, t)
    quotas = dict.fromkeys(census, base)
    for g in _by_size(census)[:extra]:
        quotas[g] += 1
    return quotas


def proportional_quotas(k: int, census: Mapping[str, int]) -> dict[str, int]:
    """Largest-remainder (Hamilton) apportionment of k seats by census share."""
    census = _labeled(census)
    total = sum(census.values())
    quotas, remainders = {}, {}
    for g, c in census.items():
        quotas[g], remainders[g] = divmod(k * c, total)
    leftover = k - sum(quotas.values())
    ranked = sorted(census, key=lambda g: (-remainders[g], -census[g], g))
    for g in ranked[:leftover]:
        quotas[g] += 1
    return quotas


def make_quotas(
    notion: str,
    k: int,
    census: Mapping[str, int],
    custom: Mapping[str, int] | None = None,
) -> dict[str, int]:
    """Per-group summary slots for a fairness notion.

    Groups are keyed in sorted order. The reserved unknown-label group never
    receives a quota.
    """
    labeled = _labeled(census)
    if not labeled:
        raise ValidationError("census has no labeled groups")
    if k < 0:
        raise ValidationError("summary length k must be nonnegative")
    N = sum(labeled.values())
    if k > N:
        raise InfeasibleError(f"k={k} exceeds the {N} labeled units available")
    if notion == "equal":
        quotas = equal_quotas(k, labeled)
    elif notion == "proportional":
        quotas = proportional_quotas(k, labeled)
    elif notion == "custom":
        if custom is None:
            raise ValidationError("custom notion needs explicit quotas")
        unknown = set(custom) - set(labeled)
        if unknown:
            raise ValidationError(f"quotas name unknown groups {sorted(unknown)}")
        quotas = {g: int(custom.get(g, 0)) for g in labeled}
        if any(c < 0 for c in quotas.values()):
            raise ValidationError("quotas must be nonnegative")
        if sum(quotas.values()) != k:
            raise ValidationError(f"quotas sum to {sum(quotas.values())}, expected k={k}")
    else:
        raise ValidationError(f"unknown fairness notion {notion!r}")
    assert sum(quotas.values()) == k
    check_feasible(quotas, labeled)
    return quotas


def check_feasible(quotas: Mapping[str, int], census: Mapping[str, int]) -> None:
    for g, c in quotas.items():
        if c > census.get(g, 0):
            raise InfeasibleError(
                f"group {g!r} needs {c} units but only {census.get(g, 0)} exist"
            )


def parse_quotas(text: str) -> dict[str, int]:
    """Parse ``"male=25,female=25"``."""
    quotas = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        group, sep, count = part.rpartition("=")
        if not sep or not group:
            raise ValidationError(f"bad quota entry {part!r}, expected group=count")
        try:
            quotas[group] = int(count)
        except ValueError:
            raise ValidationError(f"bad quota count in {part!r}") from None
    return quotas


def format_quotas(quotas: Mapping[str, int]) -> str:
    return ",".join(f"{g}={c}" for g, c in quotas.items())


@dataclass(frozen=True)
class FairnessSpec:
    notion: str
    k: int
    quotas: Mapping[str, int]

    def __post_init__(self):
        if self.notion not in NOTIONS:
            raise ValidationError(f"unknown fairness notion {self.notion!r}")
        if any(c < 0 for c in self.quotas.values()):
            raise ValidationError("quotas must be nonnegative")
        if sum(self.quotas.values()) != self.k:
            raise ValidationError("quotas must sum to k")

    @classmethod
    def build(cls, notion, k, census, custom=None) -> "FairnessSpec":
        return cls(notion, k, make_quotas(notion, k, census, custom))


class _Tracker:
    def __init__(self, oracle):
        self._group = oracle.group_index.tolist()
        self._cap = oracle.capacity.tolist()
        self.counts = [0] * len(self._cap)

    def fits(self, z):
        g = self._group[z]
        return self.counts[g] < self._cap[g]

    def take(self, z):
        self.counts[self._group[z]] += 1


class MatroidOracle:
    """Partition matroid: at most ``quotas[g]`` selected units per group.

    Units whose group has no quota (e.g. the unknown-label group) have
    capacity zero.
    """

    def __init__(self, unit_groups: Sequence[str], quotas: Mapping[str, int]):
        self.groups = tuple(sorted(set(unit_groups) | set(quotas)))
        pos = {g: i for i, g in enumerate(self.groups)}
        self.group_index = np.array([pos[g] for g in unit_groups], dtype=np.int64)
        self.capacity = np.array([int(quotas.get(g, 0)) for g in self.groups], dtype=np.int64)
        self.quotas = dict(quotas)
        sizes = np.bincount(self.group_index, minlength=len(self.groups))
        self.rank = int(np.minimum(sizes, self.capacity).sum())

    @classmethod
    def uniform(cls, n: int, k: int) -> "MatroidOracle":
        """Cardinality constraint ``|S| <= k`` as a one-block partition matroid."""
        return cls(["*"] * n, {"*": k})

    def __len__(self):
        return len(self.group_index)

    def counts(self, S: Iterable[int]) -> dict[str, int]:
        idx = np.fromiter(S, dtype=np.int64)
        c = np.bincount(self.group_index[idx], minlength=len(self.groups))
        return {g: int(c[i]) for i, g in enumerate(self.groups)}

    def independent(self, S: Iterable[int]) -> bool:
        idx = np.fromiter(set(S), dtype=np.int64)
        c = np.bincount(self.group_index[idx], minlength=len(self.groups))
        return bool((c <= self.capacity).all())

    def tracker(self) -> _Tracker:
        return _Tracker(self)


class _AllOfTracker:
    def __init__(self, trackers):
        self.trackers = trackers

    def fits(self, z):
        return all(t.fits(z) for t in self.trackers)

    def take(self, z):
        for t in self.trackers:
            t.take(z)


class AllOf:
    """Intersection of several matroid oracles (one per sensitive attribute)."""

    def __init__(self, *oracles: MatroidOracle):
        self.oracles = oracles
        self.rank = min(o.rank for o in oracles)

    def independent(self, S) -> bool:
        S = list(S)
        return all(o.independent(S) for o in self.oracles)

    def tracker(self):
        return _AllOfTracker([o.tracker() for o in self.oracles])


def adverse_impact_audit(
    summary_counts: Mapping[str, int], census: Mapping[str, int]
) -> dict[str, tuple[str, ...]]:
    """Flag under-represented groups in a summary.

    With ``k`` the summary size, ``t`` the number of groups and ``N`` the
    corpus size, a group is

    * ``under_equal`` if its count is below ``floor(k / t)``,
    * ``under_proportional`` if below ``floor(k * census / N)``,
    * ``adverse_impact`` if its selection rate (count / census) is below
      80% of the best group's rate.

    Groups with zero census get only ``zero_census``.
    """
    census = _labeled(census)
    for g, c in summary_counts.items():
        if g == UNKNOWN_GROUP:
            continue
        if g not in census:
            raise ValidationError(f"summary names unknown group {g!r}")
        if c > census[g]:
            raise ValidationError(f"group {g!r}: {c} selected but census is {census[g]}")
    counts = {g: int(summary_counts.get(g, 0)) for g in census}
    live = [g for g in census if census[g] > 0]
    k = sum(counts.values())
    N = sum(census.values())
    t = len(live)
    best = max(live, key=lambda g: counts[g] / census[g], default=None)
    flags = {}
    for g in census:
        if census[g] == 0:
            flags[g] = (ZERO_CENSUS,)
            continue
        f = []
        if counts[g] < k // t:
            f.append(UNDER_EQUAL)
        if counts[g] < (k * census[g]) // N:
            f.append(UNDER_PROPORTIONAL)
        # rate_g / rate_best < 4/5, cross-multiplied to stay in integers
        if best is not None and 5 * counts[g] * census[best] < 4 * counts[best] * census[g]:
            f.append(ADVERSE_IMPACT)
        flags[g] = tuple(f) or (OK,)
    return flags


def enumerate_nai_quotas(k: int, census: Mapping[str, int]) -> list[dict[str, int]]:
    """All quota vectors summing to k that show no adverse impact."""
    census = _labeled(census)
    groups = list(census)
    out = []
    ranges = [range(min(k, census[g]) + 1) for g in groups[:-1]]
    for head in itertools.product(*ranges):
        last = k - sum(head)
        if not 0 <= last <= census[groups[-1]]:
            continue
        quotas = dict(zip(groups, (*head, last)))
        flags = adverse_impact_audit(quotas, census)
        if not any(ADVERSE_IMPACT in f for f in flags.values()):
            out.append(quotas)
    return out
