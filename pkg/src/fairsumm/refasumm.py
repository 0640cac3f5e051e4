"""Ranked-group-fairness re-ranking of externally scored units (two groups)."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .corpus import TextUnit
from .errors import InfeasibleError, UnsupportedCardinalityError, ValidationError
from .rouge import rouge_multi, summary_tokens

# below this distance from alpha the float CDF cannot be trusted to decide ">"
_TIE_BAND = 1e-9


@dataclass(frozen=True)
class FairRankConfig:
    k: int
    p: float = 0.5
    alpha_c: float = 0.5
    protected_group: str | None = None

    def __post_init__(self):
        if self.k < 0:
            raise ValidationError("k must be nonnegative")
        if not 0 < self.p < 1:
            raise ValidationError("p must lie strictly between 0 and 1")
        if not 0 < self.alpha_c < 1:
            raise ValidationError("alpha_c must lie strictly between 0 and 1")


@dataclass(frozen=True)
class FairnessTable:
    """``tau[i - 1]`` is the minimum protected count in a prefix of length i."""

    tau: tuple[int, ...]
    p: float
    alpha_c: float

    def at(self, i: int) -> int:
        return self.tau[i - 1]


def binomial_cdf(m: int, i: int, p: float) -> float:
    """P(X <= m) for X ~ Binomial(i, p), summed in log space."""
    if m < 0:
        return 0.0
    if m >= i:
        return 1.0
    lp, lq = math.log(p), math.log1p(-p)
    logs = [
        math.lgamma(i + 1) - math.lgamma(x + 1) - math.lgamma(i - x + 1) + x * lp + (i - x) * lq
        for x in range(m + 1)
    ]
    top = max(logs)
    return min(1.0, math.exp(top) * math.fsum(math.exp(v - top) for v in logs))


def binomial_cdf_exact(m: int, i: int, p) -> Fraction:
    p = Fraction(p)
    q = 1 - p
    return sum((math.comb(i, x) * p**x * q ** (i - x) for x in range(max(m, -1) + 1)), Fraction(0))


def _exceeds(m, i, p, alpha):
    c = binomial_cdf(m, i, p)
    if abs(c - alpha) < _TIE_BAND:
        return binomial_cdf_exact(m, i, p) > Fraction(alpha)
    return c > alpha


def build_fairness_table(k: int, p: float, alpha_c: float) -> FairnessTable:
    """``tau[i] = min{m : cdf(m; i, p) > alpha_c}`` for prefix lengths 1..k.

    Values within 1e-9 of ``alpha_c`` are re-decided in exact rational
    arithmetic, since ties such as ``cdf(0; 1, 0.5) == 0.5`` are common.
    """
    FairRankConfig(k, p, alpha_c)
    tau = []
    m = 0
    for i in range(1, k + 1):
        # the table is nondecreasing, so resume the search at the previous entry
        while not _exceeds(m, i, p, alpha_c):
            m += 1
        tau.append(m)
    return FairnessTable(tuple(tau), p, alpha_c)


def _score(u: TextUnit) -> float:
    if u.external_score is None:
        raise ValidationError(f"unit {u.id!r} has no score")
    return u.external_score


def top_k(units: Sequence[TextUnit], k: int) -> list[TextUnit]:
    """Plain score order, ties by id."""
    return sorted(units, key=lambda u: (-_score(u), u.id))[:k]


def default_protected(units: Sequence[TextUnit]) -> str:
    census = Counter(u.group for u in units)
    return min(census, key=lambda g: (census[g], g))


@dataclass(frozen=True)
class RankedSummary:
    units: tuple[TextUnit, ...]
    protected_group: str
    table: FairnessTable

    @property
    def ids(self) -> list[str]:
        return [u.id for u in self.units]

    def protected_prefix_counts(self) -> list[int]:
        out, c = [], 0
        for u in self.units:
            c += u.group == self.protected_group
            out.append(c)
        return out


def refasumm(units: Sequence[TextUnit], config: FairRankConfig) -> RankedSummary:
    """Merge two score-sorted queues so every prefix meets the fairness table.

    When the protected count is behind the table the best protected unit is
    emitted; otherwise the best unit overall, protected first on score ties.
    """
    units = list(units)
    groups = sorted({u.group for u in units})
    if len(groups) > 2:
        raise UnsupportedCardinalityError(f"re-ranking supports two groups, got {len(groups)}")
    if config.k > len(units):
        raise ValidationError(f"k={config.k} exceeds the {len(units)} units available")
    protected = config.protected_group or default_protected(units)
    if config.protected_group is not None and protected not in groups and units:
        raise ValidationError(f"protected group {protected!r} not present")
    table = build_fairness_table(config.k, config.p, config.alpha_c)
    prot = top_k([u for u in units if u.group == protected], len(units))
    rest = top_k([u for u in units if u.group != protected], len(units))
    out: list[TextUnit] = []
    pi = ri = 0
    count = 0
    for rank in range(1, config.k + 1):
        need = table.at(rank)
        if count < need:
            if pi >= len(prot):
                raise InfeasibleError(
                    f"rank {rank}: table needs {need} protected units, only {count} exist"
                )
            take_prot = True
        elif pi >= len(prot):
            take_prot = False
        elif ri >= len(rest):
            take_prot = True
        else:
            take_prot = _score(prot[pi]) >= _score(rest[ri])
        if take_prot:
            out.append(prot[pi])
            pi += 1
            count += 1
        else:
            out.append(rest[ri])
            ri += 1
    return RankedSummary(tuple(out), protected, table)


def quality_delta_report(
    base_topk: Sequence[TextUnit],
    fair_topk: Sequence[TextUnit],
    references: Sequence[Sequence[str]],
) -> dict:
    """ROUGE of the unconstrained and the fair ranking side by side."""
    base = rouge_multi(summary_tokens(base_topk), references)
    fair = rouge_multi(summary_tokens(fair_topk), references)
    report = {"base": {}, "fair": {}, "delta": {}}
    for v in base:
        report["base"][v] = base[v].as_dict()
        report["fair"][v] = fair[v].as_dict()
        report["delta"][v] = {
            f: fair[v].as_dict()[f] - base[v].as_dict()[f] for f in ("precision", "recall", "f1")
        }
    return report
