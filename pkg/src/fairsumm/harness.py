"""Experiment harness: one-shot summarization reports, the exhaustive oracle,
and the label-noise robustness experiment."""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .classwise import classwise_summ
from .constraints import (
    FairnessSpec,
    MatroidOracle,
    adverse_impact_audit,
    make_quotas,
)
from .corpus import UNKNOWN_GROUP, Corpus
from .errors import UnsupportedCardinalityError, ValidationError
from .objective import ObjectiveConfig, objective_value
from .refasumm import FairRankConfig, refasumm
from .rng import SplitMix64
from .rouge import rouge_multi, summary_tokens
from .simsem import DEFAULT_SEED, SimilarityModel, build_model
from .solver import SolverConfig, dicosumm, fairsumm

ALGORITHMS = ("fairsumm", "dicosumm", "classwise", "refasumm")
BRUTE_FORCE_GUARD = 20


@dataclass
class SummaryReport:
    algorithm: str
    selected: list[str]
    group_counts: dict[str, int]
    flags: dict[str, list[str]]
    objective: float
    rouge: dict | None = None
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        # no timings or paths that vary between runs: identical inputs give identical bytes
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def true_counts(corpus: Corpus, selected: Sequence[int]) -> dict[str, int]:
    counts = {g: 0 for g in corpus.groups}
    for i in selected:
        counts[corpus.group_of(i)] += 1
    return counts


def audit_flags(counts: Mapping[str, int], census: Mapping[str, int]) -> dict[str, list[str]]:
    return {g: list(f) for g, f in adverse_impact_audit(counts, census).items()}


def rank_probability(notion: str, quotas: Mapping[str, int], census: Mapping[str, int],
                     protected: str, k: int) -> float:
    """Default minimum protected share for re-ranking under a fairness notion."""
    if notion == "proportional":
        labeled = {g: c for g, c in census.items() if g != UNKNOWN_GROUP}
        return census[protected] / sum(labeled.values())
    if notion == "custom" and k:
        return min(max(quotas.get(protected, 0) / k, 1e-6), 1 - 1e-6)
    return 0.5


def summarize(
    corpus: Corpus,
    algo: str,
    k: int,
    notion: str = "equal",
    custom_quotas: Mapping[str, int] | None = None,
    objective: ObjectiveConfig = ObjectiveConfig(),
    solver: SolverConfig = SolverConfig(),
    clusters: int | None = None,
    seed: int = DEFAULT_SEED,
    model: SimilarityModel | None = None,
    p: float | None = None,
    alpha: float = 0.5,
    references: Sequence[Sequence[str]] | None = None,
) -> SummaryReport:
    """Run one algorithm and package the result as a report."""
    if algo not in ALGORITHMS:
        raise ValidationError(f"unknown algorithm {algo!r}")
    if model is None:
        model = build_model(corpus, clusters=clusters, seed=seed)
    if model.n != len(corpus):
        raise ValidationError(f"similarity model has {model.n} units, corpus has {len(corpus)}")
    config = {"k": k, "notion": notion, "delta": solver.delta, "lambda1": objective.lambda1,
              "lambda2": objective.lambda2, "clusters": model.K, "seed": seed}
    quotas = make_quotas(notion, k, corpus.census, custom_quotas) if algo != "dicosumm" else None
    if algo == "fairsumm":
        res = fairsumm(model, objective, MatroidOracle(corpus.labels(), quotas), solver)
        selected = res.selected
    elif algo == "dicosumm":
        selected = dicosumm(model, objective, k, solver).selected
    elif algo == "classwise":
        spec = FairnessSpec(notion, k, quotas)
        selected = classwise_summ(corpus, spec, objective, solver, seed, model).selected
    else:
        groups = [g for g in corpus.groups if g != UNKNOWN_GROUP]
        if len(groups) != 2:
            raise UnsupportedCardinalityError(f"re-ranking supports two groups, got {len(groups)}")
        units = [u for u in corpus if u.group != UNKNOWN_GROUP]
        protected = min(groups, key=lambda g: (corpus.census[g], g))
        if p is None:
            p = rank_probability(notion, quotas, corpus.census, protected, k)
        ranked = refasumm(units, FairRankConfig(k, p, alpha, protected))
        selected = [corpus.index_of(u.id) for u in ranked.units]
        config.update({"p": p, "alpha": alpha, "protected_group": protected})
    if quotas is not None:
        config["quotas"] = quotas
    counts = true_counts(corpus, selected)
    rouge = None
    if references:
        scores = rouge_multi(summary_tokens(corpus[i] for i in selected), references)
        rouge = {v: s.as_dict() for v, s in scores.items()}
    return SummaryReport(
        algorithm=algo,
        selected=[corpus[i].id for i in selected],
        group_counts=counts,
        flags=audit_flags(counts, corpus.census),
        objective=objective_value(selected, model, objective),
        rouge=rouge,
        config=config,
    )


def render_table(report: SummaryReport) -> str:
    """Aligned text table: one row with per-group counts, flags and ROUGE."""
    groups = list(report.group_counts)
    marks = {"under_equal": "*", "under_proportional": "+", "adverse_impact": "#"}
    header = ["Algorithm"] + groups + ["Objective"]
    cells = [report.algorithm]
    for g in groups:
        flag = "".join(marks.get(f, "") for f in report.flags.get(g, []))
        cells.append(f"{report.group_counts[g]}{flag}")
    cells.append(f"{report.objective:.4f}")
    if report.rouge:
        for v, s in report.rouge.items():
            header += [f"{v}-R", f"{v}-F1"]
            cells += [f"{s['recall']:.4f}", f"{s['f1']:.4f}"]
    widths = [max(len(h), len(c)) for h, c in zip(header, cells)]
    line = lambda row: "  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip()
    legend = "flags: * below equal share, + below proportional share, # adverse impact"
    return "\n".join([line(header), line(["-" * w for w in widths]), line(cells), legend]) + "\n"


def brute_force_optimum(
    model: SimilarityModel,
    objective: ObjectiveConfig,
    oracle: MatroidOracle,
    k: int,
    guard: int = BRUTE_FORCE_GUARD,
) -> tuple[tuple[int, ...], float]:
    """Best independent set of size at most k by exhaustive search.

    Ties go to the smaller set, then the lexicographically first one.
    """
    n = model.n
    if n > guard:
        raise ValidationError(f"exhaustive search refused for n={n} > {guard}")
    rt = model.row_totals.tolist()
    r = model.singleton_reward.tolist()
    part = model.partitions.tolist()
    grp = oracle.group_index.tolist()
    cap = oracle.capacity.tolist()
    l1, l2 = objective.lambda1, objective.lambda2
    best, best_val = (), 0.0
    for size in range(1, min(k, n) + 1):
        for S in itertools.combinations(range(n), size):
            used = [0] * len(cap)
            ok = True
            for z in S:
                used[grp[z]] += 1
                if used[grp[z]] > cap[grp[z]]:
                    ok = False
                    break
            if not ok:
                continue
            sums: dict[int, float] = {}
            cov = 0.0
            for z in S:
                cov += rt[z]
                sums[part[z]] = sums.get(part[z], 0.0) + r[z]
            val = l1 * cov + l2 * sum(math.sqrt(v) for v in sums.values())
            if val > best_val + 1e-12:
                best, best_val = S, val
    return best, best_val


@dataclass(frozen=True)
class NoiseExperimentConfig:
    error_rates: tuple[float, ...] = (0.1, 0.2, 0.3)
    trials: int = 100
    rng_seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "error_rates", tuple(float(x) for x in self.error_rates))
        if any(not 0 <= x < 1 for x in self.error_rates):
            raise ValidationError("error rates must lie in [0, 1)")
        if self.trials < 1:
            raise ValidationError("trials must be at least 1")


def flip_count(rate: float, n: int) -> int:
    """``floor(rate * n)`` using the decimal value of ``rate``, not its binary float."""
    return math.floor(Fraction(repr(rate)) * n)


def trial_flips(seed: int, trial: int, n: int, m: int) -> list[int]:
    """Flip set for one trial.

    Trial ``t`` draws from ``SplitMix64(seed + t)``, so for a fixed trial the
    flip set at a lower rate is a prefix of the set at a higher rate.
    """
    return SplitMix64(seed + trial).sample_indices(n, m)


def run_noise_experiment(
    corpus: Corpus,
    spec: FairnessSpec,
    objective: ObjectiveConfig = ObjectiveConfig(),
    solver: SolverConfig = SolverConfig(),
    config: NoiseExperimentConfig = NoiseExperimentConfig(),
    references: Sequence[Sequence[str]] | None = None,
    model: SimilarityModel | None = None,
    seed: int = DEFAULT_SEED,
) -> list[dict]:
    """Summaries built from corrupted group labels, audited with the true ones.

    Per rate and trial, ``floor(rate * N)`` labels are flipped to the other
    group, quotas are recomputed from the noisy census, and the greedy is run
    under the noisy partition. Counts are tallied with the true labels and
    averaged over trials.
    """
    groups = list(corpus.groups)
    if len(groups) != 2 or UNKNOWN_GROUP in groups:
        raise UnsupportedCardinalityError("label-noise experiment needs exactly two labeled groups")
    if model is None:
        model = build_model(corpus, seed=seed)
    true = corpus.labels()
    other = {groups[0]: groups[1], groups[1]: groups[0]}
    n = len(corpus)
    rows = []
    for rate in config.error_rates:
        m = flip_count(rate, n)
        if rate > 0 and m == 0:
            warnings.warn(f"error rate {rate} flips no labels for N={n}", stacklevel=2)
        count_sums = dict.fromkeys(groups, 0)
        rouge_sums: dict[str, dict[str, float]] = {}
        for trial in range(config.trials):
            noisy = list(true)
            for i in trial_flips(config.rng_seed, trial, n, m):
                noisy[i] = other[noisy[i]]
            census = {g: noisy.count(g) for g in groups}
            if spec.notion == "custom":
                quotas = make_quotas("custom", spec.k, census, spec.quotas)
            else:
                quotas = make_quotas(spec.notion, spec.k, census)
            res = fairsumm(model, objective, MatroidOracle(noisy, quotas), solver)
            for i in res.selected:
                count_sums[true[i]] += 1
            if references:
                scores = rouge_multi(summary_tokens(corpus[i] for i in res.selected), references)
                for v, s in scores.items():
                    acc = rouge_sums.setdefault(v, {"precision": 0.0, "recall": 0.0, "f1": 0.0})
                    for f, x in s.as_dict().items():
                        acc[f] += x
        t = config.trials
        rows.append({
            "rate": rate,
            "flips": m,
            "trials": t,
            "mean_counts": {g: count_sums[g] / t for g in groups},
            "mean_rouge": {v: {f: x / t for f, x in acc.items()} for v, acc in rouge_sums.items()}
            if references else None,
        })
    return rows


def render_noise_table(rows: list[dict]) -> str:
    groups = list(rows[0]["mean_counts"]) if rows else []
    header = ["rate"] + groups
    variants = list(rows[0]["mean_rouge"] or {}) if rows else []
    for v in variants:
        header += [f"{v}-R", f"{v}-F1"]
    body = []
    for row in rows:
        cells = [f"{row['rate']:.0%}"] + [f"{row['mean_counts'][g]:.2f}" for g in groups]
        for v in variants:
            cells += [f"{row['mean_rouge'][v]['recall']:.4f}", f"{row['mean_rouge'][v]['f1']:.4f}"]
        body.append(cells)
    widths = [max(len(x) for x in col) for col in zip(header, *body)]
    line = lambda row: "  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip()
    return "\n".join([line(header), line(["-" * w for w in widths])] + [line(r) for r in body]) + "\n"
