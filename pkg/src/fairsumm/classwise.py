"""Summarize each group on its own, then concatenate the per-group summaries."""

from __future__ import annotations

import time

from .constraints import FairnessSpec
from .corpus import Corpus
from .errors import InfeasibleError
from .objective import ObjectiveConfig, objective_value
from .simsem import DEFAULT_SEED, SimilarityModel, build_model, default_cluster_count
from .solver import SolveResult, SolverConfig, dicosumm


def classwise_summ(
    corpus: Corpus,
    spec: FairnessSpec,
    objective: ObjectiveConfig,
    solver: SolverConfig = SolverConfig(),
    seed: int = DEFAULT_SEED,
    model: SimilarityModel | None = None,
) -> SolveResult:
    """Per-group summaries of size ``spec.quotas[g]``, merged largest group first.

    Each group gets its own TF-IDF model and clustering. The reported value is
    the objective of the merged selection under ``model``, the full-corpus
    model (built with default settings when not given).
    """
    start = time.perf_counter()
    order = sorted(corpus.census, key=lambda g: (-corpus.census[g], g))
    selected: list[int] = []
    counts = {g: 0 for g in corpus.groups}
    for g in order:
        quota = spec.quotas.get(g, 0)
        if quota == 0:
            continue
        if quota > corpus.census[g]:
            raise InfeasibleError(f"group {g!r} needs {quota} units but only {corpus.census[g]} exist")
        sub = corpus.restrict(g)
        sub_model = build_model(sub, clusters=default_cluster_count(len(sub)), seed=seed)
        res = dicosumm(sub_model, objective, quota, solver)
        for i in res.selected:
            selected.append(corpus.index_of(sub[i].id))
        counts[g] = len(res.selected)
    if model is None:
        model = build_model(corpus, seed=seed)
    return SolveResult(
        selected=selected,
        value=objective_value(selected, model, objective),
        group_counts=counts,
        wall_time=time.perf_counter() - start,
    )
