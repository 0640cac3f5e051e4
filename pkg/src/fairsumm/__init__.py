"""Fairness-constrained extractive summarization of labeled text corpora."""

__version__ = "0.1.0"

from .classwise import classwise_summ
from .constraints import (
    AllOf,
    FairnessSpec,
    MatroidOracle,
    adverse_impact_audit,
    enumerate_nai_quotas,
    make_quotas,
)
from .corpus import Corpus, TextUnit, corpus_from_records, load_corpus, preprocess
from .errors import (
    CorpusFormatError,
    FairSummError,
    InfeasibleError,
    UnsupportedCardinalityError,
    ValidationError,
)
from .harness import (
    NoiseExperimentConfig,
    SummaryReport,
    brute_force_optimum,
    run_noise_experiment,
    summarize,
)
from .objective import ObjectiveConfig, SummaryState, curvature, marginal_gain, objective_value
from .refasumm import FairRankConfig, binomial_cdf, build_fairness_table, refasumm
from .rouge import RougeScore, rouge_multi, rouge_n
from .simsem import SimilarityModel, build_model
from .solver import SolveResult, SolverConfig, dicosumm, fairsumm

__all__ = [
    "AllOf", "Corpus", "CorpusFormatError", "FairRankConfig", "FairSummError", "FairnessSpec",
    "InfeasibleError", "MatroidOracle", "NoiseExperimentConfig", "ObjectiveConfig",
    "RougeScore", "SimilarityModel", "SolveResult", "SolverConfig", "SummaryReport",
    "SummaryState", "TextUnit", "UnsupportedCardinalityError", "ValidationError",
    "adverse_impact_audit", "binomial_cdf", "brute_force_optimum", "build_fairness_table",
    "build_model", "classwise_summ", "corpus_from_records", "curvature", "dicosumm",
    "enumerate_nai_quotas", "fairsumm", "load_corpus", "make_quotas", "marginal_gain",
    "objective_value", "preprocess", "refasumm", "rouge_multi", "rouge_n", "run_noise_experiment",
    "summarize",
]
