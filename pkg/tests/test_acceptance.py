"""Acceptance checks, one test group per criterion.

Each test carries a ``criterion`` marker; the session ends with one
PASS/FAIL line per criterion. Run ``python3 tests/test_acceptance.py`` to
execute this file alone.
"""

import itertools
import json
import math
import os
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from fairsumm.classwise import classwise_summ
from fairsumm.cli import main
from fairsumm.constraints import FairnessSpec, MatroidOracle, adverse_impact_audit
from fairsumm.corpus import TextUnit
from fairsumm.errors import InfeasibleError
from fairsumm.harness import NoiseExperimentConfig, brute_force_optimum, run_noise_experiment
from fairsumm.objective import ObjectiveConfig, SummaryState, objective_value
from fairsumm.refasumm import FairRankConfig, build_fairness_table, refasumm, top_k
from fairsumm.rouge import rouge_n
from fairsumm.simsem import build_model
from fairsumm.solver import fairsumm
from fairsumm.synthetic import duplicated_opinion_corpus, sampled_references, two_group_corpus

from conftest import random_corpus, random_model


# --------------------------------------------------------------------- 1
QUOTA_ROWS = [
    ("female=2505,male=1532", "equal", "female=25,male=25"),
    ("female=2505,male=1532", "proportional", "female=31,male=19"),
    ("female=275,male=213", "equal", "female=25,male=25"),
    ("female=275,male=213", "proportional", "female=28,male=22"),
    ("pro-rep=1309,pro-dem=658,neutral=153", "equal", "neutral=16,pro-dem=17,pro-rep=17"),
    ("pro-rep=1309,pro-dem=658,neutral=153", "proportional", "neutral=4,pro-dem=15,pro-rep=31"),
]


@pytest.mark.criterion(1, "quota rows from census alone")
@pytest.mark.parametrize("census,notion,expected", QUOTA_ROWS)
def test_quota_reproduction(capsys, census, notion, expected):
    start = time.perf_counter()
    code = main(["quota", "--notion", notion, "-k", "50", "--census", census])
    elapsed = time.perf_counter() - start
    assert code == 0
    assert capsys.readouterr().out.strip() == expected
    assert elapsed < 1.0


# --------------------------------------------------------------------- 2
# marks: * below equal share, + below proportional share, # adverse impact
CLARITIN = {"female": 2505, "male": 1532}
US = {"rep": 1309, "dem": 658, "neu": 153}
METOO = {"female": 275, "male": 213}
BASELINE_ROWS = [
    (CLARITIN, "ClusterRank", {"female": (33, ""), "male": (17, "+*")}),
    (CLARITIN, "DSDR", {"female": (31, ""), "male": (19, "*")}),
    (CLARITIN, "LexRank", {"female": (34, ""), "male": (16, "#+*")}),
    (CLARITIN, "LSA", {"female": (35, ""), "male": (15, "#+*")}),
    (CLARITIN, "LUHN", {"female": (34, ""), "male": (16, "#+*")}),
    (CLARITIN, "SumBasic", {"female": (27, "#+"), "male": (23, "*")}),
    (CLARITIN, "SummaRNN", {"female": (33, ""), "male": (17, "+*")}),
    (CLARITIN, "SummaCNN", {"female": (30, "+"), "male": (20, "*")}),
    (US, "ClusterRank", {"rep": (32, ""), "dem": (15, "*"), "neu": (3, "*")}),
    (US, "DSDR", {"rep": (28, "#+"), "dem": (19, ""), "neu": (3, "#*")}),
    (US, "LexRank", {"rep": (27, "#+"), "dem": (20, ""), "neu": (3, "#*")}),
    (US, "LSA", {"rep": (24, "#+"), "dem": (20, "#"), "neu": (6, "*")}),
    (US, "LUHN", {"rep": (34, ""), "dem": (13, "#+*"), "neu": (3, "#*")}),
    (US, "SumBasic", {"rep": (27, "#+"), "dem": (23, ""), "neu": (0, "#+*")}),
    (US, "SummaRNN", {"rep": (34, ""), "dem": (15, "*"), "neu": (1, "#+*")}),
    (US, "SummaCNN", {"rep": (32, ""), "dem": (17, ""), "neu": (1, "#+*")}),
    (METOO, "ClusterRank", {"female": (24, "#+*"), "male": (26, "")}),
    (METOO, "DSDR", {"female": (32, ""), "male": (18, "#+*")}),
    (METOO, "LexRank", {"female": (34, ""), "male": (16, "#+*")}),
    (METOO, "LSA", {"female": (20, "#+*"), "male": (30, "")}),
    (METOO, "LUHN", {"female": (22, "#+*"), "male": (28, "")}),
    (METOO, "SumBasic", {"female": (27, "+"), "male": (23, "*")}),
    (METOO, "SummaRNN", {"female": (23, "#+*"), "male": (27, "")}),
    (METOO, "SummaCNN", {"female": (23, "#+*"), "male": (27, "")}),
]
_MARK = {"under_equal": "*", "under_proportional": "+", "adverse_impact": "#"}


@pytest.mark.criterion(2, "audit flags on baseline summaries")
@pytest.mark.parametrize("census,name,row", BASELINE_ROWS,
                         ids=[f"{len(c)}g-{n}" for c, n, _ in BASELINE_ROWS])
def test_adverse_impact_flags(census, name, row):
    flags = adverse_impact_audit({g: c for g, (c, _) in row.items()}, census)
    for g, (_, marks) in row.items():
        got = {_MARK[f] for f in flags[g] if f in _MARK}
        assert got == set(marks), f"{name} {g}: expected {marks!r}, got {sorted(got)}"


# --------------------------------------------------------------------- 3
@pytest.mark.criterion(3, "monotone, submodular, incremental == scratch")
def test_objective_properties_on_random_corpora():
    rng = np.random.default_rng(3)
    corpora = 0
    worst = {"mono": 0.0, "sub": 0.0, "incr": 0.0}
    while corpora < 1000:
        n = int(rng.integers(2, 31))
        corpus = random_corpus(rng, n, groups=("a", "b", "c"))
        model = build_model(corpus, clusters=int(rng.integers(1, n + 1)), seed=int(rng.integers(1 << 31)))
        cfg = ObjectiveConfig(float(rng.uniform(0, 2)), float(rng.uniform(0.01, 2)))
        F = lambda S: objective_value(S, model, cfg)
        for _ in range(4):
            perm = [int(x) for x in rng.permutation(n)]
            b = int(rng.integers(0, n))
            a = int(rng.integers(0, b + 1))
            A, B, e = perm[:a], perm[:b], perm[b] if b < n else None
            worst["mono"] = max(worst["mono"], F(A) - F(B))
            if e is not None:
                gain_a = F(A + [e]) - F(A)
                gain_b = F(B + [e]) - F(B)
                worst["sub"] = max(worst["sub"], gain_b - gain_a)
        state = SummaryState(model, cfg)
        for z in (int(x) for x in rng.permutation(n)):
            before = F(state.selected)
            g = state.gain(z)
            state.add(z)
            worst["incr"] = max(worst["incr"], abs(F(state.selected) - before - g),
                                abs(state.value - F(state.selected)))
        corpora += 1
    assert corpora >= 1000
    assert worst["mono"] <= 1e-9
    assert worst["sub"] <= 1e-9
    assert worst["incr"] <= 1e-9


# --------------------------------------------------------------------- 4
def _approx_instance(rng, i):
    n = int(rng.integers(2, 13))
    t = int(rng.integers(1, 4))
    if i % 2:
        model = random_model(rng, n)
        labels = [f"g{int(x)}" for x in rng.integers(0, t, size=n)]
    else:
        corpus = random_corpus(rng, n, groups=tuple(f"g{j}" for j in range(t)))
        model = build_model(corpus, clusters=int(rng.integers(1, n + 1)))
        labels = corpus.labels()
    census = {g: labels.count(g) for g in set(labels)}
    quotas = {g: int(rng.integers(0, c + 1)) for g, c in census.items()}
    return model, MatroidOracle(labels, quotas), sum(quotas.values())


@pytest.mark.criterion(4, "greedy >= half the exhaustive optimum")
def test_approximation_bound():
    rng = np.random.default_rng(4)
    cfg = ObjectiveConfig()
    start = time.perf_counter()
    ratios = []
    for i in range(240):
        model, oracle, k = _approx_instance(rng, i)
        res = fairsumm(model, cfg, oracle)
        _, opt = brute_force_optimum(model, cfg, oracle, k)
        assert oracle.independent(res.selected)
        assert res.value <= opt + 1e-9
        if opt > 0:
            ratios.append(res.value / opt)
    elapsed = time.perf_counter() - start
    assert len(ratios) >= 200  # instances with a nonempty optimum
    assert min(ratios) >= 0.5
    assert elapsed < 60.0


# --------------------------------------------------------------------- 5
def _laws_hold(oracle, n):
    masks = np.arange(1 << n)
    members = [[i for i in range(n) if m >> i & 1] for m in range(1 << n)]
    indep = np.array([oracle.independent(s) for s in members])
    pop = np.array([len(s) for s in members])
    assert indep[0]
    for i in range(n):
        has = (masks >> i) & 1 == 1
        # removing any member of an independent set keeps it independent
        assert not (indep & has & ~indep[masks ^ (1 << i)]).any()
    family = masks[indep]
    for X in family:
        ext = 0
        for e in range(n):
            if not X >> e & 1 and indep[X | (1 << e)]:
                ext |= 1 << e
        larger = family[pop[family] > pop[X]]
        # every larger independent Y must offer some e in Y - X that extends X
        assert not ((larger & ~X & ext) == 0).any()


@pytest.mark.criterion(5, "matroid downward closure and exchange")
@pytest.mark.parametrize("groups", [2, 3])
def test_matroid_laws_exhaustive(groups):
    rng = np.random.default_rng(50 + groups)
    for n in range(1, 11):
        for _ in range(3 if n < 10 else 6):
            labels = [f"g{int(x)}" for x in rng.integers(0, groups, size=n)]
            quotas = {f"g{j}": int(rng.integers(0, 5)) for j in range(groups)}
            _laws_hold(MatroidOracle(labels, quotas), n)


# --------------------------------------------------------------------- 6
def _tau_oracle(k, p, alpha):
    p, alpha = Fraction(p), Fraction(alpha)
    out = []
    for i in range(1, k + 1):
        m, cdf = 0, (1 - p) ** i
        while not cdf > alpha:
            m += 1
            cdf += math.comb(i, m) * p**m * (1 - p) ** (i - m)
        out.append(m)
    return tuple(out)


@pytest.mark.criterion(6, "ranked group fairness re-ranking")
def test_fair_ranking_table_matches_oracle():
    rng = np.random.default_rng(6)
    grid = [(0.5, 0.5), (0.5, 0.1), (0.25, 0.5), (0.75, 0.25), (0.5, 0.05)]
    grid += [(float(rng.uniform(0.02, 0.98)), float(rng.uniform(0.01, 0.99))) for _ in range(60)]
    for p, alpha in grid:
        assert build_fairness_table(60, p, alpha).tau == _tau_oracle(60, p, alpha)
    assert build_fairness_table(50, 0.5, 0.5).at(50) == 25


@pytest.mark.criterion(6, "ranked group fairness re-ranking")
def test_fair_ranking_prefixes():
    rng = np.random.default_rng(66)
    feasible = 0
    for trial in range(400):
        na, nb = int(rng.integers(1, 40)), int(rng.integers(1, 40))
        us = [TextUnit(f"a{i}", "", (), "A", float(rng.random())) for i in range(na)]
        us += [TextUnit(f"b{i}", "", (), "B", float(rng.random())) for i in range(nb)]
        cfg = FairRankConfig(int(rng.integers(1, na + nb + 1)), float(rng.uniform(0.05, 0.95)),
                             float(rng.uniform(0.01, 0.99)))
        try:
            res = refasumm(us, cfg)
        except InfeasibleError:
            continue
        feasible += 1
        assert all(h >= t for h, t in zip(res.protected_prefix_counts(), res.table.tau))
    assert feasible >= 200


@pytest.mark.criterion(6, "ranked group fairness re-ranking")
def test_fair_ranking_tiny_alpha_is_top_k():
    rng = np.random.default_rng(666)
    for _ in range(200):
        us = [TextUnit(f"u{i}", "", (), "AB"[int(rng.integers(0, 2))], float(rng.random()))
              for i in range(int(rng.integers(2, 40)))]
        if len({u.group for u in us}) < 2:
            continue
        # (1 - p)^k stays above 1e-9 in this range, so the table is all zeros
        k = int(rng.integers(1, min(20, len(us)) + 1))
        res = refasumm(us, FairRankConfig(k, float(rng.uniform(0.05, 0.6)), 1e-9))
        assert set(res.table.tau) == {0}
        assert res.ids == [u.id for u in top_k(us, k)]


# --------------------------------------------------------------------- 7
F = Fraction
ROUGE_FIXTURES = [
    ("a b c", "a b d", 1, F(2, 3), F(2, 3)),
    ("a b c", "a b d", 2, F(1, 2), F(1, 2)),
    ("a a a", "a", 1, F(1, 3), F(1, 1)),
    ("a b", "a b a b", 1, F(1, 1), F(1, 2)),
    ("a b a b", "a b", 2, F(1, 3), F(1, 1)),
    ("x y z", "p q", 1, F(0), F(0)),
    ("", "a b", 1, F(0), F(0)),
    ("a", "a", 2, F(0), F(0)),
    ("the cat sat on the mat", "the cat lay on the mat", 1, F(5, 6), F(5, 6)),
    ("the cat sat on the mat", "the cat lay on the mat", 2, F(3, 5), F(3, 5)),
    ("a b c d e", "a c", 1, F(2, 5), F(1, 1)),
    ("b a", "a b", 2, F(0), F(0)),
    ("b a", "a b", 1, F(1, 1), F(1, 1)),
    ("a b c a b", "c a b", 2, F(1, 2), F(1, 1)),
]


@pytest.mark.criterion(7, "ROUGE matches hand counts exactly")
@pytest.mark.parametrize("cand,ref,n,p,r", ROUGE_FIXTURES)
def test_rouge_fixtures(cand, ref, n, p, r):
    s = rouge_n(cand.split(), ref.split(), n)
    f1 = 2 * p * r / (p + r) if p + r else F(0)
    assert (s.precision, s.recall, s.f1) == (float(p), float(r), float(f1))


# --------------------------------------------------------------------- 8
@pytest.mark.criterion(8, "joint summary avoids the redundancy of per-group summaries")
def test_redundancy_regression():
    corpus = duplicated_opinion_corpus()
    model = build_model(corpus)
    cfg = ObjectiveConfig()
    spec = FairnessSpec("custom", 4, {"A": 2, "B": 2})
    joint = fairsumm(model, cfg, MatroidOracle(corpus.labels(), spec.quotas))
    split = classwise_summ(corpus, spec, cfg, model=model)
    close = lambda S: [(i, j) for i, j in itertools.combinations(S, 2) if model.sim[i, j] > 0.9]
    assert joint.value > split.value
    assert len(close(split.selected)) >= 1  # at least two units in a near-duplicate pair
    assert close(joint.selected) == []
    assert joint.group_counts == split.group_counts == {"A": 2, "B": 2}


# --------------------------------------------------------------------- 9
@pytest.mark.criterion(9, "label noise pushes counts toward the majority, ROUGE holds")
def test_noise_direction():
    corpus = two_group_corpus({"female": 275, "male": 213}, seed=7)
    refs = sampled_references(corpus, count=3, size=20, seed=11)
    spec = FairnessSpec.build("equal", 50, corpus.census)
    rows = run_noise_experiment(corpus, spec, config=NoiseExperimentConfig((0.0, 0.1, 0.2, 0.3), 100, 42),
                                references=refs)
    majority = [r["mean_counts"]["female"] for r in rows]
    print("mean majority counts by rate:", majority)
    assert majority[0] == 25.0
    assert all(a < b for a, b in zip(majority, majority[1:]))
    base = rows[0]["mean_rouge"]
    for row in rows[1:]:
        for variant, scores in row["mean_rouge"].items():
            for field in ("recall", "f1"):
                drop = (base[variant][field] - scores[field]) / base[variant][field]
                assert drop < 0.10, (row["rate"], variant, field, drop)


# --------------------------------------------------------------------- 10
@pytest.mark.criterion(10, "identical flags give byte-identical reports")
def test_cli_determinism(tmp_path):
    path = tmp_path / "corpus.jsonl"
    two_group_corpus({"female": 60, "male": 40}, seed=10).save(path)
    outputs = []
    for hash_seed in ("0", "1", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=hash_seed)
        out = subprocess.run(
            [sys.executable, "-m", "fairsumm.cli", "summarize", str(path), "--algo", "fairsumm",
             "--notion", "proportional", "-k", "12", "--seed", "3"],
            capture_output=True, env=env, check=True,
        ).stdout
        outputs.append(out)
    assert outputs[0] == outputs[1] == outputs[2]
    report = json.loads(outputs[0])
    assert sum(report["group_counts"].values()) == len(report["selected"]) == 12


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
