"""Re-rank scored units so every prefix holds enough protected units.

Run: python3 demos/fair_reranking.py
"""
from fairsumm import FairRankConfig, build_fairness_table, refasumm
from fairsumm.refasumm import quality_delta_report, top_k
from fairsumm.rng import SplitMix64
from fairsumm.synthetic import sampled_references, two_group_corpus

corpus = two_group_corpus({"majority": 120, "minority": 40}, seed=5)

# skewed scores: minority units score lower on average
rng = SplitMix64(9)
scores = {u.id: rng.random() + (0.3 if u.group == "majority" else 0.0) for u in corpus}
corpus = corpus.with_scores(scores)

table = build_fairness_table(k=20, p=0.5, alpha_c=0.1)
print("minimum protected count per rank:", [table.at(i) for i in range(1, 21)])

plain = top_k(list(corpus), 20)
fair = refasumm(list(corpus), FairRankConfig(k=20, p=0.5, alpha_c=0.1, protected_group="minority"))
print("top-k minority count:", sum(u.group == "minority" for u in plain))
print("fair  minority count:", fair.protected_prefix_counts()[-1])
print("prefix counts:", fair.protected_prefix_counts())

refs = sampled_references(corpus)
report = quality_delta_report(plain, fair.units, refs)
print("ROUGE recall change, fair minus top-k:",
      {v: round(s["recall"], 4) for v, s in report["delta"].items()})
