"""Why a joint fair summary beats stitching per-group summaries together.

Group A repeats one opinion three times. Summarizing A on its own rewards
those repeats; the joint solver sees that A's other posts also speak for B.

Run: python3 demos/redundancy.py
"""
import itertools

from fairsumm import build_model, summarize
from fairsumm.synthetic import duplicated_opinion_corpus

corpus = duplicated_opinion_corpus()
model = build_model(corpus)
for u in corpus:
    print(f"{u.id}  {u.group}  {u.raw_text}")

for algo in ("fairsumm", "classwise"):
    rep = summarize(corpus, algo, k=4, notion="equal", model=model)
    idx = [corpus.index_of(i) for i in rep.selected]
    worst = max(model.sim[a, b] for a, b in itertools.combinations(idx, 2))
    print(f"\n{algo}: {rep.selected}  objective {rep.objective:.3f}  max pair similarity {worst:.2f}")
