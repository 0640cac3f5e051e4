"""Unconstrained, fair and per-group summaries of a skewed synthetic corpus.

Run: python3 demos/fair_vs_unconstrained.py
"""
from fairsumm import build_model, summarize
from fairsumm.harness import render_table
from fairsumm.synthetic import sampled_references, two_group_corpus

corpus = two_group_corpus({"majority": 300, "minority": 100}, seed=3)
model = build_model(corpus)  # shared so every run sees the same similarities
refs = sampled_references(corpus, count=3, size=20)
print(f"{len(corpus)} units, census {corpus.census}, {model.K} clusters\n")

for algo, notion in [("dicosumm", "equal"), ("fairsumm", "equal"),
                     ("fairsumm", "proportional"), ("classwise", "equal")]:
    report = summarize(corpus, algo, k=20, notion=notion, model=model, references=refs)
    print(f"[{algo} / {notion}]")
    print(render_table(report))
