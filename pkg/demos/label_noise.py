"""How fair summaries drift when some group labels are wrong.

Labels are flipped at random, quotas come from the noisy labels, and the
resulting summaries are counted with the true ones.

Run: python3 demos/label_noise.py
"""
from fairsumm import FairnessSpec, NoiseExperimentConfig, build_model, run_noise_experiment
from fairsumm.harness import render_noise_table
from fairsumm.synthetic import sampled_references, two_group_corpus

corpus = two_group_corpus({"a": 200, "b": 150}, seed=21)
spec = FairnessSpec.build("equal", 30, corpus.census)
rows = run_noise_experiment(
    corpus, spec,
    config=NoiseExperimentConfig((0.0, 0.1, 0.2, 0.3), trials=20, rng_seed=42),
    references=sampled_references(corpus),
    model=build_model(corpus),
)
print(render_noise_table(rows))
