"""Small synthetic corpora for experiments, demos and regression tests."""

from __future__ import annotations

from typing import Mapping, Sequence

from .corpus import Corpus, corpus_from_records
from .rng import SplitMix64

VOCABULARY = tuple(
    "river mountain market doctor vaccine election budget garden violin rocket harbor "
    "planet coffee winter soccer museum bridge pepper silver tunnel forest castle canyon "
    "island protest court verdict victim story voice march campaign".split()
)


def random_text(rng: SplitMix64, vocabulary: Sequence[str], min_len: int = 3, max_len: int = 8) -> str:
    length = min_len + rng.randbelow(max_len - min_len + 1)
    return " ".join(vocabulary[rng.randbelow(len(vocabulary))] for _ in range(length))


def two_group_corpus(
    census: Mapping[str, int],
    seed: int = 7,
    vocabulary: Sequence[str] = VOCABULARY,
) -> Corpus:
    """Corpus with the given group sizes and random, distinct bag-of-words texts."""
    rng = SplitMix64(seed)
    records, seen = [], set()
    for group, count in census.items():
        made = 0
        while made < count:
            text = random_text(rng, vocabulary)
            if text in seen:
                continue
            seen.add(text)
            records.append({"id": f"{group}{made}", "text": text, "group": group})
            made += 1
    return corpus_from_records(records)


def sampled_references(corpus: Corpus, count: int = 3, size: int = 20, seed: int = 11) -> list[list[str]]:
    """Reference token streams, each the concatenation of ``size`` random units."""
    rng = SplitMix64(seed)
    refs = []
    for _ in range(count):
        picks = rng.sample_indices(len(corpus), min(size, len(corpus)))
        refs.append([t for i in sorted(picks) for t in corpus[i].tokens])
    return refs


def duplicated_opinion_corpus() -> Corpus:
    """Ten units where group A repeats one opinion three times.

    Inside group A the near-identical senate posts dominate coverage, so a
    per-group summarizer takes two of them. Across the whole corpus A's
    soccer posts resemble group B and cover more, so a joint summary skips
    the repeats.
    """
    a = [
        "senate budget vote tonight debate",
        "senate budget vote tonight debate again",
        "senate budget vote tonight debate live",
        "soccer final goal stadium crowd cheers",
        "soccer final penalty stadium referee whistle",
    ]
    b = [
        "soccer final goal crowd celebration",
        "stadium crowd cheers soccer penalty",
        "referee whistle penalty soccer final",
        "goal celebration stadium soccer fans",
        "soccer fans crowd final whistle",
    ]
    records = [{"id": f"a{i}", "text": t, "group": "A"} for i, t in enumerate(a)]
    records += [{"id": f"b{i}", "text": t, "group": "B"} for i, t in enumerate(b)]
    return corpus_from_records(records)
