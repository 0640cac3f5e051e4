"""ROUGE-1 / ROUGE-2 precision, recall and F1 with multi-reference averaging."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import preprocess
from .errors import ValidationError

VARIANTS = {1: "rouge1", 2: "rouge2"}


@dataclass(frozen=True)
class RougeScore:
    variant: str
    precision: float
    recall: float
    f1: float

    def as_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> RougeScore:
    """Clipped n-gram overlap; an empty side scores zero."""
    if n not in VARIANTS:
        raise ValidationError(f"unsupported ROUGE order n={n}")
    cand, ref = ngrams(list(candidate), n), ngrams(list(reference), n)
    match = sum(min(c, ref[g]) for g, c in cand.items())
    total_c, total_r = sum(cand.values()), sum(ref.values())
    p = match / total_c if total_c else 0.0
    r = match / total_r if total_r else 0.0
    # 2PR/(P+R) simplifies to 2m/(c+r): one rounding instead of four
    f1 = 2 * match / (total_c + total_r) if match else 0.0
    return RougeScore(VARIANTS[n], p, r, f1)


def rouge_multi(
    candidate: Sequence[str],
    references: Sequence[Sequence[str]],
    orders: Iterable[int] = (1, 2),
) -> dict[str, RougeScore]:
    """Score against each reference, then average P, R and F1 separately."""
    if not references:
        raise ValidationError("need at least one reference summary")
    out = {}
    for n in orders:
        scores = [rouge_n(candidate, ref, n) for ref in references]
        m = len(scores)
        out[VARIANTS[n]] = RougeScore(
            VARIANTS[n],
            sum(s.precision for s in scores) / m,
            sum(s.recall for s in scores) / m,
            sum(s.f1 for s in scores) / m,
        )
    return out


def summary_tokens(units) -> list[str]:
    """Concatenated tokens of a sequence of text units, in order."""
    return [t for u in units for t in u.tokens]


def load_reference(path, stopword_list=None) -> list[str]:
    """One reference summary: JSONL of ``{"text": ...}`` or plain lines."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"no such file: {path}")
    tokens: list[str] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        text = line
        if line.startswith("{"):
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                rec = None
            if isinstance(rec, dict):
                if not isinstance(rec.get("text"), str):
                    raise ValidationError(f"{path} line {lineno}: missing 'text'")
                text = rec["text"]
        tokens.extend(preprocess(text, stopword_list))
    return tokens
