"""Labeled text corpora: ingestion, preprocessing, deduplication, census."""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .errors import CorpusFormatError, ValidationError
from .porter import stem

UNKNOWN_GROUP = "__unknown__"

_TOKEN_RE = re.compile(r"[^\W_]+")
_WS_RE = re.compile(r"\s+")


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    text = resources.files("fairsumm").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


def load_stopwords(path) -> frozenset[str]:
    """Read a stopword file, one term per line."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip().lower() for line in fh if line.strip())


def _stem_fixed_point(word):
    # bounded so a pathological oscillation cannot hang
    for _ in range(8):
        nxt = stem(word)
        if nxt == word:
            break
        word = nxt
    return word


def preprocess(raw_text: str, stopword_list: Iterable[str] | None = None) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop stopwords, stem.

    Stemming is iterated to a fixed point and stems that land on a stopword
    are dropped as well, so that re-running on the joined output is a no-op.
    """
    stops = default_stopwords() if stopword_list is None else frozenset(stopword_list)
    out = []
    for word in _TOKEN_RE.findall(raw_text.lower()):
        if word in stops:
            continue
        s = _stem_fixed_point(word)
        if s in stops:
            continue
        out.append(s)
    return out


def normalize_text(raw_text: str) -> str:
    """Deduplication key: lowercase with whitespace runs collapsed."""
    return _WS_RE.sub(" ", raw_text.lower()).strip()


@dataclass(frozen=True)
class TextUnit:
    id: str
    raw_text: str
    tokens: tuple[str, ...]
    group: str
    external_score: float | None = None

    def to_record(self) -> dict:
        rec = {"id": self.id, "text": self.raw_text, "group": self.group}
        if self.external_score is not None:
            rec["score"] = self.external_score
        return rec


@dataclass(frozen=True)
class Corpus:
    """Immutable, indexed collection of text units with a group census.

    ``groups`` is sorted lexicographically; unit order is load order.
    """

    units: tuple[TextUnit, ...]
    groups: tuple[str, ...] = field(init=False)
    census: Mapping[str, int] = field(init=False)

    def __post_init__(self):
        units = tuple(self.units)
        if not units:
            raise ValidationError("corpus is empty")
        seen_ids, seen_text = set(), set()
        for u in units:
            if u.id in seen_ids:
                raise ValidationError(f"duplicate id {u.id!r}")
            seen_ids.add(u.id)
            key = normalize_text(u.raw_text)
            if key in seen_text:
                raise ValidationError(f"duplicate text for id {u.id!r}")
            seen_text.add(key)
        counts = Counter(u.group for u in units)
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "groups", tuple(sorted(counts)))
        object.__setattr__(self, "census", {g: counts[g] for g in sorted(counts)})
        object.__setattr__(self, "_index", {u.id: i for i, u in enumerate(units)})

    def __len__(self):
        return len(self.units)

    def __iter__(self):
        return iter(self.units)

    def __getitem__(self, i):
        return self.units[i]

    @property
    def ids(self) -> list[str]:
        return [u.id for u in self.units]

    def index_of(self, unit_id: str) -> int:
        try:
            return self._index[unit_id]
        except KeyError:
            raise ValidationError(f"unknown unit id {unit_id!r}") from None

    def group_of(self, i: int) -> str:
        return self.units[i].group

    def labels(self) -> list[str]:
        return [u.group for u in self.units]

    def restrict(self, group: str) -> "Corpus":
        """Sub-corpus holding only the units of ``group``, order preserved."""
        return Corpus(tuple(u for u in self.units if u.group == group))

    def with_groups(self, groups: Iterable[str]) -> "Corpus":
        """Same units relabeled (used by the label-noise experiment)."""
        groups = list(groups)
        if len(groups) != len(self.units):
            raise ValidationError("need one label per unit")
        return Corpus(tuple(
            TextUnit(u.id, u.raw_text, u.tokens, g, u.external_score)
            for u, g in zip(self.units, groups)
        ))

    def with_scores(self, scores: Mapping[str, float]) -> "Corpus":
        missing = [u.id for u in self.units if u.id not in scores]
        if missing:
            raise ValidationError(f"no score for ids {missing[:5]}")
        return Corpus(tuple(
            TextUnit(u.id, u.raw_text, u.tokens, u.group, float(scores[u.id]))
            for u in self.units
        ))

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps(u.to_record(), ensure_ascii=False) + "\n" for u in self.units
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")


def corpus_from_records(
    records: Iterable[Mapping],
    stopword_list: Iterable[str] | None = None,
    allow_unlabeled: bool = False,
) -> Corpus:
    """Build a corpus from ``{"id", "text", "group", "score"?}`` mappings.

    Exact duplicate texts (after case folding and whitespace collapse) are
    dropped, keeping the first occurrence.
    """
    return _build(enumerate(records, start=1), stopword_list, allow_unlabeled)


def _build(numbered_records, stopword_list, allow_unlabeled):
    stops = default_stopwords() if stopword_list is None else frozenset(stopword_list)
    units, seen_ids, seen_text = [], set(), set()
    for lineno, rec in numbered_records:
        uid, text, group, score = _validate_record(rec, lineno, allow_unlabeled)
        if uid in seen_ids:
            raise ValidationError(f"line {lineno}: duplicate id {uid!r}")
        seen_ids.add(uid)
        key = normalize_text(text)
        if key in seen_text:
            continue
        seen_text.add(key)
        units.append(TextUnit(uid, text, tuple(preprocess(text, stops)), group, score))
    if not units:
        raise ValidationError("corpus is empty")
    return Corpus(tuple(units))


def _validate_record(rec, lineno, allow_unlabeled):
    if not isinstance(rec, Mapping):
        raise CorpusFormatError("record is not a JSON object", lineno)
    for key in ("id", "text"):
        if key not in rec:
            raise CorpusFormatError(f"missing field {key!r}", lineno)
    uid, text = rec["id"], rec["text"]
    if not isinstance(uid, (str, int)) or isinstance(uid, bool):
        raise CorpusFormatError("field 'id' must be a string", lineno)
    if not isinstance(text, str):
        raise CorpusFormatError("field 'text' must be a string", lineno)
    group = rec.get("group")
    if group is None or group == "":
        if not allow_unlabeled:
            raise CorpusFormatError("missing group label", lineno)
        group = UNKNOWN_GROUP
    elif not isinstance(group, str):
        raise CorpusFormatError("field 'group' must be a string", lineno)
    score = rec.get("score")
    if score is not None:
        if not isinstance(score, (int, float)) or isinstance(score, bool):
            raise CorpusFormatError("field 'score' must be a number", lineno)
        if score < 0:
            raise CorpusFormatError("field 'score' must be nonnegative", lineno)
        score = float(score)
    return str(uid), text, group, score


def _read_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON ({exc.msg})", lineno) from None


def load_corpus(
    path,
    format: str = "jsonl",
    stopword_list: Iterable[str] | None = None,
    allow_unlabeled: bool = False,
) -> Corpus:
    """Load a JSONL corpus file."""
    if format != "jsonl":
        raise ValidationError(f"unsupported corpus format {format!r}")
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"no such file: {path}")
    rows = list(_read_jsonl(path))
    if not rows:
        raise ValidationError(f"{path} holds no records")
    return _build(rows, stopword_list, allow_unlabeled)


def load_scores(path) -> dict[str, float]:
    """Read an ``id<TAB>score`` file."""
    scores = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise CorpusFormatError("expected 'id<TAB>score'", lineno)
            try:
                value = float(parts[1])
            except ValueError:
                raise CorpusFormatError(f"bad score {parts[1]!r}", lineno) from None
            if value < 0:
                raise CorpusFormatError("score must be nonnegative", lineno)
            scores[parts[0]] = value
    return scores
