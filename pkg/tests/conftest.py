import numpy as np
import pytest

from fairsumm.corpus import corpus_from_records
from fairsumm.simsem import SimilarityModel

WORDS = [
    "river", "mountain", "market", "doctor", "vaccine", "election", "budget", "garden",
    "violin", "rocket", "harbor", "planet", "coffee", "winter", "soccer", "museum",
    "bridge", "pepper", "silver", "tunnel", "forest", "castle", "canyon", "island",
]


def random_records(rng, n, groups=("a", "b"), words=WORDS, min_len=2, max_len=7):
    """n records with unique texts drawn from a small vocabulary."""
    seen, out = set(), []
    while len(out) < n:
        length = int(rng.integers(min_len, max_len + 1))
        text = " ".join(rng.choice(words, size=length))
        if text in seen:
            continue
        seen.add(text)
        out.append({"id": f"u{len(out)}", "text": text, "group": str(rng.choice(groups))})
    return out


def random_corpus(rng, n, groups=("a", "b"), **kw):
    return corpus_from_records(random_records(rng, n, groups, **kw))


def random_model(rng, n, K=None):
    """Random symmetric [0, 1] similarity with unit diagonal and random clusters."""
    a = rng.random((n, n))
    sim = np.triu(a, 1)
    sim = sim + sim.T
    np.fill_diagonal(sim, 1.0)
    K = K or int(rng.integers(1, n + 1))
    parts = np.concatenate([np.arange(K), rng.integers(0, K, size=n - K)])
    rng.shuffle(parts)
    # renumber so ids are contiguous 0..K-1
    _, parts = np.unique(parts, return_inverse=True)
    return SimilarityModel.from_matrix(sim, parts)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def write_jsonl(path, records):
    import json
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    return path


# one PASS/FAIL line per acceptance criterion at the end of the run
_CRITERIA: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and not report.failed):
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, [title, True])
    entry[1] = entry[1] and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}")
