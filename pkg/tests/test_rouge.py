from collections import Counter

import pytest
from hypothesis import given, strategies as st

from fairsumm.corpus import TextUnit
from fairsumm.errors import ValidationError
from fairsumm.rouge import load_reference, rouge_multi, rouge_n, summary_tokens

tokens = st.lists(st.sampled_from("abcde"), max_size=12)


def test_worked_examples():
    s1 = rouge_n("a b c".split(), "a b d".split(), 1)
    assert (s1.precision, s1.recall, s1.f1) == pytest.approx((2 / 3, 2 / 3, 2 / 3))
    s2 = rouge_n("a b c".split(), "a b d".split(), 2)
    assert (s2.precision, s2.recall) == (0.5, 0.5)


def test_identity_and_empty():
    s = rouge_n(list("abc"), list("abc"), 2)
    assert (s.precision, s.recall, s.f1) == (1.0, 1.0, 1.0)
    e = rouge_n([], list("abc"), 1)
    assert (e.precision, e.recall, e.f1) == (0.0, 0.0, 0.0)
    with pytest.raises(ValidationError):
        rouge_n(["a"], ["a"], 3)


def test_multi_reference():
    c = list("abc")
    same = rouge_multi(c, [list("abd"), list("abd")])
    single = rouge_multi(c, [list("abd")])
    assert same == single
    # recall 2/5 and 3/5 against two references
    two = rouge_multi(list("ab") + ["c"], [list("abxyz"), list("abcxy")], orders=(1,))["rouge1"]
    assert two.recall == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        rouge_multi(c, [])


def test_three_reference_hand_mean():
    cand = "x y z x".split()
    refs = ["x y".split(), "z z z".split(), "w".split()]
    # per-reference (P, R): (2/4, 2/2), (1/4, 1/3), (0, 0)
    f = [2 * 0.5 * 1 / 1.5, 2 * 0.25 * (1 / 3) / (0.25 + 1 / 3), 0.0]
    got = rouge_multi(cand, refs, orders=(1,))["rouge1"]
    assert got.precision == pytest.approx((0.5 + 0.25 + 0) / 3)
    assert got.recall == pytest.approx((1 + 1 / 3 + 0) / 3)
    assert got.f1 == pytest.approx(sum(f) / 3)


@given(tokens, tokens, st.sampled_from([1, 2]))
def test_swap_symmetry_and_range(a, b, n):
    s, t = rouge_n(a, b, n), rouge_n(b, a, n)
    assert (s.precision, s.recall) == (t.recall, t.precision)
    for x in (s.precision, s.recall, s.f1):
        assert 0.0 <= x <= 1.0
    assert s.f1 <= max(s.precision, s.recall) + 1e-15


@given(tokens, tokens, st.integers(1, 4))
def test_clipping(cand, ref, extra):
    # once a token is used up in the reference, more copies cannot add matches
    for tok in set(cand):
        if Counter(cand)[tok] >= Counter(ref)[tok]:
            more = rouge_n(cand + [tok] * extra, ref, 1)
            assert more.recall == rouge_n(cand, ref, 1).recall


def test_reference_loading(tmp_path):
    j = tmp_path / "r.jsonl"
    j.write_text('{"text": "Rockets launching"}\n\n{"text": "harbor"}\n')
    assert load_reference(j) == ["rocket", "launch", "harbor"]
    p = tmp_path / "r.txt"
    p.write_text("Rockets launching\nharbor\n")
    assert load_reference(p) == ["rocket", "launch", "harbor"]
    bad = tmp_path / "b.jsonl"
    bad.write_text('{"title": "x"}\n')
    with pytest.raises(ValidationError):
        load_reference(bad)
    with pytest.raises(ValidationError):
        load_reference(tmp_path / "missing.txt")


def test_summary_tokens_concatenates():
    us = [TextUnit("1", "", ("a", "b"), "g"), TextUnit("2", "", ("c",), "g")]
    assert summary_tokens(us) == ["a", "b", "c"]
