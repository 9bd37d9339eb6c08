from functools import cache
from itertools import product
import random

import pytest

from scrawl.metrics import average_ranks, cer, evaluate_pairs, levenshtein, spearman


@cache
def naive_distance(a: str, b: str) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    if a[0] == b[0]:
        return naive_distance(a[1:], b[1:])
    return 1 + min(
        naive_distance(a[1:], b),
        naive_distance(a, b[1:]),
        naive_distance(a[1:], b[1:]),
    )


@pytest.mark.parametrize(
    "a, b, expected",
    [("abc", "abc", 0), ("", "abc", 3), ("abc", "", 3), ("kitten", "sitting", 3), ("ä", "a", 1)],
)
def test_levenshtein_examples(a: str, b: str, expected: int):
    assert levenshtein(a, b) == expected


def test_levenshtein_matches_the_recursion_exhaustively():
    strings = ["".join(p) for n in range(7) for p in product("abc", repeat=n)]
    rng = random.Random(0)
    # Every pair over lengths <= 3, a random sample of the longer ones.
    short = [s for s in strings if len(s) <= 3]
    pairs = list(product(short, short))
    pairs += [(rng.choice(strings), rng.choice(strings)) for _ in range(3000)]
    for a, b in pairs:
        assert levenshtein(a, b) == naive_distance(a, b), (a, b)


def test_levenshtein_properties():
    rng = random.Random(1)
    for _ in range(200):
        a = "".join(rng.choices("abcd", k=rng.randint(0, 8)))
        b = "".join(rng.choices("abcd", k=rng.randint(0, 8)))
        d = levenshtein(a, b)
        assert d == levenshtein(b, a)
        assert abs(len(a) - len(b)) <= d <= max(len(a), len(b))
        assert (d == 0) == (a == b)


@pytest.mark.parametrize(
    "refs, hyps, expected",
    [
        (["abc", "de"], ["abc", "de"], 0.0),
        (["abcd"], ["abed"], 0.25),
        (["ab", "cd"], ["ab", "xy"], 0.5),
        (["", "abcd"], ["xx", "abcd"], 0.5),
    ],
)
def test_cer_examples(refs: list[str], hyps: list[str], expected: float):
    assert cer(refs, hyps) == expected


def test_cer_is_pooled_on_random_pairs():
    rng = random.Random(2)
    refs = ["".join(rng.choices("abcdef", k=rng.randint(1, 12))) for _ in range(50)]
    hyps = ["".join(rng.choices("abcdef", k=rng.randint(0, 12))) for _ in range(50)]
    distance = sum(naive_distance(r, h) for r, h in zip(refs, hyps))
    assert cer(refs, hyps) == distance / sum(len(r) for r in refs)
    order = list(range(50))
    rng.shuffle(order)
    assert cer([refs[i] for i in order], [hyps[i] for i in order]) == cer(refs, hyps)


def test_cer_errors():
    with pytest.raises(ValueError, match="all references are empty"):
        cer(["", ""], ["a", ""])
    with pytest.raises(ValueError, match="hypotheses"):
        cer(["a"], [])


def test_evaluate_pairs():
    report = evaluate_pairs(["x", "y"], ["abcd", "ab"], ["abed", "ab"])
    assert len(report) == 2
    assert report.cer == pytest.approx(1 / 6)
    assert report.rows() == [("x", "abcd", "abed", 1), ("y", "ab", "ab", 0)]
    assert [s.cer for s in report] == [0.25, 0.0]


def test_evaluate_pairs_checks_ids():
    with pytest.raises(ValueError, match="ids"):
        evaluate_pairs(["x"], ["a", "b"], ["a", "b"])


def test_average_ranks_share_ties():
    assert average_ranks([10, 20, 20, 5]).tolist() == [2.0, 3.5, 3.5, 1.0]


@pytest.mark.parametrize(
    "x, y, expected",
    [
        ([1, 2, 3, 4], [10, 20, 30, 40], 1.0),
        ([1, 2, 3, 4], [4, 3, 2, 1], -1.0),
        ([1, 2, 3, 4], [1, 4, 9, 16], 1.0),
        ([1, 2, 3], [5, 5, 5], 0.0),
        ([1, 2, 3, 4, 5], [2, 1, 4, 3, 5], 0.8),
    ],
)
def test_spearman(x: list[float], y: list[float], expected: float):
    assert spearman(x, y) == pytest.approx(expected)


def test_spearman_errors():
    with pytest.raises(ValueError, match="at least two"):
        spearman([1], [1])
    with pytest.raises(ValueError, match="correlate"):
        spearman([1, 2], [1])


@pytest.mark.slow
def test_levenshtein_matches_the_recursion_on_all_pairs():
    strings = ["".join(p) for n in range(7) for p in product("abc", repeat=n)]
    for a in strings:
        for b in strings:
            assert levenshtein(a, b) == naive_distance(a, b), (a, b)
