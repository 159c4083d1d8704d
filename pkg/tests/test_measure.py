"""Bernoulli weights, address sampling, and the word-coverage filter."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tangentlab import (
    ProbVector,
    RandomSource,
    contains_all_words,
    cylinder_measure,
    sample_address,
)
from tangentlab.errors import AlphabetError, EnumerationCapError, ValidationError

UNIFORM6 = ProbVector.uniform(6)


def test_prob_vector_validation():
    with pytest.raises(ValidationError):
        ProbVector.of(["1/2", "1/3"])  # sums to 5/6
    with pytest.raises(ValidationError):
        ProbVector.of(["1/2", "1/2", "0"])
    with pytest.raises(ValidationError):
        ProbVector.of(["1"])
    # six copies of the binary float 1/6 are fine under the 1e-12 sum slack
    ProbVector.of([1.0 / 6.0] * 6)


def test_prob_vector_keeps_exact_values():
    p = ProbVector.of(["3/10", "1/10", "6/10"])
    assert p.values == (Fraction(3, 10), Fraction(1, 10), Fraction(3, 5))
    assert p[2] == Fraction(3, 5)
    assert len(p) == 3


def test_cylinder_measure_examples():
    assert cylinder_measure(UNIFORM6, b"") == 1
    assert cylinder_measure(UNIFORM6, bytes([1, 3])) == Fraction(1, 36)
    p = ProbVector.of(["3/10", "1/10", "1/10", "1/10", "2/10", "2/10"])
    assert cylinder_measure(p, bytes([2, 1])) == Fraction(3, 100)
    with pytest.raises(AlphabetError):
        cylinder_measure(p, bytes([7]))


@given(
    st.lists(st.integers(1, 6), max_size=8).map(bytes),
    st.lists(st.integers(1, 6), max_size=8).map(bytes),
)
def test_cylinder_measure_multiplicative(u, v):
    assert cylinder_measure(UNIFORM6, u + v) == cylinder_measure(
        UNIFORM6, u
    ) * cylinder_measure(UNIFORM6, v)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_cylinder_measures_sum_to_one(n):
    p = ProbVector.of(["3/10", "1/10", "1/10", "1/10", "2/10", "2/10"])
    total = Fraction(0)
    words = [b""]
    for _ in range(n):
        words = [u + bytes([j]) for u in words for j in range(1, 7)]
    for u in words:
        total += cylinder_measure(p, u)
    assert total == 1


def test_sample_address_deterministic():
    a = sample_address(UNIFORM6, 200, RandomSource(9))
    b = sample_address(UNIFORM6, 200, RandomSource(9))
    c = sample_address(UNIFORM6, 200, RandomSource(10))
    assert a == b
    assert a != c
    assert len(a) == 200
    assert set(a) <= set(range(1, 7))


def test_substreams_are_order_independent():
    root = RandomSource(3)
    forward = [sample_address(UNIFORM6, 50, root.substream(i)) for i in range(6)]
    backward = [
        sample_address(UNIFORM6, 50, root.substream(i)) for i in reversed(range(6))
    ]
    assert forward == backward[::-1]
    assert len(set(forward)) == 6


def test_sample_frequencies_match_weights():
    p = ProbVector.of(["1/2", "1/4", "1/4"])
    n = 100_000
    u = sample_address(p, n, RandomSource(12345))
    counts = np.bincount(np.frombuffer(u, dtype=np.uint8), minlength=4)[1:]
    for j, pj in enumerate([0.5, 0.25, 0.25]):
        se = math.sqrt(pj * (1 - pj) / n)
        assert abs(counts[j] / n - pj) < 3 * se


def test_lopsided_weights_give_long_runs():
    p = ProbVector.of(["9998/10000", "1/10000", "1/10000"])
    u = sample_address(p, 2000, RandomSource(7))
    runs = max(len(run) for run in u.split(bytes([2])) for run in run.split(bytes([3])))
    assert u.count(1) > 1900
    assert runs > 100


def test_contains_all_words_basics():
    assert contains_all_words(bytes([1, 2, 3, 4, 5, 6]), 1, 6)
    assert not contains_all_words(bytes([1] * 50), 1, 6)
    assert not contains_all_words(bytes([1]), 2, 2)  # too short
    # 1,1 2,1 1,2 2,2 all present
    assert contains_all_words(bytes([1, 1, 2, 2, 1]), 2, 2)
    assert not contains_all_words(bytes([1, 1, 2, 1, 1]), 2, 2)
    with pytest.raises(EnumerationCapError):
        contains_all_words(bytes([1, 2]), 30, 6)
    with pytest.raises(AlphabetError):
        contains_all_words(bytes([3]), 1, 2)


def test_long_samples_are_typically_two_word_complete():
    hits = sum(
        contains_all_words(sample_address(UNIFORM6, 10_000, RandomSource(s)), 2, 6)
        for s in range(100)
    )
    assert hits >= 99
