import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from icfs_wearsim.exceptions import DomainError
from icfs_wearsim.metrics import amplification, fragmentation, mean_writes, std_writes, summarize

counts = st.lists(st.integers(0, 10 ** 6), min_size=1, max_size=300)


def brute_mean(values):
    return math.fsum(values) / len(values)


def brute_std(values):
    mu = brute_mean(values)
    return math.sqrt(math.fsum((x - mu) ** 2 for x in values) / len(values))


def test_small_cases():
    assert mean_writes([0, 0, 0, 0]) == 0
    assert mean_writes([2, 4]) == 3
    assert std_writes([7, 7, 7]) == 0
    assert std_writes([0, 2]) == 1


def test_empty_counts_are_rejected():
    with pytest.raises(DomainError):
        mean_writes([])
    with pytest.raises(DomainError):
        std_writes([])


def test_random_vectors_match_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        values = rng.integers(0, 5000, size=rng.integers(1, 400)).tolist()
        assert mean_writes(values) == pytest.approx(brute_mean(values), rel=1e-9, abs=1e-12)
        assert std_writes(values) == pytest.approx(brute_std(values), rel=1e-9, abs=1e-9)


def test_fragmentation_cases():
    assert fragmentation(200, 200) == 0
    assert fragmentation(0, 200) == 1
    assert fragmentation(22, 200) == pytest.approx(0.89)
    with pytest.raises(DomainError):
        fragmentation(0, 0)
    with pytest.raises(DomainError):
        fragmentation(201, 200)


def test_fragmentation_decreases_with_use():
    values = [fragmentation(u, 200) for u in range(201)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_amplification_cases():
    assert amplification(2208, 160) == pytest.approx(13.8)
    assert amplification(4096, 4096) == 1.0
    with pytest.raises(DomainError):
        amplification(10, 0)


@given(counts)
def test_std_zero_iff_all_equal(values):
    assert (std_writes(values) == 0) == (len(set(values)) == 1)


@given(counts, st.integers(0, 1000))
def test_translation(values, k):
    shifted = [v + k for v in values]
    assert mean_writes(shifted) == pytest.approx(mean_writes(values) + k, rel=1e-9)
    assert std_writes(shifted) == pytest.approx(std_writes(values), rel=1e-6, abs=1e-6)


def test_summary_denominators():
    wear = [0] * 6 + [4, 8]
    all_blocks = summarize(wear, used=2, mu_denominator="all")
    touched = summarize(wear, used=2, mu_denominator="touched")
    assert all_blocks.mu == 1.5 and all_blocks.n == 8
    assert touched.mu == 6 and touched.n == 2
    assert touched.frag == all_blocks.frag == 0.75
    assert touched.max_write_count == 8
