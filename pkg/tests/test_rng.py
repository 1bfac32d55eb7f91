import numpy as np
from hypothesis import given, strategies as st

from flowsift import rng


def test_streams_are_deterministic():
    a = rng.stream(42, rng.STREAM_SPLIT, 0).next_block(100)
    b = rng.stream(42, rng.STREAM_SPLIT, 0).next_block(100)
    assert np.array_equal(a, b)


def test_streams_are_counter_based():
    # reading in two chunks equals reading in one
    s1 = rng.stream(7, 1)
    first = np.concatenate([s1.next_block(10), s1.next_block(15)])
    s2 = rng.stream(7, 1)
    assert np.array_equal(first, s2.next_block(25))


def test_different_tags_differ():
    a = rng.stream(42, rng.STREAM_SPLIT, 0).next_block(32)
    b = rng.stream(42, rng.STREAM_SPLIT, 1).next_block(32)
    c = rng.stream(42, rng.STREAM_EPOCH, 0).next_block(32)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_uniform_range_and_mean():
    u = rng.stream(3).uniform(200_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.01


def test_normal_moments():
    z = rng.stream(4).normal(200_000)
    assert abs(z.mean()) < 0.02
    assert abs(z.std() - 1.0) < 0.02


@given(st.integers(min_value=1, max_value=10_000), st.integers(min_value=0, max_value=2**32))
def test_integers_in_range(bound, seed):
    v = rng.stream(seed).integers(50, bound)
    assert v.min() >= 0 and v.max() < bound


def test_integers_power_of_two_bound():
    v = rng.stream(9).integers(1000, 1024)
    assert v.min() >= 0 and v.max() < 1024


def test_permutation_is_a_permutation():
    p = rng.stream(11).permutation(5000)
    assert np.array_equal(np.sort(p), np.arange(5000))


def test_choice_respects_probabilities():
    probs = np.array([0.7, 0.2, 0.1])
    c = rng.stream(12).choice(100_000, probs)
    freq = np.bincount(c, minlength=3) / 100_000
    assert np.allclose(freq, probs, atol=0.01)


def test_kernel_bootstrap_matches_numpy_stream():
    """In-kernel SplitMix64 rejection sampling equals the numpy stream."""
    from flowsift._tree_kernels import _fill_bootstrap_counts

    n = 1000
    seed = rng.derive(123, rng.STREAM_BOOTSTRAP, 0)
    counts = np.empty(n, np.int64)
    _fill_bootstrap_counts(seed, n, counts)
    draws = rng.Stream(seed).integers(n, n)
    expected = np.bincount(draws, minlength=n)
    assert np.array_equal(counts, expected)


def test_derive_composes():
    assert rng.derive(1, 2, 3) != rng.derive(1, 3, 2)
    assert rng.derive(1) != rng.derive(2)
    assert rng.derive(5, 7) == rng.derive(5, 7)
