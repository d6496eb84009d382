"""Deterministic PRNG and hashing primitives used for corpus sampling."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abcd.rng import SplitMix64, fnv1a64, sample_indices, stratum_seed


def test_splitmix64_reference_vectors():
    # First three outputs for seed 1234567, from the reference sequence.
    rng = SplitMix64(1234567)
    assert rng.next_u64() == 0x599ED017FB08FC85
    assert rng.next_u64() == 0x2C73F08458540FA5
    assert rng.next_u64() == 0x883EBCE5A3F27C77


def test_splitmix64_deterministic_across_instances():
    a = [SplitMix64(42).next_u64() for _ in range(5)]
    b = [SplitMix64(42).next_u64() for _ in range(5)]
    assert a == b


def test_splitmix64_seed_masked_to_64_bits():
    assert SplitMix64(2**64 + 7).next_u64() == SplitMix64(7).next_u64()


def test_below_range_and_coverage():
    rng = SplitMix64(99)
    draws = [rng.below(7) for _ in range(500)]
    assert all(0 <= d < 7 for d in draws)
    assert set(draws) == set(range(7))


def test_below_rejects_nonpositive_bound():
    rng = SplitMix64(1)
    with pytest.raises(ValueError):
        rng.below(0)


@pytest.mark.parametrize(
    "text,digest",
    [
        ("", 0xCBF29CE484222325),
        ("a", 0xAF63DC4C8601EC8C),
        ("foobar", 0x85944171F73967E8),
    ],
)
def test_fnv1a64_reference_vectors(text, digest):
    assert fnv1a64(text) == digest


def test_fnv1a64_hashes_utf8_bytes():
    assert fnv1a64("é") != fnv1a64("e")


def test_stratum_seed_mixes_label_into_seed():
    assert stratum_seed(0, "a") == fnv1a64("a")
    assert stratum_seed(7, "x") != stratum_seed(7, "y")
    assert stratum_seed(7, "x") != stratum_seed(8, "x")
    assert 0 <= stratum_seed(2**63, "label") < 2**64


def test_sample_indices_basic_shape():
    picked = sample_indices(100, 10, seed=5)
    assert len(picked) == 10
    assert len(set(picked)) == 10
    assert picked == sorted(picked)
    assert all(0 <= i < 100 for i in picked)


def test_sample_indices_deterministic():
    assert sample_indices(1000, 100, seed=3) == sample_indices(1000, 100, seed=3)
    assert sample_indices(1000, 100, seed=3) != sample_indices(1000, 100, seed=4)


def test_sample_indices_k_equals_population():
    assert sample_indices(5, 5, seed=11) == [0, 1, 2, 3, 4]


def test_sample_indices_k_zero():
    assert sample_indices(5, 0, seed=11) == []


def test_sample_indices_overdraw_rejected():
    with pytest.raises(ValueError):
        sample_indices(3, 4, seed=0)


@settings(max_examples=100)
@given(
    population=st.integers(min_value=1, max_value=400),
    seed=st.integers(min_value=0, max_value=2**64 - 1),
    data=st.data(),
)
def test_sample_indices_properties(population, seed, data):
    k = data.draw(st.integers(min_value=0, max_value=population))
    picked = sample_indices(population, k, seed)
    assert len(picked) == k
    assert picked == sorted(set(picked))
    assert all(0 <= i < population for i in picked)
