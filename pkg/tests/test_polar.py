import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import gn_reference

from wompolar.construct import _bits_msb_first
from wompolar.polar import bit_reversal_perm, gn_matrix, log2_exact, polar_transform


def test_bit_reversal_small():
    assert bit_reversal_perm(0).tolist() == [0]
    assert bit_reversal_perm(1).tolist() == [0, 1]
    assert bit_reversal_perm(2).tolist() == [0, 2, 1, 3]


@pytest.mark.parametrize("n", range(0, 11))
def test_bit_reversal_involution(n):
    p = bit_reversal_perm(n)
    np.testing.assert_array_equal(p[p], np.arange(1 << n))


def test_gn_matrix_small():
    assert gn_matrix(0).tolist() == [[1]]
    assert gn_matrix(1).tolist() == [[1, 0], [1, 1]]
    g = gn_matrix(2).astype(np.int64)
    np.testing.assert_array_equal((g @ g) % 2, np.eye(4, dtype=np.int64))


@pytest.mark.parametrize("n", range(0, 7))
def test_gn_matrix_against_reference(n):
    np.testing.assert_array_equal(gn_matrix(n), gn_reference(n))


def test_gn_matrix_limit():
    with pytest.raises(ValueError):
        gn_matrix(11)


def test_rows_are_unit_transforms():
    n = 4
    np.testing.assert_array_equal(polar_transform(np.eye(16, dtype=np.uint8)), gn_matrix(n))


def test_n2_examples():
    assert polar_transform([1, 0]).tolist() == [1, 0]
    assert polar_transform([0, 1]).tolist() == [1, 1]
    assert polar_transform([1, 1]).tolist() == [0, 1]
    assert polar_transform(np.zeros(64, np.uint8)).sum() == 0


@pytest.mark.parametrize("N", [2, 4, 8])
def test_matches_oracle_exhaustive(N):
    xs = _bits_msb_first(N)
    G = gn_reference(N.bit_length() - 1)
    np.testing.assert_array_equal(polar_transform(xs), (xs @ G) % 2)


@pytest.mark.parametrize("N", [16, 32])
def test_matches_oracle_random(N):
    xs = np.random.default_rng(N).integers(0, 2, (1000, N))
    np.testing.assert_array_equal(polar_transform(xs), (xs @ gn_reference(N.bit_length() - 1)) % 2)


@pytest.mark.parametrize("bad", [0, 3, 6, 12])
def test_rejects_bad_length(bad):
    with pytest.raises(ValueError):
        polar_transform(np.zeros(bad, np.uint8))
    if bad:
        with pytest.raises(ValueError):
            log2_exact(bad)


def _pair(n):
    N = 1 << n
    bits = st.lists(st.integers(0, 1), min_size=N, max_size=N)
    return st.tuples(bits, bits)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 8).flatmap(_pair))
def test_linearity_and_involution(pair):
    a, b = (np.array(v, dtype=np.uint8) for v in pair)
    np.testing.assert_array_equal(polar_transform(a ^ b), polar_transform(a) ^ polar_transform(b))
    np.testing.assert_array_equal(polar_transform(polar_transform(a)), a)


def test_input_untouched_and_batched():
    x = np.random.default_rng(0).integers(0, 2, (3, 2, 16)).astype(np.uint8)
    keep = x.copy()
    out = polar_transform(x)
    np.testing.assert_array_equal(x, keep)
    for idx in np.ndindex(3, 2):
        np.testing.assert_array_equal(out[idx], polar_transform(x[idx]))
