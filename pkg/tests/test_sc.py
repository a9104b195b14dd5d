import itertools

import numpy as np
import pytest
from oracles import cell_prob, gn_reference

from wompolar.checks import sc_vs_enumeration
from wompolar.model import SourceModel
from wompolar.sc import (
    IMPOSSIBLE,
    ProbPair,
    ScEngine,
    brute_force_conditional,
    chain_probability,
    leaf_pair,
    sc_advance,
    sc_dist,
    sc_init,
)

HALF = SourceModel(0.5, 0.5)


def test_leaf_pair():
    assert leaf_pair(HALF, 0) == (1.0, 0.0)
    assert leaf_pair(HALF, 1) == (0.5, 0.5)
    assert leaf_pair(SourceModel(0.5, 0.25), 1) == (0.25, 0.75)
    with pytest.raises(ValueError):
        leaf_pair(HALF, 2)


def test_probpair():
    assert IMPOSSIBLE.impossible
    assert IMPOSSIBLE.normalized() == IMPOSSIBLE
    assert ProbPair(1.0, 3.0).normalized() == (0.25, 0.75)
    assert ProbPair(0.2, 0.8).prob(1) == 0.8


def test_single_cell():
    assert sc_dist(sc_init(HALF, [0])) == (1.0, 0.0)
    d = sc_dist(sc_init(SourceModel(0.5, 0.3), [1]))
    assert d == pytest.approx((0.3, 0.7))


def test_two_cells():
    assert sc_dist(sc_init(HALF, [1, 1])) == pytest.approx((0.5, 0.5))
    for t in (0.2, 0.5, 0.8):
        m = SourceModel(0.5, t)
        e = sc_init(m, [0, 1])
        # u0 = x1 since x0 is forced to 0
        assert sc_dist(e) == pytest.approx((t, 1 - t))
        assert sc_dist(sc_advance(e, 0)) == pytest.approx((1.0, 0.0))
    e = sc_advance(sc_init(HALF, [0, 0]), 1)
    assert sc_dist(e).impossible


def test_advance_bookkeeping():
    rng = np.random.default_rng(1)
    y = rng.integers(0, 2, 16).astype(np.uint8)
    u = rng.integers(0, 2, 16).astype(np.uint8)
    e = sc_init(HALF, y)
    for b in u:
        assert not e.done
        sc_advance(e, int(b))
    assert e.done and e.cursor == 16
    np.testing.assert_array_equal(e.u, u)
    with pytest.raises(IndexError):
        sc_dist(e)
    with pytest.raises(IndexError):
        sc_advance(e, 0)


def test_advance_rejects_bad_bit():
    with pytest.raises(ValueError):
        sc_advance(sc_init(HALF, [1, 1]), 2)


def test_impossibility_absorbs():
    e = sc_init(HALF, [0, 0, 0, 0])
    assert sc_dist(e) == (1.0, 0.0)
    sc_advance(e, 1)
    while not e.done:
        assert sc_dist(e).impossible
        sc_advance(e, 0)


def test_normalization_invariant():
    rng = np.random.default_rng(2)
    for _ in range(20):
        y = rng.integers(0, 2, 64).astype(np.uint8)
        e = sc_init(SourceModel(0.3, 0.7), y)
        while not e.done:
            d = sc_dist(e)
            assert d.impossible or abs(d.q0 + d.q1 - 1.0) <= 1e-12
            sc_advance(e, int(rng.integers(0, 2)))


def test_brute_force_examples():
    assert brute_force_conditional(HALF, [1, 1], [0], 1) == pytest.approx((0.5, 0.5))
    for yb in (0, 1):
        assert brute_force_conditional(HALF, [yb], [], 0) == leaf_pair(HALF, yb)
    with pytest.raises(ValueError):
        brute_force_conditional(HALF, np.ones(16, np.uint8), [], 0)
    with pytest.raises(ValueError):
        brute_force_conditional(HALF, [1, 1], [0, 0], 1)


@pytest.mark.parametrize("N", [1, 2, 4, 8])
def test_engine_matches_enumeration(N):
    assert sc_vs_enumeration(HALF, N) <= 1e-10


def test_engine_copy_is_independent():
    e = sc_init(HALF, np.ones(8, np.uint8))
    sc_advance(e, 1)
    c = e.copy()
    sc_advance(c, 0)
    assert e.cursor == 1 and c.cursor == 2


def _direct(model, y, u):
    x = (np.asarray(u) @ gn_reference(len(u).bit_length() - 1)) % 2
    return float(np.prod([float(cell_prob(int(a), int(b), model.t)) for a, b in zip(x, y)]))


def test_chain_probability_examples():
    assert chain_probability(HALF, [0], [0]) == 1.0
    assert chain_probability(HALF, [0], [1]) == 0.0
    m = SourceModel(0.3, 0.7)
    rng = np.random.default_rng(4)
    for _ in range(50):
        y = rng.integers(0, 2, 4)
        u = rng.integers(0, 2, 4)
        assert chain_probability(m, y, u) == pytest.approx(_direct(m, y, u), abs=1e-12)


def test_chain_probability_sums_to_one():
    m = SourceModel(0.5, 0.3)
    for y in itertools.product((0, 1), repeat=4):
        total = sum(chain_probability(m, y, u) for u in itertools.product((0, 1), repeat=4))
        assert total == pytest.approx(1.0, abs=1e-12)


def test_engine_from_leaves_matches_model_engine():
    y = np.random.default_rng(5).integers(0, 2, 32).astype(np.uint8)
    from wompolar.sc import leaf_arrays

    a = ScEngine(HALF, y)
    b = ScEngine.from_leaves(*leaf_arrays(0.5, y))
    while not a.done:
        assert a.dist() == b.dist()
        a.advance(1)
        b.advance(1)
