"""The compiled and numpy kernels must agree bit for bit."""

import numpy as np
import pytest

from wompolar import _pykernels, kernels
from wompolar.model import SourceModel
from wompolar.polar import bit_reversal_perm, polar_transform
from wompolar.sc import ScEngine, leaf_arrays

BACKENDS = kernels.available_backends()


def test_backend_selection():
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS
    assert kernels.get_backend("python") is _pykernels
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def _case(n, seed, s=0.5, t=0.5, rate=0.3):
    rng = np.random.default_rng(seed)
    N = 1 << n
    y = (rng.random(N) >= s).astype(np.uint8)
    info = (rng.random(N) < rate).astype(np.uint8)
    msg = rng.integers(0, 2, N).astype(np.uint8)
    return y, info, msg, rng.random(N), t


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("greedy", [False, True])
@pytest.mark.parametrize("n", [0, 1, 3, 6, 9])
def test_encode_pass_matches_engine(backend, greedy, n):
    y, info, msg, unif, t = _case(n, seed=n)
    q0, q1 = leaf_arrays(t, y)
    u, bad = kernels.get_backend(backend).encode_pass(q0, q1, info, msg, unif, greedy)
    # replay the decisions on the stepwise engine
    e = ScEngine(SourceModel(0.5, t), y)
    for i in range(len(y) if bad < 0 else bad):
        d = e.dist()
        assert not d.impossible or info[i]
        e.advance(int(u[i]))
        if info[i]:
            assert u[i] == msg[i]
    if bad >= 0:
        assert e.dist().impossible


@pytest.mark.parametrize("n", [2, 5, 8, 11])
def test_backends_identical(n):
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend not built")
    py, cy = kernels.get_backend("python"), kernels.get_backend("cython")
    for seed in range(3):
        y, info, msg, unif, t = _case(n, seed, t=0.3)
        q0, q1 = leaf_arrays(t, y)
        for greedy in (False, True):
            a = py.encode_pass(q0, q1, info, msg, unif, greedy)
            b = cy.encode_pass(q0, q1, info, msg, unif, greedy)
            assert a[1] == b[1]
            np.testing.assert_array_equal(a[0], b[0])
    rng = np.random.default_rng(n)
    N = 1 << n
    ys = rng.integers(0, 2, (7, N)).astype(np.uint8)
    xs = ((rng.random((7, N)) >= 0.4) & (ys == 1)).astype(np.uint8)
    us = polar_transform(xs)
    q0, q1 = leaf_arrays(0.4, ys)
    for a, b in zip(py.genie_pass(q0, q1, us), cy.genie_pass(q0, q1, us)):
        np.testing.assert_array_equal(a, b)
    yr = ys[:, bit_reversal_perm(n)]
    np.testing.assert_allclose(py.genie_stats(yr, us, 0.4), cy.genie_stats(yr, us, 0.4), rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("backend", BACKENDS)
def test_genie_pass_matches_engine(backend):
    rng = np.random.default_rng(9)
    N = 32
    ys = rng.integers(0, 2, (4, N)).astype(np.uint8)
    us = rng.integers(0, 2, (4, N)).astype(np.uint8)
    q0, q1 = leaf_arrays(0.6, ys)
    p0, p1 = kernels.get_backend(backend).genie_pass(q0, q1, us)
    for b in range(4):
        e = ScEngine(SourceModel(0.5, 0.6), ys[b])
        for i in range(N):
            assert e.dist() == (p0[b, i], p1[b, i])
            e.advance(int(us[b, i]))


@pytest.mark.parametrize("backend", BACKENDS)
def test_kernel_input_checks(backend):
    k = kernels.get_backend(backend)
    z = np.zeros(6)
    with pytest.raises(ValueError):
        k.encode_pass(z, z, z.astype(np.uint8), z.astype(np.uint8), z, False)


@pytest.mark.parametrize("backend", BACKENDS)
def test_empty_genie_batch(backend):
    p0, p1 = kernels.get_backend(backend).genie_pass(np.zeros((0, 4)), np.zeros((0, 4)),
                                                     np.zeros((0, 4), np.uint8))
    assert p0.shape == (0, 4) and p1.shape == (0, 4)
