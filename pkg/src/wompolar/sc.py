"""Successive-cancellation computation of ``P(U_i | y, u_0 .. u_{i-1})``.

Since ``G_N`` is an involution, ``x = u G_N`` and ``P(u | y) = prod_n P(x_n | y_n)``.
With the leaves reordered by bit reversal, ``x' = u F^{(x)n}`` splits as
``u = (a, b)  ->  x' = (aF' + bF', bF')``, which gives the usual two-branch
recursion on probability pairs for a block with halves ``top`` and ``bot``:

* upper branch (deciding ``a``): ``q(w) = sum_v top(w ^ v) * bot(v)``
* lower branch (after ``a`` is fixed with partial sum ``s = aF'``):
  ``q(w) = top(s ^ w) * bot(w)``

Pairs stay in the linear domain and each combined pair is renormalized.
Exact zeros (a cell in state 0 can never hold a 1) survive unchanged, so an
impossible prefix shows up as the pair ``(0, 0)``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .model import SourceModel, as_bits
from .polar import bit_reversal_perm, gn_matrix, log2_exact

__all__ = [
    "ProbPair",
    "IMPOSSIBLE",
    "leaf_pair",
    "leaf_arrays",
    "ScEngine",
    "sc_init",
    "sc_dist",
    "sc_advance",
    "chain_probability",
    "chain_probabilities",
    "brute_force_conditional",
    "MAX_BRUTE_FORCE_N",
]

MAX_BRUTE_FORCE_N = 12


class ProbPair(NamedTuple):
    """Probabilities of a bit being 0 and 1; ``(0, 0)`` marks an impossible prefix."""

    q0: float
    q1: float

    @property
    def impossible(self) -> bool:
        return self.q0 == 0.0 and self.q1 == 0.0

    def normalized(self) -> "ProbPair":
        s = self.q0 + self.q1
        if s <= 0.0:
            return IMPOSSIBLE
        return ProbPair(self.q0 / s, self.q1 / s)

    def prob(self, bit: int) -> float:
        return self.q1 if bit else self.q0


IMPOSSIBLE = ProbPair(0.0, 0.0)


def leaf_pair(model: SourceModel, y_bit: int) -> ProbPair:
    """``(P(x=0 | y), P(x=1 | y))`` for a single cell."""
    if y_bit not in (0, 1):
        raise ValueError("y_bit must be 0 or 1")
    return ProbPair(model.t, 1.0 - model.t) if y_bit else ProbPair(1.0, 0.0)


def leaf_arrays(t: float, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Leaf pairs in bit-reversed order, as two float arrays (batched on leading axes)."""
    n = log2_exact(y.shape[-1])
    yr = y[..., bit_reversal_perm(n)]
    q0 = np.where(yr == 1, t, 1.0)
    q1 = np.where(yr == 1, 1.0 - t, 0.0)
    return np.ascontiguousarray(q0, dtype=np.float64), np.ascontiguousarray(q1, dtype=np.float64)


def _normalize(r: np.ndarray) -> np.ndarray:
    # pairs are non-negative, so a zero sum means r is already (0, 0)
    s = r[..., :1] + r[..., 1:]
    np.divide(r, s, out=r, where=s > 0.0)
    return r


def upper_combine(top: np.ndarray, bot: np.ndarray) -> np.ndarray:
    r = np.empty(top.shape)
    r[..., 0] = top[..., 0] * bot[..., 0] + top[..., 1] * bot[..., 1]
    r[..., 1] = top[..., 0] * bot[..., 1] + top[..., 1] * bot[..., 0]
    return _normalize(r)


def lower_combine(top: np.ndarray, bot: np.ndarray, s1: np.ndarray) -> np.ndarray:
    flip = s1.astype(bool)
    r = np.empty(top.shape)
    r[..., 0] = np.where(flip, top[..., 1], top[..., 0]) * bot[..., 0]
    r[..., 1] = np.where(flip, top[..., 0], top[..., 1]) * bot[..., 1]
    return _normalize(r)


class ScEngine:
    """Stateful SC pass over one memory state ``y``.

    Keeps one pair array and one partial-sum buffer per tree depth (``O(N)``
    memory). Each :meth:`dist` recomputes only the part of the path that
    changed since the previous index, for ``O(N log N)`` work per full pass.
    """

    def __init__(self, model: SourceModel, y) -> None:
        y = as_bits(y, "y")
        self.model = model
        self.y = y.copy()
        self._setup(*leaf_arrays(model.t, y))

    @classmethod
    def from_leaves(cls, q0: np.ndarray, q1: np.ndarray) -> "ScEngine":
        """Engine over leaf pairs already in bit-reversed order."""
        engine = cls.__new__(cls)
        engine.model = engine.y = None
        engine._setup(np.asarray(q0, dtype=np.float64), np.asarray(q1, dtype=np.float64))
        return engine

    def _setup(self, q0: np.ndarray, q1: np.ndarray) -> None:
        self.n = log2_exact(q0.size)
        self.N = q0.size
        self.cursor = 0
        self.u = np.zeros(self.N, dtype=np.uint8)
        self._pairs = [np.stack([q0, q1], axis=-1)]
        self._pairs += [None] * self.n
        self._partial = [np.zeros(self.N >> d, dtype=np.uint8) for d in range(self.n + 1)]
        self._ready = self.n == 0

    @property
    def done(self) -> bool:
        return self.cursor >= self.N

    def _refresh(self) -> None:
        n, i = self.n, self.cursor
        if i == 0:
            k = 0
        else:
            k = n - (i ^ (i - 1)).bit_length()
        for d in range(k, n):
            q = self._pairs[d]
            h = q.shape[0] // 2
            if d == k and i > 0:
                self._pairs[d + 1] = lower_combine(q[:h], q[h:], self._partial[d][:h])
            else:
                self._pairs[d + 1] = upper_combine(q[:h], q[h:])
        self._ready = True

    def copy(self) -> "ScEngine":
        other = ScEngine.__new__(ScEngine)
        other.__dict__.update(self.__dict__)
        other.u = self.u.copy()
        other._pairs = list(self._pairs)
        other._partial = [p.copy() for p in self._partial]
        return other

    def dist(self) -> ProbPair:
        if self.done:
            raise IndexError("all bits already fixed")
        if not self._ready:
            self._refresh()
        q0, q1 = self._pairs[self.n][0]
        return ProbPair(float(q0), float(q1))

    def advance(self, bit: int) -> "ScEngine":
        if self.done:
            raise IndexError("cannot advance past the last index")
        if bit not in (0, 1):
            raise ValueError("bit must be 0 or 1")
        if not self._ready:
            self._refresh()
        n, i = self.n, self.cursor
        self.u[i] = bit
        self._partial[n][0] = bit
        for d in range(n - 1, -1, -1):
            h = self.N >> (d + 1)
            child, node = self._partial[d + 1], self._partial[d]
            if (i >> (n - 1 - d)) & 1 == 0:
                node[:h] = child
                break
            node[:h] ^= child
            node[h:] = child
        self.cursor += 1
        self._ready = False
        return self


def sc_init(model: SourceModel, y) -> ScEngine:
    return ScEngine(model, y)


def sc_dist(engine: ScEngine) -> ProbPair:
    return engine.dist()


def sc_advance(engine: ScEngine, bit: int) -> ScEngine:
    return engine.advance(bit)


def chain_probabilities(model: SourceModel, y, us) -> np.ndarray:
    """:func:`chain_probability` for each row of ``us`` over one state ``y``."""
    from . import kernels

    y = as_bits(y, "y")
    us = np.atleast_2d(np.asarray(us, dtype=np.uint8))
    if us.shape[1] != y.size:
        raise ValueError("y and u must have equal length")
    q0, q1 = leaf_arrays(model.t, y)
    rows = us.shape[0]
    p0, p1 = kernels.genie_pass(np.tile(q0, (rows, 1)), np.tile(q1, (rows, 1)), us)
    return np.prod(np.where(us == 1, p1, p0), axis=1)


def chain_probability(model: SourceModel, y, u) -> float:
    """Product of the SC conditionals of ``u_0 .. u_{N-1}`` along one pass.

    Equals ``P(x | y)`` for ``x = u G_N``; zero for a word that would raise a cell.
    """
    u = as_bits(u, "u")
    return float(chain_probabilities(model, y, u[None, :])[0])


@lru_cache(maxsize=None)
def _enumeration(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Every ``x`` (MSB first), its transform ``u``, and ``codes[i]`` = ``u_0..u_{i-1}`` as an integer."""
    N = 1 << n
    xs = (np.arange(1 << N)[:, None] >> np.arange(N - 1, -1, -1)) & 1
    us = (xs @ gn_matrix(n).astype(np.int64)) % 2
    codes = np.zeros((N + 1, xs.shape[0]), dtype=np.int64)
    for i in range(N):
        codes[i + 1] = 2 * codes[i] + us[:, i]
    return xs, us, codes


@lru_cache(maxsize=4096)
def _split_masses(n: int, t: float, y_key: bytes, i: int) -> np.ndarray:
    """``P(x | y)`` summed over all ``x`` by the value of ``u_0..u_i`` (as an integer)."""
    xs, _, codes = _enumeration(n)
    y = np.frombuffer(y_key, dtype=np.uint8)
    px = np.where(y == 1, np.where(xs == 0, t, 1.0 - t), np.where(xs == 0, 1.0, 0.0)).prod(axis=1)
    return np.bincount(codes[i + 1], weights=px, minlength=1 << (i + 1))


def brute_force_conditional(model: SourceModel, y, prefix, i: int) -> ProbPair:
    """``P(U_i | y, u_0..u_{i-1} = prefix)`` by enumerating every codeword ``x``."""
    y = as_bits(y, "y")
    prefix = as_bits(prefix, "prefix")
    N = y.size
    n = log2_exact(N)
    if N > MAX_BRUTE_FORCE_N:
        raise ValueError(f"brute force limited to N <= {MAX_BRUTE_FORCE_N}")
    if not 0 <= i < N or prefix.size != i:
        raise ValueError("prefix must have length i with 0 <= i < N")
    mass = _split_masses(n, float(model.t), y.tobytes(), i)
    key = 0
    for b in prefix.tolist():
        key = 2 * key + b
    return ProbPair(float(mass[2 * key]), float(mass[2 * key + 1])).normalized()
