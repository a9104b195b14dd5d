"""Slow reference implementations, written without using the package."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def reverse_bits(i: int, n: int) -> int:
    return int(format(i, f"0{n}b")[::-1], 2) if n else 0


def gn_reference(n: int) -> np.ndarray:
    """``F^{(x)n}`` times the bit-reversal permutation matrix."""
    F = np.array([[1, 0], [1, 1]], dtype=np.int64)
    K = np.ones((1, 1), dtype=np.int64)
    for _ in range(n):
        K = np.kron(K, F)
    N = 1 << n
    B = np.zeros((N, N), dtype=np.int64)
    for i in range(N):
        B[i, reverse_bits(i, n)] = 1
    return (K @ B) % 2


def words(N: int):
    return [tuple(w) for w in itertools.product((0, 1), repeat=N)]


def cell_prob(x: int, y: int, t) -> Fraction:
    if y == 0:
        return Fraction(1 - x)
    return t if x == 0 else 1 - t


def exact_index_stats(s, t, N: int):
    """Per-index ``(H_i, a_i)`` by summing over all ``(y, x)``; ``a_i`` is exact."""
    s, t = Fraction(s), Fraction(t)
    n = N.bit_length() - 1
    G = gn_reference(n)
    joint = {}
    for y in words(N):
        py = math.prod((s if b == 0 else 1 - s) for b in y)
        for x in words(N):
            px = math.prod(cell_prob(a, b, t) for a, b in zip(x, y))
            if px:
                u = tuple(int(v) for v in (np.array(x) @ G) % 2)
                joint[(y, u)] = joint.get((y, u), 0) + py * px
    H, A = [], []
    for i in range(N):
        groups = {}
        for (y, u), p in joint.items():
            g = groups.setdefault((y, u[:i]), [Fraction(0), Fraction(0)])
            g[u[i]] += p
        h = 0.0
        a = Fraction(0)
        for p0, p1 in groups.values():
            tot = p0 + p1
            c = p0 / tot
            a += tot * abs(c - Fraction(1, 2))
            for q in (c, 1 - c):
                if 0 < q < 1:
                    h -= float(tot) * float(q) * math.log2(float(q))
        H.append(h)
        A.append(a)
    return H, A


def encoder_law(s, t, N: int, F):
    """Exact law of one encoder attempt with uniform message bits.

    Returns ``{(y, u): prob}`` over outcomes the model allows, plus the key
    ``"fail"`` for the remaining mass (a prefix the model rules out).
    """
    s, t = Fraction(s), Fraction(t)
    G = gn_reference(N.bit_length() - 1)
    law = {}
    for y in words(N):
        py = math.prod((s if b == 0 else 1 - s) for b in y)
        pu = {}
        for x in words(N):
            px = math.prod(cell_prob(a, b, t) for a, b in zip(x, y))
            if px:
                u = tuple(int(v) for v in (np.array(x) @ G) % 2)
                pu[u] = pu.get(u, 0) + px
        for u in pu:
            q = py
            for i in range(N):
                if i in F:
                    q *= Fraction(1, 2)
                else:
                    num = sum(p for w, p in pu.items() if w[:i + 1] == u[:i + 1])
                    den = sum(p for w, p in pu.items() if w[:i] == u[:i])
                    q *= num / den
            law[(y, u)] = q
    law["fail"] = 1 - sum(law.values())
    return law
