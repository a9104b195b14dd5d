"""GF(2) polar transform ``u = x G_N`` with ``G_N = F^{(x)n} B_N``.

``F = [[1, 0], [1, 1]]`` and ``B_N`` is the bit-reversal permutation. Over
GF(2), ``G_N`` is its own inverse, so the same routine maps codewords to
transformed words and back.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "MAX_ORACLE_LOG_N",
    "log2_exact",
    "bit_reversal_perm",
    "polar_transform",
    "butterfly",
    "gn_matrix",
]

MAX_ORACLE_LOG_N = 10


def log2_exact(N: int) -> int:
    """Return ``n`` with ``2**n == N`` or raise ``ValueError``."""
    N = int(N)
    if N < 1 or N & (N - 1):
        raise ValueError(f"length must be a power of two, got {N}")
    return N.bit_length() - 1


@lru_cache(maxsize=None)
def _bit_reversal(n: int) -> np.ndarray:
    N = 1 << n
    idx = np.arange(N, dtype=np.int64)
    rev = np.zeros(N, dtype=np.int64)
    for b in range(n):
        rev |= ((idx >> b) & 1) << (n - 1 - b)
    rev.setflags(write=False)
    return rev


def bit_reversal_perm(n: int) -> np.ndarray:
    """Permutation of ``range(2**n)`` mapping each index to its n-bit reversal."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return _bit_reversal(n)


def butterfly(bits: np.ndarray) -> np.ndarray:
    """In-place ``v -> v F^{(x)n}`` along the last axis (no bit reversal)."""
    N = bits.shape[-1]
    lead = bits.shape[:-1]
    h = 1
    while h < N:
        v = bits.reshape(*lead, N // (2 * h), 2, h)
        v[..., 0, :] ^= v[..., 1, :]
        h *= 2
    return bits


def polar_transform(x) -> np.ndarray:
    """Return ``x G_N`` over GF(2); batched along leading axes.

    Runs in ``O(N log N)``. Input is not modified.
    """
    x = np.asarray(x)
    n = log2_exact(x.shape[-1])
    u = np.ascontiguousarray(x[..., _bit_reversal(n)], dtype=np.uint8)
    return butterfly(u)


def gn_matrix(n: int) -> np.ndarray:
    """Dense ``G_N`` built from a Kronecker power and a permutation matrix.

    Test oracle only; limited to ``n <= MAX_ORACLE_LOG_N``.
    """
    if not 0 <= n <= MAX_ORACLE_LOG_N:
        raise ValueError(f"oracle matrix limited to 0 <= n <= {MAX_ORACLE_LOG_N}, got {n}")
    F = np.array([[1, 0], [1, 1]], dtype=np.int64)
    K = np.ones((1, 1), dtype=np.int64)
    for _ in range(n):
        K = np.kron(K, F)
    N = 1 << n
    B = np.zeros((N, N), dtype=np.int64)
    for i in range(N):
        r = int(format(i, f"0{n}b")[::-1], 2) if n else 0
        B[i, r] = 1
    return ((K @ B) % 2).astype(np.uint8)
