"""Pure numpy implementations of the hot SC kernels.

Same signatures and bit-identical results as the compiled ``_ckernels``;
used when the extension is not built or when ``WOMPOLAR_BACKEND=python``.
"""

from __future__ import annotations

import numpy as np

from .model import entropy_array
from .sc import ScEngine, lower_combine, upper_combine


def encode_pass(leaf0, leaf1, info_mask, message, uniforms, greedy):
    """Sequential SC walk that fixes every ``u_i``.

    Indices with ``info_mask[i]`` take ``message[i]``; the others are drawn as
    ``0 if uniforms[i] < p0 else 1`` (``p0 >= p1`` in greedy mode).
    Returns ``(u, bad_index)``; ``bad_index`` is -1 on success, otherwise the
    first non-message index whose conditional pair is ``(0, 0)``.
    """
    engine = ScEngine.from_leaves(leaf0, leaf1)
    for i in range(leaf0.shape[0]):
        p0, p1 = engine.dist()
        if info_mask[i]:
            bit = int(message[i])
        elif p0 == 0.0 and p1 == 0.0:
            return engine.u, i
        elif greedy:
            bit = 0 if p0 >= p1 else 1
        else:
            bit = 0 if uniforms[i] < p0 else 1
        engine.advance(bit)
    return engine.u, -1


def genie_pass(leaf0, leaf1, u):
    """SC pairs ``(P(U_i = 0 | .), P(U_i = 1 | .))`` for every index of every row, ``u`` known.

    Returns two ``(rows, N)`` arrays.

    All partial sums are available up front, so the tree is evaluated one depth
    at a time, vectorized over rows and nodes.
    """
    B, N = u.shape
    n = N.bit_length() - 1
    # partial[h] holds u transformed blockwise with block size h
    partial = {1: u.astype(np.uint8, copy=True)}
    h = 1
    while h < N // 2:
        v = partial[h].copy().reshape(B, N // (2 * h), 2, h)
        v[:, :, 0] ^= v[:, :, 1]
        partial[2 * h] = v.reshape(B, N)
        h *= 2
    q = np.stack([leaf0, leaf1], axis=-1)
    for d in range(n):
        h = N >> (d + 1)
        blocks = q.reshape(B, 1 << d, 2, h, 2)
        top, bot = blocks[:, :, 0], blocks[:, :, 1]
        s1 = partial[h].reshape(B, 1 << d, 2, h)[:, :, 0]
        q = np.stack([upper_combine(top, bot), lower_combine(top, bot, s1)], axis=2).reshape(B, N, 2)
    return np.ascontiguousarray(q[..., 0]), np.ascontiguousarray(q[..., 1])


def genie_stats(y_rev, u, t):
    """Per-index sums of ``a = |p0 - 1/2|``, ``a**2``, ``h(p0)``, ``h(p0)**2`` over rows.

    ``y_rev`` holds memory states already in bit-reversed order.
    """
    q0 = np.where(y_rev == 1, t, 1.0)
    q1 = np.where(y_rev == 1, 1.0 - t, 0.0)
    p0 = genie_pass(q0, q1, u)[0]
    a = np.abs(p0 - 0.5)
    h = entropy_array(p0)
    return np.stack([a.sum(0), (a * a).sum(0), h.sum(0), (h * h).sum(0)])
