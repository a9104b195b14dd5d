"""Randomized WOM encoder and the transform-and-read decoder.

The encoder walks ``u_0 .. u_{N-1}``. Indices in the high-entropy set take
message bits in ascending order; every other index is drawn from its SC
conditional. The codeword is ``x = u G_N`` (``G_N`` is self-inverse).

At finite ``N`` forcing message bits can steer the walk into a prefix of
probability zero, or yield a codeword that would raise a cell. Both are
detected and the walk is retried with a fresh derived seed; the message is
never altered. The decoder needs neither the seed nor the memory state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .construct import HighEntropySet
from .model import SourceModel, as_bits, count_flips, make_rng
from .polar import polar_transform
from .sc import leaf_arrays

__all__ = [
    "DEFAULT_MAX_ATTEMPTS",
    "DEFAULT_SEED",
    "ZeroProbabilityEvent",
    "WriteViolation",
    "EncodeOutcome",
    "encode",
    "decode",
    "validate_write",
]

DEFAULT_MAX_ATTEMPTS = 8
DEFAULT_SEED = 20240917


@dataclass(frozen=True)
class ZeroProbabilityEvent:
    """A sampled index had conditional pair ``(0, 0)``."""

    index: int
    kind = "zero_probability"


@dataclass(frozen=True)
class WriteViolation:
    """The codeword sets cells that are already 0."""

    positions: tuple[int, ...]
    kind = "write_violation"


@dataclass
class EncodeOutcome:
    codeword: np.ndarray | None
    failure: ZeroProbabilityEvent | WriteViolation | None
    flips: int
    attempts: int

    @property
    def ok(self) -> bool:
        return self.failure is None


def validate_write(y, x) -> list[int]:
    """Positions where ``y`` is 0 but ``x`` is 1."""
    y = as_bits(y, "y")
    x = as_bits(x, "x")
    if y.shape != x.shape:
        raise ValueError(f"length mismatch: {y.size} vs {x.size}")
    return np.flatnonzero((y == 0) & (x == 1)).tolist()


def _encode(t: float, hes: HighEntropySet, y, v, seed: int, max_attempts: int,
            greedy: bool) -> EncodeOutcome:
    y = as_bits(y, "y")
    v = as_bits(v, "message")
    if y.size != hes.N:
        raise ValueError(f"state has length {y.size}, set expects N={hes.N}")
    if v.size != hes.M:
        raise ValueError(f"message has length {v.size}, set expects M={hes.M}")
    if max_attempts < 1:
        raise ValueError("max_attempts must be at least 1")
    info = hes.mask()
    msg = np.zeros(hes.N, dtype=np.uint8)
    msg[list(hes.indices)] = v
    q0, q1 = leaf_arrays(t, y)
    failure = None
    # greedy walks are deterministic, so retrying cannot help
    attempts = 1 if greedy else max_attempts
    for attempt in range(attempts):
        uniforms = make_rng(seed, attempt).random(hes.N)
        u, bad = kernels.encode_pass(q0, q1, info, msg, uniforms, greedy)
        if bad >= 0:
            failure = ZeroProbabilityEvent(int(bad))
            continue
        x = polar_transform(u)
        bad_cells = validate_write(y, x)
        if bad_cells:
            failure = WriteViolation(tuple(bad_cells))
            continue
        return EncodeOutcome(x, None, count_flips(y, x), attempt + 1)
    return EncodeOutcome(None, failure, 0, attempts)


def encode(model: SourceModel, hes: HighEntropySet, y, v, seed: int = DEFAULT_SEED,
           max_attempts: int = DEFAULT_MAX_ATTEMPTS, greedy: bool = False) -> EncodeOutcome:
    """Write message ``v`` over memory state ``y``.

    Attempt ``k`` draws its uniforms from substream ``(seed, k)``. With
    ``greedy=True`` non-message bits take the more likely value instead of
    being sampled; this is an extension, the sampled rule is the default.
    """
    return _encode(model.t, hes, y, v, seed, max_attempts, greedy)


def decode(x, hes: HighEntropySet) -> np.ndarray:
    x = as_bits(x, "codeword")
    if x.size != hes.N:
        raise ValueError(f"codeword has length {x.size}, set expects N={hes.N}")
    return polar_transform(x)[list(hes.indices)]
