"""Memory-state / codeword probability model, entropy and seeded sampling.

Cells are binary. ``y`` is the memory state before a write, ``x`` the
codeword written over it. Under the model ``P`` the pairs ``(y_n, x_n)`` are
iid with

    P(y=0) = s,   P(x=0 | y=0) = 1,   P(x=0 | y=1) = t.

A valid rewrite never raises a cell: ``y_n = 0`` implies ``x_n = 0``.

All randomness flows from explicit integer seeds. :func:`derive_seed` mixes a
base seed with a tuple of integer keys (trial index, attempt index, chunk
index, ...) through :class:`numpy.random.SeedSequence`, so substreams are
reproducible and independent of execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "SourceModel",
    "ModelStats",
    "entropy",
    "model_stats",
    "sample_state",
    "sample_joint",
    "count_flips",
    "derive_seed",
    "make_rng",
    "as_bits",
    "format_bits",
    "parse_bits",
    "read_bits",
    "write_bits",
]


def entropy(p: float) -> float:
    """Binary entropy in bits, with ``0 log(1/0) = 0``."""
    p = float(p)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"probability must lie in [0, 1], got {p!r}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def entropy_array(p: np.ndarray) -> np.ndarray:
    """Vectorized :func:`entropy` without domain checks."""
    p = np.asarray(p, dtype=np.float64)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -p * np.log2(p) - q * np.log2(q)
    return np.where((p <= 0.0) | (p >= 1.0), 0.0, h)


@dataclass(frozen=True)
class SourceModel:
    """The pair ``(s, t)``: ``s = P(y=0)`` and ``t = P(x=0 | y=1)``."""

    s: float
    t: float

    def __post_init__(self) -> None:
        for name in ("s", "t"):
            v = getattr(self, name)
            if not isinstance(v, (int, float, np.floating)) or not 0.0 < float(v) < 1.0:
                raise ValueError(f"{name} must lie strictly inside (0, 1), got {v!r}")
            object.__setattr__(self, name, float(v))

    @property
    def p_x0(self) -> float:
        return self.s + (1.0 - self.s) * self.t

    @property
    def p_x1(self) -> float:
        return (1.0 - self.s) * (1.0 - self.t)

    @property
    def capacity(self) -> float:
        return (1.0 - self.s) * entropy(self.t)

    @property
    def flip_fraction(self) -> float:
        return (1.0 - self.s) * self.t


@dataclass(frozen=True)
class ModelStats:
    conditional_entropy: float
    capacity: float
    expected_flip_fraction: float


def model_stats(model: SourceModel) -> ModelStats:
    """Second-write capacity ``(1-s) H(t)`` and expected flip fraction ``(1-s) t``."""
    h = (1.0 - model.s) * entropy(model.t)
    return ModelStats(
        conditional_entropy=h,
        capacity=h,
        expected_flip_fraction=(1.0 - model.s) * model.t,
    )


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministically mix ``seed`` with ``keys`` into a fresh 64-bit seed."""
    if seed < 0 or any(k < 0 for k in keys):
        raise ValueError("seeds and keys must be non-negative")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys)))


def _draw_state(s: float, shape, rng: np.random.Generator) -> np.ndarray:
    return (rng.random(shape) >= s).astype(np.uint8)


def _draw_codeword(y: np.ndarray, t: float, rng: np.random.Generator) -> np.ndarray:
    return ((rng.random(y.shape) >= t) & (y == 1)).astype(np.uint8)


def sample_state(model: SourceModel, N: int, seed: int) -> np.ndarray:
    """Draw ``N`` iid memory cells, each 0 with probability ``s``."""
    if N < 1:
        raise ValueError("N must be positive")
    return _draw_state(model.s, N, make_rng(seed))


def sample_joint(model: SourceModel, N: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``(y, x)`` iid from the model; ``x`` is zero wherever ``y`` is."""
    if N < 1:
        raise ValueError("N must be positive")
    rng = make_rng(seed)
    y = _draw_state(model.s, N, rng)
    return y, _draw_codeword(y, model.t, rng)


def as_bits(bits, name: str = "bits") -> np.ndarray:
    """Coerce a 0/1 sequence to a 1-D ``uint8`` array, rejecting other values."""
    a = np.asarray(bits)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if a.size and not ((a == 0) | (a == 1)).all():
        raise ValueError(f"{name} must contain only 0 and 1")
    return a.astype(np.uint8, copy=False)


def count_flips(y, x) -> int:
    """Number of cells taken from state 1 to state 0."""
    y = as_bits(y, "y")
    x = as_bits(x, "x")
    if y.shape != x.shape:
        raise ValueError(f"length mismatch: {y.size} vs {x.size}")
    return int(np.count_nonzero((y == 1) & (x == 0)))


# BitSequence text format: one line of ASCII 0/1, first index first.

def format_bits(bits) -> str:
    return "".join("1" if b else "0" for b in as_bits(bits)) + "\n"


def parse_bits(text: str) -> np.ndarray:
    line = text.strip()
    if "\n" in line or any(c not in "01" for c in line):
        raise ValueError("bit file must be a single line of '0'/'1' characters")
    return np.frombuffer(line.encode("ascii"), dtype=np.uint8) - ord("0")


def read_bits(path: str | Path) -> np.ndarray:
    return parse_bits(Path(path).read_text(encoding="ascii"))


def write_bits(path: str | Path, bits) -> None:
    Path(path).write_text(format_bits(bits), encoding="ascii")
