"""Selection of the high-entropy index set that carries message bits.

For each index ``i`` two statistics describe how close ``U_i`` is to a fair
coin given the memory state and the earlier bits:

* ``entropy``         ``H(U_i | Y, U_<i)`` in bits;
* ``half_deviation``  ``E |P(U_i = 0 | Y, U_<i) - 1/2|``.

Indices with small half-deviation are safe to overwrite with uniform message
bits. The statistics are computed exactly by enumeration for tiny blocks, or
estimated by Monte Carlo: draw ``(y, x)`` from the model, set ``u = x G_N`` and
run one SC pass with every ``u_i`` known.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .model import (
    SourceModel,
    _draw_codeword,
    _draw_state,
    entropy,
    entropy_array,
    make_rng,
)
from .polar import bit_reversal_perm, gn_matrix, log2_exact, polar_transform

__all__ = [
    "FORMAT_VERSION",
    "DEFAULT_SAMPLES",
    "DEFAULT_THRESHOLD",
    "MAX_EXACT_N",
    "IndexStats",
    "HighEntropySet",
    "SetFileError",
    "joint_table",
    "exact_statistics",
    "estimate_statistics",
    "select_high_entropy_set",
    "save_set",
    "load_set",
    "ConstructionCache",
]

FORMAT_VERSION = 1
DEFAULT_SAMPLES = 100_000
DEFAULT_THRESHOLD = 0.05
MAX_EXACT_N = 8
CHUNK = 256
_RATE_SLACK = 1e-9


class SetFileError(ValueError):
    """Malformed or inconsistent set file."""


@dataclass
class IndexStats:
    N: int
    s: float
    t: float
    method: str
    entropy: np.ndarray
    half_deviation: np.ndarray
    entropy_se: np.ndarray
    half_deviation_se: np.ndarray
    samples: int = 0
    seed: int | None = None

    @property
    def capacity(self) -> float:
        return (1.0 - self.s) * entropy(self.t)


@dataclass
class HighEntropySet:
    N: int
    indices: tuple[int, ...]
    s: float
    t: float
    method: str
    samples: int
    seed: int | None
    mode: str
    threshold_or_rate: float
    stats: dict[str, list[float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.indices = tuple(int(i) for i in self.indices)
        log2_exact(self.N)
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if self.indices and not 0 <= self.indices[0] <= self.indices[-1] < self.N:
            raise ValueError(f"indices must lie in [0, {self.N})")

    @property
    def M(self) -> int:
        return len(self.indices)

    @property
    def rate(self) -> float:
        return self.M / self.N

    @property
    def capacity(self) -> float:
        return (1.0 - self.s) * entropy(self.t)

    @property
    def rate_gap(self) -> float:
        """``1 - M / (N * capacity)``."""
        cap = self.capacity
        return 1.0 - self.M / (self.N * cap) if cap > 0 else 0.0

    @property
    def has_stats(self) -> bool:
        return bool(self.stats)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.N, dtype=np.uint8)
        m[list(self.indices)] = 1
        return m


# exact enumeration

def _bits_msb_first(N: int) -> np.ndarray:
    return ((np.arange(1 << N)[:, None] >> np.arange(N - 1, -1, -1)) & 1).astype(np.int64)


def joint_table(model: SourceModel, N: int) -> tuple[np.ndarray, np.ndarray]:
    """``P(y)`` and ``P(u | y)`` for every state and transformed word.

    Integers index bit vectors with position 0 as the most significant bit.
    Returns arrays of shape ``(2**N,)`` and ``(2**N, 2**N)``.
    """
    n = log2_exact(N)
    if N > MAX_EXACT_N:
        raise ValueError(f"exact enumeration limited to N <= {MAX_EXACT_N}")
    bits = _bits_msb_first(N)
    py = np.prod(np.where(bits == 0, model.s, 1.0 - model.s), axis=1)
    # P(x | y) for rows y, columns x
    yb, xb = bits[:, None, :], bits[None, :, :]
    pxy = np.prod(np.where(yb == 1, np.where(xb == 0, model.t, 1.0 - model.t), 1.0 - xb), axis=2)
    u_of_x = ((bits @ gn_matrix(n).astype(np.int64)) % 2) @ (1 << np.arange(N - 1, -1, -1))
    pu = np.zeros_like(pxy)
    pu[:, u_of_x] = pxy
    return py, pu


def _prefix_conditionals(pu: np.ndarray, N: int, i: int) -> tuple[np.ndarray, np.ndarray]:
    """``P(u_<i | y)`` and ``P(U_i = 0 | y, u_<i)`` (0 where the prefix is impossible)."""
    marg = pu.reshape(pu.shape[0], 1 << i, 2, 1 << (N - 1 - i)).sum(axis=3)
    prefix = marg.sum(axis=2)
    cond0 = np.divide(marg[:, :, 0], prefix, out=np.zeros_like(prefix), where=prefix > 0)
    return prefix, cond0


def exact_statistics(model: SourceModel, N: int) -> IndexStats:
    py, pu = joint_table(model, N)
    H = np.zeros(N)
    a = np.zeros(N)
    for i in range(N):
        prefix, cond0 = _prefix_conditionals(pu, N, i)
        w = py[:, None] * prefix
        H[i] = float(np.sum(w * entropy_array(cond0)))
        a[i] = float(np.sum(w * np.abs(cond0 - 0.5)))
    zeros = np.zeros(N)
    return IndexStats(N, model.s, model.t, "exact", H, a, zeros, zeros.copy())


# Monte Carlo

def _estimate(s: float, t: float, N: int, samples: int, seed: int) -> IndexStats:
    log2_exact(N)
    if samples < 1:
        raise ValueError("samples must be positive")
    rev = bit_reversal_perm(log2_exact(N))
    sums = np.zeros((4, N))
    done = 0
    chunk = 0
    while done < samples:
        B = min(CHUNK, samples - done)
        rng = make_rng(seed, chunk)
        y = _draw_state(s, (CHUNK, N), rng)
        x = _draw_codeword(y, t, rng)[:B]
        y = y[:B]
        sums += kernels.genie_stats(y[:, rev], polar_transform(x), t)
        done += B
        chunk += 1
    mean_a, mean_h = sums[0] / samples, sums[2] / samples
    if samples > 1:
        var_a = np.maximum(sums[1] - samples * mean_a**2, 0.0) / (samples - 1)
        var_h = np.maximum(sums[3] - samples * mean_h**2, 0.0) / (samples - 1)
        se_a, se_h = np.sqrt(var_a / samples), np.sqrt(var_h / samples)
    else:
        se_a = se_h = np.zeros(N)
    return IndexStats(N, s, t, "monte_carlo", mean_h, mean_a, se_h, se_a, samples, seed)


def estimate_statistics(model: SourceModel, N: int, samples: int = DEFAULT_SAMPLES,
                        seed: int = 0) -> IndexStats:
    """Monte Carlo estimates of the per-index statistics.

    Samples are drawn in chunks of 256, chunk ``c`` from substream ``(seed, c)``,
    so a larger ``samples`` extends rather than reshuffles a smaller run.
    """
    return _estimate(model.s, model.t, N, samples, seed)


def select_high_entropy_set(stats: IndexStats, *, threshold: float | None = None,
                            target_rate: float | None = None) -> HighEntropySet:
    """Pick the message-carrying indices.

    ``threshold``: every index with ``half_deviation <= threshold``.
    ``target_rate``: the ``ceil(target_rate * N * capacity)`` indices with the
    smallest half-deviation, ties going to the smaller index.
    """
    if (threshold is None) == (target_rate is None):
        raise ValueError("give exactly one of threshold or target_rate")
    a = np.asarray(stats.half_deviation, dtype=np.float64)
    finite = np.isfinite(a)
    if threshold is not None:
        if threshold < 0:
            raise ValueError("threshold must be non-negative")
        chosen = np.flatnonzero(finite & (a <= threshold))
        mode, value = "threshold", float(threshold)
    else:
        if target_rate < 0:
            raise ValueError("target_rate must be non-negative")
        want = math.ceil(target_rate * stats.N * stats.capacity - _RATE_SLACK)
        have = int(finite.sum())
        if want > have:
            max_rate = have / (stats.N * stats.capacity) if stats.capacity > 0 else 0.0
            raise ValueError(
                f"target rate {target_rate} needs {want} indices but only {have} are available; "
                f"max achievable rate is {max_rate:.6g}"
            )
        order = np.lexsort((np.arange(stats.N), np.where(finite, a, np.inf)))
        chosen = np.sort(order[:want])
        mode, value = "rate", float(target_rate)
    chosen = [int(i) for i in chosen]
    sel = {
        "half_deviation": [float(stats.half_deviation[i]) for i in chosen],
        "half_deviation_se": [float(stats.half_deviation_se[i]) for i in chosen],
        "entropy": [float(stats.entropy[i]) for i in chosen],
        "entropy_se": [float(stats.entropy_se[i]) for i in chosen],
    }
    return HighEntropySet(stats.N, tuple(chosen), stats.s, stats.t, stats.method,
                          stats.samples, stats.seed, mode, value, sel)


# persistence

_STAT_KEYS = ("half_deviation", "half_deviation_se", "entropy", "entropy_se")


def _to_document(hes: HighEntropySet) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "N": hes.N,
        "s": hes.s,
        "t": hes.t,
        "method": hes.method,
        "samples": hes.samples,
        "seed": hes.seed,
        "mode": hes.mode,
        "threshold_or_rate": hes.threshold_or_rate,
        "indices": list(hes.indices),
    }
    if hes.stats:
        doc["stats"] = {k: hes.stats[k] for k in _STAT_KEYS if k in hes.stats}
    return doc


def dumps_set(hes: HighEntropySet) -> str:
    return json.dumps(_to_document(hes), allow_nan=False) + "\n"


def save_set(hes: HighEntropySet, path: str | Path) -> None:
    Path(path).write_text(dumps_set(hes), encoding="utf-8")


def _from_document(doc) -> HighEntropySet:
    if not isinstance(doc, dict):
        raise SetFileError("set file must hold a JSON object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise SetFileError(f"unsupported format_version {doc.get('format_version')!r}")
    missing = [k for k in ("N", "s", "t", "method", "mode", "threshold_or_rate", "indices") if k not in doc]
    if missing:
        raise SetFileError(f"missing fields: {', '.join(missing)}")
    N = doc["N"]
    if not isinstance(N, int) or isinstance(N, bool):
        raise SetFileError("N must be an integer")
    try:
        log2_exact(N)
        SourceModel(doc["s"], doc["t"])
    except ValueError as exc:
        raise SetFileError(str(exc)) from None
    if doc["method"] not in ("exact", "monte_carlo"):
        raise SetFileError(f"unknown method {doc['method']!r}")
    if doc["mode"] not in ("threshold", "rate"):
        raise SetFileError(f"unknown mode {doc['mode']!r}")
    idx = doc["indices"]
    if not isinstance(idx, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in idx):
        raise SetFileError("indices must be a list of integers")
    stats = doc.get("stats") or {}
    if not isinstance(stats, dict):
        raise SetFileError("stats must be an object")
    for k, v in stats.items():
        if k not in _STAT_KEYS or not isinstance(v, list) or len(v) != len(idx):
            raise SetFileError(f"stats field {k!r} must be a list aligned with indices")
    try:
        return HighEntropySet(
            N, tuple(idx), float(doc["s"]), float(doc["t"]), doc["method"],
            int(doc.get("samples") or 0), doc.get("seed"), doc["mode"],
            float(doc["threshold_or_rate"]), {k: [float(x) for x in v] for k, v in stats.items()},
        )
    except ValueError as exc:
        raise SetFileError(str(exc)) from None


def loads_set(text: str) -> HighEntropySet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SetFileError(f"not valid JSON: {exc}") from None
    return _from_document(doc)


def load_set(path: str | Path) -> HighEntropySet:
    return loads_set(Path(path).read_text(encoding="utf-8"))


class ConstructionCache:
    """Monte Carlo statistics keyed by ``(N, s, t)`` quantized to 1/256.

    Keys with ``s`` quantized to 0 stand for fresh memory (every cell in
    state 1); ``s`` is capped at 255/256 so some cells always remain.
    """

    QUANTUM = 256

    def __init__(self, samples: int = 2000, seed: int = 0) -> None:
        self.samples = samples
        self.seed = seed
        self._stats: dict[tuple, IndexStats] = {}

    @classmethod
    def quantize(cls, p: float, lowest: int = 0) -> float:
        k = min(max(round(p * cls.QUANTUM), lowest), cls.QUANTUM - 1)
        return k / cls.QUANTUM

    def stats(self, N: int, s: float, t: float) -> IndexStats:
        sq, tq = self.quantize(s), self.quantize(t, lowest=1)
        key = (N, sq, tq, "monte_carlo", self.samples, self.seed)
        if key not in self._stats:
            self._stats[key] = _estimate(sq, tq, N, self.samples, self.seed)
        return self._stats[key]

    def __len__(self) -> int:
        return len(self._stats)
