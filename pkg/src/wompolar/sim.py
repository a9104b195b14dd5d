"""Write-cycle experiments and the exact total-variation check.

Reports serialize to CSV and JSON with the same twelve fields. ``seconds`` is
only filled in when timing is requested, so reports are byte-reproducible by
default.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .codec import (
    DEFAULT_MAX_ATTEMPTS,
    WriteViolation,
    ZeroProbabilityEvent,
    _encode,
    decode,
)
from .construct import (
    ConstructionCache,
    HighEntropySet,
    _prefix_conditionals,
    exact_statistics,
    joint_table,
    select_high_entropy_set,
)
from .model import SourceModel, _draw_state, count_flips, derive_seed, entropy, make_rng

__all__ = [
    "REPORT_FIELDS",
    "ExperimentReport",
    "TvReport",
    "run_write_experiment",
    "run_multiwrite",
    "tv_distance_exact",
    "reports_to_csv",
    "reports_to_json",
]

REPORT_FIELDS = (
    "N", "s", "t", "rate", "capacity", "trials", "successes",
    "zero_prob_failures", "violations", "flip_mean", "flip_stderr", "seconds",
)


@dataclass
class ExperimentReport:
    N: int
    s: float
    t: float
    rate: float
    capacity: float
    trials: int
    successes: int
    zero_prob_failures: int
    violations: int
    flip_mean: float
    flip_stderr: float
    seconds: float = 0.0
    decode_mismatches: int = 0
    state_violations: int = 0

    @property
    def failures(self) -> int:
        return self.zero_prob_failures + self.violations

    @property
    def failure_rate(self) -> float:
        return self.failures / self.trials if self.trials else 0.0

    @property
    def expected_flip_fraction(self) -> float:
        return (1.0 - self.s) * self.t

    @property
    def rate_gap(self) -> float:
        """``(capacity - rate) / capacity``."""
        return (self.capacity - self.rate) / self.capacity if self.capacity > 0 else 0.0

    def row(self) -> dict:
        return {k: getattr(self, k) for k in REPORT_FIELDS}


@dataclass
class TvReport:
    N: int
    indices: tuple[int, ...]
    tv: float
    bound: float
    half_deviation: list[float] = field(default_factory=list)


class _Tally:
    def __init__(self) -> None:
        self.trials = self.successes = self.zero_prob = self.violations = 0
        self.mismatches = self.state_violations = 0
        self.flips: list[float] = []
        self.s_values: list[float] = []
        self.rates: list[float] = []

    def add(self, outcome, y, v, hes: HighEntropySet) -> None:
        self.trials += 1
        if outcome.ok:
            self.successes += 1
            self.flips.append(count_flips(y, outcome.codeword) / hes.N)
            if not np.array_equal(decode(outcome.codeword, hes), v):
                self.mismatches += 1
        elif isinstance(outcome.failure, ZeroProbabilityEvent):
            self.zero_prob += 1
        elif isinstance(outcome.failure, WriteViolation):
            self.violations += 1

    def report(self, N, s, t, rate, capacity, seconds) -> ExperimentReport:
        f = np.asarray(self.flips)
        mean = float(f.mean()) if f.size else 0.0
        se = float(f.std(ddof=1) / math.sqrt(f.size)) if f.size > 1 else 0.0
        return ExperimentReport(
            N, s, t, rate, capacity, self.trials, self.successes, self.zero_prob,
            self.violations, mean, se, seconds, self.mismatches, self.state_violations,
        )


def run_write_experiment(model: SourceModel, hes: HighEntropySet, trials: int, seed: int,
                         max_attempts: int = DEFAULT_MAX_ATTEMPTS, greedy: bool = False,
                         timing: bool = False) -> ExperimentReport:
    """Encode ``trials`` uniform messages onto fresh iid states and decode them.

    Trial ``k`` draws its state and message from substream ``(seed, k, 0)``
    and encodes with seed ``derive_seed(seed, k, 1)``.
    """
    if trials < 0:
        raise ValueError("trials must be non-negative")
    start = time.perf_counter()
    tally = _Tally()
    for k in range(trials):
        rng = make_rng(seed, k, 0)
        y = _draw_state(model.s, hes.N, rng)
        v = rng.integers(0, 2, hes.M, dtype=np.uint8)
        out = _encode(model.t, hes, y, v, derive_seed(seed, k, 1), max_attempts, greedy)
        tally.add(out, y, v, hes)
    seconds = time.perf_counter() - start if timing else 0.0
    return tally.report(hes.N, model.s, model.t, hes.rate, model.capacity, seconds)


def run_multiwrite(schedule, N: int, trials: int, seed: int, target_rate: float = 0.8,
                   samples: int = 2000, max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                   cache: ConstructionCache | None = None,
                   timing: bool = False) -> list[ExperimentReport]:
    """Chain ``len(schedule)`` writes per trial, starting from all-ones memory.

    Before write ``k`` the zero fraction of the current state is measured and
    quantized to 1/256; the index set is built (or reused) for that value and
    ``schedule[k]``. A failed write leaves the state untouched. Report ``k``
    carries the mean measured zero fraction as ``s``.
    """
    schedule = [float(t) for t in schedule]
    if not schedule:
        raise ValueError("schedule must be non-empty")
    if not all(0.0 < t < 1.0 for t in schedule):
        raise ValueError("every t must lie strictly inside (0, 1)")
    cache = cache if cache is not None else ConstructionCache(samples=samples, seed=seed)
    tallies = [_Tally() for _ in schedule]
    elapsed = [0.0] * len(schedule)
    for trial in range(trials):
        state = np.ones(N, dtype=np.uint8)
        for k, t in enumerate(schedule):
            start = time.perf_counter()
            s_meas = float(np.count_nonzero(state == 0)) / N
            stats = cache.stats(N, s_meas, t)
            hes = select_high_entropy_set(stats, target_rate=target_rate)
            rng = make_rng(seed, trial, k, 0)
            v = rng.integers(0, 2, hes.M, dtype=np.uint8)
            out = _encode(stats.t, hes, state, v, derive_seed(seed, trial, k, 1), max_attempts, False)
            tally = tallies[k]
            tally.add(out, state, v, hes)
            tally.s_values.append(s_meas)
            tally.rates.append(hes.rate)
            if out.ok:
                if np.any((state == 0) & (out.codeword == 1)):
                    tally.state_violations += 1
                state = out.codeword
            elapsed[k] += time.perf_counter() - start
    reports = []
    for k, (t, tally) in enumerate(zip(schedule, tallies)):
        s_mean = float(np.mean(tally.s_values)) if tally.s_values else 0.0
        rate = float(np.mean(tally.rates)) if tally.rates else 0.0
        reports.append(tally.report(N, s_mean, t, rate, (1.0 - s_mean) * entropy(t),
                                    elapsed[k] if timing else 0.0))
    return reports


def tv_distance_exact(model: SourceModel, hes: HighEntropySet) -> TvReport:
    """Exact ``sum |P(y, u) - Q(y, u)|`` and the bound ``2 * sum_{i in F} a_i``.

    ``Q`` is the law of the encoder's walk with uniform message bits: fair
    coins on the set, the model conditionals elsewhere. Both laws are built
    as products of the same conditional tables. Prefixes of probability zero
    get a uniform conditional; they carry no mass under either law.
    """
    N = hes.N
    py, pu = joint_table(model, N)
    a = exact_statistics(model, N).half_deviation
    F = set(hes.indices)
    rows = py.size
    p = np.ones((rows, 1))
    q = np.ones((rows, 1))
    for i in range(N):
        prefix, cond0 = _prefix_conditionals(pu, N, i)
        c0 = np.where(prefix > 0, cond0, 0.5)
        p = np.stack([p * c0, p * (1.0 - c0)], axis=2).reshape(rows, -1)
        qc = np.full_like(c0, 0.5) if i in F else c0
        q = np.stack([q * qc, q * (1.0 - qc)], axis=2).reshape(rows, -1)
    tv = float(np.sum(py[:, None] * np.abs(p - q)))
    bound = 2.0 * float(sum(a[i] for i in hes.indices))
    return TvReport(N, tuple(hes.indices), tv, bound, [float(a[i]) for i in hes.indices])


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_FIELDS)
    for r in reports:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in r.row().values()])
    return buf.getvalue()


def reports_to_json(reports) -> str:
    return json.dumps([r.row() for r in reports], indent=2) + "\n"
