"""Exhaustive oracle checks for small blocks, run by ``wompolar validate``.

Each check returns a :class:`CheckResult`; nothing here raises on a failed
comparison.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .construct import (
    _bits_msb_first,
    _prefix_conditionals,
    exact_statistics,
    joint_table,
    select_high_entropy_set,
)
from .model import SourceModel
from .polar import gn_matrix, polar_transform
from .sc import ScEngine, chain_probabilities
from .sim import tv_distance_exact

GRID = tuple(itertools.product((0.3, 0.5, 0.7), repeat=2))
THRESHOLDS = (0.01, 0.05, 0.1)
# the bound is attained exactly when F = {0}; allow for double rounding only
TV_ROUNDING = 1e-12


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _sizes(max_n: int):
    return [1 << n for n in range(max_n + 1)]


def check_transform(max_n: int, seed: int = 0, random_inputs: int = 1000) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0
    for N in _sizes(max_n):
        n = N.bit_length() - 1
        xs = _bits_msb_first(N) if N <= 8 else rng.integers(0, 2, (random_inputs, N))
        expect = (xs @ gn_matrix(n).astype(np.int64)) % 2
        worst += int(np.count_nonzero(polar_transform(xs) != expect))
    return CheckResult("transform-oracle", worst == 0, f"N<={1 << max_n}, mismatched bits={worst}")


def check_involution(max_n: int, seed: int = 0, random_inputs: int = 1000) -> CheckResult:
    rng = np.random.default_rng(seed)
    bad = 0
    for N in _sizes(max_n):
        xs = rng.integers(0, 2, (random_inputs, N), dtype=np.uint8)
        bad += int(np.count_nonzero(polar_transform(polar_transform(xs)) != xs))
    return CheckResult("involution", bad == 0, f"N<={1 << max_n}, mismatched bits={bad}")


def check_chain_rule(max_n: int, grid=GRID, tol: float = 1e-10) -> CheckResult:
    """Chain product of SC conditionals against the per-cell product P(x|y)."""
    worst = 0.0
    zero_mismatch = 0
    for (s, t), N in itertools.product(grid, _sizes(max_n)):
        model = SourceModel(s, t)
        words = _bits_msb_first(N).astype(np.uint8)
        xs = polar_transform(words)
        for y in words:
            chain = chain_probabilities(model, y, words)
            direct = np.prod(np.where(y == 1, np.where(xs == 0, t, 1.0 - t), 1.0 - xs), axis=1)
            worst = max(worst, float(np.max(np.abs(chain - direct))))
            zero_mismatch += int(np.count_nonzero((chain == 0.0) != (direct == 0.0)))
    ok = worst <= tol and zero_mismatch == 0
    return CheckResult("chain-rule", ok, f"max abs err={worst:.3g}, zero-pattern mismatches={zero_mismatch}")


def sc_vs_enumeration(model: SourceModel, N: int) -> float:
    """Largest gap between the stepwise engine and enumerated conditionals, over every (y, prefix)."""
    py, pu = joint_table(model, N)
    tables = [_prefix_conditionals(pu, N, i) for i in range(N)]
    worst = 0.0
    for yi, y in enumerate(_bits_msb_first(N).astype(np.uint8)):
        stack = [(ScEngine(model, y), 0)]
        while stack:
            engine, prefix = stack.pop()
            i = engine.cursor
            d = engine.dist()
            mass, c0 = tables[i][0][yi, prefix], tables[i][1][yi, prefix]
            if mass > 0:
                worst = max(worst, abs(d.q0 - c0), abs(d.q1 - (1.0 - c0)))
            elif not d.impossible:
                worst = max(worst, 1.0)
            if i + 1 < N:
                stack.append((engine.copy().advance(1), 2 * prefix + 1))
                stack.append((engine.advance(0), 2 * prefix))
    return worst


def check_sc_conditionals(max_n: int, grid=GRID, tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    for (s, t), N in itertools.product(grid, _sizes(max_n)):
        worst = max(worst, sc_vs_enumeration(SourceModel(s, t), N))
    return CheckResult("sc-conditionals", worst <= tol, f"max abs err={worst:.3g}")


def check_conservation(max_n: int, grid=GRID, tol: float = 1e-9) -> CheckResult:
    worst = 0.0
    for (s, t), N in itertools.product(grid, _sizes(max_n)):
        model = SourceModel(s, t)
        total = float(exact_statistics(model, N).entropy.sum())
        worst = max(worst, abs(total - N * model.capacity))
    return CheckResult("entropy-conservation", worst <= tol, f"max abs err={worst:.3g}")


def check_tv_bound(max_n: int, grid=GRID, thresholds=THRESHOLDS) -> CheckResult:
    cases = violations = 0
    slack = np.inf
    for (s, t), N in itertools.product(grid, _sizes(max_n)):
        model = SourceModel(s, t)
        stats = exact_statistics(model, N)
        for delta in thresholds:
            rep = tv_distance_exact(model, select_high_entropy_set(stats, threshold=delta))
            cases += 1
            slack = min(slack, rep.bound - rep.tv)
            if rep.tv > rep.bound + TV_ROUNDING or not 0.0 <= rep.tv <= 2.0:
                violations += 1
        empty = replace(select_high_entropy_set(stats, threshold=0.0), indices=(), stats={})
        if tv_distance_exact(model, empty).tv != 0.0:
            violations += 1
    return CheckResult("tv-bound", violations == 0, f"cases={cases}, violations={violations}, min slack={slack:.3g}")


def run_all(max_n: int = 3) -> list[CheckResult]:
    return [
        check_transform(max_n),
        check_involution(max_n),
        check_chain_rule(max_n),
        check_sc_conditionals(max_n),
        check_conservation(max_n),
        check_tv_bound(max_n),
    ]
