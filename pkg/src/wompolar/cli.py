"""``wompolar`` command line.

Exit codes: 0 success, 2 bad arguments or unreadable input, 3 encode failure
after all retries, 4 a ``validate`` check failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import codec, construct, sim
from .model import SourceModel, format_bits, read_bits, write_bits

EXIT_OK, EXIT_USAGE, EXIT_ENCODE_FAILED, EXIT_CHECK_FAILED = 0, 2, 3, 4
DEFAULT_SEED = codec.DEFAULT_SEED


class UsageError(Exception):
    pass


def _probability(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"must lie strictly inside (0, 1): {v}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {v}")
    return v


def _positive_int(text: str) -> int:
    v = _nonneg_int(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v >= 0.0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {v}")
    return v


def _n_list(text: str) -> list[int]:
    try:
        values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None
    if not values or any(not 0 <= v <= 24 for v in values):
        raise argparse.ArgumentTypeError("log-sizes must lie in [0, 24]")
    return values


def _build_stats(n: int, s: float, t: float, method: str, samples: int, seed: int):
    model = SourceModel(s, t)
    N = 1 << n
    if method == "exact":
        if N > construct.MAX_EXACT_N:
            raise UsageError(f"--method exact supports --n <= {construct.MAX_EXACT_N.bit_length() - 1}")
        return construct.exact_statistics(model, N)
    return construct.estimate_statistics(model, N, samples=samples, seed=seed)


def _select(stats, mode: str, threshold: float, target: float | None):
    if mode == "threshold":
        return construct.select_high_entropy_set(stats, threshold=threshold)
    if target is None:
        raise UsageError("--mode rate needs --target")
    try:
        return construct.select_high_entropy_set(stats, target_rate=target)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_construct(args) -> int:
    stats = _build_stats(args.n, args.s, args.t, args.method, args.samples, args.seed)
    hes = _select(stats, args.mode, args.threshold, args.target)
    construct.save_set(hes, args.out)
    ratio = hes.rate / hes.capacity
    print(f"N={hes.N} M={hes.M} rate={hes.rate:.6f} capacity={hes.capacity:.6f} "
          f"rate/capacity={ratio:.6f} -> {args.out}")
    return EXIT_OK


def _load_inputs(set_path, *bit_paths):
    try:
        hes = construct.load_set(set_path)
        bits = [read_bits(p) for p in bit_paths]
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    return hes, bits


def _emit_bits(bits, out) -> None:
    if out is None:
        sys.stdout.write(format_bits(bits))
    else:
        write_bits(out, bits)


def cmd_encode(args) -> int:
    hes, (y, v) = _load_inputs(args.set, args.state, args.message)
    if y.size != hes.N or v.size != hes.M:
        raise UsageError(f"set expects state length {hes.N} and message length {hes.M}, "
                         f"got {y.size} and {v.size}")
    outcome = codec.encode(SourceModel(hes.s, hes.t), hes, y, v, seed=args.seed,
                           max_attempts=args.max_attempts, greedy=args.greedy)
    if not outcome.ok:
        f = outcome.failure
        report = {"status": "failure", "kind": f.kind, "attempts": outcome.attempts}
        if isinstance(f, codec.ZeroProbabilityEvent):
            report["index"] = f.index
        else:
            report["positions"] = list(f.positions)
        print(json.dumps(report), file=sys.stderr)
        return EXIT_ENCODE_FAILED
    _emit_bits(outcome.codeword, args.out)
    print(f"ok flips={outcome.flips} attempts={outcome.attempts}", file=sys.stderr)
    return EXIT_OK


def cmd_decode(args) -> int:
    hes, (x,) = _load_inputs(args.set, args.codeword)
    if x.size != hes.N:
        raise UsageError(f"set expects codeword length {hes.N}, got {x.size}")
    _emit_bits(codec.decode(x, hes), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    model = SourceModel(args.s, args.t)
    reports = []
    for n in args.n_list:
        stats = _build_stats(n, args.s, args.t, args.method, args.samples, args.seed)
        hes = _select(stats, "rate", 0.0, args.target_rate)
        reports.append(sim.run_write_experiment(model, hes, args.trials, args.seed,
                                                max_attempts=args.max_attempts, timing=args.timing))
    text = sim.reports_to_csv(reports) if args.format == "csv" else sim.reports_to_json(reports)
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_validate(args) -> int:
    from .checks import run_all

    if args.max_n > construct.MAX_EXACT_N.bit_length() - 1:
        raise UsageError(f"--max-n is limited to {construct.MAX_EXACT_N.bit_length() - 1}")
    results = run_all(args.max_n)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wompolar", description="WOM rewriting codes by source polarization")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build and save a high-entropy index set")
    c.add_argument("--n", type=_nonneg_int, required=True, help="log2 of the block length")
    c.add_argument("--s", type=_probability, required=True, help="fraction of cells already at 0")
    c.add_argument("--t", type=_probability, required=True, help="P(write 0 | cell at 1)")
    c.add_argument("--method", choices=("exact", "monte_carlo"), default="monte_carlo")
    c.add_argument("--samples", type=_positive_int, default=construct.DEFAULT_SAMPLES)
    c.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED)
    c.add_argument("--mode", choices=("threshold", "rate"), default="threshold")
    c.add_argument("--threshold", type=_nonneg_float, default=construct.DEFAULT_THRESHOLD)
    c.add_argument("--target", type=_nonneg_float, help="fraction of capacity (rate mode)")
    c.add_argument("--out", default="set.json")
    c.set_defaults(func=cmd_construct)

    e = sub.add_parser("encode", help="write a message over a memory state")
    e.add_argument("--set", required=True)
    e.add_argument("--state", required=True, help="bit file with the current cell states")
    e.add_argument("--message", required=True, help="bit file with M message bits")
    e.add_argument("--out", help="codeword bit file (stdout if omitted)")
    e.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED)
    e.add_argument("--max-attempts", type=_positive_int, default=codec.DEFAULT_MAX_ATTEMPTS)
    e.add_argument("--greedy", action="store_true", help="take likelier value for non-message bits")
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode", help="read the message back from a codeword")
    d.add_argument("--set", required=True)
    d.add_argument("--codeword", required=True)
    d.add_argument("--out", help="message bit file (stdout if omitted)")
    d.set_defaults(func=cmd_decode)

    b = sub.add_parser("bench", help="write-cycle experiments, one row per block length")
    b.add_argument("--n-list", type=_n_list, required=True, help="comma-separated log2 block lengths")
    b.add_argument("--s", type=_probability, default=0.5)
    b.add_argument("--t", type=_probability, default=0.5)
    b.add_argument("--target-rate", type=_nonneg_float, default=0.8)
    b.add_argument("--trials", type=_nonneg_int, default=1000)
    b.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED)
    b.add_argument("--method", choices=("exact", "monte_carlo"), default="monte_carlo")
    b.add_argument("--samples", type=_positive_int, default=10_000)
    b.add_argument("--max-attempts", type=_positive_int, default=codec.DEFAULT_MAX_ATTEMPTS)
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.add_argument("--timing", action="store_true", help="fill the seconds column")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("validate", help="exhaustive oracle checks on small blocks")
    v.add_argument("--max-n", type=_nonneg_int, default=3)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
