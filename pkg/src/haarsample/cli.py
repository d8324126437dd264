"""Command-line surface: sample matrices, verify distributions, benchmark.

Exit codes are a stable contract: 0 success, 1 runtime or test failure,
2 usage error.  The environment variable ``HAAR_SEED`` overrides ``--seed``
for every subcommand; seeds are accepted in decimal or 0x-hex.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
import time
from dataclasses import dataclass, field

from .harness import reports_to_json, reports_to_text
from .rng import RngStream
from .sampler import haar_matrix, qr_matrix
from .verify import METHODS, run_battery

USAGE_ERROR, RUNTIME_ERROR, OK = 2, 1, 0


def parse_seed(text: str) -> int:
    text = text.strip()
    value = int(text, 16) if text.lower().startswith("0x") else int(text)
    if not 0 <= value < 2 ** 64:
        raise ValueError(f"seed out of range: {text}")
    return value


def _seed_arg(text: str) -> int:
    try:
        return parse_seed(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _p_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension list: {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("dimensions must be integers >= 1")
    return values


@dataclass
class CliConfig:
    subcommand: str
    p: tuple[int, ...]
    n: int
    seed: int
    method: str = "recursive"
    fmt: str = "text"
    alpha: float = 0.01
    out: str | None = None
    soak: int = 0
    warmup: int = field(default=3, repr=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="haarsample",
        description="Haar-distributed random orthogonal matrices: sampling, "
                    "statistical verification, benchmarks.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sample = sub.add_parser("sample", help="write Haar draws to stdout or a file")
    sample.add_argument("--p", type=int, required=True, help="matrix dimension")
    sample.add_argument("--n", type=int, default=1, help="number of draws")
    sample.add_argument("--seed", type=_seed_arg, default=0)
    sample.add_argument("--method", choices=("recursive", "qr"),
                        default="recursive")
    sample.add_argument("--format", dest="fmt", choices=("text", "json"),
                        default="text")
    sample.add_argument("--out", default=None, help="output file (default stdout)")

    verify = sub.add_parser("verify", help="run the verification battery")
    verify.add_argument("--p", type=_p_list, default=(2, 3, 5),
                        help="comma-separated dimensions")
    verify.add_argument("--n", type=int, default=20_000,
                        help="draws per test (>= 10000)")
    verify.add_argument("--seed", type=_seed_arg, default=2024)
    verify.add_argument("--method", choices=METHODS, default="recursive")
    verify.add_argument("--alpha", type=float, default=0.01)
    verify.add_argument("--format", dest="fmt", choices=("text", "json"),
                        default="text")
    verify.add_argument("--soak", type=int, default=0, metavar="REPEATS",
                        help="repeat with fresh entropy seeds instead of the "
                             "fixed CI seed")
    verify.add_argument("--out", default=None)

    bench = sub.add_parser("bench", help="time recursive vs QR sampling")
    bench.add_argument("--p", type=_p_list, default=(8, 32),
                       help="comma-separated dimensions")
    bench.add_argument("--n", type=int, default=50, help="draws per timing")
    bench.add_argument("--seed", type=_seed_arg, default=0)
    bench.add_argument("--out", default=None)
    return parser


def parse_config(argv) -> CliConfig:
    args = build_parser().parse_args(argv)
    cfg = CliConfig(
        subcommand=args.subcommand,
        p=args.p if isinstance(args.p, tuple) else (args.p,),
        n=args.n,
        seed=args.seed,
        method=getattr(args, "method", "recursive"),
        fmt=getattr(args, "fmt", "text"),
        alpha=getattr(args, "alpha", 0.01),
        out=args.out,
        soak=getattr(args, "soak", 0),
    )
    env_seed = os.environ.get("HAAR_SEED")
    if env_seed is not None:
        cfg.seed = parse_seed(env_seed)
    if any(v < 1 for v in cfg.p) or cfg.n < 1 or not 0.0 < cfg.alpha < 0.5:
        raise ValueError("require p >= 1, n >= 1, alpha in (0, 0.5)")
    return cfg


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _matrix_text(m) -> str:
    return "\n".join(" ".join(f"{x:.17g}" for x in row) for row in m)


def cmd_sample(cfg: CliConfig) -> int:
    p = cfg.p[0]
    rng = RngStream(cfg.seed)
    draw = haar_matrix if cfg.method == "recursive" else qr_matrix
    mats = [draw(p, rng) for _ in range(cfg.n)]
    if cfg.fmt == "text":
        text = "\n\n".join(_matrix_text(m) for m in mats) + "\n"
    else:
        text = json.dumps([{"p": p, "seed": str(cfg.seed), "rows": m.tolist()}
                           for m in mats], indent=2) + "\n"
    _emit(text, cfg.out)
    return OK


def cmd_verify(cfg: CliConfig) -> int:
    seeds = ([secrets.randbits(63) for _ in range(cfg.soak)] if cfg.soak
             else [cfg.seed])
    reports = []
    for seed in seeds:
        for p in cfg.p:
            reports.extend(run_battery(p, method=cfg.method, n=cfg.n,
                                       seed=seed, alpha=cfg.alpha))
    text = (reports_to_json(reports) if cfg.fmt == "json"
            else reports_to_text(reports))
    if cfg.soak:
        text = "".join(f"# soak seed {s}\n" for s in seeds) + text
    _emit(text, cfg.out)
    return OK if all(r.passed for r in reports) else RUNTIME_ERROR


def _time_draws(draw, p: int, n: int, seed: int, warmup: int):
    rng = RngStream(seed)
    for _ in range(warmup):
        draw(p, rng)
    rng = RngStream(seed)
    checksum = 0.0
    start = time.perf_counter()
    for _ in range(n):
        checksum += float(draw(p, rng).sum())
    elapsed = time.perf_counter() - start
    return elapsed, checksum


def cmd_bench(cfg: CliConfig) -> int:
    lines = [f"{'p':>5} {'method':>10} {'seconds':>12} {'draws_per_sec':>14} "
             f"{'checksum':>22}"]
    for p in cfg.p:
        rates = {}
        for method, draw in (("recursive", haar_matrix), ("qr", qr_matrix)):
            elapsed, checksum = _time_draws(draw, p, cfg.n, cfg.seed,
                                            cfg.warmup)
            rate = cfg.n / elapsed if elapsed > 0 else float("inf")
            rates[method] = rate
            lines.append(f"{p:>5} {method:>10} {elapsed:>12.6f} "
                         f"{rate:>14.1f} {checksum:>22.17g}")
        lines.append(f"{p:>5} {'ratio':>10} recursive/qr="
                     f"{rates['recursive'] / rates['qr']:.3f}")
    _emit("\n".join(lines) + "\n", cfg.out)
    return OK


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else OK
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        if cfg.subcommand == "sample":
            return cmd_sample(cfg)
        if cfg.subcommand == "verify":
            return cmd_verify(cfg)
        return cmd_bench(cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
