"""Command line front end: ``svcim ber`` and ``svcim timing``.

Every SystemConfig field has a flag; sweeps take an axis and a comma list
of values. Worker count for BER sweeps comes from the SVCIM_WORKERS
environment variable (default 1). Exit code is nonzero when the requested
configuration fails validation.
"""
from __future__ import annotations

import argparse
import sys

from .detectors import MmpDfParams
from .harness import SweepPlan, emit_results, run_ber_sweep, run_timing, write_timing_csv
from .link import SystemConfig, bits_per_symbol, config_from_text, spectral_efficiency


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config", metavar="PATH", default=None,
        help="load the system config from a key=value file (overrides the config flags)",
    )
    parser.add_argument("--scheme", choices=("esvc", "secbim"), default="esvc")
    parser.add_argument("--detector", choices=("mmpdf", "ml"), default="mmpdf")
    parser.add_argument("--N", type=int, default=64, help="subcarriers (power of two)")
    parser.add_argument("--M", type=int, default=64, help="virtual-domain length")
    parser.add_argument("--K", type=int, default=2, help="active indices")
    parser.add_argument("--L", type=int, default=16, help="cyclic prefix length")
    parser.add_argument("--v", type=int, default=10, help="channel taps")
    parser.add_argument("--G", type=int, default=1, help="codebooks (power of two)")
    parser.add_argument("--ebn0", type=float, default=10.0, help="Eb/N0 in dB (inf = noiseless)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--channel-path", choices=("freq", "time"), default="freq")
    parser.add_argument("--omega", type=int, default=2, help="search expansions per node")
    parser.add_argument("--lam", type=float, default=0.1, help="residual stop threshold")
    parser.add_argument("--upsilon", type=int, default=2, help="max full-depth candidates")
    parser.add_argument(
        "--absolute-stop", action="store_true",
        help="treat the stop threshold as an absolute residual instead of relative",
    )


def _config_from_args(args: argparse.Namespace) -> SystemConfig:
    if args.config is not None:
        with open(args.config) as fh:
            return config_from_text(fh.read())
    return SystemConfig(
        scheme=args.scheme,
        detector=args.detector,
        N=args.N,
        M=args.M,
        K=args.K,
        L=args.L,
        v=args.v,
        G=args.G,
        ebn0_db=args.ebn0,
        seed=args.seed,
        channel_path=args.channel_path,
        mmp=MmpDfParams(
            k=args.K, omega=args.omega, lam=args.lam, upsilon=args.upsilon,
            relative_stop=not args.absolute_stop,
        ),
    )


def _parse_values(axis: str, raw: str) -> tuple:
    caster = float if axis == "ebn0" else int
    return tuple(caster(part) for part in raw.split(",") if part.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="svcim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    ber = sub.add_parser("ber", help="Monte Carlo BER sweep")
    _add_config_flags(ber)
    ber.add_argument("--axis", choices=("ebn0", "N", "M", "G"), default="ebn0")
    ber.add_argument("--values", required=True, help="comma-separated sweep values")
    ber.add_argument("--min-errors", type=int, default=100)
    ber.add_argument("--max-trials", type=int, default=100_000)
    ber.add_argument("--out", default="ber.csv")
    ber.add_argument("--format", choices=("csv", "plot"), default="csv")

    timing = sub.add_parser("timing", help="per-decode running-time measurement")
    _add_config_flags(timing)
    timing.add_argument("--axis", choices=("ebn0", "N", "M", "G"), default="M")
    timing.add_argument("--values", required=True, help="comma-separated config values")
    timing.add_argument("--detectors", default="mmpdf,ml", help="comma list of detectors to time")
    timing.add_argument("--decodes", type=int, default=1000)
    timing.add_argument("--warmup", type=int, default=50)
    timing.add_argument("--out", default="timing.csv")
    return parser


def _cmd_ber(args: argparse.Namespace) -> int:
    plan = SweepPlan(
        base=_config_from_args(args),
        sweep_axis=args.axis,
        values=_parse_values(args.axis, args.values),
        min_errors=args.min_errors,
        max_trials=args.max_trials,
    )
    records = run_ber_sweep(plan)
    for rec in records:
        print(
            f"{args.axis}={getattr(rec.config, 'ebn0_db' if args.axis == 'ebn0' else args.axis)}"
            f" trials={rec.trials} errors={rec.bit_errors} ber={rec.ber:.3e}"
            f" ci95={rec.ci95:.1e}"
        )
    emit_results(records, args.format, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_timing(args: argparse.Namespace) -> int:
    plan = SweepPlan(
        base=_config_from_args(args),
        sweep_axis=args.axis,
        values=_parse_values(args.axis, args.values),
    )
    configs = [plan.config_at(v) for v in plan.values]
    detectors = tuple(part for part in args.detectors.split(",") if part.strip())
    records = run_timing(configs, detectors, decodes=args.decodes, warmup=args.warmup)
    for rec in records:
        eff = spectral_efficiency(rec.config)
        print(
            f"{rec.detector} N={rec.config.N} M={rec.config.M} G={rec.config.G}"
            f" m={bits_per_symbol(rec.config)} eta={eff:.4f}"
            f" mean={rec.mean_ns / 1e3:.1f}us spread={rec.spread_ns / 1e3:.1f}us"
        )
    with open(args.out, "w", newline="") as fh:
        write_timing_csv(records, fh)
    print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "ber":
            return _cmd_ber(args)
        return _cmd_timing(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
