"""Command-line front end for Monte Carlo sum-rate sweeps."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import StrongIAError
from .experiments import ExperimentConfig, csv_lines, run_sweep, write_csv, write_summary
from .strong_ia import LINEAR_FALLBACK, STRONG_IA

_SCHEME_CHOICES = {
    "strong": (STRONG_IA,),
    "linear": (LINEAR_FALLBACK,),
    "both": (STRONG_IA, LINEAR_FALLBACK),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="strongia",
        description="Sum-rate sweeps for SIC-assisted and linear interference alignment "
        "on the 3-user single-antenna interference channel.",
    )
    p.add_argument("--n", type=int, default=3, help="streams per user (extension length is 2n)")
    p.add_argument("--trials", type=int, default=100, help="channel realizations per SNR point")
    p.add_argument("--snr-start", type=float, default=10.0, help="first SNR point in dB")
    p.add_argument("--snr-stop", type=float, default=50.0, help="last SNR point in dB (inclusive)")
    p.add_argument("--snr-step", type=float, default=5.0, help="SNR grid step in dB")
    p.add_argument("--seed", type=int, default=0, help="base seed for channel generation")
    p.add_argument(
        "--scheme", choices=sorted(_SCHEME_CHOICES), default="both", help="which schemes to run"
    )
    p.add_argument(
        "--gain-model", choices=("gaussian", "bounded"), default="gaussian",
        help="channel coefficient law",
    )
    p.add_argument("--h-min", type=float, default=0.1, help="magnitude floor (bounded model)")
    p.add_argument("--h-max", type=float, default=10.0, help="magnitude cap (bounded model)")
    p.add_argument(
        "--gain-boost",
        nargs=2,
        action="append",
        default=[],
        metavar=("LINK", "FACTOR"),
        help="scale one link by a factor; LINK is two digits rx,tx in 1..3, e.g. '23'",
    )
    p.add_argument(
        "--generator", choices=("ones", "balanced"), default="ones",
        help="precoder generator vector: all-ones or row-equilibrated",
    )
    p.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    p.add_argument("--summary", default=None, help="optional JSON summary path")
    return p


def _parse_boost(link: str, factor: str) -> tuple[int, int, float]:
    if len(link) != 2 or link[0] not in "123" or link[1] not in "123":
        raise StrongIAError(f"link must be two digits in 1..3, got {link!r}")
    try:
        f = float(factor)
    except ValueError as exc:
        raise StrongIAError(f"boost factor must be a number, got {factor!r}") from exc
    return int(link[0]) - 1, int(link[1]) - 1, f


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.snr_step <= 0:
        raise StrongIAError(f"--snr-step must be positive, got {args.snr_step}")
    grid = tuple(np.arange(args.snr_start, args.snr_stop + args.snr_step / 2, args.snr_step))
    boosts = tuple(_parse_boost(link, factor) for link, factor in args.gain_boost)
    return ExperimentConfig(
        n=args.n,
        trials=args.trials,
        snr_grid_db=grid,
        seed=args.seed,
        schemes=_SCHEME_CHOICES[args.scheme],
        gain_kind=args.gain_model,
        h_min=args.h_min,
        h_max=args.h_max,
        gain_boosts=boosts,
        generator=args.generator,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except StrongIAError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        rows = run_sweep(cfg)
    except StrongIAError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.out is None:
            for line in csv_lines(rows):
                print(line)
        else:
            write_csv(rows, args.out)
        if args.summary is not None:
            write_summary(cfg, rows, args.summary)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
