"""Command-line sweep runner.

A plain-text config file (key=value lines, # comments) can set any flag's
default; explicit command-line flags win. Every run writes a resolved-config
sidecar next to the CSV for provenance.
"""

import argparse
import sys

from .sweep import SweepConfig, run_sweep

_DEFAULTS = {
    "n": 1000,
    "k": 10,
    "m": 500,
    "ebn0_start": -6.0,
    "ebn0_stop": 6.0,
    "ebn0_step": 1.0,
    "iters": 6,
    "trials": 500,
    "seed": 12345,
    "mode": "both",
    "workers": 1,
    "out_csv": "sweep.csv",
    "out_svg": "sweep.svg",
}

_COERCE = {
    "n": int, "k": int, "m": int,
    "ebn0_start": float, "ebn0_stop": float, "ebn0_step": float,
    "iters": int, "trials": int, "seed": int, "workers": int,
    "mode": str, "out_csv": str, "out_svg": str,
}

_MODE_CHOICES = ("coded", "uncoded", "both")


def _load_config(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key not in _COERCE:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _COERCE[key](value)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from exc
    if "mode" in values and values["mode"] not in _MODE_CHOICES:
        raise ValueError(f"{path}: mode must be one of {_MODE_CHOICES}")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparselink",
        description="RSNR-vs-Eb/N0 Monte Carlo sweep of the 1-bit CS link "
        "with an iterative coded receiver and an uncoded baseline.",
    )
    parser.add_argument("--config", metavar="FILE", help="key=value config file; flags override it")
    parser.add_argument("--n", type=int, help="signal length")
    parser.add_argument("--k", type=int, help="sparsity (nonzero count)")
    parser.add_argument("--m", type=int, help="measurement count")
    parser.add_argument("--ebn0-start", type=float, dest="ebn0_start", help="grid start, dB")
    parser.add_argument("--ebn0-stop", type=float, dest="ebn0_stop", help="grid stop, dB (inclusive)")
    parser.add_argument("--ebn0-step", type=float, dest="ebn0_step", help="grid step, dB")
    parser.add_argument("--iters", type=int, help="receiver iterations (coded mode)")
    parser.add_argument("--trials", type=int, help="trials per grid cell")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--mode", choices=_MODE_CHOICES, help="which chains to run")
    parser.add_argument("--workers", type=int, help="worker processes (1 = in-process)")
    parser.add_argument("--out-csv", dest="out_csv", help="CSV output path")
    parser.add_argument("--out-svg", dest="out_svg", help="SVG plot output path")
    return parser


def _grid(start: float, stop: float, step: float) -> tuple:
    points = []
    value = start
    while value <= stop + 1e-9:
        points.append(round(value, 10))
        value += step
    return tuple(points)


def _write_sidecar(path: str, resolved: dict) -> None:
    lines = [f"{key}={resolved[key]}" for key in sorted(resolved)]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def main(argv=None) -> int:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)

    defaults = dict(_DEFAULTS)
    if known.config:
        try:
            defaults.update(_load_config(known.config))
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1

    parser = _build_parser()
    parser.set_defaults(**defaults)
    args = parser.parse_args(argv)

    if args.ebn0_step <= 0:
        print("error: --ebn0-step must be positive", file=sys.stderr)
        return 1
    if args.ebn0_stop < args.ebn0_start:
        print("error: --ebn0-stop must not precede --ebn0-start", file=sys.stderr)
        return 1

    grid = _grid(args.ebn0_start, args.ebn0_stop, args.ebn0_step)
    modes = ("coded", "uncoded") if args.mode == "both" else (args.mode,)
    try:
        cfg = SweepConfig(
            ebn0_grid=grid, iterations=args.iters, trials=args.trials,
            n=args.n, k=args.k, m=args.m, modes=modes, seed=args.seed,
            workers=args.workers, out_csv=args.out_csv, out_svg=args.out_svg,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    resolved = {key: getattr(args, key) for key in _DEFAULTS}
    try:
        _write_sidecar(args.out_csv + ".resolved", resolved)
    except OSError as exc:
        print(f"error: cannot write sidecar: {exc}", file=sys.stderr)
        return 1

    def report(cell_rows):
        last = cell_rows[-1]
        print(
            f"{last.mode:>7s}  Eb/N0 {last.ebn0_db:+6.2f} dB  "
            f"RSNR(final) {last.rsnr_db:8.4f} dB  [{last.wall_time:.1f}s]",
            flush=True,
        )

    try:
        run_sweep(cfg, progress=report)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out_csv} and {args.out_svg}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
