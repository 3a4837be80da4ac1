"""Monte Carlo sweep harness: run the RSNR-vs-Eb/N0 grid, emit CSV and SVG.

Each (mode, Eb/N0) cell runs `trials` independent trials. Per-trial seeds are
derived from (master seed, mode, cell, trial index) alone, so adding grid
cells or changing the worker count never perturbs existing results; energies
are reduced in trial order, making the CSV byte-identical for any worker
count.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .onebit import SolverParams
from .receiver import TrialConfig, run_trial
from .signals import RsnrAccumulator, rsnr_db

_MODE_IDS = {"coded": 0, "uncoded": 1}

_SVG_PALETTE = (
    "#1b6ca8", "#d1495b", "#2e8b57", "#e08a1e", "#6a4fb3", "#807a6b", "#3aa6b9",
)


@dataclass(frozen=True)
class SweepConfig:
    ebn0_grid: tuple
    iterations: int = 6
    trials: int = 500
    n: int = 1000
    k: int = 10
    m: int = 500
    modes: tuple = ("coded", "uncoded")
    seed: int = 12345
    workers: int = 1
    out_csv: str | None = None
    out_svg: str | None = None
    solver: SolverParams = field(default_factory=SolverParams)
    phi_seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "ebn0_grid", tuple(float(v) for v in self.ebn0_grid))
        object.__setattr__(self, "modes", tuple(self.modes))
        if not self.ebn0_grid:
            raise ValueError("Eb/N0 grid must be nonempty")
        if self.trials < 1 or self.iterations < 1 or self.workers < 1:
            raise ValueError("trials, iterations and workers must be at least 1")
        for mode in self.modes:
            if mode not in _MODE_IDS:
                raise ValueError(f"unknown mode {mode!r}")
        if not self.modes:
            raise ValueError("need at least one mode")


@dataclass(frozen=True)
class SweepRow:
    mode: str
    ebn0_db: float
    iteration: int
    rsnr_db: float
    trials: int
    seed: int
    wall_time: float
    saturated: bool


@dataclass
class SweepResult:
    rows: list
    config: SweepConfig


def _cell_key(ebn0_db: float) -> int:
    if not math.isfinite(ebn0_db):
        return 0x7FFFFFFF
    return int(round(ebn0_db * 1000.0)) & 0xFFFFFFFF


def trial_seed(master: int, mode: str, ebn0_db: float, trial_index: int) -> int:
    """Stable 64-bit per-trial seed; independent of grid composition."""
    entropy = (
        master & 0xFFFFFFFFFFFFFFFF,
        _MODE_IDS[mode],
        _cell_key(ebn0_db),
        trial_index,
    )
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def _trial_error_energies(cfg: TrialConfig) -> list:
    """Per-iteration ||x/||x|| - x_hat||^2 for one trial.

    A trace cut short by the early-exit flag repeats its final error: the
    estimate had stopped moving.
    """
    trace = run_trial(cfg)
    errors = [float(np.sum((trace.signal_unit - est) ** 2)) for est in trace.estimates]
    want = cfg.iterations if cfg.mode == "coded" else 1
    while len(errors) < want:
        errors.append(errors[-1])
    return errors


def _preflight_outputs(cfg: SweepConfig) -> None:
    for path in (cfg.out_csv, cfg.out_svg):
        if path is None:
            continue
        try:
            with open(path, "a", encoding="utf-8"):
                pass
        except OSError as exc:
            raise OSError(f"cannot write output file {path!r}: {exc}") from exc


def _row_sort_key(row: SweepRow):
    return (_MODE_IDS[row.mode], row.ebn0_db, row.iteration)


def run_sweep(cfg: SweepConfig, progress=None) -> SweepResult:
    """Run every (mode, Eb/N0) cell and aggregate RSNR per iteration.

    progress, if given, is called with each finished cell's SweepRow list.
    Output files are checked for writability before any computation.
    """
    _preflight_outputs(cfg)
    rows = []
    for mode in cfg.modes:
        iters = cfg.iterations if mode == "coded" else 1
        for ebn0 in cfg.ebn0_grid:
            start = time.perf_counter()
            accumulators = [RsnrAccumulator() for _ in range(iters)]
            tasks = [
                TrialConfig(
                    n=cfg.n, k=cfg.k, m=cfg.m,
                    ebn0_db=ebn0, iterations=iters, mode=mode,
                    seed=trial_seed(cfg.seed, mode, ebn0, index),
                    solver=cfg.solver, phi_seed=cfg.phi_seed,
                )
                for index in range(cfg.trials)
            ]
            if cfg.workers == 1:
                energy_lists = map(_trial_error_energies, tasks)
                for energies in energy_lists:
                    for t, err in enumerate(energies):
                        accumulators[t].add(1.0, err)
            else:
                chunk = max(1, cfg.trials // (cfg.workers * 8))
                with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                    for energies in pool.map(_trial_error_energies, tasks, chunksize=chunk):
                        for t, err in enumerate(energies):
                            accumulators[t].add(1.0, err)
            wall = time.perf_counter() - start
            cell_rows = [
                SweepRow(
                    mode=mode, ebn0_db=ebn0, iteration=t + 1,
                    rsnr_db=rsnr_db(accumulators[t]), trials=cfg.trials,
                    seed=cfg.seed, wall_time=wall,
                    saturated=accumulators[t].saturated,
                )
                for t in range(iters)
            ]
            rows.extend(cell_rows)
            if progress is not None:
                progress(cell_rows)
    result = SweepResult(rows=sorted(rows, key=_row_sort_key), config=cfg)
    if cfg.out_csv is not None:
        emit_csv(result, cfg.out_csv)
    if cfg.out_svg is not None:
        emit_plot(result, cfg.out_svg)
    return result


def emit_csv(result: SweepResult, path: str) -> None:
    """Fixed-header CSV, 4 decimal places, LF endings, sorted row order."""
    lines = ["mode,ebn0_db,iteration,rsnr_db,trials,seed"]
    for row in sorted(result.rows, key=_row_sort_key):
        lines.append(
            f"{row.mode},{row.ebn0_db:.4f},{row.iteration},"
            f"{row.rsnr_db:.4f},{row.trials},{row.seed}"
        )
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write output file {path!r}: {exc}") from exc


def _svg_series(result: SweepResult):
    """(label, dashed, points) per curve, iteration order first, then uncoded."""
    series = []
    coded = sorted(
        {row.iteration for row in result.rows if row.mode == "coded"}
    )
    for t in coded:
        pts = sorted(
            (row.ebn0_db, row.rsnr_db)
            for row in result.rows
            if row.mode == "coded" and row.iteration == t
        )
        series.append((f"Iteration {t}", False, pts))
    uncoded = sorted(
        (row.ebn0_db, row.rsnr_db) for row in result.rows if row.mode == "uncoded"
    )
    if uncoded:
        series.append(("uncoded 1-bit CS", True, uncoded))
    return series


def emit_plot(result: SweepResult, path: str) -> None:
    """Self-contained SVG: one polyline per (mode, iteration) plus axes and legend."""
    series = _svg_series(result)
    width, height = 760, 520
    ml, mr, mt, mb = 64, 190, 36, 58
    pw, ph = width - ml - mr, height - mt - mb

    xs = [p[0] for _, _, pts in series for p in pts]
    ys = [p[1] for _, _, pts in series for p in pts]
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    if xmax - xmin < 1e-12:
        xmin, xmax = xmin - 0.5, xmax + 0.5
    if ymax - ymin < 1e-12:
        ymin, ymax = ymin - 1.0, ymax + 1.0
    ypad = 0.06 * (ymax - ymin)
    ymin, ymax = ymin - ypad, ymax + ypad

    def px(x):
        return ml + (x - xmin) / (xmax - xmin) * pw

    def py(y):
        return mt + (ymax - y) / (ymax - ymin) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        'stroke="#444444" stroke-width="1"/>',
    ]

    x_ticks = sorted(set(xs)) if len(set(xs)) <= 15 else list(np.linspace(xmin, xmax, 9))
    for xv in x_ticks:
        parts.append(
            f'<line x1="{px(xv):.2f}" y1="{mt + ph}" x2="{px(xv):.2f}" '
            f'y2="{mt + ph + 5}" stroke="#444444"/>'
        )
        parts.append(
            f'<text x="{px(xv):.2f}" y="{mt + ph + 19}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{xv:g}</text>'
        )
    for yv in np.linspace(ymin, ymax, 6):
        parts.append(
            f'<line x1="{ml - 5}" y1="{py(yv):.2f}" x2="{ml}" y2="{py(yv):.2f}" '
            'stroke="#444444"/>'
        )
        parts.append(
            f'<text x="{ml - 9}" y="{py(yv):.2f}" font-size="11" text-anchor="end" '
            f'dominant-baseline="middle" font-family="sans-serif">{yv:.1f}</text>'
        )
    parts.append(
        f'<text x="{ml + pw / 2:.0f}" y="{height - 16}" font-size="13" '
        'text-anchor="middle" font-family="sans-serif">Eb/N0 (dB)</text>'
    )
    parts.append(
        f'<text x="18" y="{mt + ph / 2:.0f}" font-size="13" text-anchor="middle" '
        f'font-family="sans-serif" transform="rotate(-90 18 {mt + ph / 2:.0f})">RSNR (dB)</text>'
    )

    legend_y = mt + 8
    for idx, (label, dashed, pts) in enumerate(series):
        color = _SVG_PALETTE[idx % len(_SVG_PALETTE)]
        dash = ' stroke-dasharray="7 5"' if dashed else ""
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="1.8"{dash}/>'
        )
        for x, y in pts:
            parts.append(
                f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2.4" fill="{color}"/>'
            )
        lx = ml + pw + 14
        parts.append(
            f'<line x1="{lx}" y1="{legend_y}" x2="{lx + 26}" y2="{legend_y}" '
            f'stroke="{color}" stroke-width="1.8"{dash}/>'
        )
        parts.append(
            f'<text x="{lx + 32}" y="{legend_y + 4}" font-size="12" '
            f'font-family="sans-serif">{label}</text>'
        )
        legend_y += 20
    parts.append("</svg>")

    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(parts) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write output file {path!r}: {exc}") from exc
