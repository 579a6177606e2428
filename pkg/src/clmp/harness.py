"""Monte-Carlo experiment runner: seeded trials, timing, CSV results."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .baselines import CwoConfig, MsblConfig, cwo_detect, msbl_detect, somp_detect
from .config import ConfigError, ExperimentConfig
from .detector import MaxSelections, clmp_detect
from .metrics import TrialOutcome, err, pmd
from .model import (
    FixedK,
    LogDistance,
    gen_pilots,
    gen_truth,
    sample_covariance,
    simulate_trial,
)

__all__ = [
    "ResultRow",
    "ScalingReport",
    "snr_to_pmax",
    "run_experiment",
    "runtime_scaling_report",
    "write_result_csv",
    "read_result_csv",
    "CSV_HEADER",
]

CSV_HEADER = "sweep_axis,sweep_value,detector,pmd,err,mean_time_s,median_time_s,trials,seed"


@dataclass(frozen=True)
class ResultRow:
    sweep_axis: str
    sweep_value: float
    detector: str
    pmd: float
    err: float
    mean_time_s: float
    median_time_s: float
    trials: int
    seed: int


@dataclass(frozen=True)
class ScalingReport:
    rows: list[ResultRow]
    slopes: dict[str, float]  # detector -> d log(mean time) / d log(axis value)


def snr_to_pmax(snr_db: float, beta_min: float, noise_var: float) -> float:
    """Invert the cell-edge SNR relation snr = p_max * beta_min / noise_var."""
    if beta_min <= 0.0 or noise_var <= 0.0:
        raise ValueError("beta_min and noise_var must be positive")
    return noise_var * 10.0 ** (snr_db / 10.0) / beta_min


@dataclass(frozen=True)
class _Point:
    """One sweep point, fully resolved to concrete physical parameters."""

    n_devices: int
    pilot_len: int
    n_antennas: int
    activation: object
    pilot_kind: str
    lsfc_model: object
    noise_var: float
    p_max: float
    detectors: tuple[str, ...]


def _resolve_point(cfg: ExperimentConfig, value: float) -> _Point:
    n, l, m = cfg.n_devices, cfg.pilot_len, cfg.n_antennas
    activation = cfg.activation
    snr_db = cfg.snr_db
    if cfg.sweep_axis == "n_antennas":
        m = int(value)
    elif cfg.sweep_axis == "pilot_len":
        l = int(value)
    elif cfg.sweep_axis == "n_devices":
        n = int(value)
    elif cfg.sweep_axis == "k":
        activation = FixedK(k=int(value))
    elif cfg.sweep_axis == "snr_db":
        snr_db = value
    p_max = cfg.p_max_w
    if snr_db is not None:
        assert isinstance(cfg.lsfc_model, LogDistance)  # enforced by validate()
        p_max = snr_to_pmax(snr_db, cfg.lsfc_model.beta_edge, cfg.noise_var_w)
    if isinstance(activation, FixedK) and activation.k > n:
        raise ConfigError(f"k = {activation.k} exceeds n_devices = {n}")
    return _Point(
        n_devices=n,
        pilot_len=l,
        n_antennas=m,
        activation=activation,
        pilot_kind=cfg.pilot_kind,
        lsfc_model=cfg.lsfc_model,
        noise_var=cfg.noise_var_w,
        p_max=p_max,
        detectors=cfg.detectors,
    )


def _run_single_trial(
    point: _Point, master_seed: int, sweep_idx: int, trial_idx: int
) -> dict[str, TrialOutcome]:
    """One seeded trial: generate data once, run every detector on it."""
    rng = np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(sweep_idx, trial_idx, 0))
    )
    pilots = gen_pilots(point.pilot_len, point.n_devices, point.pilot_kind, rng)
    truth = gen_truth(
        point.n_devices, point.n_antennas, point.activation, point.lsfc_model, point.p_max, rng
    )
    sig = simulate_trial(pilots, truth, point.noise_var, rng)
    scm = sample_covariance(sig)
    k_real = int(truth.support.size)
    true_set = frozenset(int(i) for i in truth.support)

    outcomes: dict[str, TrialOutcome] = {}
    for det in point.detectors:
        if det == "clmp":
            t0 = time.perf_counter()
            res = clmp_detect(scm, pilots, point.noise_var, MaxSelections(k_max=k_real))
            dt = time.perf_counter() - t0
        elif det == "cwo":
            seed = int(
                np.random.SeedSequence(
                    master_seed, spawn_key=(sweep_idx, trial_idx, 1)
                ).generate_state(1, np.uint64)[0]
            )
            cfg_cwo = CwoConfig(seed=seed)
            t0 = time.perf_counter()
            res = cwo_detect(scm, pilots, point.noise_var, cfg_cwo, k_real)
            dt = time.perf_counter() - t0
        elif det == "somp":
            k_somp = min(k_real, point.pilot_len)  # SOMP cannot refit more atoms than rows
            t0 = time.perf_counter()
            res = somp_detect(sig.y, pilots, k_somp)
            dt = time.perf_counter() - t0
        elif det == "msbl":
            t0 = time.perf_counter()
            res = msbl_detect(sig.y, pilots, point.noise_var, MsblConfig(), k_real)
            dt = time.perf_counter() - t0
        else:
            raise ConfigError(f"unknown detector {det!r}")
        outcomes[det] = TrialOutcome(
            true_support=true_set,
            est_support=frozenset(int(i) for i in res.support),
            wall_time_s=dt,
        )
    return outcomes


def _trial_worker(args) -> dict[str, TrialOutcome]:
    return _run_single_trial(*args)


def run_experiment(
    cfg: ExperimentConfig,
    workers: int = 1,
    progress: Callable[[str], None] | None = None,
) -> list[ResultRow]:
    """Run the full sweep: Q seeded trials per sweep value, all detectors per trial.

    Trial substreams derive from (master_seed, sweep_index, trial_index), so
    results are identical regardless of worker count.
    """
    cfg.validate()
    points = [_resolve_point(cfg, v) for v in cfg.sweep_values]  # fail fast, before any trial

    rows: list[ResultRow] = []
    for sweep_idx, (value, point) in enumerate(zip(cfg.sweep_values, points)):
        if progress is not None:
            progress(f"{cfg.sweep_axis} = {value:g}: running {cfg.trials} trials")
        args = [(point, cfg.master_seed, sweep_idx, q) for q in range(cfg.trials)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                per_trial = list(pool.map(_trial_worker, args, chunksize=max(1, cfg.trials // (8 * workers))))
        else:
            per_trial = []
            for i, a in enumerate(args):
                per_trial.append(_trial_worker(a))
                if progress is not None and (i + 1) % 500 == 0 and i + 1 < cfg.trials:
                    progress(f"  ... {i + 1}/{cfg.trials} trials")
        for det in cfg.detectors:
            outs = [t[det] for t in per_trial]
            times = np.array([o.wall_time_s for o in outs])
            rows.append(
                ResultRow(
                    sweep_axis=cfg.sweep_axis,
                    sweep_value=float(value),
                    detector=det + cfg.label_suffix,
                    pmd=pmd(outs),
                    err=err(outs),
                    mean_time_s=float(times.mean()),
                    median_time_s=float(np.median(times)),
                    trials=cfg.trials,
                    seed=cfg.master_seed,
                )
            )
            if progress is not None:
                r = rows[-1]
                progress(
                    f"  {r.detector}: pmd={r.pmd:.6g} err={r.err:.6g} mean_t={r.mean_time_s:.4g}s"
                )
    rows.sort(key=lambda r: (r.sweep_value, r.detector))
    return rows


def runtime_scaling_report(cfg: ExperimentConfig, min_points: int = 4) -> ScalingReport:
    """Least-squares log-log slope of mean detect time along the sweep axis."""
    if len(cfg.sweep_values) < min_points:
        raise ConfigError(
            f"runtime scaling needs at least {min_points} sweep points, got {len(cfg.sweep_values)}"
        )
    rows = run_experiment(cfg)
    slopes: dict[str, float] = {}
    for det in sorted({r.detector for r in rows}):
        det_rows = sorted((r for r in rows if r.detector == det), key=lambda r: r.sweep_value)
        x = np.log([r.sweep_value for r in det_rows])
        y = np.log([r.mean_time_s for r in det_rows])
        slopes[det] = float(np.polyfit(x, y, 1)[0])
    return ScalingReport(rows=rows, slopes=slopes)


# ---------------------------------------------------------------------------
# CSV


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_result_csv(rows: list[ResultRow], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in rows:
            fh.write(
                ",".join(
                    [
                        r.sweep_axis,
                        _fmt(r.sweep_value),
                        r.detector,
                        _fmt(r.pmd),
                        _fmt(r.err),
                        _fmt(r.mean_time_s),
                        _fmt(r.median_time_s),
                        str(r.trials),
                        str(r.seed),
                    ]
                )
                + "\n"
            )


def read_result_csv(path: str) -> list[ResultRow]:
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"unexpected CSV header in {path!r}")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 9:
            raise ValueError(f"malformed CSV row: {line!r}")
        rows.append(
            ResultRow(
                sweep_axis=parts[0],
                sweep_value=float(parts[1]),
                detector=parts[2],
                pmd=float(parts[3]),
                err=float(parts[4]),
                mean_time_s=float(parts[5]),
                median_time_s=float(parts[6]),
                trials=int(parts[7]),
                seed=int(parts[8]),
            )
        )
    return rows
