#!/usr/bin/env python3
"""Measure per-trial detector runtime against device count and pilot length.

Prints one table per sweep plus the fitted log-log slope for each detector.
Defaults match the numbers quoted in the README (5 trials per point); pass
--trials to average over more.
"""

import argparse
import time

import numpy as np

from clmp.baselines import CwoConfig, cwo_detect
from clmp.detector import MaxSelections, clmp_detect
from clmp.harness import runtime_scaling_report
from clmp.model import FixedK, UniformDb
from clmp.config import ExperimentConfig


def _cfg(trials: int, **overrides) -> ExperimentConfig:
    base = dict(
        n_devices=1000,
        pilot_len=64,
        n_antennas=20,
        activation=FixedK(k=10),
        pilot_kind="bernoulli",
        lsfc_model=UniformDb(min_db=-15.0, max_db=0.0),
        noise_var_w=1.0,
        p_max_w=1.0,
        snr_db=None,
        detectors=("clmp", "cwo"),
        trials=trials,
        master_seed=12345,
        sweep_axis="n_devices",
        sweep_values=(1000.0, 2000.0, 4000.0, 8000.0),
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def _show(title: str, report) -> None:
    print(f"\n{title}")
    print(f"{'value':>8} {'detector':>9} {'mean ms':>9} {'median ms':>10}")
    for row in report.rows:
        print(
            f"{row.sweep_value:8g} {row.detector:>9} "
            f"{1e3 * row.mean_time_s:9.2f} {1e3 * row.median_time_s:10.2f}"
        )
    for det, slope in sorted(report.slopes.items()):
        print(f"slope[{det}] = {slope:.3f}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=5, help="trials per sweep point")
    args = parser.parse_args()

    # compile both kernels before timing anything
    eye = np.eye(4)
    ones = np.ones((4, 8), dtype=complex)
    cwo_detect(eye, ones, 1.0, CwoConfig(), 1)
    clmp_detect(eye, ones, 1.0, MaxSelections(k_max=1))

    t0 = time.perf_counter()
    _show(
        "device-count sweep (L=64, K=10)",
        runtime_scaling_report(_cfg(args.trials)),
    )
    _show(
        "pilot-length sweep (N=1000, K=50)",
        runtime_scaling_report(
            _cfg(
                args.trials,
                activation=FixedK(k=50),
                detectors=("clmp",),
                sweep_axis="pilot_len",
                sweep_values=(32.0, 48.0, 64.0, 80.0),
            )
        ),
    )
    print(f"\ntotal {time.perf_counter() - t0:.0f}s")


if __name__ == "__main__":
    main()
