"""Fixtures that produce real harness CSVs through the simulator's public CLI.

This package deliberately knows nothing about the simulator's internals; the
CSV files and the `clmp` command line are the only interface, so the fixtures
shell out exactly the way a user would.
"""

import shutil
import subprocess

import pytest


def _run_clmp(args: list[str]) -> None:
    if shutil.which("clmp") is None:
        pytest.skip("clmp CLI not installed")
    subprocess.run(["clmp", "run", *args], check=True, capture_output=True, text=True)


@pytest.fixture(scope="session")
def fig2_csv(tmp_path_factory):
    """Antenna sweep, 5 activity levels x 2 detectors; 1 trial (shape, not stats)."""
    path = tmp_path_factory.mktemp("csv") / "fig2.csv"
    _run_clmp(["--preset", "fig2", "--trials", "1", "--out", str(path)])
    return path


@pytest.fixture(scope="session")
def fig5_csv(tmp_path_factory):
    """SNR sweep for the greedy detector with enough trials for a clean curve."""
    path = tmp_path_factory.mktemp("csv") / "fig5.csv"
    _run_clmp(
        ["--preset", "fig5", "--detectors", "clmp", "--trials", "60", "--out", str(path)]
    )
    return path
