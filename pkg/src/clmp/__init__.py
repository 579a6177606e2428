"""Covariance-learning matching pursuit for massive-MTC activity detection.

Subpackages: model (uplink signal generation), detector (the greedy CL-MP
algorithm), baselines (CWO / SOMP / MSBL), oracle (slow reference evaluators),
metrics (PMD / exact-recovery rate), config + harness (Monte-Carlo campaigns),
cli (the `clmp` command).
"""

from .baselines import CwoConfig, MsblConfig, cwo_detect, msbl_detect, somp_detect
from .config import ConfigError, ExperimentConfig, build_preset, parse_config_file
from .detector import (
    DetectionResult,
    MaxSelections,
    PowerThreshold,
    clmp_detect,
    clmp_detect_reference,
)
from .harness import (
    ResultRow,
    read_result_csv,
    run_experiment,
    runtime_scaling_report,
    snr_to_pmax,
    write_result_csv,
)
from .metrics import TrialOutcome, err, false_alarm_rate, pmd
from .model import (
    BernoulliActivation,
    FixedK,
    LogDistance,
    PilotMatrix,
    UniformDb,
    gen_pilots,
    gen_support,
    gen_truth,
    sample_covariance,
    simulate_trial,
)

__version__ = "0.1.0"

__all__ = [
    "BernoulliActivation",
    "ConfigError",
    "CwoConfig",
    "DetectionResult",
    "ExperimentConfig",
    "FixedK",
    "LogDistance",
    "MaxSelections",
    "MsblConfig",
    "PilotMatrix",
    "PowerThreshold",
    "ResultRow",
    "TrialOutcome",
    "UniformDb",
    "build_preset",
    "clmp_detect",
    "clmp_detect_reference",
    "cwo_detect",
    "err",
    "false_alarm_rate",
    "gen_pilots",
    "gen_support",
    "gen_truth",
    "msbl_detect",
    "parse_config_file",
    "pmd",
    "read_result_csv",
    "run_experiment",
    "runtime_scaling_report",
    "sample_covariance",
    "simulate_trial",
    "snr_to_pmax",
    "somp_detect",
    "write_result_csv",
]
