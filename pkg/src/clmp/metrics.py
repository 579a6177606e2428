"""Detection metrics aggregated over Monte-Carlo trials."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["TrialOutcome", "pmd", "err", "false_alarm_rate"]


@dataclass(frozen=True)
class TrialOutcome:
    true_support: frozenset[int]
    est_support: frozenset[int]
    wall_time_s: float

    def __post_init__(self) -> None:
        if self.wall_time_s < 0.0:
            raise ValueError("wall_time_s must be non-negative")


def pmd(outcomes: list[TrialOutcome]) -> float:
    """Mean fraction of active devices missed, averaged per trial."""
    if not outcomes:
        raise ValueError("no trial outcomes")
    total = 0.0
    for o in outcomes:
        if not o.true_support:
            raise ValueError("trial with empty true support")
        total += len(o.true_support - o.est_support) / len(o.true_support)
    return total / len(outcomes)


def err(outcomes: list[TrialOutcome]) -> float:
    """Fraction of trials whose estimated support matches the truth exactly."""
    if not outcomes:
        raise ValueError("no trial outcomes")
    exact = sum(1 for o in outcomes if o.est_support == o.true_support)
    return exact / len(outcomes)


def false_alarm_rate(outcomes: list[TrialOutcome], n_devices: int) -> float:
    """Diagnostic: mean fraction of inactive devices falsely declared active."""
    if not outcomes:
        raise ValueError("no trial outcomes")
    total = 0.0
    for o in outcomes:
        if any(i < 0 or i >= n_devices for i in o.true_support | o.est_support):
            raise ValueError("device index outside [0, n_devices)")
        inactive = n_devices - len(o.true_support)
        if inactive > 0:
            total += len(o.est_support - o.true_support) / inactive
    return total / len(outcomes)
