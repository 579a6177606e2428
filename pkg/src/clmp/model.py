"""Uplink system model: pilots, activity, fading, power control, received signal.

Everything here is plain numpy on complex128.  Randomness always flows through
an explicit ``numpy.random.Generator`` so trials are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PilotMatrix",
    "FixedK",
    "BernoulliActivation",
    "UniformDb",
    "LogDistance",
    "TrialGroundTruth",
    "ReceivedSignal",
    "SampleCovariance",
    "cn_sample",
    "gen_pilots",
    "gen_support",
    "gen_lsfc",
    "power_control",
    "gen_truth",
    "simulate_trial",
    "sample_covariance",
]


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class PilotMatrix:
    """Pilot book A with L-symbol columns, one per device, each with ||a||^2 = L."""

    entries: np.ndarray  # (L, N) complex128
    kind: str  # "bernoulli" | "gaussian"

    @property
    def pilot_len(self) -> int:
        return self.entries.shape[0]

    @property
    def n_devices(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class FixedK:
    """Exactly k devices active, chosen uniformly without replacement."""

    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("FixedK requires k >= 1")


@dataclass(frozen=True)
class BernoulliActivation:
    """Each device active independently with probability eps."""

    eps: float

    def __post_init__(self) -> None:
        if not 0.0 < self.eps < 1.0:
            raise ValueError("activation probability must lie in (0, 1)")


@dataclass(frozen=True)
class UniformDb:
    """Large-scale fading drawn uniformly in dB, beta = 10^(U/10)."""

    min_db: float
    max_db: float


@dataclass(frozen=True)
class LogDistance:
    """Path loss beta_dB = -130 - 37.6 log10(d) with d uniform on a ring."""

    cell_radius_m: float = 250.0
    min_radius_m: float = 25.0

    def beta_at(self, dist_m: np.ndarray | float) -> np.ndarray | float:
        return 10.0 ** ((-130.0 - 37.6 * np.log10(dist_m)) / 10.0)

    @property
    def beta_edge(self) -> float:
        """Cell-edge (weakest) large-scale coefficient."""
        return float(self.beta_at(self.cell_radius_m))


@dataclass(frozen=True)
class TrialGroundTruth:
    """Per-trial generative state: who is active and with what received power."""

    support: np.ndarray  # sorted int indices of active devices, shape (K,)
    lsfc: np.ndarray  # (N,) large-scale coefficients beta_n (linear)
    tx_power: np.ndarray  # (N,) transmit powers rho_n
    gamma: np.ndarray  # (N,) received powers, gamma_n = rho_n*beta_n on support, else 0
    channels: np.ndarray  # (K, M) rows h_n ~ CN(0, I_M) for active devices


@dataclass(frozen=True)
class ReceivedSignal:
    y: np.ndarray  # (L, M) observations Y = A X + W
    noise_var: float


@dataclass(frozen=True)
class SampleCovariance:
    s_hat: np.ndarray  # (L, L) Hermitian PSD, Y Y^H / M
    n_snapshots: int


# ---------------------------------------------------------------------------
# sampling helpers


def cn_sample(rng: np.random.Generator, shape, var: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian, entrywise CN(0, var)."""
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def gen_pilots(pilot_len: int, n_devices: int, kind: str, rng: np.random.Generator) -> PilotMatrix:
    """Draw a pilot matrix with every column scaled to ||a_n||^2 = pilot_len.

    kind "bernoulli": i.i.d. +-1 entries (already unit-modulus, no rescale needed).
    kind "gaussian":  i.i.d. CN(0,1) entries, then each column renormalized.
    """
    if kind == "bernoulli":
        a = (2.0 * rng.integers(0, 2, size=(pilot_len, n_devices)) - 1.0).astype(np.complex128)
    elif kind == "gaussian":
        a = cn_sample(rng, (pilot_len, n_devices))
        norms = np.linalg.norm(a, axis=0)
        if np.any(norms == 0.0):  # probability zero, but keep the contract airtight
            raise ValueError("degenerate zero pilot column")
        a = a * (np.sqrt(pilot_len) / norms)
    else:
        raise ValueError(f"unknown pilot kind {kind!r}")
    return PilotMatrix(entries=a, kind=kind)


def gen_support(n_devices: int, activation, rng: np.random.Generator) -> np.ndarray:
    """Sample the active-device index set (sorted).

    FixedK draws exactly k indices without replacement.  BernoulliActivation
    flips a coin per device; an all-inactive draw is resampled so every trial
    carries at least one active device.
    """
    if isinstance(activation, FixedK):
        if activation.k > n_devices:
            raise ValueError("k exceeds device count")
        support = np.sort(rng.choice(n_devices, size=activation.k, replace=False))
    elif isinstance(activation, BernoulliActivation):
        while True:
            mask = rng.random(n_devices) < activation.eps
            if mask.any():
                break
        support = np.flatnonzero(mask)
    else:
        raise TypeError(f"unknown activation model {activation!r}")
    return support.astype(np.int64)


def gen_lsfc(model, n_devices: int, rng: np.random.Generator) -> np.ndarray:
    """Draw per-device large-scale fading coefficients (linear scale)."""
    if isinstance(model, UniformDb):
        db = rng.uniform(model.min_db, model.max_db, size=n_devices)
        return 10.0 ** (db / 10.0)
    if isinstance(model, LogDistance):
        dist = rng.uniform(model.min_radius_m, model.cell_radius_m, size=n_devices)
        return np.asarray(model.beta_at(dist))
    raise TypeError(f"unknown fading model {model!r}")


def power_control(lsfc: np.ndarray, p_max: float, beta_target: float) -> np.ndarray:
    """Channel inversion toward the cell-edge coefficient.

    Device n transmits rho_n = p_max * beta_target / beta_n, so every device is
    received at power p_max * beta_target.  beta_target is the weakest possible
    coefficient, hence rho_n <= p_max always.
    """
    if p_max <= 0.0 or beta_target <= 0.0:
        raise ValueError("p_max and beta_target must be positive")
    return p_max * beta_target / lsfc


def gen_truth(
    n_devices: int,
    n_antennas: int,
    activation,
    lsfc_model,
    p_max: float,
    rng: np.random.Generator,
) -> TrialGroundTruth:
    """Draw support, fading, powers and channel rows for one trial.

    UniformDb fading means no power control: every device transmits at p_max,
    so received power is p_max * beta_n.  LogDistance fading applies channel
    inversion against the cell edge, so active devices all arrive at
    p_max * beta_edge.
    """
    support = gen_support(n_devices, activation, rng)
    lsfc = gen_lsfc(lsfc_model, n_devices, rng)
    if isinstance(lsfc_model, LogDistance):
        tx_power = power_control(lsfc, p_max, lsfc_model.beta_edge)
    else:
        tx_power = np.full(n_devices, p_max)
    gamma = np.zeros(n_devices)
    gamma[support] = tx_power[support] * lsfc[support]
    channels = cn_sample(rng, (support.size, n_antennas))
    return TrialGroundTruth(
        support=support, lsfc=lsfc, tx_power=tx_power, gamma=gamma, channels=channels
    )


def simulate_trial(
    pilots: PilotMatrix,
    truth: TrialGroundTruth,
    noise_var: float,
    rng: np.random.Generator,
) -> ReceivedSignal:
    """Y = A X + W with row x_n = sqrt(gamma_n) h_n for active n, zero otherwise."""
    if noise_var <= 0.0:
        raise ValueError("noise variance must be positive")
    a_act = pilots.entries[:, truth.support]  # (L, K)
    x_act = np.sqrt(truth.gamma[truth.support])[:, None] * truth.channels  # (K, M)
    w = cn_sample(rng, (pilots.pilot_len, truth.channels.shape[1]), noise_var)
    return ReceivedSignal(y=a_act @ x_act + w, noise_var=noise_var)


def sample_covariance(sig: ReceivedSignal) -> SampleCovariance:
    """S_hat = Y Y^H / M, symmetrized to kill rounding skew."""
    y = sig.y
    m = y.shape[1]
    s = y @ y.conj().T / m
    s = 0.5 * (s + s.conj().T)
    return SampleCovariance(s_hat=s, n_snapshots=m)
