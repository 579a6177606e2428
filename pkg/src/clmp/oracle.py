"""Brute-force reference evaluators for the covariance-fitting objective.

Everything here is deliberately slow and simple: dense O(L^3) factorizations,
scalar golden-section search, closed-form derivatives.  The fast detector code
is validated against these routines, so they share no code with it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "LlfEvaluation",
    "negative_llf",
    "conditional_llf",
    "golden_minimize_gamma",
    "derivative_checks",
    "direct_b",
]

_GAMMA_UPPER_CAP = 1e12


@dataclass(frozen=True)
class LlfEvaluation:
    """Negative log-likelihood split into its trace and log-det parts (nats)."""

    value: float
    trace_term: float
    logdet_term: float


def _chol(sigma: np.ndarray):
    """Cholesky factor of a Hermitian matrix, or a clear error if not PDH."""
    sym = 0.5 * (sigma + sigma.conj().T)
    try:
        return scipy.linalg.cho_factor(sym, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise ValueError("covariance matrix is numerically non positive-definite") from exc


def _llf_from_sigma(sigma: np.ndarray, s_hat: np.ndarray) -> LlfEvaluation:
    factor = _chol(sigma)
    trace_term = float(np.trace(scipy.linalg.cho_solve(factor, s_hat)).real)
    logdet_term = float(2.0 * np.sum(np.log(np.diag(factor[0]).real)))
    return LlfEvaluation(value=trace_term + logdet_term, trace_term=trace_term, logdet_term=logdet_term)


def negative_llf(gamma: np.ndarray, a_mat: np.ndarray, noise_var: float, s_hat: np.ndarray) -> LlfEvaluation:
    """tr(Sigma^-1 S_hat) + log|Sigma| with Sigma = A diag(gamma) A^H + noise_var I."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0.0):
        raise ValueError("gamma must be entrywise non-negative")
    if noise_var <= 0.0:
        raise ValueError("noise variance must be positive")
    pilot_len = a_mat.shape[0]
    sigma = (a_mat * gamma) @ a_mat.conj().T + noise_var * np.eye(pilot_len)
    return _llf_from_sigma(sigma, s_hat)


def conditional_llf(gamma: float, sigma_minus_i: np.ndarray, a_i: np.ndarray, s_hat: np.ndarray) -> float:
    """Objective as a function of a single candidate power gamma on atom a_i."""
    sigma = sigma_minus_i + gamma * np.outer(a_i, a_i.conj())
    return _llf_from_sigma(sigma, s_hat).value


def golden_minimize_gamma(
    sigma_minus_i: np.ndarray,
    a_i: np.ndarray,
    s_hat: np.ndarray,
    gamma_upper: float = 1.0,
) -> float:
    """Scalar minimizer of the conditional objective over gamma >= 0.

    The bracket [0, gamma_upper] is grown by doubling while the objective is
    still descending at the right edge (capped at 1e12), then a golden-section
    search shrinks it to absolute width 1e-9 * (1 + upper).
    """
    if gamma_upper <= 0.0:
        raise ValueError("gamma_upper must be positive")

    def f(g: float) -> float:
        return conditional_llf(g, sigma_minus_i, a_i, s_hat)

    hi = gamma_upper
    while f(hi) < f(0.5 * hi) and hi < _GAMMA_UPPER_CAP:
        hi *= 2.0
    hi = min(hi, _GAMMA_UPPER_CAP)

    lo = 0.0
    tol = 1e-9 * (1.0 + hi)
    invphi = (np.sqrt(5.0) - 1.0) / 2.0  # 1/phi
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
    return max(0.5 * (lo + hi), 0.0)


def derivative_checks(
    sigma_minus_i: np.ndarray,
    a_i: np.ndarray,
    s_hat: np.ndarray,
    gamma: float,
) -> tuple[float, float]:
    """Closed-form first and second derivatives of the conditional objective.

    With u = a^H Sigma^-1 a and v = a^H Sigma^-1 S_hat Sigma^-1 a (both taken at
    the base covariance, i.e. the atom's own contribution excluded):
        l'(g)  = u/(1+g*u) - v/(1+g*u)^2
        l''(g) = -u^2/(1+g*u)^2 + 2*u*v/(1+g*u)^3
    """
    factor = _chol(sigma_minus_i)
    w = scipy.linalg.cho_solve(factor, a_i)  # Sigma^-1 a
    u = float(np.vdot(a_i, w).real)
    v = float(np.vdot(w, s_hat @ w).real)
    t = 1.0 + gamma * u
    first = u / t - v / t**2
    second = -(u**2) / t**2 + 2.0 * u * v / t**3
    return first, second


def direct_b(a_mat: np.ndarray, gamma: np.ndarray, noise_var: float) -> np.ndarray:
    """Dense solve of (A diag(gamma) A^H + noise_var I) B = A."""
    gamma = np.asarray(gamma, dtype=float)
    pilot_len = a_mat.shape[0]
    sigma = (a_mat * gamma) @ a_mat.conj().T + noise_var * np.eye(pilot_len)
    return scipy.linalg.cho_solve(_chol(sigma), a_mat)
