"""Reference detectors: coordinate-wise optimization (CWO), SOMP, and MSBL.

CWO minimizes the same covariance-fitting objective as the greedy detector but
by cyclic coordinate descent over all N powers, so its inner loop runs
epochs * N rank-one updates; that loop is JIT-compiled.  A slow pure-Python
twin (`cwo_reference_steps`) exposes every coordinate step for invariant tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
import scipy.linalg

from .detector import DetectionResult, _mat

__all__ = [
    "CwoConfig",
    "MsblConfig",
    "cwo_detect",
    "cwo_reference_steps",
    "somp_detect",
    "msbl_detect",
]


@dataclass(frozen=True)
class CwoConfig:
    epochs: int = 15
    order: str = "random_permutation_per_epoch"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.order != "random_permutation_per_epoch":
            raise ValueError(f"unknown coordinate order {self.order!r}")


@dataclass(frozen=True)
class MsblConfig:
    max_iters: int = 150
    rel_tol: float = 1e-6
    gamma_floor: float = 1e-24

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.rel_tol <= 0.0:
            raise ValueError("rel_tol must be positive")
        if self.gamma_floor <= 0.0:
            raise ValueError("gamma_floor must be positive")


def _top_k(gamma: np.ndarray, k: int) -> list[int]:
    """Indices of the k largest entries, ties broken toward the smaller index."""
    if k == 0:
        return []
    order = np.lexsort((np.arange(gamma.shape[0]), -gamma))
    return [int(i) for i in order[:k]]


# ---------------------------------------------------------------------------
# CWO


@numba.njit(cache=True)
def _cwo_kernel(a_rows, s, sinv, gamma, perms):  # pragma: no cover - exercised via cwo_detect
    """In-place coordinate sweeps.  a_rows is A^T (one contiguous row per atom).

    Inner products are explicit loops, matching the style of the greedy
    detector's kernel, so runtime comparisons between the two reflect their
    operation counts rather than library dispatch differences.
    """
    n_epochs = perms.shape[0]
    n = perms.shape[1]
    l = a_rows.shape[1]
    b = np.empty(l, np.complex128)
    sb = np.empty(l, np.complex128)
    for e in range(n_epochs):
        for t in range(n):
            idx = perms[e, t]
            a = a_rows[idx]
            for i in range(l):
                acc = complex(0.0, 0.0)
                for j in range(l):
                    acc += sinv[i, j] * a[j]
                b[i] = acc
            ab = 0.0
            for i in range(l):
                ab += (a[i].conjugate() * b[i]).real
            for i in range(l):
                acc = complex(0.0, 0.0)
                for j in range(l):
                    acc += s[i, j] * b[j]
                sb[i] = acc
            v = 0.0
            for i in range(l):
                v += (b[i].conjugate() * sb[i]).real
            d = (v - ab) / (ab * ab)
            g = gamma[idx]
            if d < -g:
                d = -g
            if d != 0.0:
                gamma[idx] = g + d
                c = d / (1.0 + d * ab)
                for i in range(l):
                    ci = c * b[i]
                    for j in range(l):
                        sinv[i, j] -= ci * b[j].conjugate()


def _epoch_permutations(rng: np.random.Generator, epochs: int, n: int) -> np.ndarray:
    return np.stack([rng.permutation(n) for _ in range(epochs)]).astype(np.int64)


def cwo_detect(s_hat, pilots, noise_var: float, cfg: CwoConfig, k: int) -> DetectionResult:
    """Coordinate-wise descent on the covariance objective; support = k largest powers.

    Each coordinate step applies the exact single-coordinate minimizer
    d = max((b^H S_hat b - a^H b)/(a^H b)^2, -gamma_n) at the *current*
    covariance, then updates Sigma^-1 by the signed rank-one identity.
    Coordinates are visited in a fresh random permutation every epoch.
    """
    s = np.ascontiguousarray(_mat(s_hat, "s_hat"), dtype=np.complex128)
    a = _mat(pilots, "entries")
    n = a.shape[1]
    if k > n or k < 0:
        raise ValueError("k must lie in [0, N]")
    if noise_var <= 0.0:
        raise ValueError("noise variance must be positive")
    rng = np.random.default_rng(cfg.seed)
    perms = _epoch_permutations(rng, cfg.epochs, n)
    a_rows = np.ascontiguousarray(a.T, dtype=np.complex128)
    sinv = np.eye(s.shape[0], dtype=np.complex128) / noise_var
    gamma = np.zeros(n)
    _cwo_kernel(a_rows, s, sinv, gamma, perms)
    support = _top_k(gamma, k)
    return DetectionResult(support=support, gamma=gamma, iterations=cfg.epochs, selections=[])


def cwo_reference_steps(s_hat, pilots, noise_var: float, perms: np.ndarray):
    """Pure-Python twin of the CWO kernel, yielding state after every coordinate.

    Yields (coordinate_index, gamma_view, sinv_view) after each step; the views
    alias live state, so callers must copy what they keep.  Used by tests to
    check per-step objective descent and Sigma^-1 consistency.
    """
    s = _mat(s_hat, "s_hat")
    a = _mat(pilots, "entries")
    sinv = np.eye(s.shape[0], dtype=np.complex128) / noise_var
    gamma = np.zeros(a.shape[1])
    for epoch in perms:
        for idx in epoch:
            a_i = a[:, idx]
            b = sinv @ a_i
            ab = float(np.vdot(a_i, b).real)
            v = float(np.vdot(b, s @ b).real)
            d = (v - ab) / (ab * ab)
            d = max(d, -gamma[idx])
            if d != 0.0:
                gamma[idx] += d
                sinv -= (d / (1.0 + d * ab)) * np.outer(b, b.conj())
            yield idx, gamma, sinv


# ---------------------------------------------------------------------------
# SOMP


def somp_detect(y: np.ndarray, pilots, k: int) -> DetectionResult:
    """Simultaneous OMP: k rounds of max column correlation + least-squares refit."""
    a = _mat(pilots, "entries")
    l, n = a.shape
    if not 0 <= k <= min(l, n):
        raise ValueError("k must lie in [0, min(L, N)]")
    col_norm = np.maximum(np.linalg.norm(a, axis=0), 1e-300)
    available = np.ones(n, dtype=bool)
    support: list[int] = []
    resid = y
    x_sel = np.zeros((0, y.shape[1]), dtype=np.complex128)
    for _ in range(k):
        corr = np.linalg.norm(a.conj().T @ resid, axis=1) / col_norm
        corr = np.where(available, corr, -np.inf)
        i = int(np.argmax(corr))  # first occurrence = smallest index on ties
        support.append(i)
        available[i] = False
        a_sel = a[:, support]
        gram = a_sel.conj().T @ a_sel
        ridge = 1e-12 * float(np.trace(gram).real)
        x_sel = np.linalg.solve(gram + ridge * np.eye(len(support)), a_sel.conj().T @ y)
        resid = y - a_sel @ x_sel
    gamma = np.zeros(n)
    if support:
        gamma[support] = (np.abs(x_sel) ** 2).mean(axis=1)
    return DetectionResult(support=support, gamma=gamma, iterations=len(support), selections=[])


# ---------------------------------------------------------------------------
# MSBL


def msbl_detect(
    y: np.ndarray,
    pilots,
    noise_var: float,
    cfg: MsblConfig,
    k: int,
    gamma_history: list | None = None,
) -> DetectionResult:
    """EM hyperparameter learning for the multiple-measurement Gaussian model.

    E-step: posterior mean mu = Gamma A^H Sigma_y^-1 Y and per-row posterior
    variance gamma_n - gamma_n^2 a_n^H Sigma_y^-1 a_n.  M-step: gamma_n becomes
    row mean-square of mu plus the posterior variance.  Stops when the largest
    relative gamma change drops below rel_tol.

    If gamma_history is a list, a copy of gamma is appended after every EM
    step (test hook for objective-descent checks).
    """
    a = _mat(pilots, "entries")
    l, m = y.shape
    n = a.shape[1]
    if k > n or k < 0:
        raise ValueError("k must lie in [0, N]")
    if noise_var <= 0.0:
        raise ValueError("noise variance must be positive")
    eye = np.eye(l)
    # Scale-aware start: per-device matched-filter power estimates.  A fixed
    # constant start stalls whenever the true powers sit many orders of
    # magnitude below it, because each EM step shrinks gamma only by a
    # bounded multiplicative factor.
    s_hat = y @ y.conj().T / m
    col_sq = np.einsum("ln,ln->n", a.conj(), a).real
    mf = (np.einsum("ln,lk,kn->n", a.conj(), s_hat, a).real - noise_var * col_sq) / col_sq**2
    top = max(float(mf.max()), 0.0)
    gamma = np.maximum(mf, max(top * 1e-6, cfg.gamma_floor))
    iterations = 0
    for _ in range(cfg.max_iters):
        iterations += 1
        sigma_y = (a * gamma) @ a.conj().T + noise_var * eye
        sigma_y = 0.5 * (sigma_y + sigma_y.conj().T)
        try:
            factor = scipy.linalg.cho_factor(sigma_y, lower=True)
        except scipy.linalg.LinAlgError:
            # jitter once and continue; gamma >= 0 keeps this essentially unreachable
            sigma_y += 1e-12 * float(np.trace(sigma_y).real) * eye
            factor = scipy.linalg.cho_factor(sigma_y, lower=True)
        siy_a = scipy.linalg.cho_solve(factor, a)  # Sigma_y^-1 A
        u = np.einsum("ln,ln->n", a.conj(), siy_a).real  # a_n^H Sigma_y^-1 a_n
        mu = gamma[:, None] * (siy_a.conj().T @ y)  # (N, M)
        mean_sq = (np.abs(mu) ** 2).mean(axis=1)
        post_var = gamma - gamma**2 * u
        new_gamma = np.maximum(mean_sq + post_var, cfg.gamma_floor)
        rel = float(np.max(np.abs(new_gamma - gamma) / np.maximum(gamma, cfg.gamma_floor)))
        gamma = new_gamma
        if gamma_history is not None:
            gamma_history.append(gamma.copy())
        if rel < cfg.rel_tol:
            break
    support = _top_k(gamma, k)
    return DetectionResult(support=support, gamma=gamma, iterations=iterations, selections=[])
