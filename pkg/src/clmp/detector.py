"""Covariance-learning matching pursuit (CL-MP) for sparse activity detection.

Greedy support recovery on the covariance-fitting objective
    l(gamma) = tr(Sigma^-1 S_hat) + log|Sigma|,   Sigma = A diag(gamma) A^H + sigma^2 I.

Each iteration sweeps all unselected atoms, computes the closed-form conditional
minimizer gamma_i and its objective decrease epsilon_i <= 0, picks the atom with
the most negative epsilon_i, and folds it into B = Sigma^-1 A with a rank-one
update.  The sweep costs O(N L^2) per iteration; no matrix is ever inverted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numba
import numpy as np

__all__ = [
    "DetectorState",
    "MaxSelections",
    "PowerThreshold",
    "Selection",
    "DetectionResult",
    "init_state",
    "gamma_candidate",
    "epsilon",
    "select_atom",
    "update_b",
    "clmp_detect",
    "clmp_detect_reference",
]

# atoms with a^H Sigma^-1 a at or below this floor are treated as degenerate
_DELTA = 1e-12
# relative imaginary residue allowed in analytically-real quadratic forms
_IMAG_TOL = 1e-8


def _mat(x, attr: str) -> np.ndarray:
    """Unwrap a dataclass carrier (SampleCovariance / PilotMatrix) or pass arrays through."""
    return np.asarray(getattr(x, attr, x))


@dataclass(frozen=True)
class MaxSelections:
    """Stop after exactly k_max selections (fewer only if no atom helps)."""

    k_max: int

    def __post_init__(self) -> None:
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")


@dataclass(frozen=True)
class PowerThreshold:
    """Stop when the winning atom's power falls below tau; hard cap at k_cap."""

    tau: float
    k_cap: int

    def __post_init__(self) -> None:
        if self.tau < 0.0:
            raise ValueError("tau must be >= 0")
        if self.k_cap < 1:
            raise ValueError("k_cap must be >= 1")


@dataclass
class DetectorState:
    """Running state: B = Sigma^-1 A plus the support selected so far."""

    b: np.ndarray  # (L, N) complex
    pilots: np.ndarray  # (L, N) complex, read-only reference
    support: list[int] = field(default_factory=list)
    gamma_hat: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.gamma_hat is None:
            self.gamma_hat = np.zeros(self.b.shape[1])

    @property
    def iteration(self) -> int:
        return len(self.support)


@dataclass(frozen=True)
class Selection:
    """One greedy step: which atom, at what power, with what objective drop."""

    index: int
    gamma: float
    epsilon: float


@dataclass(frozen=True)
class DetectionResult:
    support: list[int]  # selection order
    gamma: np.ndarray  # (N,) estimated powers, zero off support
    iterations: int
    selections: list[Selection]


def init_state(pilots, noise_var: float) -> DetectorState:
    """B = A / sigma^2, empty support."""
    a = _mat(pilots, "entries").astype(np.complex128, copy=False)
    if noise_var <= 0.0:
        raise ValueError("noise variance must be positive")
    return DetectorState(b=a / noise_var, pilots=a)


def gamma_candidate(s_hat, a_i: np.ndarray, b_i: np.ndarray) -> float:
    """Closed-form conditional power minimizer for one atom.

    gamma_i = max((b^H S_hat b - a^H b) / (a^H b)^2, 0), with a^H b floored at
    1e-12: below that the atom is degenerate and contributes nothing.
    """
    s = _mat(s_hat, "s_hat")
    ab_c = complex(np.vdot(a_i, b_i))
    if math.isnan(ab_c.real) or math.isnan(ab_c.imag):
        raise ValueError("NaN in quadratic form a^H b")
    ab = ab_c.real
    if ab <= _DELTA:
        return 0.0
    assert abs(ab_c.imag) <= _IMAG_TOL * abs(ab), "a^H Sigma^-1 a has a non-trivial imaginary part"
    bsb_c = complex(np.vdot(b_i, s @ b_i))
    if math.isnan(bsb_c.real) or math.isnan(bsb_c.imag):
        raise ValueError("NaN in quadratic form b^H S_hat b")
    bsb = bsb_c.real
    assert abs(bsb_c.imag) <= _IMAG_TOL * max(abs(bsb), _DELTA), "b^H S_hat b has a non-trivial imaginary part"
    return max((bsb - ab) / (ab * ab), 0.0)


def epsilon(gamma_i: float, ab_i: float) -> float:
    """Objective change from adding one atom at its optimal power.

    log(1 + gamma*ab) - gamma*ab <= 0, equal to zero iff gamma is zero.
    """
    if gamma_i < 0.0:
        raise ValueError("gamma_i must be >= 0")
    if ab_i <= 0.0:
        raise ValueError("ab_i must be positive")
    x = gamma_i * ab_i
    return math.log1p(x) - x


def select_atom(errors: Mapping[int, float]) -> int:
    """Index of the minimum error; ties broken toward the smallest index."""
    if not errors:
        raise ValueError("no candidate atoms to select from")
    return min(errors.items(), key=lambda kv: (kv[1], kv[0]))[0]


def update_b(state: DetectorState, i_k: int, gamma_ik: float) -> DetectorState:
    """Fold atom i_k at power gamma_ik into B via the rank-one inverse update.

    B <- B - (g / (1 + g * a^H b)) * b_ik (a_ik^H B), the exact update of
    Sigma^-1 A under Sigma <- Sigma + g * a a^H.
    """
    if gamma_ik < 0.0:
        raise ValueError("gamma_ik must be >= 0")
    if i_k in state.support:
        raise ValueError(f"atom {i_k} already selected")
    b_k = state.b[:, i_k].copy()
    a_k = state.pilots[:, i_k]
    ab = float(np.vdot(a_k, b_k).real)
    denom = 1.0 + gamma_ik * ab
    if denom <= 0.0:
        raise RuntimeError("rank-one update denominator not positive: state is numerically corrupt")
    new_b = state.b - (gamma_ik / denom) * np.outer(b_k, a_k.conj() @ state.b)
    gamma_hat = state.gamma_hat.copy()
    gamma_hat[i_k] = gamma_ik
    return DetectorState(
        b=new_b, pilots=state.pilots, support=state.support + [i_k], gamma_hat=gamma_hat
    )


def _sweep(s: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Candidate powers and errors for every atom, vectorized over columns.

    Returns (gamma, eps, ab) length-N arrays; degenerate atoms (a^H b <= 1e-12)
    get gamma = 0, eps = 0.
    """
    ab = np.einsum("ln,ln->n", a.conj(), b).real
    sb = s @ b
    bsb = np.einsum("ln,ln->n", b.conj(), sb).real
    safe = ab > _DELTA
    gamma = np.zeros(ab.shape[0])
    np.divide(bsb - ab, ab * ab, out=gamma, where=safe)
    np.maximum(gamma, 0.0, out=gamma)
    x = gamma * ab
    eps = np.log1p(x) - x
    return gamma, eps, ab


@numba.njit(cache=True)
def _clmp_kernel(a_rows, s, b_rows, k_limit, tau):  # pragma: no cover - compiled
    """Greedy selection loop over device rows; the hot path of clmp_detect.

    a_rows and b_rows are (N, L) row-per-device copies; b_rows is updated in
    place.  Returns (n_sel, status, indices, gammas, epsilons) with status 1
    signalling a non-positive rank-one denominator.
    """
    n, l = a_rows.shape
    sel_idx = np.empty(k_limit, np.int64)
    sel_gamma = np.empty(k_limit, np.float64)
    sel_eps = np.empty(k_limit, np.float64)
    selected = np.zeros(n, np.bool_)
    t = np.empty(l, np.complex128)
    n_sel = 0
    status = 0
    while n_sel < k_limit:
        best_i = -1
        best_eps = 0.0
        best_gamma = 0.0
        best_ab = 0.0
        for i in range(n):
            if selected[i]:
                continue
            for r in range(l):
                acc = complex(0.0, 0.0)
                for c in range(l):
                    acc += s[r, c] * b_rows[i, c]
                t[r] = acc
            ab_acc = complex(0.0, 0.0)
            v_acc = complex(0.0, 0.0)
            for r in range(l):
                ab_acc += a_rows[i, r].conjugate() * b_rows[i, r]
                v_acc += b_rows[i, r].conjugate() * t[r]
            ab = ab_acc.real
            if ab <= _DELTA:
                continue
            g = (v_acc.real - ab) / (ab * ab)
            if g <= 0.0:
                continue
            x = g * ab
            e = math.log1p(x) - x
            if best_i == -1 or e < best_eps:
                best_i = i
                best_eps = e
                best_gamma = g
                best_ab = ab
        if best_i == -1:
            break  # every remaining atom has eps = 0: nothing lowers the objective
        if best_gamma < tau:
            break  # sub-threshold winner is not added
        denom = 1.0 + best_gamma * best_ab
        if denom <= 0.0:
            status = 1
            break
        scale = best_gamma / denom
        b_sel = b_rows[best_i].copy()
        for i2 in range(n):
            racc = complex(0.0, 0.0)
            for r in range(l):
                racc += a_rows[best_i, r].conjugate() * b_rows[i2, r]
            f = scale * racc
            for r in range(l):
                b_rows[i2, r] -= f * b_sel[r]
        sel_idx[n_sel] = best_i
        sel_gamma[n_sel] = best_gamma
        sel_eps[n_sel] = best_eps
        selected[best_i] = True
        n_sel += 1
    return n_sel, status, sel_idx, sel_gamma, sel_eps


def _unpack_detect_args(s_hat, pilots, noise_var, stop):
    s = _mat(s_hat, "s_hat")
    a = _mat(pilots, "entries")
    if noise_var <= 0.0 or not math.isfinite(noise_var):
        raise ValueError("noise variance must be positive and finite")
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("sample covariance must be square")
    if a.ndim != 2 or a.shape[0] != s.shape[0]:
        raise ValueError("pilot matrix rows must match the covariance dimension")
    n = a.shape[1]
    if isinstance(stop, MaxSelections):
        return s, a, min(stop.k_max, n), -1.0
    if isinstance(stop, PowerThreshold):
        return s, a, min(stop.k_cap, n), stop.tau
    raise TypeError(f"unknown stopping rule {stop!r}")


def clmp_detect(s_hat, pilots, noise_var: float, stop: MaxSelections | PowerThreshold) -> DetectionResult:
    """Run the full greedy detection loop and return the selected support.

    The per-atom sweep (S_hat b_i, quadratic forms, candidate powers) runs in a
    compiled kernel; clmp_detect_reference is the plain-numpy twin used to
    cross-check it.
    """
    s, a, max_iters, tau = _unpack_detect_args(s_hat, pilots, noise_var, stop)
    a_rows = np.ascontiguousarray(a.T).astype(np.complex128, copy=False)
    b_rows = a_rows / noise_var
    s_c = np.ascontiguousarray(s).astype(np.complex128, copy=False)
    n_sel, status, sel_idx, sel_gamma, sel_eps = _clmp_kernel(
        a_rows, s_c, b_rows, max_iters, tau
    )
    if status != 0:
        raise RuntimeError("rank-one update denominator not positive: state is numerically corrupt")
    gamma_hat = np.zeros(a.shape[1])
    support = [int(i) for i in sel_idx[:n_sel]]
    selections = [
        Selection(index=int(sel_idx[j]), gamma=float(sel_gamma[j]), epsilon=float(sel_eps[j]))
        for j in range(n_sel)
    ]
    gamma_hat[sel_idx[:n_sel]] = sel_gamma[:n_sel]
    return DetectionResult(
        support=support, gamma=gamma_hat, iterations=n_sel, selections=selections
    )


def clmp_detect_reference(
    s_hat, pilots, noise_var: float, stop: MaxSelections | PowerThreshold
) -> DetectionResult:
    """Plain-numpy twin of clmp_detect, kept for cross-checking the kernel."""
    s, a, max_iters, tau = _unpack_detect_args(s_hat, pilots, noise_var, stop)
    n = a.shape[1]
    b = a / noise_var
    selected = np.zeros(n, dtype=bool)
    gamma_hat = np.zeros(n)
    support: list[int] = []
    selections: list[Selection] = []

    while len(support) < max_iters:
        gamma, eps, ab = _sweep(s, a, b)
        gamma[selected] = 0.0
        if not np.any(gamma > 0.0):
            break  # every remaining atom has eps = 0: nothing lowers the objective
        eps = np.where(selected, np.inf, eps)
        i_k = int(np.argmin(eps))  # first occurrence = smallest index on ties
        g = float(gamma[i_k])
        if g < tau:
            break  # sub-threshold winner is not added
        denom = 1.0 + g * ab[i_k]
        if denom <= 0.0:
            raise RuntimeError("rank-one update denominator not positive: state is numerically corrupt")
        b = b - (g / denom) * np.outer(b[:, i_k], a[:, i_k].conj() @ b)
        selected[i_k] = True
        gamma_hat[i_k] = g
        support.append(i_k)
        selections.append(Selection(index=i_k, gamma=g, epsilon=float(eps[i_k])))

    return DetectionResult(
        support=support, gamma=gamma_hat, iterations=len(support), selections=selections
    )
