"""Phase-space representation of Gaussian states.

Canonical ordering is (q_1..q_n, p_1..p_n).  Units are fixed so the vacuum
covariance matrix is the identity; with that choice the physicality
(uncertainty) condition reads ``gamma + i*Sigma >= 0`` with Sigma the
symplectic form.  All states are immutable values; operations return new
states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Shared tolerance for positive-semidefiniteness checks.  Marginal objects
#: (loss channels, quantum-limited amplifiers) sit exactly at eigenvalue 0
#: and must pass.
PSD_TOL = 1e-9


def symplectic_form(n: int) -> np.ndarray:
    """Antisymmetric form Sigma with Sigma[i, j] = d(i+n, j) - d(i, j+n)."""
    if n < 1:
        raise ValueError("mode count must be >= 1")
    sig = np.zeros((2 * n, 2 * n))
    sig[:n, n:] = np.eye(n)
    sig[n:, :n] = -np.eye(n)
    return sig


def mode_indices(n: int, modes) -> np.ndarray:
    """Row/column indices of the (q, p) coordinates of ``modes`` (1-based)."""
    modes = list(modes)
    for m in modes:
        if not 1 <= m <= n:
            raise ValueError(f"mode {m} out of range 1..{n}")
    return np.array([m - 1 for m in modes] + [n + m - 1 for m in modes], dtype=int)


@dataclass(frozen=True, eq=False)
class Diagnostic:
    """Result of a semidefiniteness check: pass/fail plus the witness."""

    passed: bool
    min_eigenvalue: float

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Gaussian state: means ``xi`` (length 2n), covariance ``gamma`` (2n x 2n).

    ``log_weight`` accumulates the log probability (or log density) of every
    measurement outcome this state has been conditioned on; it starts at 0
    and is physical output, not bookkeeping.  ``gamma`` is stored exactly
    symmetric; arrays are frozen read-only.
    """

    xi: np.ndarray
    gamma: np.ndarray
    log_weight: float = 0.0

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float).reshape(-1)
        gamma = np.asarray(self.gamma, dtype=float)
        if xi.size % 2 != 0:
            raise ValueError(f"means vector must have even length, got {xi.size}")
        if gamma.shape != (xi.size, xi.size):
            raise ValueError(
                f"covariance shape {gamma.shape} inconsistent with means length {xi.size}"
            )
        if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(gamma))):
            raise ValueError("state contains non-finite entries")
        gamma = 0.5 * (gamma + gamma.T)
        xi = xi.copy()
        xi.setflags(write=False)
        gamma.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "log_weight", float(self.log_weight))

    @property
    def n(self) -> int:
        return self.xi.size // 2

    def with_log_weight(self, log_weight: float) -> "GaussianState":
        return GaussianState(self.xi, self.gamma, log_weight)


def vacuum(n: int) -> GaussianState:
    """n-mode vacuum: zero means, identity covariance."""
    if n < 1:
        raise ValueError("mode count must be >= 1")
    return GaussianState(np.zeros(2 * n), np.eye(2 * n))


def coherent(n: int, mode: int, q0: float, p0: float) -> GaussianState:
    """Coherent state on ``mode`` (vacuum covariance, displaced means)."""
    idx = mode_indices(n, [mode])
    xi = np.zeros(2 * n)
    xi[idx[0]] = q0
    xi[idx[1]] = p0
    return GaussianState(xi, np.eye(2 * n))


def squeezed_vacuum(n: int, mode: int, r: float) -> GaussianState:
    """Single-mode squeezed vacuum: variances (e^{-2r}, e^{+2r}) in (q, p)."""
    idx = mode_indices(n, [mode])
    gamma = np.eye(2 * n)
    gamma[idx[0], idx[0]] = np.exp(-2.0 * r)
    gamma[idx[1], idx[1]] = np.exp(2.0 * r)
    return GaussianState(np.zeros(2 * n), gamma)


def two_mode_squeezed_vacuum(r: float) -> GaussianState:
    """Two-mode squeezed vacuum with q-q correlation +sinh(2r), p-p -sinh(2r)."""
    ch, sh = np.cosh(2.0 * r), np.sinh(2.0 * r)
    gamma = np.eye(4) * ch
    gamma[0, 1] = gamma[1, 0] = sh
    gamma[2, 3] = gamma[3, 2] = -sh
    return GaussianState(np.zeros(4), gamma)


def thermal(n: int, mode: int, nbar: float) -> GaussianState:
    """Thermal state with mean photon number ``nbar`` on ``mode``."""
    if nbar < 0:
        raise ValueError(f"mean photon number must be >= 0, got {nbar}")
    idx = mode_indices(n, [mode])
    gamma = np.eye(2 * n)
    gamma[idx[0], idx[0]] = gamma[idx[1], idx[1]] = 2.0 * nbar + 1.0
    return GaussianState(np.zeros(2 * n), gamma)


def check_physical(state: GaussianState, tol: float = PSD_TOL) -> Diagnostic:
    """Uncertainty check: min eigenvalue of gamma + i*Sigma, pass iff >= -tol."""
    if state.n == 0:
        return Diagnostic(True, np.inf)
    h = state.gamma + 1j * symplectic_form(state.n)
    min_eig = float(np.linalg.eigvalsh(h)[0])
    return Diagnostic(min_eig >= -tol, min_eig)


def overlap(a: GaussianState, b: GaussianState) -> float:
    """Tr(rho_a rho_b) from means and covariances.

    With vacuum-unit covariances the overlap is
    ``2^n det(ga+gb)^{-1/2} exp(-(1/2) d^T (ga+gb)^{-1} d)`` for d the
    difference of the means.
    """
    if a.n != b.n:
        raise ValueError(f"mode counts differ: {a.n} != {b.n}")
    s = a.gamma + b.gamma
    d = a.xi - b.xi
    sign, logdet = np.linalg.slogdet(s)
    if sign <= 0:
        raise ValueError("covariance sum is not positive definite")
    log_ov = a.n * np.log(2.0) - 0.5 * logdet - 0.5 * d @ np.linalg.solve(s, d)
    return float(np.exp(log_ov))


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    """Product state a (x) b; modes of ``b`` follow modes of ``a``."""
    na, nb = a.n, b.n
    n = na + nb
    xi = np.zeros(2 * n)
    gamma = np.zeros((2 * n, 2 * n))
    ia = np.concatenate([np.arange(na), n + np.arange(na)])
    ib = np.concatenate([na + np.arange(nb), n + na + np.arange(nb)])
    xi[ia] = a.xi
    xi[ib] = b.xi
    gamma[np.ix_(ia, ia)] = a.gamma
    gamma[np.ix_(ib, ib)] = b.gamma
    return GaussianState(xi, gamma, a.log_weight + b.log_weight)


def marginal(state: GaussianState, modes) -> GaussianState:
    """Reduced state on ``modes`` (1-based, kept in the given order)."""
    idx = mode_indices(state.n, modes)
    return GaussianState(
        state.xi[idx], state.gamma[np.ix_(idx, idx)], state.log_weight
    )


def mean_photon_number(state: GaussianState, mode: int) -> float:
    """Mean photon number of ``mode`` from its means and covariance block."""
    idx = mode_indices(state.n, [mode])
    g = state.gamma[np.ix_(idx, idx)]
    x = state.xi[idx]
    return float((np.trace(g) + x @ x) / 4.0 - 0.5)


def storage_counts(n: int) -> dict:
    """Scalar counts of the engine representation for ``n`` modes."""
    means = 2 * n
    cov_independent = n * (2 * n + 1)
    return {
        "means": means,
        "cov_independent": cov_independent,
        "total": means + cov_independent,
    }
