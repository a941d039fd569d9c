"""Gaussian measurements: conditioning, sampling, and outcome densities.

A general-dyne measurement projects a subset of modes onto the family of
pure Gaussian states with covariance ``gamma_m`` centered at the outcome.
Special cases: gamma_m = I is heterodyne (coherent-state projection),
gamma_m = diag(e^{-2s}, e^{2s}) approaches homodyne as s grows, and a
two-mode squeezed gamma_m gives an EPR (Bell-type) projection.

Conditioning removes the measured modes and applies the Schur-complement
update to the remainder.  Outcomes live in the same phase-space units as the
means; the outcome density is the multivariate normal with mean xi_B and
covariance (gamma_B + gamma_m), which is what the coherent-resolution
normalization ``d^2 alpha / pi`` dictates in vacuum units (and what the law
of total variance requires of the sampler).

Photodetection: the vacuum ("no absorption") outcome is Gaussian and is
implemented here; conditioning on absorption is not a Gaussian map and
always raises NonGaussianOutcomeError carrying the branch probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateMeasurementError,
    ImpossibleOutcomeError,
    NonGaussianOutcomeError,
)
from .phasespace import (
    PSD_TOL,
    GaussianState,
    mode_indices,
    symplectic_form,
    tensor,
    vacuum,
)

#: Homodyne is finite-squeezing by default; s below MIN_HOMODYNE_S is refused
#: because it stops being a quadrature measurement in any useful sense.
DEFAULT_HOMODYNE_S = 15.0
MIN_HOMODYNE_S = 5.0

#: Outcomes with log probability below this are treated as impossible.
LOG_UNDERFLOW = -700.0

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class MeasurementSpec:
    """Which modes are measured and with what projector covariance.

    ``kind`` is a display label ("heterodyne", "homodyne", "eprdyne",
    "general_dyne", "vacuum_projection"); every kind except
    vacuum_projection carries a physical ``gamma_m``.
    """

    modes: tuple
    kind: str
    gamma_m: np.ndarray | None = None

    def __post_init__(self):
        modes = tuple(int(m) for m in self.modes)
        if len(set(modes)) != len(modes):
            raise ValueError(f"measured modes must be distinct, got {modes}")
        if any(m < 1 for m in modes):
            raise ValueError(f"mode indices are 1-based, got {modes}")
        object.__setattr__(self, "modes", modes)
        if self.kind == "vacuum_projection":
            if len(modes) != 1:
                raise ValueError("vacuum projection measures exactly one mode")
            object.__setattr__(self, "gamma_m", None)
            return
        gm = np.asarray(self.gamma_m, dtype=float)
        d = 2 * len(modes)
        if gm.shape != (d, d):
            raise ValueError(f"gamma_m must be {d}x{d}, got {gm.shape}")
        gm = 0.5 * (gm + gm.T)
        h = gm + 1j * symplectic_form(len(modes))
        if np.linalg.eigvalsh(h)[0] < -PSD_TOL:
            raise ValueError("gamma_m violates the uncertainty relation")
        gm.setflags(write=False)
        object.__setattr__(self, "gamma_m", gm)

    @property
    def n_measured(self) -> int:
        return len(self.modes)


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """One measurement event: outcome coordinates and their log density."""

    outcome: np.ndarray
    log_density: float
    spec: MeasurementSpec

    def __post_init__(self):
        outcome = np.asarray(self.outcome, dtype=float).reshape(-1)
        outcome.setflags(write=False)
        object.__setattr__(self, "outcome", outcome)
        object.__setattr__(self, "log_density", float(self.log_density))


def heterodyne_spec(modes) -> MeasurementSpec:
    modes = tuple(modes)
    return MeasurementSpec(modes, "heterodyne", np.eye(2 * len(modes)))


def homodyne_gamma_m(quadrature: str, s: float) -> np.ndarray:
    if quadrature not in ("q", "p"):
        raise ValueError(f"quadrature must be 'q' or 'p', got {quadrature!r}")
    if quadrature == "q":
        return np.diag([np.exp(-2.0 * s), np.exp(2.0 * s)])
    return np.diag([np.exp(2.0 * s), np.exp(-2.0 * s)])


def homodyne_spec(mode: int, quadrature: str, s: float = DEFAULT_HOMODYNE_S) -> MeasurementSpec:
    return MeasurementSpec((mode,), "homodyne", homodyne_gamma_m(quadrature, s))


def epr_spec(mode_i: int, mode_j: int, s: float = 1.0) -> MeasurementSpec:
    """Projection onto the two-mode squeezed (EPR-correlated) family."""
    ch, sh = np.cosh(2.0 * s), np.sinh(2.0 * s)
    gm = np.eye(4) * ch
    gm[0, 1] = gm[1, 0] = sh
    gm[2, 3] = gm[3, 2] = -sh
    return MeasurementSpec((mode_i, mode_j), "eprdyne", gm)


def vacuum_projection_spec(mode: int) -> MeasurementSpec:
    return MeasurementSpec((mode,), "vacuum_projection")


def _partition(state: GaussianState, modes):
    """Index arrays for measured block B and kept block A."""
    n = state.n
    ib = mode_indices(n, modes)
    kept = [m for m in range(1, n + 1) if m not in set(modes)]
    ia = mode_indices(n, kept) if kept else np.array([], dtype=int)
    return ia, ib


def _outcome_cholesky(state: GaussianState, spec: MeasurementSpec):
    """Cholesky factor of the outcome covariance gamma_B + gamma_m."""
    _, ib = _partition(state, spec.modes)
    t = state.gamma[np.ix_(ib, ib)] + spec.gamma_m
    try:
        return scipy.linalg.cholesky(t, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise DegenerateMeasurementError(
            "outcome covariance gamma_B + gamma_m is singular"
        ) from exc


def _dyne_update(state: GaussianState, spec: MeasurementSpec, outcome: np.ndarray):
    """Core Schur-complement update; returns (xi', gamma', residual, chol)."""
    ia, ib = _partition(state, spec.modes)
    gamma = state.gamma
    gamma_a = gamma[np.ix_(ia, ia)]
    cross = gamma[np.ix_(ia, ib)]
    chol = _outcome_cholesky(state, spec)
    # T^{-1} C^T via two triangular solves.
    tinv_ct = scipy.linalg.cho_solve((chol, True), cross.T)
    gamma_p = gamma_a - cross @ tinv_ct
    d = outcome - state.xi[ib]
    xi_p = state.xi[ia] + tinv_ct.T @ d
    return xi_p, gamma_p, d, chol


def _gaussian_log_density(d: np.ndarray, chol: np.ndarray) -> float:
    """log N(d; 0, T) given the lower Cholesky factor of T."""
    w = scipy.linalg.solve_triangular(chol, d, lower=True)
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    return float(-0.5 * (w @ w + d.size * _LOG_2PI + logdet))


def condition(state: GaussianState, spec: MeasurementSpec, outcome):
    """Collapse on a fixed general-dyne outcome.

    Returns the state on the remaining modes (measured modes are removed and
    higher modes shift down) and the MeasurementRecord.  The record's log
    density is added to the state's log_weight.
    """
    if spec.kind == "vacuum_projection":
        raise ValueError("vacuum projection uses condition_no_absorption")
    outcome = np.asarray(outcome, dtype=float).reshape(-1)
    if outcome.shape != (2 * spec.n_measured,):
        raise ValueError(
            f"outcome must have length {2 * spec.n_measured}, got {outcome.size}"
        )
    xi_p, gamma_p, d, chol = _dyne_update(state, spec, outcome)
    log_density = _gaussian_log_density(d, chol)
    record = MeasurementRecord(outcome, log_density, spec)
    new_state = GaussianState(xi_p, gamma_p, state.log_weight + log_density)
    return new_state, record


def sample_outcomes(state: GaussianState, spec: MeasurementSpec, rng: np.random.Generator, size: int):
    """Draw ``size`` outcomes from the general-dyne density (vectorized).

    Returns (outcomes, log_densities) with outcomes shaped (size, 2m).
    """
    _, ib = _partition(state, spec.modes)
    chol = _outcome_cholesky(state, spec)
    z = rng.standard_normal((size, chol.shape[0]))
    outcomes = state.xi[ib] + z @ chol.T
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    log_densities = -0.5 * (
        np.sum(z * z, axis=1) + chol.shape[0] * _LOG_2PI + logdet
    )
    return outcomes, log_densities


def sample(state: GaussianState, spec: MeasurementSpec, rng: np.random.Generator):
    """Draw one outcome from the measurement density, then condition on it."""
    outcomes, _ = sample_outcomes(state, spec, rng, 1)
    return condition(state, spec, outcomes[0])


def homodyne(
    state: GaussianState,
    mode: int,
    quadrature: str,
    *,
    outcome: float | None = None,
    rng: np.random.Generator | None = None,
    s: float = DEFAULT_HOMODYNE_S,
):
    """Finite-squeezing homodyne of one quadrature (exact in the s -> inf limit).

    Either ``outcome`` (fixed scalar) or ``rng`` (sampled) must be given.
    The record stores the scalar outcome and its marginal log density; the
    conditional update is the general-dyne one with the anti-squeezed
    component of the outcome pinned to its mean (an O(e^{-s}) truncation).
    """
    if s < MIN_HOMODYNE_S:
        raise ValueError(f"homodyne squeezing s={s} below minimum {MIN_HOMODYNE_S}")
    if (outcome is None) == (rng is None):
        raise ValueError("exactly one of outcome/rng must be given")
    spec = homodyne_spec(mode, quadrature, s)
    _, ib = _partition(state, spec.modes)
    chol = _outcome_cholesky(state, spec)
    k = 0 if quadrature == "q" else 1
    var = (chol @ chol.T)[k, k]
    if outcome is None:
        outcome = float(state.xi[ib][k] + np.sqrt(var) * rng.standard_normal())
    full = state.xi[ib].copy()
    full[k] = outcome
    xi_p, gamma_p, d, _ = _dyne_update(state, spec, full)
    log_density = float(
        -0.5 * (d[k] ** 2 / var + _LOG_2PI + np.log(var))
    )
    record = MeasurementRecord(np.array([outcome]), log_density, spec)
    new_state = GaussianState(xi_p, gamma_p, state.log_weight + log_density)
    return new_state, record


def log_vacuum_probability(state: GaussianState, mode: int) -> float:
    """log Tr(rho |0><0|) on ``mode`` via the Gaussian overlap with vacuum."""
    idx = mode_indices(state.n, [mode])
    s = state.gamma[np.ix_(idx, idx)] + np.eye(2)
    d = state.xi[idx]
    sign, logdet = np.linalg.slogdet(s)
    if sign <= 0:
        raise ValueError("mode covariance is not positive definite")
    return float(np.log(2.0) - 0.5 * logdet - 0.5 * d @ np.linalg.solve(s, d))


def vacuum_probability(state: GaussianState, mode: int) -> float:
    """Probability of the no-absorption (vacuum) outcome on ``mode``."""
    return float(np.exp(log_vacuum_probability(state, mode)))


def condition_no_absorption(state: GaussianState, mode: int):
    """Project ``mode`` onto vacuum and remove it; weight gains log P(0).

    The state update is the general-dyne one with gamma_m = I at outcome 0
    (projecting onto the coherent state at the origin); the weight uses the
    actual outcome probability rather than a density.
    """
    log_p0 = log_vacuum_probability(state, mode)
    if log_p0 < LOG_UNDERFLOW:
        raise ImpossibleOutcomeError(
            f"vacuum outcome on mode {mode} has log probability {log_p0:.1f}"
        )
    spec = vacuum_projection_spec(mode)
    dyne = MeasurementSpec((mode,), "general_dyne", np.eye(2))
    xi_p, gamma_p, _, _ = _dyne_update(state, dyne, np.zeros(2))
    record = MeasurementRecord(np.zeros(2), log_p0, spec)
    new_state = GaussianState(xi_p, gamma_p, state.log_weight + log_p0)
    return new_state, record


def condition_absorption(state: GaussianState, mode: int):
    """Always refuses: the absorption outcome is not a Gaussian map.

    The heralded state has support only on one-or-more-photon components and
    cannot be written as means plus covariance; the raised error carries the
    probability of the branch being rejected.
    """
    p_absorb = float(-np.expm1(log_vacuum_probability(state, mode)))
    raise NonGaussianOutcomeError(
        "conditioning on the absorption outcome of photodetection leaves the "
        "Gaussian family; this engine only tracks means and covariances "
        f"(absorption probability {p_absorb:.6g})",
        absorption_probability=p_absorb,
    )


def neumark_extend(state: GaussianState, ancilla_count: int) -> GaussianState:
    """Append ``ancilla_count`` vacuum modes (block-diagonal extension).

    POVMs beyond the projective family are realized by entangling the
    ancillas symplectically and measuring them projectively.
    """
    if ancilla_count < 1:
        raise ValueError("ancilla count must be >= 1")
    return tensor(state, vacuum(ancilla_count))
