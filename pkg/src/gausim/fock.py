"""Brute-force simulator in the truncated photon-number basis.

Dense amplitude tensors over at most 3 modes, photon cutoff <= 64.  This is
the trustworthy-but-exponential reference implementation: every moment the
phase-space engine produces can be recomputed here from ladder operators,
and the non-Gaussian side of photodetection (the absorption outcome) exists
here and only here.

Conventions match the engine exactly: q = a + a^dag, p = -i(a - a^dag), so
the vacuum covariance is the identity.  Truncation error is tracked as
``norm_deficit`` = 1 - <psi|psi> (or 1 - Tr rho) and guarded, never hidden
by renormalizing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .errors import CutoffTooSmallError, ImpossibleOutcomeError

MAX_MODES = 3
MAX_CUTOFF = 64

#: Constructors must represent the state essentially exactly.
CONSTRUCTION_DEFICIT_BOUND = 1e-10
#: Unitaries push amplitude toward the cutoff; allow a looser drift.
EVOLUTION_DEFICIT_BOUND = 1e-6


def _check_dims(n_modes: int, cutoff: int) -> None:
    if not 1 <= n_modes <= MAX_MODES:
        raise ValueError(f"oracle supports 1..{MAX_MODES} modes, got {n_modes}")
    if not 1 <= cutoff <= MAX_CUTOFF:
        raise ValueError(f"cutoff must be in 1..{MAX_CUTOFF}, got {cutoff}")


@dataclass(frozen=True, eq=False)
class FockState:
    """Pure state: complex amplitude tensor of shape (cutoff+1,)^n_modes."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def n_modes(self) -> int:
        return self.amps.ndim

    @property
    def cutoff(self) -> int:
        return self.amps.shape[0] - 1

    @property
    def norm_deficit(self) -> float:
        return float(1.0 - np.vdot(self.amps, self.amps).real)


@dataclass(frozen=True, eq=False)
class FockDensity:
    """Mixed state: density matrix over the joint truncated basis."""

    rho: np.ndarray
    n_modes: int

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        object.__setattr__(self, "rho", rho)
        dim = round(rho.shape[0] ** (1.0 / self.n_modes))
        if dim**self.n_modes != rho.shape[0] or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density shape {rho.shape} not a {self.n_modes}-mode basis")

    @property
    def cutoff(self) -> int:
        return round(self.rho.shape[0] ** (1.0 / self.n_modes)) - 1

    @property
    def norm_deficit(self) -> float:
        return float(1.0 - np.trace(self.rho).real)


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------


def _destroy(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, cutoff + 1)), k=1)


def _mode_op(op: np.ndarray, mode: int, n_modes: int, cutoff: int) -> sp.csr_matrix:
    """Embed a single-mode operator on ``mode`` (1-based) into n modes."""
    dim = cutoff + 1
    left = sp.identity(dim ** (mode - 1), format="csr")
    right = sp.identity(dim ** (n_modes - mode), format="csr")
    return sp.kron(sp.kron(left, sp.csr_matrix(op)), right, format="csr")


def _quadrature_ops(n_modes: int, cutoff: int) -> list:
    """Sparse [q_1..q_n, p_1..p_n] in the engine's canonical ordering."""
    a = _destroy(cutoff)
    q = a + a.T
    p = -1j * (a - a.T.astype(complex))
    ops = [_mode_op(q, m, n_modes, cutoff) for m in range(1, n_modes + 1)]
    ops += [_mode_op(p, m, n_modes, cutoff) for m in range(1, n_modes + 1)]
    return ops


def _displacement_generator(alpha: complex, mode: int, n_modes: int, cutoff: int):
    a = _mode_op(_destroy(cutoff), mode, n_modes, cutoff)
    return (alpha * a.conj().T - np.conj(alpha) * a).tocsc()


def _rotation_generator(theta: float, mode: int, n_modes: int, cutoff: int):
    num = np.diag(np.arange(cutoff + 1.0))
    return (-1j * theta * _mode_op(num, mode, n_modes, cutoff)).tocsc()


def _squeeze_generator(r: float, mode: int, n_modes: int, cutoff: int):
    a = _mode_op(_destroy(cutoff), mode, n_modes, cutoff)
    return (0.5 * r * (a @ a - a.conj().T @ a.conj().T)).tocsc()


def _beamsplitter_generator(theta, phi, mode_i, mode_j, n_modes, cutoff):
    ai = _mode_op(_destroy(cutoff), mode_i, n_modes, cutoff)
    aj = _mode_op(_destroy(cutoff), mode_j, n_modes, cutoff)
    k = np.exp(1j * phi) * (ai.conj().T @ aj) - np.exp(-1j * phi) * (ai @ aj.conj().T)
    return (theta * k).tocsc()


def _two_mode_squeeze_generator(r, mode_i, mode_j, n_modes, cutoff):
    ai = _mode_op(_destroy(cutoff), mode_i, n_modes, cutoff)
    aj = _mode_op(_destroy(cutoff), mode_j, n_modes, cutoff)
    return (r * (ai.conj().T @ aj.conj().T - ai @ aj)).tocsc()


# ---------------------------------------------------------------------------
# State construction
# ---------------------------------------------------------------------------


def _vacuum_vector(cutoff: int) -> np.ndarray:
    v = np.zeros(cutoff + 1, dtype=complex)
    v[0] = 1.0
    return v


def _coherent_vector(q0: float, p0: float, cutoff: int) -> np.ndarray:
    """Number-basis coherent amplitudes, alpha = (q0 + i p0) / 2."""
    alpha = 0.5 * (q0 + 1j * p0)
    v = np.zeros(cutoff + 1, dtype=complex)
    v[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for k in range(1, cutoff + 1):
        v[k] = v[k - 1] * alpha / np.sqrt(k)
    return v


def _squeezed_vector(r: float, cutoff: int) -> np.ndarray:
    """Squeezed vacuum with q-variance e^{-2r}: even-number series."""
    v = np.zeros(cutoff + 1, dtype=complex)
    c = 1.0 / np.sqrt(np.cosh(r))
    v[0] = c
    for m in range(1, cutoff // 2 + 1):
        c *= -np.tanh(r) * np.sqrt((2 * m - 1) / (2 * m))
        v[2 * m] = c
    return v


def _product_pure(vectors) -> np.ndarray:
    amps = vectors[0]
    for v in vectors[1:]:
        amps = np.multiply.outer(amps, v)
    return amps


def _thermal_diag(nbar: float, cutoff: int) -> np.ndarray:
    if nbar == 0:
        d = np.zeros(cutoff + 1)
        d[0] = 1.0
        return d
    ratio = nbar / (1.0 + nbar)
    return ratio ** np.arange(cutoff + 1) / (1.0 + nbar)


def from_gaussian(name: str, params: dict, cutoff: int):
    """Build the oracle-side state for a named Gaussian preparation.

    Pure preparations (vacuum, coherent, squeezed, tmsv) return FockState;
    thermal returns a FockDensity.  Raises CutoffTooSmallError if truncation
    loses more than 1e-10 of the norm.
    """
    n = int(params.get("n", 1))
    if name == "tmsv":
        n = 2
    _check_dims(n, cutoff)
    basis = [_vacuum_vector(cutoff) for _ in range(n)]
    if name == "vacuum":
        state = FockState(_product_pure(basis))
    elif name == "coherent":
        basis[int(params["mode"]) - 1] = _coherent_vector(
            params["q"], params["p"], cutoff
        )
        state = FockState(_product_pure(basis))
    elif name == "squeezed":
        basis[int(params["mode"]) - 1] = _squeezed_vector(params["r"], cutoff)
        state = FockState(_product_pure(basis))
    elif name == "tmsv":
        r = params["r"]
        amps = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
        amps[np.diag_indices(cutoff + 1)] = (
            np.tanh(r) ** np.arange(cutoff + 1) / np.cosh(r)
        )
        state = FockState(amps)
    elif name == "thermal":
        diags = [_thermal_diag(0.0, cutoff) for _ in range(n)]
        diags[int(params["mode"]) - 1] = _thermal_diag(params["nbar"], cutoff)
        d = diags[0]
        for extra in diags[1:]:
            d = np.kron(d, extra)
        state = FockDensity(np.diag(d.astype(complex)), n)
    else:
        raise ValueError(f"unknown Gaussian preparation {name!r}")
    if state.norm_deficit > CONSTRUCTION_DEFICIT_BOUND:
        raise CutoffTooSmallError(
            f"{name} at cutoff {cutoff} loses {state.norm_deficit:.2e} of the norm",
            norm_deficit=state.norm_deficit,
        )
    return state


# ---------------------------------------------------------------------------
# Evolution
# ---------------------------------------------------------------------------


def _unitary_generators(name, modes, params, n_modes, cutoff):
    """Generator list K (applied left to right) with exp(K) the unitary."""
    if name == "disp":
        alpha = 0.5 * (params["q"] + 1j * params["p"])
        return [_displacement_generator(alpha, modes[0], n_modes, cutoff)]
    if name == "rot":
        return [_rotation_generator(params["theta"], modes[0], n_modes, cutoff)]
    if name == "sqz":
        phi = params.get("phi", 0.0)
        gens = [_squeeze_generator(params["r"], modes[0], n_modes, cutoff)]
        if phi:
            gens = (
                [_rotation_generator(phi, modes[0], n_modes, cutoff)]
                + gens
                + [_rotation_generator(-phi, modes[0], n_modes, cutoff)]
            )
        return gens
    if name == "bs":
        return [
            _beamsplitter_generator(
                params["theta"], params.get("phi", 0.0), modes[0], modes[1], n_modes, cutoff
            )
        ]
    if name == "tmss":
        return [
            _two_mode_squeeze_generator(params["r"], modes[0], modes[1], n_modes, cutoff)
        ]
    raise ValueError(f"{name!r} is not a unitary channel the oracle can exponentiate")


def _apply_generators_pure(amps: np.ndarray, gens) -> np.ndarray:
    psi = amps.reshape(-1)
    for k in gens:
        psi = expm_multiply(k, psi)
    return psi.reshape(amps.shape)


def _apply_generators_density(rho: np.ndarray, gens) -> np.ndarray:
    for k in gens:
        rho = expm_multiply(k, expm_multiply(k, rho).conj().T)
    return rho


def apply_gaussian_unitary(state, name: str, modes, params: dict):
    """Evolve under a named symplectic (G = 0) channel in the number basis."""
    gens = _unitary_generators(name, tuple(modes), params, state.n_modes, state.cutoff)
    if isinstance(state, FockState):
        out = FockState(_apply_generators_pure(state.amps, gens))
    else:
        out = FockDensity(_apply_generators_density(state.rho, gens), state.n_modes)
    if out.norm_deficit > EVOLUTION_DEFICIT_BOUND:
        raise CutoffTooSmallError(
            f"unitary {name} pushed {out.norm_deficit:.2e} of the norm past the cutoff",
            norm_deficit=out.norm_deficit,
        )
    return out


def _tensor_vacuum_ancilla(state) -> FockDensity | FockState:
    cutoff = state.cutoff
    if isinstance(state, FockState):
        shape = state.amps.shape + (cutoff + 1,)
        amps = np.zeros(shape, dtype=complex)
        amps[..., 0] = state.amps
        return FockState(amps)
    dim = state.rho.shape[0]
    anc = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    anc[0, 0] = 1.0
    return FockDensity(np.kron(state.rho, anc), state.n_modes + 1)


def _trace_out_last(state) -> FockDensity:
    cutoff = state.cutoff
    dim = cutoff + 1
    if isinstance(state, FockState):
        m = state.amps.reshape(-1, dim)
        return FockDensity(m @ m.conj().T, state.n_modes - 1)
    rest = state.rho.shape[0] // dim
    rho = state.rho.reshape(rest, dim, rest, dim)
    return FockDensity(np.einsum("ikjk->ij", rho), state.n_modes - 1)


def _dilate(state, mode, gen_name, gen_params) -> FockDensity:
    """Vacuum ancilla + entangling unitary + partial trace."""
    extended = _tensor_vacuum_ancilla(state)
    anc = extended.n_modes
    evolved = apply_gaussian_unitary(extended, gen_name, (mode, anc), gen_params)
    return _trace_out_last(evolved)


def apply_loss(state, mode: int, eta: float) -> FockDensity:
    """Pure loss via a beamsplitter to a traced-out vacuum ancilla."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmission must be in [0, 1], got {eta}")
    theta = np.arccos(np.sqrt(eta))
    return _dilate(state, mode, "bs", {"theta": theta, "phi": 0.0})


def apply_amplifier(state, mode: int, gain: float) -> FockDensity:
    """Quantum-limited amplifier via two-mode squeezing with a vacuum ancilla."""
    if gain < 1.0:
        raise ValueError(f"gain must be >= 1, got {gain}")
    r = np.arccosh(np.sqrt(gain))
    return _dilate(state, mode, "tmss", {"r": r})


def apply_classical_noise(state, mode: int, g_block, degree: int = 21) -> FockDensity:
    """Additive Gaussian displacement noise via Gauss-Hermite averaging."""
    g = np.asarray(g_block, dtype=float)
    g = 0.5 * (g + g.T)
    lam, vec = np.linalg.eigh(g)
    if lam[0] < -1e-12:
        raise ValueError("noise block must be positive semidefinite")
    if isinstance(state, FockState):
        psi = state.amps.reshape(-1, 1)
        rho = FockDensity(psi @ psi.conj().T, state.n_modes)
    else:
        rho = state
    nodes, weights = np.polynomial.hermite.hermgauss(degree)
    for k in range(2):
        if lam[k] <= 1e-14:
            continue
        acc = np.zeros_like(rho.rho)
        for x, w in zip(nodes, weights):
            shift = np.sqrt(2.0 * lam[k]) * x * vec[:, k]
            gen = _displacement_generator(
                0.5 * (shift[0] + 1j * shift[1]), mode, rho.n_modes, rho.cutoff
            )
            acc += (w / np.sqrt(np.pi)) * _apply_generators_density(rho.rho, [gen])
        rho = FockDensity(acc, rho.n_modes)
    return rho


def apply_channel(state, name: str, modes, params: dict):
    """Replay a named engine channel in the number basis."""
    if name in ("disp", "rot", "sqz", "bs", "tmss"):
        return apply_gaussian_unitary(state, name, modes, params)
    if name == "loss":
        return apply_loss(state, modes[0], params["eta"])
    if name == "amp":
        return apply_amplifier(state, modes[0], params["gain"])
    if name == "noise":
        g = [[params["gqq"], params["gqp"]], [params["gqp"], params["gpp"]]]
        return apply_classical_noise(state, modes[0], g)
    raise ValueError(f"oracle cannot replay channel {name!r}")


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------


def moments(state):
    """First moments and symmetric-ordered covariance in engine convention."""
    zops = _quadrature_ops(state.n_modes, state.cutoff)
    d = 2 * state.n_modes
    xi = np.zeros(d)
    m = np.zeros((d, d), dtype=complex)
    if isinstance(state, FockState):
        psi = state.amps.reshape(-1)
        zpsi = [op @ psi for op in zops]
        for i in range(d):
            xi[i] = np.vdot(psi, zpsi[i]).real
            for j in range(d):
                m[i, j] = np.vdot(zpsi[i], zpsi[j])
    else:
        rho = state.rho
        zrho = [op @ rho for op in zops]
        for i in range(d):
            xi[i] = np.trace(zrho[i]).real
            for j in range(d):
                m[i, j] = (zops[i].multiply(zrho[j].T)).sum()
    gamma = m.real - np.outer(xi, xi)
    return xi, 0.5 * (gamma + gamma.T)


def photon_number_distribution(state, mode: int) -> np.ndarray:
    """Marginal P(n) for n = 0..cutoff on ``mode``; sums to 1 - norm_deficit."""
    axes = tuple(k for k in range(state.n_modes) if k != mode - 1)
    if isinstance(state, FockState):
        prob = np.abs(state.amps) ** 2
        return np.sum(prob, axis=axes) if axes else prob
    dim = state.cutoff + 1
    diag = np.diag(state.rho).real.reshape((dim,) * state.n_modes)
    return np.sum(diag, axis=axes) if axes else diag


def condition_photodetection(state, mode: int, outcome: str):
    """Threshold-detector update: project onto |0><0| or onto one-or-more.

    ``no_absorption`` removes the measured mode; ``absorption`` keeps it
    (the heralded state is non-Gaussian and generally entangled).  Returns
    (state', probability of the outcome).
    """
    if outcome not in ("no_absorption", "absorption"):
        raise ValueError(f"outcome must be no_absorption|absorption, got {outcome!r}")
    axis = mode - 1
    if isinstance(state, FockState):
        amps = np.moveaxis(state.amps, axis, -1)
        vac_slice = amps[..., 0]
        p0 = float(np.vdot(vac_slice, vac_slice).real)
        if outcome == "no_absorption":
            prob = p0
            new = FockState(vac_slice / np.sqrt(p0)) if p0 > 0 else None
        else:
            total = float(np.vdot(state.amps, state.amps).real)
            prob = total - p0
            kept = amps.copy()
            kept[..., 0] = 0.0
            new = (
                FockState(np.moveaxis(kept, -1, axis) / np.sqrt(prob))
                if prob > 0
                else None
            )
    else:
        dim = state.cutoff + 1
        shape = (dim,) * state.n_modes
        rho = state.rho.reshape(shape + shape)
        rho = np.moveaxis(rho, (axis, state.n_modes + axis), (-2, -1))
        block = rho[..., 0, 0]
        rest = dim ** (state.n_modes - 1)
        p0 = float(np.einsum("ii->", block.reshape(rest, rest)).real)
        if outcome == "no_absorption":
            prob = p0
            new = FockDensity(block.reshape(rest, rest) / p0, state.n_modes - 1) if p0 > 0 else None
        else:
            total = float(np.trace(state.rho).real)
            prob = total - p0
            kept = rho.copy()
            kept[..., 0, :] = 0.0
            kept[..., :, 0] = 0.0
            kept = np.moveaxis(kept, (-2, -1), (axis, state.n_modes + axis))
            dim_full = state.rho.shape[0]
            new = (
                FockDensity(kept.reshape(dim_full, dim_full) / prob, state.n_modes)
                if prob > 0
                else None
            )
    if new is None or prob <= 0:
        raise ImpossibleOutcomeError(f"{outcome} on mode {mode} has zero probability")
    return new, prob


def condition_coherent_projection(state: FockState, mode: int, outcome):
    """Project ``mode`` of a pure state onto the coherent state at ``outcome``.

    Returns (conditional state on the remaining modes, outcome density).
    The density matches the engine's heterodyne density: |<alpha|psi>|^2 / (4 pi)
    in phase-space outcome units.
    """
    if state.n_modes < 2:
        raise ValueError("conditioning needs at least one unmeasured mode")
    q0, p0 = float(outcome[0]), float(outcome[1])
    bra = np.conj(_coherent_vector(q0, p0, state.cutoff))
    reduced = np.tensordot(state.amps, bra, axes=([mode - 1], [0]))
    norm_sq = float(np.vdot(reduced, reduced).real)
    if norm_sq <= 0:
        raise ImpossibleOutcomeError("coherent projection has zero amplitude")
    density = norm_sq / (4.0 * np.pi)
    return FockState(reduced / np.sqrt(norm_sq)), density
