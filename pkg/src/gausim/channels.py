"""Gaussian completely positive maps and their named physical constructors.

A channel is the triple (alpha, A, G).  ``a_matrix`` follows the index
convention z_i' = sum_k z_k A[k, i]: rows index inputs, columns outputs, so
means transform as ``xi' = A.T @ xi + alpha`` and covariances as
``gamma' = A.T @ gamma @ A + G``.  Complete positivity requires
``G + i*Sigma_out - i*A.T Sigma_in A >= 0``; with G = 0 this forces A to be
symplectic (the unitary case).

Constructors certify complete positivity analytically where the parameter
range guarantees it (and via the cheap symplectic test for unitary maps), so
``apply`` only falls back to the full eigenvalue check for raw or
out-of-range channels.  Invalid channels are constructible — the checker is
part of the product — but refuse to apply.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RejectedChannelError
from .phasespace import PSD_TOL, GaussianState, mode_indices, Diagnostic, symplectic_form

SYMPLECTIC_TOL = 1e-9


def _sigma_mul(m: np.ndarray) -> np.ndarray:
    """Sigma @ m without forming Sigma (row permutation + sign)."""
    n = m.shape[0] // 2
    return np.concatenate([m[n:], -m[:n]], axis=0)


@dataclass(frozen=True, eq=False)
class GaussianChannel:
    """Gaussian CP map (alpha, A, G); immutable value.

    ``cp_certified`` records a construction-time proof of complete
    positivity; uncertified channels are eigenvalue-checked on first apply
    and the verdict cached.
    """

    a_matrix: np.ndarray
    g_matrix: np.ndarray
    alpha: np.ndarray
    cp_certified: bool = field(default=False)

    def __post_init__(self):
        a = np.asarray(self.a_matrix, dtype=float)
        g = np.asarray(self.g_matrix, dtype=float)
        al = np.asarray(self.alpha, dtype=float).reshape(-1)
        if a.ndim != 2 or a.shape[0] % 2 or a.shape[1] % 2:
            raise ValueError(f"A must be 2n_in x 2n_out, got shape {a.shape}")
        d_out = a.shape[1]
        if g.shape != (d_out, d_out):
            raise ValueError(f"G shape {g.shape} inconsistent with A {a.shape}")
        if al.shape != (d_out,):
            raise ValueError(f"alpha length {al.size} inconsistent with A {a.shape}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(g)) and np.all(np.isfinite(al))):
            raise ValueError("channel contains non-finite entries")
        g = 0.5 * (g + g.T)
        for arr in (a, g, al):
            arr.setflags(write=False)
        object.__setattr__(self, "a_matrix", a)
        object.__setattr__(self, "g_matrix", g)
        object.__setattr__(self, "alpha", al)

    @property
    def n_in(self) -> int:
        return self.a_matrix.shape[0] // 2

    @property
    def n_out(self) -> int:
        return self.a_matrix.shape[1] // 2


def channel_from_left_action(
    s_matrix, g_matrix=None, alpha=None, cp_certified: bool = False
) -> GaussianChannel:
    """Build a channel from the left-acting matrix S with xi' = S @ xi.

    This is the natural form for writing down physical transformations; the
    stored ``a_matrix`` is S.T per the module's index convention.
    """
    s = np.asarray(s_matrix, dtype=float)
    d_out = s.shape[0]
    if g_matrix is None:
        g_matrix = np.zeros((d_out, d_out))
    if alpha is None:
        alpha = np.zeros(d_out)
    return GaussianChannel(s.T, g_matrix, alpha, cp_certified)


def is_symplectic(a_matrix, tol: float = SYMPLECTIC_TOL) -> bool:
    """True iff max|A.T Sigma A - Sigma| <= tol."""
    a = np.asarray(a_matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"symplectic test needs a square matrix, got {a.shape}")
    if a.shape[0] % 2:
        raise ValueError("symplectic matrices have even dimension")
    n = a.shape[0] // 2
    resid = a.T @ _sigma_mul(a) - symplectic_form(n)
    return bool(np.max(np.abs(resid)) <= tol)


def validate_cp(channel: GaussianChannel, tol: float = PSD_TOL) -> Diagnostic:
    """Min eigenvalue of G + i*Sigma_out - i*A.T Sigma_in A; pass iff >= -tol."""
    a = channel.a_matrix
    h = channel.g_matrix + 1j * (
        symplectic_form(channel.n_out) - a.T @ _sigma_mul(a)
    )
    h = 0.5 * (h + h.conj().T)
    min_eig = float(np.linalg.eigvalsh(h)[0])
    return Diagnostic(min_eig >= -tol, min_eig)


def _ensure_applicable(channel: GaussianChannel, tol: float) -> None:
    if channel.cp_certified:
        return
    diag = validate_cp(channel, tol)
    if not diag.passed:
        raise RejectedChannelError(
            f"channel is not completely positive (min eigenvalue "
            f"{diag.min_eigenvalue:.3e} < -{tol:.0e})",
            min_eigenvalue=diag.min_eigenvalue,
        )
    # Cache the verdict on the immutable value.
    object.__setattr__(channel, "cp_certified", True)


def apply(channel: GaussianChannel, state: GaussianState, tol: float = PSD_TOL) -> GaussianState:
    """Transform a state: xi' = A.T xi + alpha, gamma' = A.T gamma A + G."""
    if channel.n_in != state.n:
        raise ValueError(
            f"channel acts on {channel.n_in} modes, state has {state.n}"
        )
    _ensure_applicable(channel, tol)
    a = channel.a_matrix
    xi = a.T @ state.xi + channel.alpha
    gamma = a.T @ state.gamma @ a + channel.g_matrix
    return GaussianState(xi, gamma, state.log_weight)


def compose(second: GaussianChannel, first: GaussianChannel) -> GaussianChannel:
    """Channel equal to ``first`` followed by ``second``.

    apply(compose(t2, t1), s) == apply(t2, apply(t1, s)); the semigroup is
    closed, so certification propagates.
    """
    if first.n_out != second.n_in:
        raise ValueError(
            f"cannot compose: first outputs {first.n_out} modes, "
            f"second expects {second.n_in}"
        )
    a2 = second.a_matrix
    a = first.a_matrix @ a2
    alpha = a2.T @ first.alpha + second.alpha
    g = a2.T @ first.g_matrix @ a2 + second.g_matrix
    return GaussianChannel(
        a, g, alpha, cp_certified=first.cp_certified and second.cp_certified
    )


# ---------------------------------------------------------------------------
# Named constructors.  Each embeds a local left-action block into n modes.
# ---------------------------------------------------------------------------


def _embed_left(n: int, modes, local: np.ndarray) -> np.ndarray:
    """Embed a left-action block on ``modes`` into the 2n-dim identity.

    ``local`` uses the ordering (q_m1..q_mk, p_m1..p_mk) for the listed
    modes.
    """
    idx = mode_indices(n, modes)
    s = np.eye(2 * n)
    s[np.ix_(idx, idx)] = local
    return s


def _embed_sym(n: int, modes, local: np.ndarray) -> np.ndarray:
    idx = mode_indices(n, modes)
    g = np.zeros((2 * n, 2 * n))
    g[np.ix_(idx, idx)] = local
    return g


def identity(n: int) -> GaussianChannel:
    return GaussianChannel(np.eye(2 * n), np.zeros((2 * n, 2 * n)), np.zeros(2 * n), True)


def displacement(n: int, alpha) -> GaussianChannel:
    """Phase-space translation by the 2n-vector ``alpha``; A = I, G = 0."""
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    if alpha.shape != (2 * n,):
        raise ValueError(f"displacement vector must have length {2 * n}")
    return GaussianChannel(np.eye(2 * n), np.zeros((2 * n, 2 * n)), alpha, True)


def _rotation_block(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def phase_rotation(n: int, mode: int, theta: float) -> GaussianChannel:
    """Rotation in the (q, p) plane of one mode: q -> q cos(t) + p sin(t)."""
    s = _embed_left(n, [mode], _rotation_block(theta))
    return channel_from_left_action(s, cp_certified=is_symplectic(s.T))


def beamsplitter(n: int, mode_i: int, mode_j: int, theta: float, phi: float = 0.0) -> GaussianChannel:
    """Two-mode mixer a_i -> cos(t) a_i + e^{i phi} sin(t) a_j.

    theta = pi/4 is balanced; phi rotates the phase of the transferred
    amplitude.
    """
    if mode_i == mode_j:
        raise ValueError("beamsplitter needs two distinct modes")
    c, s = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    # Ordering (q_i, q_j, p_i, p_j).
    local = np.array(
        [
            [c, s * cp, 0.0, -s * sp],
            [-s * cp, c, -s * sp, 0.0],
            [0.0, s * sp, c, s * cp],
            [s * sp, 0.0, -s * cp, c],
        ]
    )
    sm = _embed_left(n, [mode_i, mode_j], local)
    return channel_from_left_action(sm, cp_certified=is_symplectic(sm.T))


def squeezer(n: int, mode: int, r: float, phi: float = 0.0) -> GaussianChannel:
    """Single-mode squeezer: variance e^{-2r} along the axis at angle phi."""
    c, s = np.cos(phi), np.sin(phi)
    rot = np.array([[c, -s], [s, c]])
    local = rot @ np.diag([np.exp(-r), np.exp(r)]) @ rot.T
    sm = _embed_left(n, [mode], local)
    return channel_from_left_action(sm, cp_certified=is_symplectic(sm.T))


def two_mode_squeezer(n: int, mode_i: int, mode_j: int, r: float) -> GaussianChannel:
    """Two-mode squeezer a_i -> a_i cosh(r) + a_j^dag sinh(r)."""
    if mode_i == mode_j:
        raise ValueError("two-mode squeezer needs two distinct modes")
    ch, sh = np.cosh(r), np.sinh(r)
    local = np.array(
        [
            [ch, sh, 0.0, 0.0],
            [sh, ch, 0.0, 0.0],
            [0.0, 0.0, ch, -sh],
            [0.0, 0.0, -sh, ch],
        ]
    )
    sm = _embed_left(n, [mode_i, mode_j], local)
    return channel_from_left_action(sm, cp_certified=is_symplectic(sm.T))


def loss(n: int, mode: int, eta: float) -> GaussianChannel:
    """Pure loss with transmission eta: A = sqrt(eta) I, G = (1 - eta) I.

    Values eta > 1 are constructible (they fail validate_cp, which is the
    point of the checker) but will not apply.
    """
    if eta < 0:
        raise ValueError(f"transmission must be >= 0, got {eta}")
    sm = _embed_left(n, [mode], np.sqrt(eta) * np.eye(2))
    g = _embed_sym(n, [mode], (1.0 - eta) * np.eye(2))
    return channel_from_left_action(sm, g, cp_certified=eta <= 1.0)


def amplifier(n: int, mode: int, gain: float) -> GaussianChannel:
    """Quantum-limited phase-insensitive amplifier: A = sqrt(g) I, G = (g-1) I.

    The noise term is the minimal one allowed by complete positivity, which
    makes validate_cp marginal (min eigenvalue 0) for every gain >= 1.
    """
    if gain < 0:
        raise ValueError(f"gain must be >= 0, got {gain}")
    sm = _embed_left(n, [mode], np.sqrt(gain) * np.eye(2))
    g = _embed_sym(n, [mode], (gain - 1.0) * np.eye(2))
    return channel_from_left_action(sm, g, cp_certified=gain >= 1.0)


def classical_noise(n: int, mode: int, g_block) -> GaussianChannel:
    """Additive classical noise: A = I, user-supplied PSD 2x2 block of G."""
    g_block = np.asarray(g_block, dtype=float)
    if g_block.shape != (2, 2):
        raise ValueError(f"noise block must be 2x2, got {g_block.shape}")
    g_block = 0.5 * (g_block + g_block.T)
    certified = bool(np.linalg.eigvalsh(g_block)[0] >= -PSD_TOL)
    g = _embed_sym(n, [mode], g_block)
    return GaussianChannel(np.eye(2 * n), g, np.zeros(2 * n), certified)


def cloner_1to2() -> GaussianChannel:
    """Symmetric 1-to-2 Gaussian cloner as a 2-mode channel.

    Mode 1 carries the input, mode 2 must be prepared in vacuum.  A
    quantum-limited amplifier of gain 2 on mode 1 followed by a balanced
    beamsplitter leaves each output mode carrying the input means with one
    added vacuum unit of noise.
    """
    return compose(beamsplitter(2, 1, 2, -np.pi / 4), amplifier(2, 1, 2.0))


def random_symplectic(n: int, rng: np.random.Generator, max_squeeze: float = 0.3) -> np.ndarray:
    """Random 2n x 2n symplectic left-action matrix (orthogonal-squeeze-orthogonal)."""
    def block_orth():
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        q = q * np.sign(np.diag(r))
        out = np.zeros((2 * n, 2 * n))
        out[:n, :n] = q
        out[n:, n:] = q
        return out

    r = rng.uniform(-max_squeeze, max_squeeze, size=n)
    d = np.diag(np.concatenate([np.exp(-r), np.exp(r)]))
    return block_orth() @ d @ block_orth()
