import numpy as np
import pytest

from gausim import channels
from gausim.phasespace import GaussianState, symplectic_form


def random_physical_state(n, rng, max_squeeze=0.3, max_disp=2.0, pure=False):
    """Random physical state: symplectic image of a thermal diagonal."""
    s = channels.random_symplectic(n, rng, max_squeeze)
    nu = np.ones(n) if pure else 1.0 + rng.uniform(0.0, 1.0, size=n)
    gamma = s @ np.diag(np.concatenate([nu, nu])) @ s.T
    xi = rng.uniform(-max_disp, max_disp, size=2 * n)
    return GaussianState(xi, gamma)


def random_cp_channel(n, rng, scale=0.6):
    """Random CP-valid channel: arbitrary A plus just-enough isotropic noise."""
    a = rng.standard_normal((2 * n, 2 * n)) * scale / np.sqrt(2 * n)
    sig = symplectic_form(n)
    h = 1j * (a.T @ sig @ a - sig)
    lam_max = np.linalg.eigvalsh(h)[-1]
    g = (max(lam_max, 0.0) + rng.uniform(0.0, 0.5)) * np.eye(2 * n)
    alpha = rng.uniform(-1.0, 1.0, size=2 * n)
    return channels.GaussianChannel(a, g, alpha)


def random_symplectic_channel(n, rng):
    s = channels.random_symplectic(n, rng)
    alpha = rng.uniform(-1.0, 1.0, size=2 * n)
    return channels.channel_from_left_action(s, alpha=alpha, cp_certified=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
