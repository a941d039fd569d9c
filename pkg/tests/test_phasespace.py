import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausim import fock
from gausim.phasespace import (
    GaussianState,
    check_physical,
    coherent,
    marginal,
    mean_photon_number,
    overlap,
    squeezed_vacuum,
    storage_counts,
    symplectic_form,
    tensor,
    thermal,
    two_mode_squeezed_vacuum,
    vacuum,
)

from conftest import random_physical_state


def test_symplectic_form_invariants():
    for n in (1, 2, 5):
        sig = symplectic_form(n)
        assert np.array_equal(sig.T, -sig)
        assert np.allclose(sig @ sig, -np.eye(2 * n))
        assert set(np.unique(sig)) <= {-1.0, 0.0, 1.0}


def test_vacuum_is_identity():
    s = vacuum(1)
    assert np.array_equal(s.xi, np.zeros(2))
    assert np.array_equal(s.gamma, np.eye(2))
    assert s.log_weight == 0.0
    s2 = vacuum(2)
    assert np.array_equal(s2.gamma, np.eye(4))
    with pytest.raises(ValueError):
        vacuum(0)


def test_vacuum_physicality_eigenvalues():
    h = vacuum(1).gamma + 1j * symplectic_form(1)
    assert np.allclose(np.linalg.eigvalsh(h), [0.0, 2.0])
    diag = check_physical(vacuum(1))
    assert diag.passed
    assert abs(diag.min_eigenvalue) < 1e-12


def test_check_physical_rejects_subvacuum():
    bad = GaussianState(np.zeros(2), 0.5 * np.eye(2))
    diag = check_physical(bad)
    assert not diag.passed
    assert np.isclose(diag.min_eigenvalue, -0.5)


def test_coherent_placement():
    assert np.array_equal(coherent(1, 1, 0.0, 0.0).xi, vacuum(1).xi)
    s = coherent(1, 1, 2.0, 0.0)
    assert np.array_equal(s.xi, [2.0, 0.0])
    assert np.array_equal(s.gamma, np.eye(2))
    s2 = coherent(2, 2, 1.0, -1.0)
    assert np.array_equal(s2.xi, [0.0, 1.0, 0.0, -1.0])
    with pytest.raises(ValueError):
        coherent(1, 2, 0.0, 0.0)


def test_squeezed_vacuum_variances():
    assert np.array_equal(squeezed_vacuum(1, 1, 0.0).gamma, np.eye(2))
    s = squeezed_vacuum(1, 1, 0.5)
    assert np.isclose(s.gamma[0, 0], np.exp(-1.0))
    assert np.isclose(s.gamma[1, 1], np.exp(1.0))
    assert np.isclose(s.gamma[0, 0] * s.gamma[1, 1], 1.0)


def test_squeezed_variance_against_fock_oracle():
    oracle = fock.from_gaussian("squeezed", {"n": 1, "mode": 1, "r": 0.5}, 40)
    _, gamma = fock.moments(oracle)
    assert abs(gamma[0, 0] - np.exp(-1.0)) < 1e-6


def test_two_mode_squeezed_structure():
    assert np.array_equal(two_mode_squeezed_vacuum(0.0).gamma, np.eye(4))
    r = 0.3
    s = two_mode_squeezed_vacuum(r)
    ch, sh = np.cosh(2 * r), np.sinh(2 * r)
    assert np.isclose(s.gamma[0, 1], sh)
    assert np.isclose(s.gamma[2, 3], -sh)
    assert np.isclose(s.gamma[0, 0], ch)
    assert np.isclose(np.linalg.det(s.gamma), 1.0)
    assert check_physical(s).passed


def test_two_mode_squeezed_against_fock_oracle():
    s = two_mode_squeezed_vacuum(0.3)
    oracle = fock.from_gaussian("tmsv", {"r": 0.3}, 30)
    xi, gamma = fock.moments(oracle)
    assert np.max(np.abs(xi - s.xi)) < 1e-6
    assert np.max(np.abs(gamma - s.gamma)) < 1e-6


def test_thermal():
    assert np.array_equal(thermal(1, 1, 0.0).gamma, np.eye(2))
    assert np.array_equal(thermal(1, 1, 1.0).gamma, 3.0 * np.eye(2))
    assert np.isclose(mean_photon_number(thermal(1, 1, 0.7), 1), 0.7)
    with pytest.raises(ValueError):
        thermal(1, 1, -0.1)


def test_thermal_against_fock_oracle():
    oracle = fock.from_gaussian("thermal", {"n": 1, "mode": 1, "nbar": 0.7}, 50)
    xi, gamma = fock.moments(oracle)
    assert np.max(np.abs(gamma - thermal(1, 1, 0.7).gamma)) < 1e-6
    assert np.max(np.abs(xi)) < 1e-12


@pytest.mark.parametrize(
    "state",
    [
        vacuum(2),
        coherent(2, 1, 1.5, -0.5),
        squeezed_vacuum(2, 2, 0.4),
        two_mode_squeezed_vacuum(0.5),
        thermal(2, 1, 1.3),
    ],
)
def test_constructors_symmetric_and_physical(state):
    assert np.array_equal(state.gamma, state.gamma.T)
    assert check_physical(state).passed


@pytest.mark.parametrize(
    "state",
    [vacuum(1), coherent(1, 1, 2.0, 1.0), squeezed_vacuum(1, 1, 0.6), two_mode_squeezed_vacuum(0.4)],
)
def test_pure_constructors_unit_determinant(state):
    assert np.isclose(np.linalg.det(state.gamma), 1.0)


def test_overlap_basics():
    assert np.isclose(overlap(vacuum(1), vacuum(1)), 1.0)
    q0, p0 = 2.0, 0.0
    expected = np.exp(-(q0**2 + p0**2) / 4.0)
    assert np.isclose(overlap(coherent(1, 1, q0, p0), vacuum(1)), expected)
    with pytest.raises(ValueError):
        overlap(vacuum(1), vacuum(2))


def test_overlap_against_fock_oracle():
    for q0, p0 in [(2.0, 0.0), (1.0, -1.5), (0.3, 2.2)]:
        oracle = fock.from_gaussian("coherent", {"n": 1, "mode": 1, "q": q0, "p": p0}, 40)
        p_vac = float(np.abs(oracle.amps[0]) ** 2)
        assert abs(overlap(coherent(1, 1, q0, p0), vacuum(1)) - p_vac) < 1e-10


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 3))
def test_overlap_symmetric_and_bounded(seed, n):
    rng = np.random.default_rng(seed)
    a = random_physical_state(n, rng)
    b = random_physical_state(n, rng)
    ab, ba = overlap(a, b), overlap(b, a)
    assert np.isclose(ab, ba, rtol=1e-10)
    assert 0.0 < ab <= 1.0 + 1e-12


def test_tensor_and_marginal_roundtrip(rng):
    a = random_physical_state(1, rng)
    b = random_physical_state(2, rng)
    joint = tensor(a, b)
    assert joint.n == 3
    back_a = marginal(joint, (1,))
    back_b = marginal(joint, (2, 3))
    assert np.allclose(back_a.xi, a.xi)
    assert np.allclose(back_a.gamma, a.gamma)
    assert np.allclose(back_b.gamma, b.gamma)


def test_moment_agreement_all_constructors():
    cases = [
        ("vacuum", {"n": 2}, vacuum(2)),
        ("coherent", {"n": 2, "mode": 2, "q": 1.0, "p": -2.0}, coherent(2, 2, 1.0, -2.0)),
        ("squeezed", {"n": 1, "mode": 1, "r": -0.5}, squeezed_vacuum(1, 1, -0.5)),
        ("tmsv", {"r": 0.5}, two_mode_squeezed_vacuum(0.5)),
    ]
    for name, params, state in cases:
        oracle = fock.from_gaussian(name, params, 40)
        xi, gamma = fock.moments(oracle)
        assert np.max(np.abs(xi - state.xi)) < 1e-6, name
        assert np.max(np.abs(gamma - state.gamma)) < 1e-6, name


def test_storage_counts():
    for n in (1, 5, 50):
        counts = storage_counts(n)
        assert counts["cov_independent"] == 2 * n * n + n
        assert counts["total"] == 2 * n * n + 3 * n


def test_state_rejects_bad_shapes():
    with pytest.raises(ValueError):
        GaussianState(np.zeros(3), np.eye(3))
    with pytest.raises(ValueError):
        GaussianState(np.zeros(2), np.eye(4))
    with pytest.raises(ValueError):
        GaussianState(np.array([np.nan, 0.0]), np.eye(2))


def test_states_are_immutable():
    s = vacuum(1)
    with pytest.raises(ValueError):
        s.xi[0] = 1.0
    with pytest.raises(ValueError):
        s.gamma[0, 0] = 5.0
