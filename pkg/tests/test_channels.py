import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausim import channels as ch
from gausim import fock
from gausim.errors import RejectedChannelError
from gausim.phasespace import (
    check_physical,
    coherent,
    marginal,
    overlap,
    two_mode_squeezed_vacuum,
    vacuum,
)

from conftest import random_cp_channel, random_physical_state, random_symplectic_channel


def test_validate_cp_identity():
    diag = ch.validate_cp(ch.identity(1))
    assert diag.passed
    assert abs(diag.min_eigenvalue) < 1e-12


def test_validate_cp_scaled_identity_fails():
    bad = ch.GaussianChannel(2.0 * np.eye(2), np.zeros((2, 2)), np.zeros(2))
    diag = ch.validate_cp(bad)
    assert not diag.passed
    assert np.isclose(diag.min_eigenvalue, -3.0)


def test_amplifier_is_quantum_limited():
    for gain in (1.0, 1.5, 2.0, 4.0):
        diag = ch.validate_cp(ch.amplifier(1, 1, gain))
        assert diag.passed
        assert diag.min_eigenvalue < 1e-10  # marginal: sits exactly at zero


def test_is_symplectic():
    assert ch.is_symplectic(np.eye(4))
    for theta in (0.1, 0.7, 1.3):
        assert ch.is_symplectic(ch.beamsplitter(2, 1, 2, theta).a_matrix)
    assert not ch.is_symplectic(2.0 * np.eye(2))
    with pytest.raises(ValueError):
        ch.is_symplectic(np.zeros((2, 3)))


def test_apply_displacement_on_vacuum():
    alpha = np.array([0.5, -1.0])
    out = ch.apply(ch.displacement(1, alpha), vacuum(1))
    assert np.allclose(out.xi, alpha)
    assert np.allclose(out.gamma, np.eye(2))


def test_two_mode_squeezer_matches_constructor():
    out = ch.apply(ch.two_mode_squeezer(2, 1, 2, 0.3), vacuum(2))
    ref = two_mode_squeezed_vacuum(0.3)
    assert np.allclose(out.gamma, ref.gamma)
    assert np.allclose(out.xi, ref.xi)


def test_loss_on_coherent():
    out = ch.apply(ch.loss(1, 1, 0.5), coherent(1, 1, 2.0, 0.0))
    assert np.allclose(out.xi, [np.sqrt(0.5) * 2.0, 0.0])
    assert np.allclose(out.gamma, np.eye(2))


def test_loss_endpoints():
    ident = ch.loss(2, 1, 1.0)
    state = random_physical_state(2, np.random.default_rng(3))
    out = ch.apply(ident, state)
    assert np.allclose(out.gamma, state.gamma)
    assert np.allclose(out.xi, state.xi)
    blocked = ch.apply(ch.loss(2, 1, 0.0), state)
    assert np.allclose(marginal(blocked, (1,)).gamma, np.eye(2))
    assert np.allclose(marginal(blocked, (1,)).xi, 0.0)


def test_loss_cp_sweep():
    for eta in np.linspace(0.0, 1.0, 11):
        assert ch.validate_cp(ch.loss(1, 1, eta)).passed
    for eta in (1.01, 1.5, 2.0):
        bad = ch.loss(1, 1, eta)
        assert not ch.validate_cp(bad).passed
        with pytest.raises(RejectedChannelError):
            ch.apply(bad, vacuum(1))


def test_apply_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        ch.apply(ch.identity(2), vacuum(1))


def test_compose_identity_law(rng):
    t = random_cp_channel(2, rng)
    left = ch.compose(ch.identity(2), t)
    right = ch.compose(t, ch.identity(2))
    for combo in (left, right):
        assert np.allclose(combo.a_matrix, t.a_matrix)
        assert np.allclose(combo.g_matrix, t.g_matrix)
        assert np.allclose(combo.alpha, t.alpha)


def test_compose_loss_semigroup():
    combo = ch.compose(ch.loss(1, 1, 0.7), ch.loss(1, 1, 0.6))
    direct = ch.loss(1, 1, 0.42)
    assert np.allclose(combo.a_matrix, direct.a_matrix, atol=1e-12)
    assert np.allclose(combo.g_matrix, direct.g_matrix, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_compose_apply_equivalence(seed):
    rng = np.random.default_rng(seed)
    t1 = random_cp_channel(2, rng)
    t2 = random_cp_channel(2, rng)
    state = random_physical_state(2, rng)
    two_step = ch.apply(t2, ch.apply(t1, state))
    one_step = ch.apply(ch.compose(t2, t1), state)
    assert np.max(np.abs(two_step.xi - one_step.xi)) < 1e-9
    assert np.max(np.abs(two_step.gamma - one_step.gamma)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_semigroup_closure_and_physicality(seed):
    rng = np.random.default_rng(seed)
    t1 = random_cp_channel(2, rng)
    t2 = random_cp_channel(2, rng)
    assert ch.validate_cp(ch.compose(t2, t1)).passed
    state = random_physical_state(2, rng)
    assert check_physical(ch.apply(t2, ch.apply(t1, state))).passed


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_g_zero_cp_iff_symplectic(seed):
    rng = np.random.default_rng(seed)
    good = random_symplectic_channel(2, rng)
    assert ch.validate_cp(good).passed
    a = rng.standard_normal((4, 4))
    bad = ch.GaussianChannel(a, np.zeros((4, 4)), np.zeros(4))
    if not ch.is_symplectic(a, tol=1e-6):
        assert not ch.validate_cp(bad).passed


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_apply_linearity_in_means(seed):
    rng = np.random.default_rng(seed)
    t = random_cp_channel(2, rng)
    state = random_physical_state(2, rng)
    delta = rng.uniform(-1.0, 1.0, size=4)
    from gausim.phasespace import GaussianState

    shifted = GaussianState(state.xi + delta, state.gamma)
    out_shifted = ch.apply(t, shifted)
    out_base = ch.apply(t, state)
    assert np.allclose(out_shifted.xi, out_base.xi + t.a_matrix.T @ delta, atol=1e-12)
    assert np.allclose(out_shifted.gamma, out_base.gamma, atol=1e-12)


def test_squeezer_inverse():
    combo = ch.compose(ch.squeezer(1, 1, -0.4), ch.squeezer(1, 1, 0.4))
    assert np.allclose(combo.a_matrix, np.eye(2), atol=1e-12)


def test_beamsplitter_zero_angle_is_identity():
    bs = ch.beamsplitter(2, 1, 2, 0.0, 0.3)
    assert np.allclose(bs.a_matrix, np.eye(4))
    assert not bs.g_matrix.any()


@pytest.mark.parametrize(
    "name,builder,prep",
    [
        ("rot", lambda: ch.phase_rotation(2, 1, 0.7), ("coherent", {"n": 2, "mode": 1, "q": 1.0, "p": 0.5})),
        ("disp", lambda: None, ("squeezed", {"n": 2, "mode": 1, "r": 0.3})),
        ("bs", lambda: ch.beamsplitter(2, 1, 2, 0.6, 0.9), ("coherent", {"n": 2, "mode": 1, "q": 1.5, "p": -0.5})),
        ("sqz", lambda: ch.squeezer(2, 2, 0.4, 0.8), ("coherent", {"n": 2, "mode": 2, "q": 0.8, "p": 0.2})),
        ("tmss", lambda: ch.two_mode_squeezer(2, 1, 2, 0.35), ("coherent", {"n": 2, "mode": 1, "q": 1.0, "p": 1.0})),
    ],
)
def test_unitary_constructors_match_fock_oracle(name, builder, prep):
    prep_name, prep_params = prep
    state = fock.from_gaussian(prep_name, prep_params, 30)
    from gausim.circuit import build_initial_state, StateDescriptor

    desc = StateDescriptor(
        prep_name,
        (prep_params["mode"],) if "mode" in prep_params else (),
        {k: v for k, v in prep_params.items() if k not in ("n", "mode")},
    )
    engine_state = build_initial_state(desc, 2)
    if name == "rot":
        channel, modes, params = builder(), (1,), {"theta": 0.7}
    elif name == "disp":
        channel = ch.displacement(2, [0.5, 0.0, -0.8, 0.0])
        modes, params = (1,), {"q": 0.5, "p": -0.8}
    elif name == "bs":
        channel, modes, params = builder(), (1, 2), {"theta": 0.6, "phi": 0.9}
    elif name == "sqz":
        channel, modes, params = builder(), (2,), {"r": 0.4, "phi": 0.8}
    else:
        channel, modes, params = builder(), (1, 2), {"r": 0.35}
    expected = ch.apply(channel, engine_state)
    oracle = fock.apply_gaussian_unitary(state, name, modes, params)
    xi, gamma = fock.moments(oracle)
    assert np.max(np.abs(xi - expected.xi)) < 1e-6, name
    assert np.max(np.abs(gamma - expected.gamma)) < 1e-6, name


def test_classical_noise_requires_psd_to_apply():
    good = ch.classical_noise(1, 1, [[0.3, 0.1], [0.1, 0.2]])
    assert ch.validate_cp(good).passed
    bad = ch.classical_noise(1, 1, [[-0.3, 0.0], [0.0, 0.2]])
    assert not ch.validate_cp(bad).passed
    with pytest.raises(RejectedChannelError):
        ch.apply(bad, vacuum(1))


def test_cloner_noise_and_fidelity():
    from gausim.phasespace import tensor

    cloner = ch.cloner_1to2()
    assert ch.validate_cp(cloner).passed
    for q0, p0 in [(0.0, 0.0), (1.0, -2.0), (2.0, 2.0)]:
        source = coherent(1, 1, q0, p0)
        out = ch.apply(cloner, tensor(source, vacuum(1)))
        for mode in (1, 2):
            clone = marginal(out, (mode,))
            assert np.allclose(clone.gamma, 2.0 * np.eye(2), atol=1e-12)
            assert np.allclose(clone.xi, [q0, p0], atol=1e-12)
            assert abs(overlap(clone, source) - 2.0 / 3.0) < 1e-12


def test_cloning_vacuum_symmetric():
    from gausim.phasespace import tensor

    out = ch.apply(ch.cloner_1to2(), vacuum(2))
    c1, c2 = marginal(out, (1,)), marginal(out, (2,))
    assert np.allclose(c1.gamma, c2.gamma)
    assert np.allclose(c1.xi, c2.xi)
