import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from majorana_dqd.model import (
    ModelKind,
    ModelParams,
    ValidityWarning,
    build_effective_model,
    build_full_model,
    effective_coupling,
    electron_number,
    reference_params,
    stabilizer_effective_coupling,
)
from majorana_dqd.perturbation import eta

G = 0.01


def test_effective_coupling_reference_point():
    c = effective_coupling(reference_params())
    assert c.lambda12 == pytest.approx(2 * G)
    assert c.Omega == pytest.approx(0.01)


def test_effective_coupling_phi_pi():
    assert effective_coupling(reference_params(phi=np.pi)).Omega == pytest.approx(0.03)


@pytest.mark.parametrize("z", [1, -1])
def test_decoupled_island(z):
    p = reference_params(lambda1=0.0, z=z, phi=0.7)
    assert effective_coupling(p).Omega == pytest.approx(-G * np.exp(0.7j))


@given(phi=st.floats(0, 2 * np.pi), l0=st.floats(0, 0.1), l1=st.floats(-0.1, 0.1), l2=st.floats(-0.1, 0.1))
def test_omega_bounds_and_pi_shift(phi, l0, l1, l2):
    p = ModelParams(lambda0=l0, lambda1=l1, lambda2=l2, phi=phi)
    c = effective_coupling(p)
    mag = abs(c.Omega)
    assert abs(l0 - abs(c.lambda12)) - 1e-15 <= mag <= l0 + abs(c.lambda12) + 1e-15
    shifted = effective_coupling(p.replace(z=-1, phi=phi + np.pi))
    assert abs(shifted.Omega) == pytest.approx(mag, abs=1e-15)


def test_params_validation():
    for bad in ({"Gamma1": 0}, {"E_C": -1}, {"gamma": -0.1}, {"Delta": -1}, {"z": 0}, {"eps1": np.inf}):
        with pytest.raises(ValueError):
            ModelParams(**bad)


def test_validity_warning():
    with pytest.warns(ValidityWarning):
        p = ModelParams(lambda1=0.3)
    assert p.validity_ratio == pytest.approx(0.3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ModelParams(lambda1=0.2)


def test_units_of_gamma():
    p = ModelParams.in_units_of_gamma(0.01, lambda0=1, lambda1=10, lambda2=10, E_C=100, phi=1.0)
    assert p == reference_params(phi=1.0)


def test_effective_hamiltonian_layout():
    p = reference_params(eps1=0.3, eps2=0.5)
    m = build_effective_model(p)
    assert m.kind is ModelKind.EFFECTIVE4
    assert m.labels == ("00", "01", "10", "11")
    assert np.allclose(np.diag(m.H).real, [0, 0.5, 0.3, 0.8])
    # Omega multiplies d2^dag d1: |10> -> |01>, i.e. H[01, 10]
    assert m.H[1, 2] == pytest.approx(effective_coupling(p).Omega)
    assert m.H[2, 1] == pytest.approx(np.conj(effective_coupling(p).Omega))


def test_zero_hamiltonian():
    m = build_effective_model(ModelParams(lambda0=0, lambda1=0))
    assert np.all(m.H == 0)


def test_jordan_wigner_convention():
    m = build_effective_model(reference_params())
    a = np.array([[0, 1], [0, 0]])
    sz = np.diag([1, -1])
    assert np.array_equal(m.d1, np.kron(a, np.eye(2)))
    assert np.array_equal(m.d2, np.kron(sz, a))
    for x, y in ((m.d1, m.d2), (m.d1, m.d2.conj().T)):
        assert np.allclose(x @ y + y @ x, 0)
    assert np.allclose(m.d1 @ m.d1.conj().T + m.d1.conj().T @ m.d1, np.eye(4))


@given(e1=st.floats(-0.1, 0.1), e2=st.floats(-0.1, 0.1), phi=st.floats(0, 6.3))
def test_single_excitation_block(e1, e2, phi):
    p = reference_params(eps1=e1, eps2=e2, phi=phi)
    vals = np.linalg.eigvalsh(build_effective_model(p).H[1:3, 1:3])
    om = abs(effective_coupling(p).Omega)
    r = np.sqrt((e1 - e2) ** 2 / 4 + om**2)
    assert np.allclose(vals, [(e1 + e2) / 2 - r, (e1 + e2) / 2 + r], atol=1e-14)


@pytest.mark.parametrize("z", [1, -1])
def test_full_model_structure(z):
    m = build_full_model(reference_params(phi=0.4), z=z)
    assert m.dim == 12 and m.kind is ModelKind.FULL12
    assert np.allclose(m.H, m.H.conj().T)
    n = electron_number(m)
    rows, cols = np.nonzero(np.abs(m.H) > 0)
    assert np.all(n[rows] == n[cols])
    # d_j removes one dot electron
    for d in (m.d1, m.d2):
        r, c = np.nonzero(np.abs(d) > 0)
        assert np.all(n[r] == n[c] - 1)
    assert m.low_energy == (0, 3, 6, 9)
    assert m.labels[1] == "00,e+" and m.labels[2] == "00,e-"


def test_full_model_decoupled_island():
    p = reference_params(lambda1=0.0, lambda2=0.0, phi=1.1, eps1=0.02)
    m = build_full_model(p)
    low = np.ix_(m.low_energy, m.low_energy)
    ref = build_effective_model(p)
    assert np.allclose(m.H[low], ref.H)
    assert np.allclose(m.d1[low], ref.d1) and np.allclose(m.d2[low], ref.d2)
    mask = np.ones(12, bool)
    mask[list(m.low_energy)] = False
    assert np.all(m.H[np.ix_(m.low_energy, np.flatnonzero(mask))] == 0)


@pytest.mark.parametrize("z", [1, -1])
@pytest.mark.parametrize("phi", [0.0, 1.0, np.pi])
def test_second_order_reduction(z, phi):
    """P H Q (E0 - H_QQ)^-1 Q H P reproduces the island term of the effective model."""
    p = reference_params(phi=phi, z=z, lambda2=0.07)
    m = build_full_model(p)
    P = list(m.low_energy)
    Q = [k for k in range(12) if k not in P]
    hpq = m.H[np.ix_(P, Q)]
    h2 = hpq @ hpq.conj().T / (-p.E_C)
    heff = m.H[np.ix_(P, P)] + h2
    shift = -(p.lambda1**2 + p.lambda2**2) / p.E_C
    target = build_effective_model(p).H + shift * np.diag([1, 1, 1, 1])
    assert np.allclose(heff, target, atol=1e-15)


def test_stabilizer_coupling_zero_offsets():
    t = (0.3, 0.2, 0.5, 0.4)
    l1, l2, ec = 0.1, 0.05, 2.0
    alpha = -32 * l1 * l2 / (5 * t[0] * ec)
    c = 5 * np.prod(t) / (16 * ec**3)
    for Z in (1, -1):
        v = stabilizer_effective_coupling(l1, l2, *t, ec, Z=Z)
        assert v == pytest.approx(alpha * c * Z, rel=1e-14)


def test_stabilizer_coupling_sign_flip_only_in_c_part():
    args = (0.1, 0.05, 0.3, 0.2, 0.5, 0.4, 1.0, (0.1, 0.2, 0.0, 0.0))
    plus = stabilizer_effective_coupling(*args, Z=1)
    minus = stabilizer_effective_coupling(*args, Z=-1)
    xi_part = (plus + minus) / 2
    alpha = -32 * 0.1 * 0.05 / (5 * 0.3)
    assert xi_part == pytest.approx(alpha * 5 * 0.09 / 16 * eta(0.1, 0.2), rel=1e-13)


def test_eta_value():
    assert eta(0.1, 0.1) == pytest.approx(0.01 / (0.96 * 0.96), rel=1e-15)


def test_stabilizer_coupling_errors():
    with pytest.raises(ValueError):
        stabilizer_effective_coupling(0.1, 0.1, 0.0, 1, 1, 1, 1.0)
    with pytest.raises(ValueError):
        stabilizer_effective_coupling(0.1, 0.1, 1, 1, 1, 1, 1.0, dng=(0.5, 0, 0, 0))


def test_mediated_feeds_effective_model():
    v = stabilizer_effective_coupling(0.1, 0.1, 0.3, 0.3, 0.3, 0.3, 1.0, Z=1)
    p = reference_params(mediated=np.conj(v), lambda0=0.0)
    assert effective_coupling(p).Omega == pytest.approx(np.conj(v))
