import math

import numpy as np
import pytest

from steerqkd import quantum as qm
from steerqkd.noise import BinaryPovm, lossy_povm, projective_povm, werner
from steerqkd.steering import cjwr_f3_optimal, cjwr_value, correlation_matrix

from helpers import phi_plus

X, Y, Z = (qm.pauli(a) for a in "xyz")
ALICE = (X, -Y, Z)
BOB = (X, Y, Z)


def lossy_correlator(rho, a_obs, b_obs, eta):
    """<A' (x) B> with Alice's no-click mapped to -1."""
    a = lossy_povm(projective_povm(a_obs), eta).observable
    return qm.expectation(rho, np.kron(a, b_obs))


def test_werner_endpoints():
    assert np.allclose(werner(1), qm.projector(phi_plus()))
    assert np.allclose(werner(0), qm.I4 / 4)


def test_werner_is_density_matrix():
    for nu in np.linspace(0, 1, 21):
        qm.density_matrix(werner(nu))


def test_werner_f3():
    assert cjwr_f3_optimal(werner(0.8)) == pytest.approx(0.8 * math.sqrt(3), abs=1e-12)


@pytest.mark.parametrize("nu", [-0.01, 1.5])
def test_werner_domain(nu):
    with pytest.raises(ValueError):
        werner(nu)


def test_lossy_endpoints():
    ideal = projective_povm(Z)
    same = lossy_povm(ideal, 1.0)
    assert np.allclose(same.e_plus, ideal.e_plus) and np.allclose(same.e_minus, ideal.e_minus)
    dead = lossy_povm(ideal, 0.0)
    assert np.allclose(dead.e_plus, 0) and np.allclose(dead.e_minus, qm.I2)


def test_lossy_sigma_z_correlator():
    assert lossy_correlator(werner(1), Z, Z, 0.8) == pytest.approx(0.8, abs=1e-12)


def test_lossy_validation():
    with pytest.raises(ValueError):
        lossy_povm(projective_povm(Z), 1.2)
    with pytest.raises(TypeError):
        lossy_povm(Z, 0.5)


def test_binary_povm_validation():
    with pytest.raises(ValueError):
        BinaryPovm(np.diag([1.0, 0.0]), np.diag([0.0, 0.5]))
    with pytest.raises(ValueError):
        BinaryPovm(np.diag([1.2, 0.0]), np.diag([-0.2, 1.0]))
    with pytest.raises(ValueError):
        projective_povm(np.kron(Z, Z))


def test_lossy_valid_on_grid(rng):
    etas = np.round(np.arange(0, 1.0001, 0.05), 12)
    for _ in range(200):
        u = qm.random_unitary(2, rng)
        ideal = projective_povm(u @ Z @ u.conj().T)
        for eta in etas:
            p = lossy_povm(ideal, eta)
            assert np.linalg.eigvalsh(p.e_plus)[0] >= -1e-10
            assert np.linalg.eigvalsh(p.e_minus)[0] >= -1e-10
            assert np.max(np.abs(p.e_plus + p.e_minus - qm.I2)) <= 1e-12


@pytest.mark.parametrize("nu", [0.5, 0.9, 1.0])
@pytest.mark.parametrize("eta", [0.0, 0.6, 0.83, 1.0])
def test_matched_correlator_scaling(nu, eta):
    rho = werner(nu)
    total = sum(lossy_correlator(rho, a, b, eta) for a, b in zip(ALICE, BOB))
    assert abs(total) / math.sqrt(3) == pytest.approx(eta * nu * math.sqrt(3), abs=1e-10)


@pytest.mark.parametrize("nu", [0.5, 0.9, 1.0])
@pytest.mark.parametrize("eta", [0.0, 0.6, 0.83, 1.0])
def test_lossy_qber(nu, eta):
    rho = werner(nu)
    a = lossy_povm(projective_povm(Z), eta)
    b = projective_povm(Z)
    p_diff = sum(qm.expectation(rho, np.kron(ea, eb)) for ea, eb in
                 ((a.e_plus, b.e_minus), (a.e_minus, b.e_plus)))
    assert p_diff == pytest.approx((1 - nu * eta) / 2, abs=1e-10)


def test_lossless_correlators_match_steering_module():
    rho = werner(0.7)
    t = correlation_matrix(rho)
    for i, (a, b) in enumerate(zip(ALICE, BOB)):
        sign = -1 if i == 1 else 1
        assert lossy_correlator(rho, a, b, 1.0) == pytest.approx(sign * t[i, i])
    assert cjwr_value(rho) == pytest.approx(0.7 * math.sqrt(3))
