import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qboson import hall_littlewood as hl
from qboson.fock import delta_n
from qboson.qnum import QContext, q_factorial
from qboson.verify import pieri_suite, random_alcove_point

CTX = QContext(0.5, "float")
Q0 = QContext(0.0, "float")
angles = st.floats(-math.pi, math.pi, allow_nan=False)


def test_rho():
    assert np.allclose(hl.rho(1), [0])
    assert np.allclose(hl.rho(2), [0.5, -0.5])
    assert np.allclose(hl.rho(3), [1, 0, -1])
    assert hl.rho(4).sum() == 0


def test_c_function_values():
    assert hl.c_function(CTX, [0.3]) == 1
    assert hl.c_function(CTX, [math.pi / 2, -math.pi / 2]) == pytest.approx((1 + 0.5) / 2)
    xi = np.array([1.0, 0.2, -0.9])
    limit = 1
    for j, k in itertools.combinations(range(3), 2):
        limit *= 1 / (1 - np.exp(1j * (xi[k] - xi[j])))
    assert hl.c_function(Q0, xi) == pytest.approx(limit)


def test_c_function_rejects_walls():
    with pytest.raises(ValueError):
        hl.c_function(CTX, [0.4, 0.4])


def test_density_values():
    assert hl.density(CTX, [0.7]) == 1
    assert hl.density(CTX, [math.pi / 2, -math.pi / 2]) == pytest.approx(4 / 1.5 ** 2)
    assert hl.density(CTX, [0.4, 0.4]) == 0
    xi = np.array([2.0, 0.5, -1.0])
    assert hl.density(CTX, xi) == pytest.approx(1 / abs(hl.c_function(CTX, xi)) ** 2)


def test_phi_one_particle():
    for lam in (-2, 0, 3):
        assert hl.phi(CTX, [0.8], (lam,)) == pytest.approx(np.exp(0.8j * lam))


def test_phi_at_zero_weight_is_poincare():
    # phi_xi(0,...,0) = [n]! independently of xi
    rng = np.random.default_rng(0)
    for n in range(1, 5):
        target = q_factorial(CTX, n)
        for _ in range(3):
            xi = random_alcove_point(rng, n)
            assert hl.phi(CTX, xi, (0,) * n) == pytest.approx(target, abs=1e-12)
        assert hl.phi(Q0, random_alcove_point(rng, n), (0,) * n) == pytest.approx(1.0)


def test_phi_two_term_sum_at_q0():
    xi = np.array([1.1, -0.4])
    lam = (2, -1)
    z = np.exp(1j * xi)
    brute = (z[0] ** lam[0] * z[1] ** lam[1]) / (1 - z[1] / z[0]) + (z[1] ** lam[0] * z[0] ** lam[1]) / (1 - z[0] / z[1])
    assert hl.phi(Q0, xi, lam) == pytest.approx(brute)


def test_phi_quasi_periodic():
    rng = np.random.default_rng(1)
    for n in (2, 3):
        xi = random_alcove_point(rng, n)
        lam = (1, 0, 0)[:n] if n == 3 else (0, 0)
        shifted = tuple(p + 1 for p in lam)
        assert hl.phi(CTX, xi, shifted) == pytest.approx(np.exp(1j * xi.sum()) * hl.phi(CTX, xi, lam), abs=1e-12)


def test_phi_is_symmetric_in_xi():
    rng = np.random.default_rng(2)
    xi = random_alcove_point(rng, 3)
    lam = (2, 0, -1)
    ref = hl.phi(CTX, xi, lam)
    for perm in itertools.permutations(range(3)):
        assert hl.phi_grid(CTX, xi[list(perm)][None, :], [lam])[0, 0] == pytest.approx(ref, abs=1e-12)


def test_phi_wall_limit_is_finite():
    vals = hl.phi_grid(CTX, np.array([[0.5, 0.5], [0.5, 0.5 + 1e-3]]), [(1, 0)])
    assert np.all(np.isfinite(vals))
    assert abs(vals[0, 0] - vals[0, 1]) < 1e-2


def test_elementary_symmetric():
    assert hl.elementary_symmetric(0, [2, 3, 5]) == 1
    assert hl.elementary_symmetric(1, [2, 3, 5]) == 10
    assert hl.elementary_symmetric(3, [2, 3, 5]) == 30
    assert hl.elementary_symmetric(4, [2, 3, 5]) == 0


def test_epsilon_values():
    xi = np.array([0.3, -1.2])
    assert hl.epsilon_r(2, xi) == pytest.approx(2 * math.cos(xi.sum()))
    assert hl.epsilon_r(1, [math.pi / 3, -math.pi / 3]) == pytest.approx(2.0)
    assert hl.epsilon_r(2, np.zeros(4)) == pytest.approx(2 * math.comb(4, 2))


@given(st.lists(angles, min_size=1, max_size=4), st.integers(1, 4))
def test_epsilon_is_sum_of_elementary(xi, r):
    xi = np.array(xi)
    if r > len(xi):
        return
    z = np.exp(1j * xi)
    target = hl.elementary_symmetric(r, z) + hl.elementary_symmetric(r, 1 / z)
    assert hl.epsilon_r(r, xi) == pytest.approx(target.real, abs=1e-12)
    assert abs(target.imag) < 1e-12


@given(angles)
def test_s_is_unimodular_and_half_squares(x):
    s = hl.s_phase(CTX, x)
    h = hl.s_half(CTX, x)
    assert abs(abs(s) - 1) < 1e-14
    assert abs(h * h - s) < 1e-14


def test_s_special_values():
    assert hl.s_phase(CTX, 0.0) == pytest.approx(1)
    assert hl.s_phase(CTX, math.pi) == pytest.approx(1)


def test_s_hat_sigma():
    xi = np.array([2.0, 0.1, -1.3])
    ident = 1
    for j, k in itertools.combinations(range(3), 2):
        ident *= hl.s_phase(CTX, xi[k] - xi[j])
    assert hl.s_hat_sigma(CTX, (0, 1, 2), xi) == pytest.approx(ident)
    assert hl.s_hat_sigma(CTX, (0,), [0.4]) == 1
    rng = np.random.default_rng(3)
    for perm in itertools.permutations(range(3)):
        v = hl.s_hat_sigma(CTX, perm, rng.uniform(-3, 3, 3))
        assert abs(abs(v) - 1) < 1e-14


def test_psi_one_particle():
    assert hl.psi(CTX, [1.3], (4,)) == pytest.approx(np.exp(4 * 1.3j))


def test_psi_two_forms_agree():
    rng = np.random.default_rng(4)
    for n in (2, 3):
        for _ in range(10):
            xi = random_alcove_point(rng, n)
            lam = tuple(sorted(rng.integers(-3, 4, n), reverse=True))
            assert abs(hl.psi(CTX, xi, lam) - hl.psi_phase_form(CTX, xi, lam)) < 1e-10


def test_psi_modulus():
    xi = np.array([1.9, -0.2, -2.4])
    lam = (1, 1, -2)
    lhs = abs(hl.psi(CTX, xi, lam)) ** 2
    rhs = hl.density(CTX, xi) * float(delta_n(CTX, lam)) * abs(hl.phi(CTX, xi, lam)) ** 2
    assert lhs == pytest.approx(rhs)


def test_psi_vanishes_on_walls():
    assert hl.psi_grid(CTX, np.array([[0.3, 0.3]]), [(0, 0)])[0, 0] == 0


def test_eigen_equations_small():
    res = pieri_suite(CTX, n_max=3, n_xi=4, n_lam=5, seed=5)
    assert res.passed, res.to_dict()
    assert res.max_residual < 1e-10


def test_in_alcove():
    assert hl.in_alcove([1.0, 0.0, -1.0])
    assert not hl.in_alcove([0.0, 1.0])
    assert not hl.in_alcove([4.0, 0.0])
