import math

import numpy as np
import pytest

import gamow


def test_evolve_ket_decays():
    pole = gamow.ComplexPole(1.5, 0.8)
    for t in (0.0, 1.0, 4.0):
        c = gamow.evolve_ket(pole, 0, t)
        assert abs(abs(c[0]) - math.exp(-0.4 * t)) < 1e-14


def test_evolve_ket_matches_oracle():
    pole = gamow.ComplexPole(1.0, 1.0, 4)
    u = gamow.expm_oracle(gamow.hamiltonian_matrix(pole), 2.5)
    for k in range(4):
        assert np.max(np.abs(gamow.evolve_ket(pole, k, 2.5) - u[:, k])) < 1e-12


def test_density_decays_exponentially():
    pole = gamow.ComplexPole(1.0, 0.5, 4)
    for n in range(4):
        w = gamow.build_density(pole, n)
        wt = gamow.evolve_density(pole, w, 3.0)
        assert np.max(np.abs(wt - math.exp(-1.5) * w)) < 1e-12
        check = gamow.check_exponential(pole, w, np.linspace(0, 10, 101).tolist())
        assert check["is_exponential"]


def test_negative_control():
    pole = gamow.ComplexPole(1.0, 1.0, 2)
    w = np.zeros((2, 2), dtype=complex)
    w[1, 1] = 1.0
    check = gamow.check_exponential(pole, w, [1.0])
    assert not check["is_exponential"]
    assert check["max_deviation"] > 0.1


@pytest.mark.parametrize("order", [1, 2, 3, 5])
def test_subspace_dimension(order):
    pole = gamow.ComplexPole(1.0, 1.0, order)
    basis = gamow.exponential_subspace(pole)
    assert len(basis) == order
    for n in range(order):
        assert gamow.projection_residual(pole, basis, gamow.build_density(pole, n)) < 1e-8


def test_lorentzian_peak():
    assert gamow.lorentzian(1.0, 1.0, 1.0) == 2.0 / math.pi


def test_fit_round_trip():
    truth = gamow.PoleModel([gamow.ModelPole(2 - 0.3j, [0.5, 1.0])])
    x = np.linspace(0.0, 4.0, 401)
    y = [gamow.model_intensity(truth, e) for e in x]
    init = gamow.PoleModel([gamow.ModelPole(2.2 - 0.33j, [0.55, 1.1])])
    fit = gamow.fit_poles(x.tolist(), y, init)
    assert fit.converged
    assert abs(fit.model.poles[0].z - (2 - 0.3j)) < 1e-6
    assert fit.residual_rms < 1e-9
    order, _ = gamow.select_order(x.tolist(), y, 2.2 - 0.33j, 3)
    assert order == 2


def test_negative_time_raises():
    pole = gamow.ComplexPole(1.0, 1.0, 2)
    with pytest.raises(gamow.GamowError, match="ArrowOfTime"):
        gamow.evolve_ket(pole, 0, -1.0)
    with pytest.raises(ValueError):
        gamow.evolution_matrix(pole, -0.5)
