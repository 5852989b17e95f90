import numpy as np
import pytest

from diracflow.common.errors import UsageError
from diracflow.geometry import dirac, laplacian
from diracflow.spectral import dirac_wave, wave_energy, wave_solve, wave_velocity
from tests.helpers import complex_of


@pytest.fixture
def k3():
    D = dirac(complex_of("complete:3"))
    return D, laplacian(D)


def test_initial_data(k3):
    _, L = k3
    u0 = np.arange(7, dtype=float)
    v0 = np.zeros(7)
    np.testing.assert_allclose(wave_solve(L, u0, v0, 0.0), u0, atol=1e-12)
    np.testing.assert_allclose(wave_velocity(L, u0, v0, 0.0), v0, atol=1e-12)


def test_energy_conserved(k3):
    _, L = k3
    u0 = np.array([1.0, 0, 0, 0, 0, 0, 0])
    v0 = np.array([0.0, 0, 0, 0.5, -0.5, 0, 1.0])
    energy = wave_energy(L, u0, v0)
    for t in np.linspace(0, 10, 41):
        u, v = wave_solve(L, u0, v0, t), wave_velocity(L, u0, v0, t)
        assert abs(wave_energy(L, u, v) - energy) < 1e-9


def test_second_difference(k3):
    _, L = k3
    u0 = np.array([1.0, -1.0, 0.5, 0.2, 0.0, -0.3, 1.0])
    v0 = np.array([0.0, 0, 0, 1.0, 0, 0, 0])
    delta, t = 1e-3, 0.7
    u = [wave_solve(L, u0, v0, t + k * delta) for k in (-1, 0, 1)]
    second = (u[0] - 2 * u[1] + u[2]) / delta ** 2
    assert np.max(np.abs(second + L.entries @ u[1])) < 1e-5


def test_kernel_velocity(k3):
    _, L = k3
    u0 = np.zeros(7)
    v0 = np.zeros(7)
    v0[:3] = 1.0
    with pytest.raises(UsageError):
        wave_solve(L, u0, v0, 1.0)
    np.testing.assert_allclose(wave_solve(L, u0, v0, 1.0, project_kernel=True), 0.0, atol=1e-12)


def test_dirac_wave(k3):
    D, L = k3
    u0 = np.array([1.0, 0, 0, 0, 0, 0, 0])
    for t in (0.3, 1.0, 4.0):
        u = dirac_wave(D, u0, t)
        assert np.linalg.norm(u) == pytest.approx(1.0)
        np.testing.assert_allclose(u.real, wave_solve(L, u0, np.zeros(7), t), atol=1e-12)


def test_time_shift(k3):
    _, L = k3
    u0 = np.array([0.0, 1.0, 0, 0, 0, 0, 0.5])
    v0 = np.array([0.0, 0, 0, 0, 1.0, 0, 0])
    t, s = 0.8, 1.7
    u, v = wave_solve(L, u0, v0, t), wave_velocity(L, u0, v0, t)
    np.testing.assert_allclose(wave_solve(L, u, v, s), wave_solve(L, u0, v0, t + s), atol=1e-8)
