import numpy as np
import pytest
import sympy

from diracflow.common.errors import UsageError
from diracflow.flow import FlowRunner, initial_state, rhs
from diracflow.oracles import (
    k3_compare,
    k3_complex,
    k3_embed,
    k3_equations,
    k3_initial_vars,
    k3_project,
    k3_reduced_evolve,
    k3_reduced_rhs,
)
from diracflow.oracles.k3 import VARIABLES
from diracflow.spectral import inflation_report


@pytest.fixture(scope="module")
def scaled_runs():
    gamma = (1.0, 10.0)
    times, values = k3_reduced_evolve(3.0, 1e-3, gamma)
    full = FlowRunner(initial_state(k3_complex(), gamma=gamma, with_unitary=False), 3.0, h=1e-3).run()
    return gamma, times, values, full


class TestReducedRhs:
    @pytest.mark.parametrize("gamma", [None, (1.0, 10.0)])
    def test_matches_full_commutator(self, gamma):
        y0 = k3_initial_vars()
        _, values = k3_reduced_evolve(0.2, 1e-3, gamma)
        for y in (y0, values[-1]):
            d_dot, b_dot = rhs(k3_embed(y, gamma))
            expected = k3_embed(k3_reduced_rhs(y, gamma), gamma)
            np.testing.assert_allclose(b_dot.entries, expected.b.entries, atol=1e-12)
            np.testing.assert_allclose(d_dot.entries, expected.d.entries, atol=1e-12)

    def test_no_incidence(self):
        y = np.array([0.3, -0.1, 0.2, 0.4, 0.1, -0.5, 0.0, 0.0])
        np.testing.assert_array_equal(k3_reduced_rhs(y), np.zeros(8))

    def test_initial_embedding(self):
        s = k3_embed(k3_initial_vars())
        reference = initial_state(k3_complex(), with_unitary=False)
        np.testing.assert_array_equal(s.d.entries, reference.d.entries)
        np.testing.assert_array_equal(s.b.entries, reference.b.entries)

    def test_project_inverts_embed(self):
        y = np.array([0.3, -0.1, 0.2, 0.4, 0.1, -0.5, 0.7, 0.2])
        np.testing.assert_allclose(k3_project(k3_embed(y, (1.0, 10.0)), (1.0, 10.0)), y, atol=1e-14)

    def test_bad_coupling(self):
        with pytest.raises(UsageError):
            k3_reduced_rhs(k3_initial_vars(), (1.0, 0.0))

    def test_project_needs_k3(self, k2_run):
        with pytest.raises(UsageError):
            k3_project(k2_run[1].initial)


def test_equations():
    symbolic = k3_equations()
    assert [str(v) for v in symbolic] == list(VARIABLES)
    numeric = k3_equations((1.0, 10.0))
    for expr in numeric.values():
        assert not {str(s) for s in expr.free_symbols} & {"g0", "g1"}
    zero = {sympy.Symbol(name, real=True): 0 for name in VARIABLES}
    assert all(expr.subs(zero) == 0 for expr in symbolic.values())


class TestReducedVsFull:
    def test_scaled(self, scaled_runs):
        gamma, times, values, full = scaled_runs
        assert len(full) == len(values)
        worst = max(np.max(np.abs(k3_project(s, gamma) - y)) for s, y in zip(full, values))
        assert worst < 1e-6
        matrices = max(
            np.max(np.abs(k3_embed(y, gamma).dirac().entries - s.dirac().entries)) for s, y in zip(full, values)
        )
        assert matrices < 1e-6

    def test_unscaled(self, k3_run):
        _, traj = k3_run
        times, values = k3_reduced_evolve(5.0, 1e-3)
        sampled = values[:: traj.snapshot_every]
        assert len(sampled) == len(traj)
        for s, y in zip(traj, sampled):
            np.testing.assert_allclose(k3_embed(y).dirac().entries, s.dirac().entries, atol=1e-6)

    def test_scaled_bump_is_larger(self, scaled_runs, k3_run):
        _, _, _, full = scaled_runs
        assert inflation_report(full).bump_value > inflation_report(k3_run[1]).bump_value

    def test_compare_sampled_run(self, k3_run):
        comparison = k3_compare(k3_run[1])
        assert comparison.variable_difference < 1e-6
        assert comparison.matrix_difference < 1e-6
        assert len(comparison.values) == 5001

    def test_compare_scaled(self, scaled_runs):
        _, _, values, full = scaled_runs
        comparison = k3_compare(full)
        np.testing.assert_allclose(comparison.values, values, atol=1e-12)
        assert comparison.matrix_difference < 1e-6

    def test_compare_needs_real_k3(self, k2_run, k2_beta_run):
        with pytest.raises(UsageError):
            k3_compare(k2_run[1])
        with pytest.raises(UsageError):
            k3_compare(k2_beta_run[1])
