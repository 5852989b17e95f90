import numpy as np
import pytest

from diracflow.common.errors import UsageError
from diracflow.flow import FlowRunner, initial_state
from diracflow.oracles import (
    closed_form_residual,
    k2_closed_form,
    k2_compare,
    k2_complex,
    k2_inflection,
    k2_limit_pair,
    k2_reduce,
    k2_reduced_rhs,
)
from diracflow.oracles.k2 import K2State
from tests.helpers import run


class TestClosedForm:
    def test_endpoints(self):
        assert k2_closed_form(0.0)[:2] == (1.0, 0.0)
        late = k2_closed_form(20.0)
        assert late.d == pytest.approx(0.0, abs=1e-20)
        assert late.b == pytest.approx(1 / np.sqrt(2), abs=1e-15)

    def test_at_one(self):
        s = k2_closed_form(1.0)
        assert s.d == pytest.approx(0.117798, abs=5e-6)
        assert s.b == pytest.approx(0.702191, abs=1e-5)

    def test_integral(self):
        for t in np.linspace(-3, 3, 61):
            assert k2_closed_form(t).integral == pytest.approx(1.0, abs=1e-12)

    def test_solves_reduced_system(self):
        assert closed_form_residual(np.linspace(-3, 3, 121)) < 1e-12

    def test_reduced_rhs(self):
        assert k2_reduced_rhs(K2State(0.5, 0.25, 0.0)) == (-0.5, 0.5)


class TestNumerical:
    def test_compare(self, k2_run):
        _, traj = k2_run
        comparison = k2_compare(traj)
        assert comparison.d_error < 1e-8
        assert comparison.b_error < 1e-8
        assert comparison.integral_drift < 1e-9

    def test_compare_beta(self, k2_beta_run):
        # the magnitudes do not see beta
        comparison = k2_compare(k2_beta_run[1])
        assert max(comparison.d_error, comparison.b_error) < 1e-8

    def test_reduce_needs_an_edge(self, k3_run):
        with pytest.raises(UsageError):
            k2_reduce(k3_run[1].initial)

    def test_limits(self, k2_run):
        V_plus, V_minus = k2_limit_pair()
        np.testing.assert_allclose(k2_run[1].final.dirac().entries, V_minus, atol=1e-6)
        backward = FlowRunner(initial_state(k2_complex(), with_unitary=False), -10.0, snapshot_every=1000).run()
        np.testing.assert_allclose(backward.final.dirac().entries, V_plus, atol=1e-6)

    def test_limit_spectrum(self):
        for V in k2_limit_pair():
            np.testing.assert_allclose(np.linalg.eigvalsh(V), [-np.sqrt(2), 0, np.sqrt(2)], atol=1e-12)


def test_inflection():
    result = k2_inflection()
    assert result.t_star == pytest.approx(0.311613, abs=1e-6)
    assert result.slope == pytest.approx(-np.sqrt(2), abs=1e-12)
    assert result.t_numeric == pytest.approx(result.t_star, abs=1e-4)
    assert result.slope_numeric == pytest.approx(result.slope, abs=1e-4)


def test_reduce_reads_entries():
    _, traj = run("complete:2", 0.5, with_unitary=False)
    s = k2_reduce(traj.final)
    exact = k2_closed_form(0.5)
    assert s.t == 0.5
    assert s.d == pytest.approx(exact.d, abs=1e-9)
    assert s.b == pytest.approx(exact.b, abs=1e-9)
