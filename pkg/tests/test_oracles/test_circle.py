import numpy as np
import pytest

from diracflow.common.errors import UsageError
from diracflow.oracles import (
    circle_exact_deviation,
    circle_model_convergence,
    circle_model_evolve,
    circle_model_exact,
    circle_model_init,
    circle_model_limit,
    circle_model_rhs,
)


@pytest.fixture(scope="module")
def circle_run():
    return circle_model_evolve(circle_model_init(4), 10.0, h=1e-3, snapshot_every=100)


class TestInit:
    def test_one_mode(self):
        s = circle_model_init(1)
        np.testing.assert_array_equal(s.A, np.diag([-1j, 0, 1j]))
        assert not s.B.any() and not s.C.any()

    def test_three_modes(self):
        s = circle_model_init(3)
        assert s.A.shape == (7, 7)
        np.testing.assert_array_equal(np.diag(s.A), 1j * np.arange(-3, 4))
        np.testing.assert_array_equal(s.modes, np.arange(-3, 4))

    def test_cutoff(self):
        with pytest.raises(UsageError):
            circle_model_init(0)


class TestEvolve:
    def test_invariant(self, circle_run):
        early = circle_run.times <= 5.0
        assert np.max(circle_run.series["invariant"][early]) < 1e-8

    def test_limits(self, circle_run):
        final = circle_run.final
        assert final.t == 10.0
        assert np.max(np.abs(final.A)) < 1e-4
        assert circle_run.series["norm_A"][-1] < 1e-4
        limit = circle_model_limit(4)
        assert np.max(np.abs(final.B - limit)) < 1e-4
        assert np.max(np.abs(final.C + limit)) < 1e-4

    def test_blocks_constant(self, circle_run):
        assert np.max(circle_run.series["upper"]) < 1e-7
        assert np.max(circle_run.series["lower"]) < 1e-7

    def test_matches_exact(self, circle_run):
        for s in circle_run.states[::10]:
            exact = circle_model_exact(4, s.t)
            np.testing.assert_allclose(s.A, exact.A, atol=1e-7)
            np.testing.assert_allclose(s.B, exact.B, atol=1e-7)
            np.testing.assert_allclose(s.C, exact.C, atol=1e-7)

    def test_exact_deviation(self, circle_run):
        assert circle_exact_deviation(circle_run) < 1e-6
        drifted = circle_run._replace(states=[circle_run.final._replace(t=0.0)])
        assert circle_exact_deviation(drifted) > 1.0

    def test_variants_agree(self):
        s = circle_model_exact(3, 0.2)
        display = circle_model_rhs(s, "display")
        commutator = circle_model_rhs(s, "commutator")
        for a, b in zip(display, commutator):
            np.testing.assert_allclose(a, b, atol=1e-14)

    def test_unknown_variant(self):
        with pytest.raises(NotImplementedError):
            circle_model_rhs(circle_model_init(2), "symmetric")


def test_exact_blocks():
    for t in (0.0, 0.3, 2.0):
        s = circle_model_exact(4, t)
        n = np.abs(s.modes).astype(float)
        np.testing.assert_allclose(s.upper_block, np.diag(n ** 2), atol=1e-12)
        np.testing.assert_allclose(s.lower_block, np.diag(n ** 2), atol=1e-12)


def test_convergence():
    result = circle_model_convergence([1, 2, 4], t_end=10.0, h=1e-3)
    assert sorted(result) == [1, 2, 4]
    assert max(result.values()) < 1e-4
