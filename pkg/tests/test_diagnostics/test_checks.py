import numpy as np
import pytest

from diracflow.common.errors import UsageError
from diracflow.diagnostics import (
    DiagnosticContext,
    beta_timechange,
    cohomology_check,
    dolbeault_check,
    fermion_angle,
    inflation_checks,
    isospectral_report,
    kernel_agreement,
    mckean_singer_check,
    monotonicity_report,
    plane_invariance,
    positivity_check,
    rank_resolvable,
    reflection_check,
    run_checks,
    supertrace_series,
)
from diracflow.flow import initial_state
from diracflow.geometry import euler_characteristic, exterior_derivative, superpartner_pairs
from tests.helpers import complex_of, run

CORE_CHECKS = ["monotonicity", "positivity", "mckean_singer", "cohomology", "structural", "isospectral"]
BETA_FIXTURES = ["k2_beta_run", "k3_beta_run", "c4_beta_run", "star_beta_run", "random_beta_run"]
FIXTURES = ["k2_run", "k3_run", "c4_run", "star_run", "random_run"] + BETA_FIXTURES


@pytest.mark.parametrize("fixture", FIXTURES)
def test_core_checks_pass(fixture, request):
    c, traj = request.getfixturevalue(fixture)
    report = run_checks(CORE_CHECKS, DiagnosticContext(c, traj))
    assert report.passed, report.to_text()


def test_all_checks_pass_on_k2(k2_run):
    c, traj = k2_run
    report = run_checks(None, DiagnosticContext(c, traj))
    assert report.passed, report.to_text()
    assert report.get("angle_final").verdict == "pass"
    assert report.get("poisson_probe").verdict == "pass"


def test_parallel_matches_serial(k3_run):
    c, traj = k3_run
    ctx = DiagnosticContext(c, traj)
    serial = run_checks(["structural", "isospectral"], ctx, n_workers=1)
    parallel = run_checks(["structural", "isospectral"], ctx, n_workers=2)
    assert [x.name for x in serial.checks] == [x.name for x in parallel.checks]
    assert [x.residual for x in serial.checks] == pytest.approx([x.residual for x in parallel.checks])


def test_unknown_check(k2_run):
    c, traj = k2_run
    with pytest.raises(NotImplementedError):
        run_checks(["structural", "entropy"], DiagnosticContext(c, traj))


class TestMonotonicity:
    def test_k2_endpoints(self, k2_run):
        _, traj = k2_run
        report = monotonicity_report(traj)
        times, tr_b2 = report.series["tr_b2"]
        assert tr_b2[0] == 0.0
        assert tr_b2[-1] == pytest.approx(4.0, abs=1e-8)
        assert report.series["tr_M"][1][-1] < 1e-6

    def test_initial_positivity(self, k3_run):
        report = positivity_check(k3_run[1].initial)
        assert report.get("O_min_eig").residual == 0
        assert report.get("Q_max_eig").residual == 0


@pytest.mark.parametrize("fixture", BETA_FIXTURES)
def test_mckean_singer_beta(fixture, request):
    c, traj = request.getfixturevalue(fixture)
    report = mckean_singer_check(traj, euler_characteristic(c))
    assert report.passed, report.to_text()
    assert report.get("tr_U_real").skipped


@pytest.mark.parametrize("fixture", BETA_FIXTURES)
def test_isospectral_beta(fixture, request):
    _, traj = request.getfixturevalue(fixture)
    report = isospectral_report(traj)
    assert report.passed, report.to_text()
    assert report.get("unitary_conjugation").verdict == "pass"


def test_mckean_singer_needs_unitary():
    _, traj = run("complete:2", 0.1, with_unitary=False)
    with pytest.raises(UsageError):
        mckean_singer_check(traj)


class TestPlanes:
    def test_every_pair(self, k3_run):
        c, traj = k3_run
        for lam, f, g in superpartner_pairs(exterior_derivative(c)):
            assert plane_invariance(f, traj).passed
            assert plane_invariance(g, traj).passed

    def test_kernel_vector(self, k3_run):
        c, traj = k3_run
        f = np.zeros(c.total_dim)
        f[:3] = 1 / np.sqrt(3)
        with pytest.raises(UsageError):
            plane_invariance(f, traj)

    def test_not_an_eigenvector(self, k3_run):
        c, traj = k3_run
        f = np.zeros(c.total_dim)
        f[0] = 1.0
        with pytest.raises(UsageError):
            plane_invariance(f, traj)

    def test_fermion_angle_k2(self, k2_run):
        c, traj = k2_run
        f = np.zeros(c.total_dim)
        f[2] = 1.0
        alpha = fermion_angle(f, traj)
        assert alpha[0] == pytest.approx(np.pi / 2, abs=1e-9)
        assert alpha[-1] < 1e-3
        with pytest.raises(UsageError):
            fermion_angle(np.array([1.0, 0.0, 0.0]), traj)


def test_dolbeault(k2_run, k2_beta_run):
    assert all(check.skipped for check in dolbeault_check(k2_run[1].at(1.0)).checks)
    report = dolbeault_check(k2_beta_run[1].at(1.0))
    assert report.passed
    assert not any(check.skipped for check in report.checks)


def test_beta_timechange():
    result = beta_timechange(complex_of("complete:2"), 1.0)
    assert result.expected == 2.0
    assert result.speed_ratio == pytest.approx(2.0, abs=1e-4)
    assert result.acceleration_ratio == pytest.approx(1.0, abs=1e-4)
    assert result.path_deviation < 1e-5


@pytest.mark.parametrize("spec", ["complete:3", "cycle:4", "star:3"])
def test_cohomology_long_run(spec):
    _, traj = run(spec, 10.0, snapshot_every=50, with_unitary=False)
    report = cohomology_check(traj)
    assert report.passed, report.to_text()
    assert "snapshots past the rank resolution skipped" in report.get("betti_preserved").detail


def test_rank_resolvable():
    L0 = initial_state(complex_of("complete:2")).laplacian().entries
    resolvable = rank_resolvable(L0)
    assert resolvable(0.0) and resolvable(4.9)
    assert not resolvable(6.0)
    faster = rank_resolvable(L0, (0.0, 0.0, 1.0))
    assert faster(2.0)
    assert not faster(3.0)


def test_cohomology_disjoint_union(tmp_path):
    path = tmp_path / "two.txt"
    path.write_text("e 1 2\ne 3 4\n")
    _, traj = run(str(path), 2.0)
    report = cohomology_check(traj)
    assert report.passed
    assert "betti=(2, 0)" in report.get("betti_preserved").detail


def test_reflection():
    assert reflection_check(complex_of("complete:3"), t=1.0).passed
    assert reflection_check(complex_of("complete:2"), t=1.0, beta=1.0).passed


def test_kernel_agreement(c4_run):
    assert kernel_agreement(c4_run[1]).passed


def test_inflation_k2(k2_run):
    report = inflation_checks(k2_run[1])
    assert report.passed
    assert not report.get("inflation_tail").skipped


def test_context_properties(k2_beta_run):
    c, traj = k2_beta_run
    ctx = DiagnosticContext(c, traj)
    assert ctx.beta == 1.0
    assert ctx.gamma == (1.0,)
    assert ctx.h == 1e-3
    assert initial_state(c).gamma == ctx.gamma


def test_supertrace_series(k2_beta_run):
    _, traj = k2_beta_run
    sampled, values = supertrace_series(traj)
    assert values.shape == (len(sampled), 4)
    assert np.abs(values.real).max() < 1e-6
    assert sampled[-1] is traj.final
