from typing import Callable, List, NamedTuple, Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.interpolate import CubicSpline

from diracflow.common.errors import AmbiguityError, DiagnosticError, UsageError
from diracflow.common.utils import adjoint, anticommutator, commutator, max_abs
from diracflow.diagnostics.report import DiagnosticsReport, make_check, skipped_check
from diracflow.flow.lax import split_rhs
from diracflow.flow.runner import FlowRunner, unitary_conjugation_residual
from diracflow.flow.state import FlowState, Trajectory, initial_state
from diracflow.flow.sweep import sweep
from diracflow.flow.transport import transport
from diracflow.geometry.complex import OrientedComplex, euler_characteristic
from diracflow.geometry.operators import (
    betti_from_derivative,
    betti_numbers,
    exterior_derivative,
    superpartner_pairs,
    supertrace,
)
from diracflow.spectral.inflation import inflation_report, log_linear_fit

STEP_SLACK = 1e-10
TRAJECTORY_TOL = 1e-9
FAMILY_TOL = 1e-8
RANK_FLOOR = 1e-12


class DiagnosticContext(NamedTuple):
    """
    Everything a named check may need

    :param complex: Oriented complex of the run
    :param traj: Forward trajectory starting at D(0) = C(0), t >= 0
    :param h: Step size magnitude used for any auxiliary runs
    """

    complex: OrientedComplex
    traj: Trajectory
    h: float = 1e-3

    @property
    def beta(self) -> float:
        return self.traj.initial.beta

    @property
    def gamma(self):
        return self.traj.initial.gamma


def _sample(traj: Trajectory, limit: int = 200) -> List[FlowState]:
    step = max(1, len(traj) // limit)
    snaps = traj.snapshots[::step]
    if snaps[-1] is not traj.final:
        snaps.append(traj.final)
    return snaps


def _offender(snaps: Sequence[FlowState], values: Sequence[float]) -> str:
    if not len(values):
        return ""
    i = int(np.argmax(values))
    return "worst at t={:.4g}".format(snaps[i].t)


def monotonicity_report(traj: Trajectory) -> DiagnosticsReport:
    """
    tr(b^2) nondecreasing and tr(M) nonincreasing between snapshots

    :param traj: Trajectory with t >= 0
    :rtype: DiagnosticsReport
    """
    times = traj.times
    tr_b2 = np.array([np.real(np.trace(s.V().entries)) for s in traj])
    tr_M = np.array([np.real(np.trace(s.M().entries)) for s in traj])
    tr_L = float(np.real(np.trace(traj.initial.laplacian().entries)))
    report = DiagnosticsReport()
    report.add_series("tr_b2", times, tr_b2)
    report.add_series("tr_M", times, tr_M)
    if len(times) > 2:
        report.add_series("minus_dtrM_dt", times, -np.gradient(tr_M, times))
    drops = np.maximum(-np.diff(tr_b2), 0.0) if len(times) > 1 else np.zeros(0)
    rises = np.maximum(np.diff(tr_M), 0.0) if len(times) > 1 else np.zeros(0)
    report.add(make_check("tr_b2_nondecreasing", max_abs(drops), STEP_SLACK, "tr(b^2) increases monotonically"))
    report.add(make_check("tr_M_nonincreasing", max_abs(rises), STEP_SLACK, "tr(M)' <= 0"))
    report.add(make_check("tr_M0_equals_tr_L", abs(tr_M[0] - tr_L), 1e-10, "b(0) = 0 so M(0) = L"))
    if tr_L > 0:
        report.add(
            make_check(
                "tr_M_positive",
                0.0 if np.all(tr_M > 0) else 1.0,
                0.0,
                "M(t) decays but is never zero",
                "min tr(M) = {:.3e}".format(float(tr_M.min())),
            )
        )
    return report


def positivity_check(s: FlowState) -> DiagnosticsReport:
    """
    O = b d d^* is positive semidefinite and Q = b d^* d negative semidefinite

    :param s: State on a trajectory started at D(0) = C(0), t >= 0
    :rtype: DiagnosticsReport
    """
    b, R, S = s.b.entries, s.R().entries, s.S().entries
    O, Q = b @ R, b @ S
    report = DiagnosticsReport()
    if O.size == 0:
        return report
    O_sym = np.real(O + adjoint(O)) / 2
    Q_sym = np.real(Q + adjoint(Q)) / 2
    report.add(make_check("O_min_eig", max(0.0, -float(scipy.linalg.eigvalsh(O_sym).min())), 1e-9, "O = b dd* >= 0"))
    report.add(make_check("Q_max_eig", max(0.0, float(scipy.linalg.eigvalsh(Q_sym).max())), 1e-9, "Q = b d*d <= 0"))
    report.add(make_check("O_Q_symmetric", max(max_abs(O - adjoint(O)), max_abs(Q - adjoint(Q))), 1e-9, "O, Q symmetric"))
    report.add(make_check("O_Q_real", max(max_abs(O.imag), max_abs(Q.imag)), 1e-9, "O, Q real for all beta"))
    return report


def positivity_report(traj: Trajectory) -> DiagnosticsReport:
    worst = {}
    for s in _sample(traj):
        if s.t < 0:
            continue
        for check in positivity_check(s).checks:
            if check.name not in worst or check.residual > worst[check.name].residual:
                worst[check.name] = check._replace(detail="worst at t={:.4g}".format(s.t))
    return DiagnosticsReport(list(worst.values()))


def mckean_singer_check(traj: Trajectory, chi: int = None) -> DiagnosticsReport:
    """
    Re str(U(t)) equals the Euler characteristic along the run

    :param traj: Trajectory whose states carry U
    :param chi: Euler characteristic; str(1) of the grading when omitted
    :rtype: DiagnosticsReport
    """
    if traj.initial.U is None:
        raise UsageError("McKean-Singer check needs a trajectory carrying U")
    if chi is None:
        chi = int(round(np.sum(traj.initial.grading.parity())))
    snaps = traj.snapshots
    str_U = np.array([supertrace(s.U) for s in snaps])
    report = DiagnosticsReport()
    report.add_series("str_U_re", traj.times, str_U.real)
    report.add_series("str_U_im", traj.times, str_U.imag)
    deviation = np.abs(str_U.real - chi)
    report.add(make_check("str_U_re_equals_chi", deviation.max(), 1e-6, "Re str(U(t)) = chi(G)", _offender(snaps, deviation)))
    if traj.initial.beta == 0:
        tr_im = np.array([abs(np.trace(s.U.entries).imag) for s in snaps])
        report.add(make_check("tr_U_real", tr_im.max(), 1e-6, "tr U(t) stays real for beta = 0", _offender(snaps, tr_im)))
    else:
        report.add(skipped_check("tr_U_real", "tr U(t) stays real for beta = 0", "beta != 0"))
    sampled, powers = supertrace_series(traj)
    times = [s.t for s in sampled]
    for k in range(powers.shape[1]):
        report.add_series("str_B{}_re".format(k + 1), times, powers[:, k].real)
        report.add_series("str_B{}_im".format(k + 1), times, powers[:, k].imag)
    worst = np.abs(powers.real).max(axis=1)
    report.add(make_check("str_B_powers", worst.max(), 1e-6, "Re str(B^k) = 0, k = 1..4", _offender(sampled, worst)))
    return report


def supertrace_series(traj: Trajectory, max_power: int = 4, limit: int = 100):
    """
    str(B(t)^k) for k = 1 .. max_power on sampled snapshots

    :returns: (snapshots, values) with values of shape (len(snapshots), max_power)
    """
    sampled = _sample(traj, limit)
    values = np.zeros((len(sampled), max_power), dtype=complex)
    for i, s in enumerate(sampled):
        B = s.generator()
        power = B
        for k in range(max_power):
            values[i, k] = supertrace(power)
            power = power @ B
    return sampled, values


def _orthonormal_plane(f: np.ndarray, D0: np.ndarray) -> np.ndarray:
    Q, _ = np.linalg.qr(np.column_stack([f, D0 @ f]))
    return Q


def plane_invariance(f: np.ndarray, traj: Trajectory, tol: float = 1e-9) -> DiagnosticsReport:
    """
    D(t) f stays in the McKean-Singer plane span{f, D(0) f}

    :param f: Unit eigenvector of L with nonzero eigenvalue
    :param traj: Trajectory
    :rtype: DiagnosticsReport
    """
    f = np.asarray(f, dtype=complex)
    D0 = traj.initial.dirac().entries
    L = D0 @ D0
    lam = float(np.real(np.vdot(f, L @ f)))
    if max_abs(L @ f - lam * f) > 1e-8:
        raise UsageError("f is not an eigenvector of L")
    if abs(lam) < tol:
        raise UsageError("f lies in the kernel of L, which has no McKean-Singer plane")
    Q = _orthonormal_plane(f, D0)
    distances, eigen_residuals, dets, weak_traces = [], [], [], 0
    snaps = _sample(traj)
    for s in snaps:
        D = s.dirac().entries
        w = D @ f
        distances.append(float(np.linalg.norm(w - Q @ (adjoint(Q) @ w))))
        eigen_residuals.append(float(np.linalg.norm(L @ w - lam * w)))
        b = s.b.entries
        G_R = adjoint(Q) @ (s.R().entries @ b) @ Q
        G_S = adjoint(Q) @ (s.S().entries @ b) @ Q
        dets.append(max(abs(np.linalg.det(G_R)), abs(np.linalg.det(G_S))))
        active = s.t > 0 and max_abs(b @ Q) > 1e-3 and max_abs(s.d.entries) > 1e-3
        if active and (abs(np.trace(G_R)) <= 1e-12 or abs(np.trace(G_S)) <= 1e-12):
            weak_traces += 1
    report = DiagnosticsReport()
    report.add(make_check("plane_distance", max(distances), 1e-7, "D(t) f stays in span{f, D(0) f}", _offender(snaps, distances)))
    report.add(make_check("superpartner_eigen", max(eigen_residuals), 1e-8, "D(t) f is an eigenvector of L", _offender(snaps, eigen_residuals)))
    report.add(make_check("rb_sb_plane_det", max(dets), 1e-8, "Rb, Sb have one zero eigenvalue on the plane", _offender(snaps, dets)))
    report.add(make_check("rb_sb_plane_trace", weak_traces, 0, "Rb, Sb have one nonzero eigenvalue on the plane"))
    return report


def fermion_angle(f: np.ndarray, traj: Trajectory) -> np.ndarray:
    """
    Angle between D(t) f and the odd-degree coordinate subspace

    :param f: Odd-degree eigenvector of L with nonzero eigenvalue
    :param traj: Trajectory
    :returns: One angle per snapshot
    """
    f = np.asarray(f, dtype=complex)
    parity = traj.initial.grading.parity()
    if max_abs(f[parity > 0]) > 1e-12:
        raise UsageError("f must be supported on odd degrees")
    D0 = traj.initial.dirac().entries
    L = D0 @ D0
    lam = float(np.real(np.vdot(f, L @ f)) / np.real(np.vdot(f, f)))
    if max_abs(L @ f - lam * f) > 1e-8 or abs(lam) < 1e-9:
        raise UsageError("f is not an eigenvector of L with nonzero eigenvalue")
    even = parity > 0
    angles = []
    for s in traj:
        w = s.dirac().entries @ f
        ratio = np.linalg.norm(w[even]) / np.linalg.norm(w)
        angles.append(float(np.arcsin(min(1.0, ratio))))
    return np.array(angles)


def fermion_angle_report(f: np.ndarray, traj: Trajectory) -> DiagnosticsReport:
    times = traj.times
    alpha = fermion_angle(f, traj)
    report = DiagnosticsReport()
    report.add_series("angle", times, alpha)
    report.add(make_check("angle_initial", abs(alpha[0] - np.pi / 2), 1e-9, "D(0) f is bosonic"))
    marks = [t for t in (0.2, 1.0, 5.0) if t <= times[-1] + 1e-12]
    values = [alpha[int(np.argmin(np.abs(times - t)))] for t in marks]
    increases = [max(0.0, b - a) for a, b in zip(values, values[1:])]
    if len(values) > 1:
        strict = all(b < a for a, b in zip(values, values[1:]))
        report.add(make_check("angle_decreasing", 0.0 if strict else max(increases + [1.0]), 0.0, "angle decreases", "at t={}".format(marks)))
    if times[-1] >= 10.0 - 1e-9:
        report.add(make_check("angle_final", alpha[int(np.argmin(np.abs(times - 10.0)))], 1e-3, "angle -> 0"))
    window = (times >= 2.0) & (times <= 8.0)
    slope, r2 = log_linear_fit(times[window], alpha[window])
    if slope is None:
        report.add(skipped_check("angle_log_linear", "exponential decay of the angle", "trajectory too short"))
    else:
        report.add(make_check("angle_log_linear", max(0.0, 0.99 - r2), 0.0, "exponential decay of the angle", "rate {:.4g}, R^2 {:.6f}".format(-slope, r2)))
    return report


def dolbeault_check(s: FlowState) -> DiagnosticsReport:
    """
    d = del + delbar with del = Re d, delbar = i Im d, all squares and mixed products zero

    :param s: State with beta != 0 and t > 0
    :rtype: DiagnosticsReport
    """
    anchor = "del^2 = delbar^2 = 0"
    names = ("del_squared", "delbar_squared", "del_delbar", "delbar_del", "del_plus_delbar")
    report = DiagnosticsReport()
    if s.beta == 0:
        for name in names:
            report.add(skipped_check(name, anchor, "beta = 0, d real"))
        return report
    d = s.d.entries
    p, q = d.real.astype(complex), 1j * d.imag
    values = (p @ p, q @ q, p @ q, q @ p, d - p - q)
    for name, value in zip(names, values):
        report.add(make_check(name, max_abs(value), 1e-8, anchor, "t={:.4g}".format(s.t)))
    return report


def _b_acceleration(d: np.ndarray, b: np.ndarray, beta: float) -> np.ndarray:
    d_dot, _ = split_rhs(d, b, beta)
    dh, dh_dot = adjoint(d), adjoint(d_dot)
    return 2 * ((d_dot @ dh + d @ dh_dot) - (dh_dot @ d + dh @ d_dot))


class TimeChange(NamedTuple):
    acceleration_ratio: float
    speed_ratio: float
    path_deviation: float
    expected: float


def beta_timechange(
    c: OrientedComplex, beta: float, gamma: Sequence[float] = None, t_end: float = 1.0, h: float = 1e-3, t_min: float = 0.05
) -> TimeChange:
    """
    Compare the beta flow with the real flow at points of equal tr(b^2)

    :param c: Oriented complex
    :param beta: Deformation parameter
    :param t_end: Length of both runs
    :param t_min: Earliest matched time
    :returns: Fitted ratio of b'' and of |d'|^2 at matched points, and the
        largest distance between b_beta and the matched b_0
    """
    runs = {}
    for key in (beta, 0.0):
        state = initial_state(c, beta=key, gamma=gamma, with_unitary=False)
        runs[key] = FlowRunner(state, t_end, h=h, snapshot_every=1).run()
    real, deformed = runs[0.0], runs[beta]
    times0 = real.times
    window = times0 >= t_min
    tr0 = np.array([np.real(np.trace(s.V().entries)) for s in real])
    if np.any(np.diff(tr0[window]) <= 0):
        raise DiagnosticError("tr(b^2) is not strictly increasing on [{}, {}]".format(t_min, t_end))
    b0 = np.array([s.b.entries.real.ravel() for s in real])
    acc0 = np.array([_b_acceleration(s.d.entries, s.b.entries, 0.0).real.ravel() for s in real])
    speed0 = np.array([np.sum(np.abs(split_rhs(s.d.entries, s.b.entries, 0.0)[0]) ** 2) for s in real])
    b0_at = CubicSpline(times0, b0)
    acc0_at = CubicSpline(times0, acc0)
    speed0_at = CubicSpline(times0, speed0)

    num_acc = den_acc = num_speed = den_speed = 0.0
    deviation = 0.0
    for s in deformed.snapshots[::10]:
        if s.t < t_min:
            continue
        level = float(np.real(np.trace(s.V().entries)))
        if level > tr0[window][-1]:
            break
        t_match = float(np.interp(level, tr0[window], times0[window]))
        deviation = max(deviation, max_abs(s.b.entries.ravel() - b0_at(t_match)))
        acc = _b_acceleration(s.d.entries, s.b.entries, beta).real.ravel()
        ref = acc0_at(t_match)
        num_acc += float(acc @ ref)
        den_acc += float(ref @ ref)
        num_speed += float(np.sum(np.abs(split_rhs(s.d.entries, s.b.entries, beta)[0]) ** 2))
        den_speed += float(speed0_at(t_match))
    if den_acc == 0 or den_speed == 0:
        raise DiagnosticError("no matched points on the tr(b^2) window")
    return TimeChange(num_acc / den_acc, num_speed / den_speed, deviation, 1.0 + beta ** 2)


def beta_timechange_check(
    c: OrientedComplex, beta: float, gamma: Sequence[float] = None, t_end: float = 1.0, h: float = 1e-3
) -> DiagnosticsReport:
    """
    Path and speed comparison of the beta flow against the real flow

    The commutator flow moves b along the same curve at the same speed for
    every beta, so b'' agrees at matched points; the factor 1 + beta^2 is
    carried by the squared speed |d'|^2 of the rotating raising part.
    """
    report = DiagnosticsReport()
    result = beta_timechange(c, beta, gamma, t_end, h)
    detail = "b'' ratio {:.6f}, |d'|^2 ratio {:.6f}, 1+beta^2 = {:g}".format(
        result.acceleration_ratio, result.speed_ratio, result.expected
    )
    report.add(make_check("beta_path", result.path_deviation, 1e-5, "b moves along a beta independent path", detail))
    report.add(make_check("beta_speed_ratio", abs(result.speed_ratio - result.expected), 1e-4, "|d'_beta|^2 / |d'_0|^2 = 1 + beta^2", detail))
    report.add(make_check("beta_acceleration_ratio", abs(result.acceleration_ratio - 1.0), 1e-4, "b''_beta / b''_0 at matched points", detail))
    return report


def _harmonic_basis(L0: np.ndarray, grading, tol: float = 1e-8) -> np.ndarray:
    columns = []
    for p in range(grading.n_degrees):
        span = grading.span(p)
        values, vectors = scipy.linalg.eigh(L0[span, span])
        for lam, vec in zip(values, vectors.T):
            if abs(lam) < tol:
                col = np.zeros(grading.dim, dtype=complex)
                col[span] = vec
                columns.append(col)
    return np.array(columns).T if columns else np.zeros((grading.dim, 0), dtype=complex)


def rank_resolvable(L0: np.ndarray, flow_poly: Sequence[float] = (1.0,), window: float = 5.0) -> Callable[[float], bool]:
    """
    Predicate telling whether the rank of d(t) can still be read off its singular values

    On the eigenspace of L with eigenvalue lam the singular values of d(t) are
    sqrt(lam) sech(2 |f(lam)| sqrt(lam) t). The rank is read for |t| <= window
    and only while the smallest of them stays above RANK_FLOOR of the largest
    at t = 0.

    :param L0: Laplacian at t = 0, constant along the flow
    :param flow_poly: Coefficients of f in D' = f(L)[B,D], lowest degree first
    :param window: Largest |t| at which the rank is compared
    """
    lam = scipy.linalg.eigvalsh((L0 + adjoint(L0)) / 2)
    lam = lam[lam > 1e-9]
    if not len(lam):
        return lambda t: abs(t) <= window
    amplitude = np.sqrt(lam)
    rate = 2.0 * np.abs(np.polynomial.polynomial.polyval(lam, flow_poly)) * amplitude

    def resolvable(t: float) -> bool:
        x = rate * abs(t)
        values = amplitude * 2.0 * np.exp(-x) / (1.0 + np.exp(-2.0 * x))
        return abs(t) <= window and values.min() >= RANK_FLOOR * amplitude.max()

    return resolvable


def cohomology_check(traj: Trajectory, n_coboundaries: int = 4, window: float = 5.0) -> DiagnosticsReport:
    """
    Betti numbers from the rank of d(t) stay those of t = 0, transported cocycles stay closed

    :param traj: Trajectory
    :param n_coboundaries: Number of coboundaries d(0) e_i carried along
    :param window: Largest |t| at which Betti numbers are read from the rank of d(t)
    :rtype: DiagnosticsReport
    """
    s0 = traj.initial
    grading = s0.grading
    L0 = s0.laplacian().entries
    expected = betti_numbers(s0.laplacian())
    resolvable = rank_resolvable(L0, traj.flow_poly, window)
    mismatches, checked, skipped = [], [], 0
    for s in _sample(traj):
        if not resolvable(s.t):
            skipped += 1
            continue
        try:
            found = betti_from_derivative(s.d)
        except AmbiguityError as err:
            raise DiagnosticError("rank of d(t) is ambiguous at t={:.4g}: {}".format(s.t, err))
        checked.append(s.t)
        if found != expected:
            mismatches.append("t={:.4g}: {}".format(s.t, found))
    detail = "; ".join(mismatches[:3]) or "betti={}".format(expected)
    if skipped:
        detail += ", checked up to t={:.4g}, {} later snapshots past the rank resolution skipped".format(max(checked, key=abs, default=0.0), skipped)
    report = DiagnosticsReport()
    report.add(make_check("betti_preserved", len(mismatches), 0, "cohomology deforms but keeps its dimensions", detail))

    harmonic = _harmonic_basis(L0, grading)
    d0 = s0.d.entries
    seeds = [i for i in range(grading.dim) if max_abs(d0[:, i]) > 0][:n_coboundaries]
    g = np.zeros((grading.dim, len(seeds)), dtype=complex)
    for j, i in enumerate(seeds):
        g[i, j] = 1.0
    cocycles = np.column_stack([harmonic, d0 @ g]) if g.size else harmonic
    if cocycles.shape[1] == 0 or len(traj) < 2:
        report.add(skipped_check("cocycle_closed", "f' = -b f keeps cocycles closed", "no cocycles"))
        return report
    carried = transport(cocycles, traj, "cocycle")
    closed = [max_abs(s.d.entries @ f) for s, f in zip(traj, carried)]
    report.add(make_check("cocycle_closed", max(closed), 1e-7, "f' = -b f keeps cocycles closed", _offender(traj.snapshots, closed)))
    if g.size:
        carried_g = transport(g, traj, "cocycle")
        exact = [max_abs(f[:, harmonic.shape[1]:] - s.d.entries @ x) for s, f, x in zip(traj, carried, carried_g)]
        report.add(make_check("coboundary_exact", max(exact), 1e-7, "coboundaries stay coboundaries", _offender(traj.snapshots, exact)))
    return report


def structural_report(traj: Trajectory, n_powers: int = 6) -> DiagnosticsReport:
    """
    Algebraic identities of the split system along a trajectory

    :param traj: Trajectory
    :param n_powers: Highest k for the conserved traces tr(D^k)
    :rtype: DiagnosticsReport
    """
    s0 = traj.initial
    D0 = s0.dirac().entries
    L0 = D0 @ D0
    traces0 = [np.trace(np.linalg.matrix_power(D0, k)) for k in range(1, n_powers + 1)]
    beta = s0.beta
    rows = {}

    def record(name, value, t):
        if name not in rows or value > rows[name][0]:
            rows[name] = (value, t)

    snaps = _sample(traj)
    for s in snaps:
        d, b = s.d.entries, s.b.entries
        dh = adjoint(d)
        D = d + dh + b
        B = d - dh + 1j * beta * b
        R, S, V = d @ dh, dh @ d, b @ b
        M = (d + dh) @ (d + dh)
        record("anticommutator_db", max_abs(anticommutator(d, b)), s.t)
        record("anticommutator_dhb", max_abs(anticommutator(dh, b)), s.t)
        record("nilpotent", max_abs(d @ d), s.t)
        record("self_adjoint", max_abs(D - adjoint(D)), s.t)
        record("b_real_symmetric", max(max_abs(b.imag), max_abs(b - b.T)), s.t)
        record("traceless", max(abs(np.trace(D)), abs(np.trace(b))), s.t)
        if beta == 0:
            record("beta0_identity", max_abs(commutator(B, D) - 2 * B @ D), s.t)
        if s.t != 0:
            family = [b, R, S, V]
            record("commuting_family", max(max_abs(commutator(x, y)) for i, x in enumerate(family) for y in family[i + 1:]), s.t)
        record("L_equals_M_plus_V", max_abs(L0 - M - V), s.t)
        record("M_V_commute", max_abs(commutator(M, V)), s.t)
        if M.size:
            record("M_V_psd", max(0.0, -scipy.linalg.eigvalsh((M + adjoint(M)) / 2).min(), -scipy.linalg.eigvalsh((V + adjoint(V)) / 2).min()), s.t)
            spectrum = np.sort(scipy.linalg.eigvalsh(D))
            record("spectrum_symmetric", max_abs(spectrum + spectrum[::-1]), s.t)
        power, drift = np.eye(D.shape[0], dtype=complex), 0.0
        for k in range(1, n_powers + 1):
            power = power @ D
            drift = max(drift, abs(np.trace(power) - traces0[k - 1]) / max(1.0, abs(traces0[k - 1])))
        record("conserved_traces", drift, s.t)
        bracket, Dp = 0.0, [np.linalg.matrix_power(D, k) for k in range(4)]
        for n in range(1, 5):
            for m in range(1, 5):
                if n != m:
                    bracket = max(bracket, abs(np.trace(n * Dp[n - 1] @ B @ (m * Dp[m - 1]))))
        record("poisson_probe", bracket, s.t)

    tolerances = {
        "anticommutator_db": (TRAJECTORY_TOL, "{d,b} = 0"),
        "anticommutator_dhb": (TRAJECTORY_TOL, "{d*,b} = 0"),
        "nilpotent": (TRAJECTORY_TOL, "d(t) d(t) = 0"),
        "self_adjoint": (TRAJECTORY_TOL, "D(t) self-adjoint"),
        "b_real_symmetric": (TRAJECTORY_TOL, "b stays real"),
        "traceless": (TRAJECTORY_TOL, "tr(D) = tr(b) = 0"),
        "beta0_identity": (TRAJECTORY_TOL, "D' = 2BD for beta = 0"),
        "commuting_family": (FAMILY_TOL, "b, dd*, d*d, b^2 commute"),
        "L_equals_M_plus_V": (FAMILY_TOL, "L = M + V"),
        "M_V_commute": (FAMILY_TOL, "[M, V] = 0"),
        "M_V_psd": (TRAJECTORY_TOL, "M, V >= 0"),
        "spectrum_symmetric": (FAMILY_TOL, "spectrum symmetric under lambda -> -lambda"),
        "conserved_traces": (FAMILY_TOL, "tr(D^k) conserved, relative drift"),
        "poisson_probe": (FAMILY_TOL, "tr(F'(D) B G'(D)) = 0"),
    }
    report = DiagnosticsReport()
    for name, (tol, anchor) in tolerances.items():
        if name == "poisson_probe" and beta != 0:
            value = rows[name][0] if name in rows else 0.0
            report.add(skipped_check(name, anchor, "beta != 0, measured {:.3e}".format(value)))
            continue
        if name not in rows:
            report.add(skipped_check(name, anchor))
            continue
        value, t = rows[name]
        report.add(make_check(name, value, tol, anchor, "worst at t={:.4g}".format(t)))
    report.merge(kernel_agreement(traj))
    return report


def kernel_agreement(traj: Trajectory, t_max: float = 1.0, tol: float = 1e-8) -> DiagnosticsReport:
    """
    b, M, V and L have kernels of equal dimension for 0 < t <= t_max
    """
    mismatches = []
    for s in _sample(traj):
        if not 0 < s.t <= t_max:
            continue
        dims = []
        for X in (s.b.entries, s.M().entries, s.V().entries, s.laplacian().entries):
            dims.append(int(np.count_nonzero(np.abs(scipy.linalg.eigvalsh((X + adjoint(X)) / 2)) < tol)) if X.size else 0)
        if len(set(dims)) > 1:
            mismatches.append("t={:.4g}: {}".format(s.t, dims))
    report = DiagnosticsReport()
    report.add(make_check("kernels_agree", len(mismatches), 0, "b, M, V, L share their kernel for t > 0", "; ".join(mismatches[:3])))
    return report


def isospectral_report(traj: Trajectory) -> DiagnosticsReport:
    s0 = traj.initial
    D0 = s0.dirac()
    spectrum0 = np.sort(D0.eigvalsh())
    L0 = (D0 @ D0).entries
    drift, l_drift, conj = [], [], []
    snaps = _sample(traj)
    for s in snaps:
        D = s.dirac()
        drift.append(max_abs(np.sort(D.eigvalsh()) - spectrum0))
        l_drift.append(max_abs((D @ D).entries - L0))
        if s.U is not None:
            conj.append(unitary_conjugation_residual(s, D0))
    report = DiagnosticsReport()
    report.add_series("spectrum_drift", [s.t for s in snaps], drift)
    report.add(make_check("spectrum_drift", max(drift), 1e-8, "D(t) isospectral to D(0)", _offender(snaps, drift)))
    report.add(make_check("laplacian_constant", max(l_drift), 1e-8, "L(t) does not move", _offender(snaps, l_drift)))
    if conj:
        report.add(make_check("unitary_conjugation", max(conj), 1e-6, "D(t) = U D(0) U*", _offender(snaps, conj)))
    return report


def reflection_check(c: OrientedComplex, t: float = 3.0, beta: float = 0.0, gamma=None, h: float = 1e-3) -> DiagnosticsReport:
    """
    D(t) + D(-t) = 2 C(t)
    """
    forward = FlowRunner(initial_state(c, beta, gamma, with_unitary=False), t, h=h).run().final
    backward = FlowRunner(initial_state(c, beta, gamma, with_unitary=False), -t, h=h).run().final
    residual = forward.dirac() + backward.dirac() - 2.0 * forward.free_part()
    report = DiagnosticsReport()
    report.add(make_check("reflection", max_abs(residual.entries), 1e-8, "D(t) + D(-t) = 2C(t)", "t={:g}".format(t)))
    return report


def inflation_checks(traj: Trajectory) -> DiagnosticsReport:
    result = inflation_report(traj)
    report = DiagnosticsReport()
    report.add_series("expansion_rate", result.times, result.expansion_rate)
    report.add_series("minus_dtrM_dt", result.times, result.rate)
    report.add(make_check("inflation_rate_nonnegative", max(0.0, -float(result.rate.min())), 1e-9, "-d/dt tr(M) >= 0"))
    report.add(make_check("inflation_rate_initial", abs(result.rate[0]), 1e-6, "-d/dt tr(M) = 0 at t = 0"))
    peak = max(result.trace_bump_value, 1e-300)
    report.add(
        make_check(
            "inflation_rate_final",
            abs(result.rate[-1]) / peak,
            1e-3,
            "-d/dt tr(M) -> 0, relative to its peak",
            "t={:.4g}".format(result.times[-1]),
        )
    )
    if result.partial or result.tail_r2 is None:
        report.add(skipped_check("inflation_tail", "exponential tail of tr(M)", "trajectory too short past the bump"))
    else:
        report.add(make_check("inflation_tail", max(0.0, 0.99 - result.tail_r2), 0.0, "exponential tail of tr(M)", "bump t={:.4f}, rate {:.4g}".format(result.bump_time, result.tail_rate)))
    return report


def _superpartners(ctx: DiagnosticContext):
    d = exterior_derivative(ctx.complex)
    return superpartner_pairs(d)


def _check_monotonicity(ctx):
    return monotonicity_report(ctx.traj)


def _check_positivity(ctx):
    return positivity_report(ctx.traj)


def _check_mckean_singer(ctx):
    return mckean_singer_check(ctx.traj, euler_characteristic(ctx.complex))


def _check_plane_invariance(ctx):
    report = DiagnosticsReport()
    if ctx.gamma and any(g != 1 for g in ctx.gamma):
        return report.add(skipped_check("plane_distance", "McKean-Singer planes", "planes computed for unscaled couplings"))
    pairs = _superpartners(ctx)
    if not pairs:
        return report.add(skipped_check("plane_distance", "McKean-Singer planes", "no nonzero eigenvalues"))
    worst = {}
    for lam, f, g in pairs:
        for check in plane_invariance(f, ctx.traj).checks:
            if check.name not in worst or check.residual > worst[check.name].residual:
                worst[check.name] = check._replace(detail="lambda={:.4g} {}".format(lam, check.detail))
    return DiagnosticsReport(list(worst.values()))


def _check_fermion_angle(ctx):
    report = DiagnosticsReport()
    if ctx.gamma and any(g != 1 for g in ctx.gamma):
        return report.add(skipped_check("angle_initial", "fermion angle", "unscaled couplings only"))
    parity = ctx.traj.initial.grading.parity()
    for lam, f, g in _superpartners(ctx):
        for vec in (f, g):
            if np.all(np.abs(vec[parity > 0]) < 1e-12):
                return fermion_angle_report(vec, ctx.traj)
    return report.add(skipped_check("angle_initial", "fermion angle", "no odd eigenvector"))


def _check_dolbeault(ctx):
    later = [s for s in ctx.traj if s.t > 0]
    if not later:
        return DiagnosticsReport([skipped_check("del_squared", "del^2 = 0", "no t > 0")])
    worst = {}
    for s in later[:: max(1, len(later) // 50)]:
        for check in dolbeault_check(s).checks:
            if check.name not in worst or check.residual > worst[check.name].residual:
                worst[check.name] = check
    return DiagnosticsReport(list(worst.values()))


def _check_beta_timechange(ctx):
    if ctx.beta == 0:
        return DiagnosticsReport([skipped_check("beta_path", "beta independent path", "beta = 0, ratio 1")])
    return beta_timechange_check(ctx.complex, ctx.beta, ctx.gamma, h=ctx.h)


def _check_cohomology(ctx):
    return cohomology_check(ctx.traj)


def _check_structural(ctx):
    return structural_report(ctx.traj)


def _check_isospectral(ctx):
    return isospectral_report(ctx.traj)


def _check_reflection(ctx):
    t = min(3.0, abs(ctx.traj.final.t))
    return reflection_check(ctx.complex, t, ctx.beta, ctx.gamma, h=ctx.h)


def _check_inflation(ctx):
    return inflation_checks(ctx.traj)


check_registry = {
    "monotonicity": _check_monotonicity,
    "positivity": _check_positivity,
    "mckean_singer": _check_mckean_singer,
    "plane_invariance": _check_plane_invariance,
    "fermion_angle": _check_fermion_angle,
    "dolbeault": _check_dolbeault,
    "beta_timechange": _check_beta_timechange,
    "cohomology": _check_cohomology,
    "structural": _check_structural,
    "isospectral": _check_isospectral,
    "reflection": _check_reflection,
    "inflation": _check_inflation,
}


def get_check_from_name(name: str) -> Callable:
    """
    Gets the check given its name

    :param name: Name of the check
    :type name: string
    :returns: Function of a DiagnosticContext returning a DiagnosticsReport
    """
    if name not in check_registry:
        raise NotImplementedError
    return check_registry[name]


def _run_one(job):
    name, ctx = job
    return get_check_from_name(name)(ctx)


def run_checks(names: Optional[Sequence[str]], ctx: DiagnosticContext, n_workers: int = None) -> DiagnosticsReport:
    """
    Evaluate named checks, in parallel processes when allowed

    :param names: Check names, None for all
    :param ctx: Shared context
    :param n_workers: Process count, defaults to DIRACFLOW_THREADS
    :rtype: DiagnosticsReport
    """
    names = list(check_registry) if names is None else list(names)
    for name in names:
        get_check_from_name(name)
    report = DiagnosticsReport()
    for part in sweep(_run_one, [(name, ctx) for name in names], n_workers):
        report.merge(part)
    return report
