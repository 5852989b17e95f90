from typing import NamedTuple, Tuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from diracflow.common.errors import UsageError
from diracflow.flow.runner import FlowRunner
from diracflow.flow.state import FlowState, Trajectory, initial_state
from diracflow.geometry.complex import OrientedComplex, build_complex
from diracflow.geometry.graph import complete_graph

RATE = np.sqrt(8.0)


class K2State(NamedTuple):
    """
    Reduced variables of the flow on a single edge

    d is the magnitude of both incidence entries, b the vertex off-diagonal
    entry of b(t); the vertex diagonal is -b and the edge entry 2b.
    """

    d: float
    b: float
    t: float

    @property
    def integral(self) -> float:
        """d^2 + 2 b^2, equal to 1 along the flow"""
        return self.d ** 2 + 2 * self.b ** 2


def k2_complex() -> OrientedComplex:
    return build_complex(complete_graph(2))


def k2_closed_form(t: float) -> K2State:
    """
    d = sech(sqrt(8) t), b = tanh(sqrt(8) t) / sqrt(2)

    :param t: Time, any sign
    :rtype: K2State
    """
    return K2State(1.0 / np.cosh(RATE * t), np.tanh(RATE * t) / np.sqrt(2.0), float(t))


def k2_closed_form_rate(t: float) -> Tuple[float, float]:
    """Exact (d', b') of the closed form"""
    sech, tanh = 1.0 / np.cosh(RATE * t), np.tanh(RATE * t)
    return -RATE * sech * tanh, RATE * sech ** 2 / np.sqrt(2.0)


def k2_reduced_rhs(s: K2State) -> Tuple[float, float]:
    """d' = -4 b d, b' = 2 d^2"""
    return -4.0 * s.b * s.d, 2.0 * s.d ** 2


def closed_form_residual(times: np.ndarray) -> float:
    """Largest deviation of the closed form from the reduced system on a grid"""
    worst = 0.0
    for t in np.asarray(times, dtype=float):
        exact = k2_closed_form_rate(t)
        field = k2_reduced_rhs(k2_closed_form(t))
        worst = max(worst, abs(exact[0] - field[0]), abs(exact[1] - field[1]))
    return worst


def k2_reduce(s: FlowState) -> K2State:
    """
    Read the reduced variables off a full state on the K2 complex

    :param s: State on the complex of a single edge
    :rtype: K2State
    """
    if s.grading.sizes != (2, 1):
        raise UsageError("state does not live on a single edge, grading {}".format(s.grading.sizes))
    d = s.d.block(1, 0)
    b_edge = s.b.block(1, 1)[0, 0]
    return K2State(float(np.abs(d[0, 1])), float(np.real(b_edge)) / 2.0, float(s.t))


def k2_limit_pair() -> Tuple[np.ndarray, np.ndarray]:
    """
    The two limits of D(t) on K2

    The forward flow in the orientation of build_complex converges to the
    second member, the backward flow to the first.

    :returns: (V_plus, V_minus), 3 x 3 real matrices
    """
    V_minus = np.array([[-1.0, 1.0, 0.0], [1.0, -1.0, 0.0], [0.0, 0.0, 2.0]]) / np.sqrt(2.0)
    return -V_minus, V_minus


class K2Comparison(NamedTuple):
    d_error: float
    b_error: float
    integral_drift: float


def k2_compare(traj: Trajectory) -> K2Comparison:
    """
    Deviation of a numerical K2 trajectory from the closed form

    :param traj: Trajectory on the K2 complex with beta = 0
    :rtype: K2Comparison
    """
    d_error = b_error = drift = 0.0
    for s in traj:
        num = k2_reduce(s)
        exact = k2_closed_form(s.t)
        d_error = max(d_error, abs(num.d - exact.d))
        b_error = max(b_error, abs(num.b - exact.b))
        drift = max(drift, abs(num.integral - 1.0))
    return K2Comparison(d_error, b_error, drift)


class K2Inflection(NamedTuple):
    t_star: float
    slope: float
    t_numeric: float
    slope_numeric: float


def k2_inflection(t_end: float = 1.0, h: float = 1e-3) -> K2Inflection:
    """
    Time and value of the steepest descent of d(t) on K2

    The exact pair is t* = artanh(1/sqrt 2)/sqrt 8 and d'(t*) = -sqrt 2. The
    numerical pair comes from an integrated trajectory: d(t) is splined and
    the minimum of its derivative located by golden-section search.

    :param t_end: Length of the numerical run
    :param h: Step size of the numerical run
    :rtype: K2Inflection
    """
    t_star = float(np.arctanh(1.0 / np.sqrt(2.0)) / RATE)
    slope = float(k2_closed_form_rate(t_star)[0])

    traj = FlowRunner(initial_state(k2_complex(), with_unitary=False), t_end, h=h).run()
    times = traj.times
    d = np.array([k2_reduce(s).d for s in traj])
    d_dot = CubicSpline(times, d).derivative()
    result = minimize_scalar(lambda t: float(d_dot(t)), bracket=(0.1 * t_end, t_star, 0.6 * t_end), method="golden")
    return K2Inflection(t_star, slope, float(result.x), float(d_dot(result.x)))
