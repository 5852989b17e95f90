from functools import lru_cache
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np
import sympy

from diracflow.common.errors import UsageError
from diracflow.flow.integrators import check_finite, rk4
from diracflow.flow.state import FlowState, Trajectory
from diracflow.geometry.complex import OrientedComplex, build_complex
from diracflow.geometry.graph import complete_graph
from diracflow.geometry.operators import GradedOperator, Grading, exterior_derivative

VARIABLES = ("b1", "b2", "b3", "b4", "b5", "b6", "d1", "d2")
N_B = 6


def k3_complex() -> OrientedComplex:
    return build_complex(complete_graph(3))


@lru_cache(maxsize=None)
def _patterns() -> Tuple[Tuple[np.ndarray, ...], Grading]:
    """
    Integer matrices spanning the symmetric ansatz on the triangle

    b1: vertex diagonal, b2: vertex entries (0,1), (1,2), b3: vertex entry
    (0,2), b4: edge diagonal, b5: edge off-diagonal with the signs of d0 d0^T,
    b6: the triangle, d1: d0, d2: d1.
    """
    d = exterior_derivative(k3_complex())
    grading = d.grading
    v, e, f = grading.span(0), grading.span(1), grading.span(2)
    n = grading.dim

    def embed(block_span, block):
        out = np.zeros((n, n))
        out[block_span, block_span] = block
        return out

    d0 = d.block(1, 0)
    d1 = d.block(2, 1)
    vertex_near = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
    vertex_far = np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=float)
    edge_off = d0 @ d0.T
    np.fill_diagonal(edge_off, 0.0)
    P0 = np.zeros((n, n))
    P0[e, v] = d0
    P1 = np.zeros((n, n))
    P1[f, e] = d1
    patterns = (
        embed(v, np.eye(3)),
        embed(v, vertex_near),
        embed(v, vertex_far),
        embed(e, np.eye(3)),
        embed(e, edge_off),
        embed(f, np.eye(1)),
        P0,
        P1,
    )
    return patterns, grading


def _symbols():
    return sympy.symbols(" ".join(VARIABLES), real=True), sympy.symbols("g0 g1", real=True)


def _project(pattern: sympy.Matrix, X: sympy.Matrix):
    return sympy.expand(sum(pattern[i] * X[i] for i in range(len(X))) / sum(p ** 2 for p in pattern))


@lru_cache(maxsize=None)
def _reduced_system() -> Dict[sympy.Symbol, sympy.Expr]:
    (b1, b2, b3, b4, b5, b6, d1, d2), (g0, g1) = _symbols()
    patterns, _ = _patterns()
    P = [sympy.Matrix(p.astype(int).tolist()) for p in patterns]
    b = b1 * P[0] + b2 * P[1] + b3 * P[2] + b4 * P[3] + b5 * P[4] + b6 * P[5]
    d = g0 * d1 * P[6] + g1 * d2 * P[7]
    d_dot = d * b - b * d
    b_dot = 2 * (d * d.T - d.T * d)
    values = (b1, b2, b3, b4, b5, b6, d1, d2)
    equations = {}
    for var, pattern in zip(values[:N_B], P[:N_B]):
        equations[var] = _project(pattern, b_dot)
    equations[d1] = sympy.expand(_project(P[6], d_dot) / g0)
    equations[d2] = sympy.expand(_project(P[7], d_dot) / g1)
    return equations


def k3_equations(gamma: Sequence[float] = None) -> Dict[sympy.Symbol, sympy.Expr]:
    """
    Reduced system of the real flow on K3 in the symmetric ansatz

    The commutator flow is evaluated on the ansatz symbolically and projected
    back onto the pattern matrices. Couplings enter as symbols g0, g1 scaling
    d0 and d1 unless numerical values are given.

    :param gamma: Couplings substituted for g0, g1, or None to keep them symbolic
    :returns: Mapping of each variable to the expression of its derivative
    """
    equations = _reduced_system()
    if gamma is None:
        return dict(equations)
    g0, g1 = _gamma(gamma)
    symbols = _symbols()[1]
    return {var: sympy.expand(expr.subs({symbols[0]: g0, symbols[1]: g1})) for var, expr in equations.items()}


@lru_cache(maxsize=None)
def _compiled():
    values, gammas = _symbols()
    equations = _reduced_system()
    return sympy.lambdify(values + gammas, [equations[v] for v in values], "numpy")


def _gamma(gamma: Sequence[float]) -> Tuple[float, float]:
    if gamma is None:
        return 1.0, 1.0
    if len(gamma) < 2 or gamma[0] == 0 or gamma[1] == 0:
        raise UsageError("K3 needs two nonzero couplings, got {}".format(gamma))
    return float(gamma[0]), float(gamma[1])


def k3_reduced_rhs(y: np.ndarray, gamma: Sequence[float] = None) -> np.ndarray:
    """
    Derivatives of (b1, ..., b6, d1, d2)

    :param y: Reduced variables
    :param gamma: Couplings of d0 and d1
    :returns: Array of 8 derivatives
    """
    g0, g1 = _gamma(gamma)
    return np.array(_compiled()(*y, g0, g1), dtype=float)


def k3_initial_vars() -> np.ndarray:
    """b = 0 and unit incidence coefficients"""
    return np.array([0.0] * N_B + [1.0, 1.0])


def k3_embed(y: np.ndarray, gamma: Sequence[float] = None, t: float = 0.0) -> FlowState:
    """
    Full real state of the K3 flow described by reduced variables

    :param y: Reduced variables
    :param gamma: Couplings
    :param t: Time stamp of the state
    :rtype: FlowState
    """
    g0, g1 = _gamma(gamma)
    patterns, grading = _patterns()
    b = sum(y[i] * patterns[i] for i in range(N_B))
    d = g0 * y[6] * patterns[6] + g1 * y[7] * patterns[7]
    return FlowState(
        d=GradedOperator(d.astype(complex), grading),
        b=GradedOperator(b.astype(complex), grading),
        t=float(t),
        beta=0.0,
        gamma=(g0, g1),
    )


def k3_project(s: FlowState, gamma: Sequence[float] = None) -> np.ndarray:
    """
    Frobenius projection of a full state onto the reduced variables

    :param s: State on the K3 complex
    :returns: Array of 8 reduced variables
    """
    g0, g1 = _gamma(gamma)
    patterns, grading = _patterns()
    if s.grading != grading:
        raise UsageError("state does not live on the K3 complex")
    b, d = np.real(s.b.entries), np.real(s.d.entries)
    out = [float(np.sum(p * b) / np.sum(p * p)) for p in patterns[:N_B]]
    out.append(float(np.sum(patterns[6] * d) / np.sum(patterns[6] ** 2)) / g0)
    out.append(float(np.sum(patterns[7] * d) / np.sum(patterns[7] ** 2)) / g1)
    return np.array(out)


def k3_reduced_evolve(
    t_end: float, h: float = 1e-3, gamma: Sequence[float] = None, y0: np.ndarray = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    RK4 integration of the reduced K3 system

    :param t_end: Final time
    :param h: Step size magnitude
    :param gamma: Couplings
    :param y0: Initial variables, k3_initial_vars() when omitted
    :returns: (times, values) with values of shape (n_steps + 1, 8)
    """
    y = k3_initial_vars() if y0 is None else np.asarray(y0, dtype=float)
    n_steps = max(1, int(round(abs(t_end) / h)))
    step = t_end / n_steps
    g0, g1 = _gamma(gamma)

    def field(state):
        return (k3_reduced_rhs(state[0], (g0, g1)),)

    values: List[np.ndarray] = [y]
    for k in range(1, n_steps + 1):
        (y,) = rk4(field, (y,), step)
        check_finite(y, t=k * step)
        values.append(y)
    return np.linspace(0.0, t_end, n_steps + 1), np.array(values)


class K3Comparison(NamedTuple):
    times: np.ndarray
    values: np.ndarray
    variable_difference: float
    matrix_difference: float


def k3_compare(traj: Trajectory) -> K3Comparison:
    """
    Deviation of a full K3 trajectory from the reduced system run with the same step

    :param traj: Real trajectory on the K3 complex starting at t = 0
    :returns: Reduced times and values at every step, largest deviation in the
        reduced variables and in the embedded matrices over all snapshots
    """
    s0 = traj.initial
    if s0.beta != 0:
        raise UsageError("the reduced K3 system is real, got beta={}".format(s0.beta))
    if s0.t != 0 or traj.h is None:
        raise UsageError("trajectory must start at t = 0 and record its step size")
    gamma = s0.gamma
    times, values = k3_reduced_evolve(traj.final.t, abs(traj.h), gamma)
    step = times[1] - times[0]
    variable_difference = matrix_difference = 0.0
    for s in traj:
        y = values[int(round(s.t / step))]
        variable_difference = max(variable_difference, float(np.max(np.abs(k3_project(s, gamma) - y))))
        embedded = k3_embed(y, gamma).dirac().entries - s.dirac().entries
        matrix_difference = max(matrix_difference, float(np.max(np.abs(embedded))))
    return K3Comparison(times, values, variable_difference, matrix_difference)
