from typing import Callable, Sequence, Tuple

import numpy as np
import scipy.linalg

from diracflow.common.errors import DivergenceError
from diracflow.flow.lax import generator_matrix, poly_matrix, split_rhs
from diracflow.flow.state import FlowState
from diracflow.geometry.operators import GradedOperator

REUNITARIZE_TOL = 1e-10


def rk4(fun: Callable, y: Tuple[np.ndarray, ...], h: float) -> Tuple[np.ndarray, ...]:
    """
    One classical Runge-Kutta step for a system stored as a tuple of arrays

    :param fun: Maps a tuple of arrays to the tuple of their derivatives
    :param y: Current value
    :param h: Step, negative to go backward
    :returns: Advanced value
    """
    k1 = fun(y)
    k2 = fun(tuple(a + 0.5 * h * k for a, k in zip(y, k1)))
    k3 = fun(tuple(a + 0.5 * h * k for a, k in zip(y, k2)))
    k4 = fun(tuple(a + h * k for a, k in zip(y, k3)))
    return tuple(
        a + h / 6.0 * (p + 2 * q + 2 * r + s)
        for a, p, q, r, s in zip(y, k1, k2, k3, k4)
    )


def flow_field(beta: float, F: np.ndarray = None, with_unitary: bool = False) -> Callable:
    """
    Vector field of (d, b[, U]) for D' = f(L)[B, D] and U' = f(L) B U

    :param beta: Deformation parameter
    :param F: f(L) or None for the first flow
    :param with_unitary: Whether the tuple carries U as third entry
    """

    def field(y):
        d, b = y[0], y[1]
        d_dot, b_dot = split_rhs(d, b, beta)
        if F is not None:
            d_dot, b_dot = F @ d_dot, F @ b_dot
        if not with_unitary:
            return d_dot, b_dot
        B = generator_matrix(d, b, beta)
        if F is not None:
            B = F @ B
        return d_dot, b_dot, B @ y[2]

    return field


def check_finite(*arrays: np.ndarray, t: float = None) -> None:
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise DivergenceError("non-finite entries at t={}".format(t))


def step_rk4(s: FlowState, h: float, flow_poly: Sequence[float] = None, L: np.ndarray = None) -> FlowState:
    """
    Advance the state by one RK4 step

    :param s: Current state
    :param h: Nonzero step, negative integrates backward
    :param flow_poly: Coefficients of f for the higher flow D' = f(L)[B,D]
    :param L: Laplacian used by f, computed from s if omitted
    :returns: State at s.t + h
    :rtype: FlowState
    """
    if h == 0:
        raise ValueError("step size must be nonzero")
    F = flow_matrix(s, flow_poly, L)
    with_unitary = s.U is not None
    y = (s.d.entries, s.b.entries) + ((s.U.entries,) if with_unitary else ())
    y = rk4(flow_field(s.beta, F, with_unitary), y, h)
    check_finite(*y, t=s.t + h)
    return advanced(s, y, s.t + h)


def flow_matrix(s: FlowState, flow_poly: Sequence[float] = None, L: np.ndarray = None):
    if flow_poly is None or tuple(flow_poly) == (1.0,):
        return None
    if L is None:
        L = s.laplacian().entries
    return poly_matrix(L, flow_poly)


def advanced(s: FlowState, y: Tuple[np.ndarray, ...], t: float) -> FlowState:
    grading = s.grading
    U = GradedOperator(y[2], grading) if len(y) > 2 else None
    return s._replace(
        d=GradedOperator(y[0], grading),
        b=GradedOperator(y[1], grading),
        t=t,
        U=U,
    )


def unitarity_defect(U: np.ndarray) -> float:
    if U.size == 0:
        return 0.0
    return float(np.max(np.abs(np.conj(U).T @ U - np.eye(U.shape[0]))))


def reunitarize(U: np.ndarray, tol: float = REUNITARIZE_TOL) -> np.ndarray:
    """
    Unitary polar factor of U when U^*U drifts from 1 by more than tol
    """
    if U.size == 0 or unitarity_defect(U) <= tol:
        return U
    unitary, _ = scipy.linalg.polar(U)
    return unitary
