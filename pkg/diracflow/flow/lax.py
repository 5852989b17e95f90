from typing import Sequence, Tuple

import numpy as np

from diracflow.flow.state import FlowState
from diracflow.geometry.operators import GradedOperator, split


def split_rhs(d: np.ndarray, b: np.ndarray, beta: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Graded components of [B, D] for B = d - d^* + i beta b, D = d + d^* + b

    d' = (1 - i beta)(d b - b d),  b' = 2 (d d^* - d^* d)
    """
    dh = np.conj(d).T
    d_dot = (1 - 1j * beta) * (d @ b - b @ d)
    b_dot = 2 * (d @ dh - dh @ d)
    return d_dot, b_dot


def generator_matrix(d: np.ndarray, b: np.ndarray, beta: float) -> np.ndarray:
    return d - np.conj(d).T + 1j * beta * b


def poly_matrix(L: np.ndarray, coeffs: Sequence[float]) -> np.ndarray:
    """sum_k coeffs[k] L^k"""
    n = L.shape[0]
    result = np.zeros((n, n), dtype=complex)
    power = np.eye(n, dtype=complex)
    for k, c in enumerate(coeffs):
        if k:
            power = power @ L
        if c:
            result = result + c * power
    return result


def rhs(s: FlowState) -> Tuple[GradedOperator, GradedOperator]:
    """
    Right hand side of the split system

    :param s: Current state
    :type s: FlowState
    :returns: (d_dot, b_dot)
    """
    d_dot, b_dot = split_rhs(s.d.entries, s.b.entries, s.beta)
    return GradedOperator(d_dot, s.grading), GradedOperator(b_dot, s.grading)


def commutator_rhs(s: FlowState) -> Tuple[GradedOperator, GradedOperator]:
    """
    Dense [B, D] split into its raising and diagonal parts
    """
    B = s.generator().entries
    D = s.dirac().entries
    raising, diagonal, _ = split(GradedOperator(B @ D - D @ B, s.grading))
    return raising, diagonal


def higher_flow_rhs(
    s: FlowState, poly: Sequence[float], L: np.ndarray = None
) -> Tuple[GradedOperator, GradedOperator]:
    """
    Right hand side of D' = f(L)[B, D]

    :param s: Current state
    :param poly: Coefficients of f, lowest degree first
    :param L: Laplacian D(0)^2; computed from s when omitted since L does not move
    :returns: (d_dot, b_dot)
    """
    if not any(poly):
        raise ValueError("flow polynomial must be nonzero")
    if L is None:
        L = s.laplacian().entries
    F = poly_matrix(L, poly)
    d_dot, b_dot = split_rhs(s.d.entries, s.b.entries, s.beta)
    return GradedOperator(F @ d_dot, s.grading), GradedOperator(F @ b_dot, s.grading)
