from typing import NamedTuple, Union

import numpy as np
import scipy.linalg

from diracflow.common.errors import UsageError
from diracflow.geometry.operators import GradedOperator

KERNEL_TOL = 1e-9

Operator = Union[GradedOperator, np.ndarray]


def _matrix(X: Operator) -> np.ndarray:
    return X.entries if isinstance(X, GradedOperator) else np.asarray(X)


class _Modes(NamedTuple):
    omega: np.ndarray
    vectors: np.ndarray
    kernel: np.ndarray
    a: np.ndarray
    c: np.ndarray


def _modes(L: Operator, u0: np.ndarray, v0: np.ndarray, project_kernel: bool) -> _Modes:
    values, vectors = scipy.linalg.eigh(_matrix(L))
    kernel = np.abs(values) < KERNEL_TOL
    a = np.conj(vectors).T @ np.asarray(u0)
    c = np.conj(vectors).T @ np.asarray(v0)
    if np.any(kernel) and np.max(np.abs(c[kernel]), initial=0.0) > KERNEL_TOL:
        if not project_kernel:
            raise UsageError("initial velocity has a component in the kernel of L; pass project_kernel to drop it")
        c = np.where(kernel, 0.0, c)
    omega = np.sqrt(np.where(kernel, 0.0, np.maximum(values, 0.0)))
    return _Modes(omega, vectors, kernel, a, c)


def wave_solve(L: Operator, u0: np.ndarray, v0: np.ndarray, t: float, project_kernel: bool = False) -> np.ndarray:
    """
    Solution of u'' = -L u

    On every eigenspace of L with eigenvalue lam > 0 the solution is
    cos(sqrt(lam) t) u0 + sin(sqrt(lam) t) / sqrt(lam) v0; on the kernel u0
    stays put.

    :param L: Laplacian
    :param u0: Initial position
    :param v0: Initial velocity, orthogonal to the kernel of L
    :param t: Time
    :param project_kernel: Drop the kernel part of v0 instead of failing
    :returns: u(t)
    """
    m = _modes(L, u0, v0, project_kernel)
    safe = np.where(m.kernel, 1.0, m.omega)
    coeffs = np.where(m.kernel, m.a, np.cos(m.omega * t) * m.a + np.sin(m.omega * t) / safe * m.c)
    return m.vectors @ coeffs


def wave_velocity(L: Operator, u0: np.ndarray, v0: np.ndarray, t: float, project_kernel: bool = False) -> np.ndarray:
    """u'(t) of wave_solve"""
    m = _modes(L, u0, v0, project_kernel)
    coeffs = np.where(m.kernel, 0.0, -m.omega * np.sin(m.omega * t) * m.a + np.cos(m.omega * t) * m.c)
    return m.vectors @ coeffs


def wave_energy(L: Operator, u: np.ndarray, v: np.ndarray) -> float:
    """|u'|^2 + <u, L u>"""
    return float(np.real(np.vdot(v, v) + np.vdot(u, _matrix(L) @ u)))


def dirac_wave(D: Operator, u0: np.ndarray, t: float) -> np.ndarray:
    """
    exp(i t D) u0, the solution of the first order equation u' = i D u

    :param D: Self-adjoint Dirac operator
    :param u0: Initial value
    :param t: Time
    """
    values, vectors = scipy.linalg.eigh(_matrix(D))
    return vectors @ (np.exp(1j * values * t) * (np.conj(vectors).T @ np.asarray(u0, dtype=complex)))
