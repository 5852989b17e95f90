from typing import Callable

import numpy as np

from diracflow.common.errors import UsageError
from diracflow.flow.integrators import flow_field, flow_matrix, rk4
from diracflow.flow.lax import generator_matrix
from diracflow.flow.observers import Reference
from diracflow.flow.state import Trajectory


def _cocycle_rate(beta: float) -> Callable:
    # f' = -(1 - i beta) b f keeps d f = 0 and f = d g for every beta
    factor = -(1 - 1j * beta)

    def rate(d, b, f):
        return factor * (b @ f)

    return rate


def _harmonic_rate(beta: float) -> Callable:
    def rate(d, b, f):
        return generator_matrix(d, b, beta) @ f

    return rate


transport_registry = {
    "cocycle": _cocycle_rate,
    "harmonic": _harmonic_rate,
}


def transport(f: np.ndarray, traj: Trajectory, mode: str = "cocycle") -> np.ndarray:
    """
    Carry a form along a trajectory, re-integrating the flow with the same steps

    :param f: Vector of length v, or a (v, m) block of m forms, at the first snapshot
    :param traj: Trajectory produced by FlowRunner
    :param mode: "cocycle" (f' = -(1 - i beta) b f) or "harmonic" (f' = B f)
    :returns: Array of shape (len(traj),) + f.shape, one entry per snapshot
    """
    if mode not in transport_registry:
        raise NotImplementedError
    s = traj.initial
    f = np.asarray(f, dtype=complex)
    if f.ndim not in (1, 2) or f.shape[0] != s.grading.dim:
        raise UsageError("form has length {}, complex has {}".format(f.shape, s.grading.dim))
    if len(traj) == 1:
        return f[None, :]
    if traj.h is None:
        raise UsageError("trajectory does not record its step size")

    F = flow_matrix(s, traj.flow_poly, Reference.of(s).laplacian)
    field = flow_field(s.beta, F, with_unitary=False)
    rate = transport_registry[mode](s.beta)

    def augmented(y):
        d_dot, b_dot = field(y[:2])
        f_dot = rate(y[0], y[1], y[2])
        if F is not None:
            f_dot = F @ f_dot
        return d_dot, b_dot, f_dot

    n_steps = int(round((traj.times[-1] - traj.times[0]) / traj.h))
    y = (s.d.entries, s.b.entries, f)
    out = [f]
    for step in range(1, n_steps + 1):
        y = rk4(augmented, y, traj.h)
        if step % traj.snapshot_every == 0 or step == n_steps:
            out.append(y[2])
    return np.array(out)


def transport_cocycle(f: np.ndarray, traj: Trajectory) -> np.ndarray:
    """Solve f' = -(1 - i beta) b(t) f along traj; reduces to f' = -b f for beta = 0"""
    return transport(f, traj, "cocycle")


def transport_harmonic(f: np.ndarray, traj: Trajectory) -> np.ndarray:
    """Solve f' = B(t) f along traj"""
    return transport(f, traj, "harmonic")
