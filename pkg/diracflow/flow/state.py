from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from diracflow.common.errors import UsageError, ValidationError
from diracflow.geometry.complex import OrientedComplex
from diracflow.geometry.operators import (
    GradedOperator,
    Grading,
    dump_operator,
    load_operator,
    scaled_derivative,
)


class FlowState(NamedTuple):
    """
    Point of the deformation D(t) = d(t) + d(t)^* + b(t)

    :param d: Raising part
    :param b: Block diagonal part
    :param t: Time
    :param beta: Deformation parameter of B = d - d^* + i beta b
    :param gamma: Couplings the initial operator was built with
    :param U: Accumulated unitary with D(t) = U D(0) U^*, or None
    """

    d: GradedOperator
    b: GradedOperator
    t: float
    beta: float
    gamma: tuple
    U: Optional[GradedOperator] = None

    @property
    def grading(self) -> Grading:
        return self.d.grading

    def dirac(self) -> GradedOperator:
        return self.d + self.d.H + self.b

    def generator(self) -> GradedOperator:
        """B = d - d^* + i beta b"""
        return self.d - self.d.H + 1j * self.beta * self.b

    def free_part(self) -> GradedOperator:
        """C = d + d^*"""
        return self.d + self.d.H

    def R(self) -> GradedOperator:
        return self.d @ self.d.H

    def S(self) -> GradedOperator:
        return self.d.H @ self.d

    def M(self) -> GradedOperator:
        C = self.free_part()
        return C @ C

    def V(self) -> GradedOperator:
        return self.b @ self.b

    def laplacian(self) -> GradedOperator:
        D = self.dirac()
        return D @ D

    def unitary(self) -> GradedOperator:
        if self.U is None:
            raise UsageError("state carries no unitary; run with with_unitary=True")
        return self.U


def initial_state(
    c: OrientedComplex,
    beta: float = 0.0,
    gamma: Sequence[float] = None,
    with_unitary: bool = True,
    t: float = 0.0,
) -> FlowState:
    """
    State with D = C(0), b = 0 and U = 1

    :param c: Oriented complex
    :param beta: Deformation parameter
    :param gamma: Couplings of d_0, d_1, ...
    :param with_unitary: Carry U along
    :type c: OrientedComplex
    :returns: Initial flow state
    :rtype: FlowState
    """
    d = scaled_derivative(c, gamma)
    grading = d.grading
    n = grading.dim
    n_blocks = max(grading.n_degrees - 1, 0)
    used = tuple(float(g) for g in gamma) if gamma is not None else (1.0,) * n_blocks
    U = GradedOperator(np.eye(n, dtype=complex), grading) if with_unitary else None
    return FlowState(
        d=GradedOperator(d.entries.astype(complex), grading),
        b=GradedOperator(np.zeros((n, n), dtype=complex), grading),
        t=float(t),
        beta=float(beta),
        gamma=used,
        U=U,
    )


class Trajectory:
    """
    Snapshots of a run together with per-snapshot observer series

    :param snapshots: States in time order
    :param observers: Observer name to series, aligned with snapshots
    :param h: Signed step used between consecutive integrator steps
    :param snapshot_every: Integrator steps between snapshots
    :param flow_poly: Coefficients of f in D' = f(L)[B,D]
    """

    def __init__(
        self,
        snapshots: List,
        observers: Dict[str, np.ndarray] = None,
        h: float = None,
        snapshot_every: int = 1,
        flow_poly: Sequence[float] = (1.0,),
    ):
        self._snapshots = list(snapshots)
        self._observers = {} if observers is None else dict(observers)
        self.h = h
        self.snapshot_every = snapshot_every
        self.flow_poly = tuple(flow_poly)
        times = self.times
        if len(times) > 1:
            steps = np.diff(times) * np.sign(times[-1] - times[0])
            if np.any(steps <= 0):
                raise ValueError("snapshot times must be strictly monotone")

    @property
    def snapshots(self) -> List:
        return self._snapshots

    @property
    def observers(self) -> Dict[str, np.ndarray]:
        return self._observers

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self._snapshots])

    @property
    def initial(self):
        return self._snapshots[0]

    @property
    def final(self):
        return self._snapshots[-1]

    def __len__(self) -> int:
        return len(self._snapshots)

    def __iter__(self):
        return iter(self._snapshots)

    def __getitem__(self, index: int):
        return self._snapshots[index]

    def at(self, t: float):
        """Snapshot closest to time t"""
        return self._snapshots[int(np.argmin(np.abs(self.times - t)))]

    def series(self, name: str) -> np.ndarray:
        if name not in self._observers:
            raise KeyError("observer '{}' was not recorded".format(name))
        return self._observers[name]


def dump_trajectory(traj: Trajectory, header: str = None) -> Dict:
    """
    Json document of a trajectory: run parameters and (d, b) per snapshot

    :param traj: Trajectory
    :param header: Provenance line stored under "provenance"
    """
    s0 = traj.initial
    doc = {
        "beta": s0.beta,
        "gamma": list(s0.gamma),
        "h": traj.h,
        "snapshot_every": traj.snapshot_every,
        "flow_poly": list(traj.flow_poly),
        "snapshots": [{"t": s.t, "d": dump_operator(s.d), "b": dump_operator(s.b)} for s in traj],
    }
    if header is not None:
        doc["provenance"] = header
    return doc


def load_trajectory(doc: Dict) -> Trajectory:
    """
    Inverse of dump_trajectory; the unitary is not stored

    :raises ValidationError: On a malformed document
    """
    try:
        snapshots = []
        for row in doc["snapshots"]:
            d, b = load_operator(row["d"]), load_operator(row["b"])
            snapshots.append(
                FlowState(
                    d=GradedOperator(np.asarray(d.entries, dtype=complex), d.grading),
                    b=GradedOperator(np.asarray(b.entries, dtype=complex), b.grading),
                    t=float(row["t"]),
                    beta=float(doc["beta"]),
                    gamma=tuple(doc["gamma"]),
                )
            )
        return Trajectory(
            snapshots,
            h=doc.get("h"),
            snapshot_every=int(doc.get("snapshot_every", 1)),
            flow_poly=doc.get("flow_poly", (1.0,)),
        )
    except (KeyError, TypeError, ValueError) as err:
        raise ValidationError("malformed trajectory document: {}".format(err))
