from typing import List, Optional, Sequence

import numpy as np

from diracflow.common.errors import UsageError
from diracflow.common.logger import Logger
from diracflow.flow.integrators import (
    advanced,
    check_finite,
    flow_field,
    flow_matrix,
    reunitarize,
    rk4,
)
from diracflow.flow.observers import Reference, get_observer_from_name
from diracflow.flow.state import FlowState, Trajectory


class FlowRunner:
    """
    Integrates the deformation from a state to a final time

    :param state: Initial state
    :param t_end: Final time, may lie before state.t
    :param h: Step size magnitude (its sign is ignored)
    :param observers: Names of observers evaluated on every snapshot
    :param snapshot_every: Keep every n-th integrator step
    :param flow_poly: Coefficients of f in D' = f(L)[B,D]
    :param reunitarize_every: Steps between unitarity checks of U
    :param log_mode: Logger formats, empty for no files
    :param logdir: Directory of the logger
    :param header: Provenance line written at the top of each log
    :type state: FlowState
    :type t_end: float
    :type h: float
    :type observers: list
    :type snapshot_every: int
    :type flow_poly: list
    :type reunitarize_every: int
    :type log_mode: list
    :type logdir: str
    :type header: str
    """

    def __init__(
        self,
        state: FlowState,
        t_end: float,
        h: float = 1e-3,
        observers: Sequence[str] = (),
        snapshot_every: int = 1,
        flow_poly: Sequence[float] = (1.0,),
        reunitarize_every: int = 100,
        log_mode: List[str] = [],
        logdir: str = "runs",
        header: Optional[str] = None,
    ):
        span = t_end - state.t
        if h == 0 or abs(h) > abs(span) or span == 0:
            raise UsageError(
                "step {} does not fit into [{}, {}]".format(h, state.t, t_end)
            )
        if snapshot_every < 1:
            raise UsageError("snapshot_every must be at least 1")
        self.state = state
        self.t_end = float(t_end)
        self.n_steps = max(1, int(round(abs(span) / abs(h))))
        self.h = span / self.n_steps
        self.observer_names = list(observers)
        self.observers = [get_observer_from_name(name) for name in self.observer_names]
        self.snapshot_every = snapshot_every
        self.flow_poly = tuple(float(c) for c in flow_poly)
        self.reunitarize_every = reunitarize_every
        self.log_mode = log_mode
        self.logdir = logdir
        self.header = header
        self.logger = (
            Logger(logdir=logdir, formats=[*log_mode], name="observers", header=header)
            if log_mode
            else None
        )

    def observe(self, s: FlowState, reference: Reference) -> dict:
        row = {"t": float(s.t)}
        for name, fn in zip(self.observer_names, self.observers):
            if name != "t":
                row[name] = fn(s, reference)
        return row

    def run(self) -> Trajectory:
        """
        Integrate and collect snapshots

        :returns: Trajectory from state.t to t_end
        :rtype: Trajectory
        """
        s = self.state
        reference = Reference.of(s)
        F = flow_matrix(s, self.flow_poly, reference.laplacian)
        with_unitary = s.U is not None
        field = flow_field(s.beta, F, with_unitary)
        y = (s.d.entries, s.b.entries) + ((s.U.entries,) if with_unitary else ())

        snapshots = [s]
        rows = [self.observe(s, reference)]
        self._log(rows[-1])
        try:
            for step in range(1, self.n_steps + 1):
                y = rk4(field, y, self.h)
                t = self.state.t + step * self.h
                check_finite(*y, t=t)
                if with_unitary and step % self.reunitarize_every == 0:
                    y = (y[0], y[1], reunitarize(y[2]))
                if step % self.snapshot_every == 0 or step == self.n_steps:
                    if step == self.n_steps:
                        t = self.t_end
                    snap = advanced(s, y, t)
                    snapshots.append(snap)
                    rows.append(self.observe(snap, reference))
                    self._log(rows[-1])
        finally:
            if self.logger is not None:
                self.logger.close()

        series = {
            name: np.array([row[name] for row in rows]) for name in rows[0]
        }
        return Trajectory(
            snapshots,
            series,
            h=self.h,
            snapshot_every=self.snapshot_every,
            flow_poly=self.flow_poly,
        )

    def _log(self, row: dict) -> None:
        if self.logger is not None:
            self.logger.write(row, "t")


def evolve(
    s: FlowState,
    t_end: float,
    h: float = 1e-3,
    observers: Sequence[str] = (),
    snapshot_every: int = 1,
    flow_poly: Sequence[float] = (1.0,),
) -> Trajectory:
    """
    Integrate from s to t_end and return the trajectory

    :param s: Initial state
    :param t_end: Final time
    :param h: Step size magnitude
    :param observers: Observer names
    :param snapshot_every: Thinning of snapshots
    :param flow_poly: Coefficients of f in D' = f(L)[B,D]
    :rtype: Trajectory
    """
    return FlowRunner(
        s,
        t_end,
        h=h,
        observers=observers,
        snapshot_every=snapshot_every,
        flow_poly=flow_poly,
    ).run()


def convergence_time(traj: Trajectory, threshold: float = 1e-7, window: float = 1.0) -> Optional[float]:
    """
    First time after which max |d| stays below threshold for `window` time units

    :returns: That time, or None if the trajectory never settles
    """
    times = traj.times
    small = np.array([np.max(np.abs(s.d.entries)) < threshold if s.d.entries.size else True for s in traj])
    for i in range(len(times)):
        if not small[i]:
            continue
        later = np.abs(times - times[i]) >= window
        if not np.any(later):
            return None
        j = int(np.argmax(later))
        if np.all(small[i:j + 1]):
            return float(times[i])
    return None


def unitary_conjugation_residual(s: FlowState, D0) -> float:
    """
    max |D(t) - U D(0) U^*| for a state carrying U

    :param s: FlowState with U
    :param D0: Initial Dirac operator
    :type D0: GradedOperator
    :rtype: float
    """
    U = s.unitary().entries
    D = s.dirac().entries
    if D.size == 0:
        return 0.0
    return float(np.max(np.abs(D - U @ D0.entries @ np.conj(U).T)))
