from typing import NamedTuple, Optional

import numpy as np

from diracflow.flow.integrators import flow_matrix
from diracflow.flow.lax import split_rhs
from diracflow.flow.observers import Reference
from diracflow.flow.state import Trajectory


class InflationReport(NamedTuple):
    """
    Expansion of the geometry along a run

    rate is -d/dt tr(M) taken from the vector field, rate_fd the same by
    finite differences of the tr(M) series. expansion_rate is -d/dt ||C||_F,
    whose maximum is the bump; the maximum of rate is kept as trace_bump.
    """

    times: np.ndarray
    tr_M: np.ndarray
    rate: np.ndarray
    rate_fd: np.ndarray
    expansion_rate: np.ndarray
    bump_time: float
    bump_value: float
    trace_bump_time: float
    trace_bump_value: float
    tail_rate: Optional[float]
    tail_r2: Optional[float]
    partial: bool


def _peak(times: np.ndarray, values: np.ndarray):
    """Location and height of the maximum, refined by a parabola through its neighbours"""
    i = int(np.argmax(values))
    if 0 < i < len(values) - 1:
        t0, t1, t2 = times[i - 1:i + 2]
        y0, y1, y2 = values[i - 1:i + 2]
        denom = (t0 - t1) * (t0 - t2) * (t1 - t2)
        a = (t2 * (y1 - y0) + t1 * (y0 - y2) + t0 * (y2 - y1)) / denom
        b = (t2 ** 2 * (y0 - y1) + t1 ** 2 * (y2 - y0) + t0 ** 2 * (y1 - y2)) / denom
        if a < 0:
            t_star = -b / (2 * a)
            c = y1 - a * t1 ** 2 - b * t1
            return float(t_star), float(a * t_star ** 2 + b * t_star + c)
    return float(times[i]), float(values[i])


def log_linear_fit(times: np.ndarray, values: np.ndarray):
    """
    Least squares fit of log(values) = c + slope t

    :returns: (slope, r_squared), or (None, None) with fewer than 3 usable points
    """
    keep = values > 0
    if np.count_nonzero(keep) < 3:
        return None, None
    x, y = times[keep], np.log(values[keep])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = intercept + slope * x
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2


def inflation_report(traj: Trajectory, tail_span: float = 2.0) -> InflationReport:
    """
    tr(M(t)), its decay rate and the location of the inflation bump

    The tail fit uses t >= bump + 1; it is skipped (partial report) when the
    trajectory ends less than tail_span time units after the bump.

    :param traj: Trajectory with t >= 0
    :param tail_span: Minimal length past the bump needed for the tail fit
    :rtype: InflationReport
    """
    times = traj.times
    s0 = traj.initial
    F = flow_matrix(s0, traj.flow_poly, Reference.of(s0).laplacian)
    tr_M, rate = [], []
    for s in traj:
        d, b = s.d.entries, s.b.entries
        C = d + np.conj(d).T
        d_dot, _ = split_rhs(d, b, s.beta)
        if F is not None:
            d_dot = F @ d_dot
        C_dot = d_dot + np.conj(d_dot).T
        tr_M.append(float(np.real(np.trace(C @ C))))
        rate.append(-2.0 * float(np.real(np.trace(C @ C_dot))))
    tr_M, rate = np.array(tr_M), np.array(rate)
    rate_fd = -np.gradient(tr_M, times) if len(times) > 2 else np.zeros_like(tr_M)
    norm = np.sqrt(np.maximum(tr_M, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        expansion_rate = np.where(norm > 0, rate / (2.0 * norm), 0.0)

    bump_time, bump_value = _peak(times, expansion_rate)
    trace_bump_time, trace_bump_value = _peak(times, rate)

    partial = times[-1] - bump_time < tail_span
    tail_rate, tail_r2 = None, None
    if not partial:
        window = times >= bump_time + 1.0
        slope, tail_r2 = log_linear_fit(times[window], tr_M[window])
        tail_rate = None if slope is None else -slope
        partial = slope is None
    return InflationReport(
        times=times,
        tr_M=tr_M,
        rate=rate,
        rate_fd=rate_fd,
        expansion_rate=expansion_rate,
        bump_time=bump_time,
        bump_value=bump_value,
        trace_bump_time=trace_bump_time,
        trace_bump_value=trace_bump_value,
        tail_rate=tail_rate,
        tail_r2=tail_r2,
        partial=partial,
    )
