from typing import Dict, List, NamedTuple, Sequence

import numpy as np

from diracflow.common.errors import UsageError
from diracflow.common.utils import adjoint, max_abs
from diracflow.flow.integrators import check_finite, rk4

DEFAULT_MODES = 8


class CircleModelState(NamedTuple):
    """
    Galerkin truncation of the flow on the circle

    D = [[B, A], [A^*, C]] with rows indexed by the Fourier modes -N..N
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    t: float = 0.0

    @property
    def modes(self) -> np.ndarray:
        n = (self.A.shape[0] - 1) // 2
        return np.arange(-n, n + 1)

    @property
    def upper_block(self) -> np.ndarray:
        """B^2 + A A^*"""
        return self.B @ self.B + self.A @ adjoint(self.A)

    @property
    def lower_block(self) -> np.ndarray:
        """C^2 + A^* A"""
        return self.C @ self.C + adjoint(self.A) @ self.A


def circle_model_init(N: int = DEFAULT_MODES) -> CircleModelState:
    """
    A = diag(i n), n = -N..N, and B = C = 0

    :param N: Mode cutoff
    :rtype: CircleModelState
    """
    if N < 1:
        raise UsageError("mode cutoff must be at least 1, got {}".format(N))
    modes = np.arange(-N, N + 1)
    zero = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
    return CircleModelState(np.diag(1j * modes), zero.copy(), zero.copy(), 0.0)


def _display(A, B, C):
    return 2 * A @ C


def _commutator(A, B, C):
    return A @ C - B @ A


circle_variant_registry = {
    "display": _display,
    "commutator": _commutator,
}


def circle_model_rhs(s: CircleModelState, variant: str = "display"):
    """
    B' = 2 A A^*, C' = -2 A^* A and A' = 2 A C ("display") or AC - BA ("commutator")

    :returns: (A', B', C')
    """
    if variant not in circle_variant_registry:
        raise NotImplementedError
    A, B, C = s.A, s.B, s.C
    return circle_variant_registry[variant](A, B, C), 2 * A @ adjoint(A), -2 * adjoint(A) @ A


class CircleRun(NamedTuple):
    states: List[CircleModelState]
    series: Dict[str, np.ndarray]

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def final(self) -> CircleModelState:
        return self.states[-1]


def circle_model_evolve(
    s: CircleModelState, t_end: float, h: float = 1e-3, variant: str = "display", snapshot_every: int = 10
) -> CircleRun:
    """
    RK4 integration of the circle model with its observers

    Series: norm_A (largest |A| entry), invariant (|BA + AC|), upper and lower
    (drift of B^2 + AA^* and C^2 + A^*A from their initial values).

    :param s: Initial state
    :param t_end: Final time
    :param h: Step size magnitude
    :param variant: Right hand side variant
    :param snapshot_every: Steps between recorded states
    :rtype: CircleRun
    """
    if variant not in circle_variant_registry:
        raise NotImplementedError
    n_steps = max(1, int(round(abs(t_end - s.t) / h)))
    step = (t_end - s.t) / n_steps
    upper0, lower0 = s.upper_block, s.lower_block

    def field(y):
        return circle_model_rhs(CircleModelState(*y), variant)

    def observe(state):
        return (
            max_abs(state.A),
            max_abs(state.B @ state.A + state.A @ state.C),
            max_abs(state.upper_block - upper0),
            max_abs(state.lower_block - lower0),
        )

    states, rows = [s], [observe(s)]
    y = (s.A, s.B, s.C)
    for k in range(1, n_steps + 1):
        y = rk4(field, y, step)
        t = s.t + k * step
        check_finite(*y, t=t)
        if k % snapshot_every == 0 or k == n_steps:
            state = CircleModelState(y[0], y[1], y[2], t_end if k == n_steps else t)
            states.append(state)
            rows.append(observe(state))
    columns = np.array(rows)
    series = {name: columns[:, i] for i, name in enumerate(("norm_A", "invariant", "upper", "lower"))}
    return CircleRun(states, series)


def circle_model_exact(N: int, t: float) -> CircleModelState:
    """
    Mode by mode solution B_n = |n| tanh(2|n| t), a_n = i n sech(2|n| t), C = -B
    """
    modes = np.arange(-N, N + 1)
    k = np.abs(modes).astype(float)
    B = np.diag(k * np.tanh(2 * k * t)).astype(complex)
    A = np.diag(1j * modes / np.cosh(2 * k * t))
    return CircleModelState(A, B, -B, float(t))


def circle_exact_deviation(run: CircleRun) -> float:
    """Largest entry deviation of A, B and C from the mode by mode solution over the recorded states"""
    worst = 0.0
    for s in run.states:
        n = (s.A.shape[0] - 1) // 2
        exact = circle_model_exact(n, s.t)
        worst = max(worst, max_abs(s.A - exact.A), max_abs(s.B - exact.B), max_abs(s.C - exact.C))
    return worst


def circle_model_limit(N: int) -> np.ndarray:
    """diag(|n|), the limit of B"""
    return np.diag(np.abs(np.arange(-N, N + 1)).astype(float))


def circle_model_convergence(Ns: Sequence[int], t_end: float = 10.0, h: float = 1e-3) -> Dict[int, float]:
    """
    Distance of B(t_end) from diag(|n|) for several cutoffs

    :returns: Cutoff to max entry deviation
    """
    result = {}
    for N in Ns:
        run = circle_model_evolve(circle_model_init(N), t_end, h, snapshot_every=max(1, int(round(t_end / h))))
        result[int(N)] = max_abs(run.final.B - circle_model_limit(N))
    return result
