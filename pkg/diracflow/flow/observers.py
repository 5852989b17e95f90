from typing import Callable, NamedTuple

import numpy as np

from diracflow.flow.state import FlowState
from diracflow.geometry.operators import supertrace


class Reference(NamedTuple):
    """
    Quantities of the initial state that observers compare against

    :param spectrum: Sorted eigenvalues of D(0)
    :param laplacian: D(0)^2
    """

    spectrum: np.ndarray
    laplacian: np.ndarray

    @classmethod
    def of(cls, s: FlowState) -> "Reference":
        D = s.dirac()
        return cls(spectrum=np.sort(D.eigvalsh()), laplacian=(D @ D).entries)


def _max_abs(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if x.size else 0.0


def observe_t(s: FlowState, ref: Reference) -> float:
    return float(s.t)


def tr_M(s: FlowState, ref: Reference) -> float:
    return float(np.real(np.trace(s.M().entries)))


def tr_b2(s: FlowState, ref: Reference) -> float:
    return float(np.real(np.trace(s.V().entries)))


def spec_drift(s: FlowState, ref: Reference) -> float:
    if ref.spectrum.size == 0:
        return 0.0
    return _max_abs(np.sort(s.dirac().eigvalsh()) - ref.spectrum)


def l_drift(s: FlowState, ref: Reference) -> float:
    return _max_abs(s.laplacian().entries - ref.laplacian)


def str_U_re(s: FlowState, ref: Reference) -> float:
    if s.U is None:
        return float("nan")
    return supertrace(s.U).real


def str_U_im(s: FlowState, ref: Reference) -> float:
    if s.U is None:
        return float("nan")
    return supertrace(s.U).imag


def norm_d(s: FlowState, ref: Reference) -> float:
    return _max_abs(s.d.entries)


def norm_b(s: FlowState, ref: Reference) -> float:
    return _max_abs(s.b.entries)


def tr_D2(s: FlowState, ref: Reference) -> float:
    D = s.dirac().entries
    return float(np.real(np.trace(D @ D)))


def unitarity(s: FlowState, ref: Reference) -> float:
    if s.U is None:
        return float("nan")
    U = s.U.entries
    return _max_abs(np.conj(U).T @ U - np.eye(U.shape[0]))


observer_registry = {
    "t": observe_t,
    "tr_M": tr_M,
    "tr_b2": tr_b2,
    "spec_drift": spec_drift,
    "l_drift": l_drift,
    "str_U_re": str_U_re,
    "str_U_im": str_U_im,
    "norm_d": norm_d,
    "norm_b": norm_b,
    "tr_D2": tr_D2,
    "unitarity": unitarity,
}


def get_observer_from_name(name: str) -> Callable:
    """
    Gets the observer function given its name

    :param name: Name of the observer
    :type name: string
    :returns: Function of (FlowState, Reference) returning a float
    """
    if name not in observer_registry:
        raise NotImplementedError
    return observer_registry[name]
