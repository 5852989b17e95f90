from typing import Callable, List, NamedTuple, Tuple

import numpy as np

from diracflow.common.errors import UsageError
from diracflow.common.logger import Logger
from diracflow.geometry.operators import GradedOperator

KERNEL_TOL = 1e-9


class ZetaSpec(NamedTuple):
    """
    Positive eigenvalues of a Dirac operator, with multiplicity

    The negative half of the spectrum mirrors the positive one and enters
    through the branch factor 1 + exp(-i pi s).
    """

    positive_eigenvalues: np.ndarray


def zeta_spec(D: GradedOperator, tol: float = KERNEL_TOL) -> ZetaSpec:
    """
    :param D: Self-adjoint Dirac operator
    :param tol: Eigenvalues up to tol count as kernel
    :rtype: ZetaSpec
    """
    eigenvalues = D.eigvalsh()
    return ZetaSpec(np.sort(eigenvalues[eigenvalues > tol]))


def branch_factor(s: complex) -> complex:
    return 1.0 + np.exp(-1j * np.pi * s)


def dirac_zeta(z: ZetaSpec, s: complex) -> complex:
    """
    (1 + exp(-i pi s)) sum over lambda > 0 of lambda^-s

    :param z: Positive spectrum
    :param s: Complex argument
    :returns: Zeta value
    """
    if len(z.positive_eigenvalues) == 0:
        raise UsageError("zeta function of an operator without nonzero eigenvalues is undefined")
    powers = np.exp(-complex(s) * np.log(z.positive_eigenvalues))
    return complex(branch_factor(s) * np.sum(powers))


def circle_graph_zeta(n: int, s: complex, exponent_sign: int = 1, scale: float = 1.0) -> complex:
    """
    (1 + exp(-i pi s)) sum_{k=1}^{n-1} (scale sin(pi k/n))^(exponent_sign s)

    The defaults evaluate the sum with exponent +s on sin(pi k/n); with
    exponent_sign=-1 and scale=2 it is the zeta function of the cycle C_n,
    whose positive Dirac eigenvalues are 2 sin(pi k/n).

    :param n: Number of vertices, at least 3
    :param s: Complex argument
    """
    if n < 3:
        raise UsageError("circle graph needs at least 3 vertices, got {}".format(n))
    if exponent_sign not in (1, -1):
        raise UsageError("exponent_sign must be 1 or -1")
    values = scale * np.sin(np.pi * np.arange(1, n) / n)
    powers = np.exp(exponent_sign * complex(s) * np.log(values))
    return complex(branch_factor(s) * np.sum(powers))


class ZetaGrid(NamedTuple):
    re_s: np.ndarray
    im_s: np.ndarray
    values: np.ndarray


def zeta_grid(
    fn: Callable[[complex], complex],
    re_range: Tuple[float, float] = (-1.5, 1.5),
    im_range: Tuple[float, float] = (0.0, 18.0),
    step: float = 0.05,
) -> ZetaGrid:
    """
    Evaluate fn on a rectangular grid of s = a + i b, ends included

    :param fn: Function of a complex argument
    :param re_range: Interval of a
    :param im_range: Interval of b
    :param step: Grid spacing in both directions
    :returns: Flattened grid, imaginary part varying fastest
    """
    if step <= 0:
        raise UsageError("grid step must be positive")
    re = np.linspace(re_range[0], re_range[1], int(round((re_range[1] - re_range[0]) / step)) + 1)
    im = np.linspace(im_range[0], im_range[1], int(round((im_range[1] - im_range[0]) / step)) + 1)
    re_s, im_s = [a.ravel() for a in np.meshgrid(re, im, indexing="ij")]
    values = np.array([fn(complex(a, b)) for a, b in zip(re_s, im_s)])
    return ZetaGrid(re_s, im_s, values)


def write_zeta_grid(grid: ZetaGrid, logdir: str, name: str = "zeta", header: str = None, formats: List[str] = ["csv"]) -> None:
    """
    Columns re_s, im_s, re_zeta, im_zeta, abs_zeta
    """
    logger = Logger(logdir, formats=formats, name=name, header=header)
    for a, b, value in zip(grid.re_s, grid.im_s, grid.values):
        logger.write(
            {
                "re_s": float(a),
                "im_s": float(b),
                "re_zeta": float(value.real),
                "im_zeta": float(value.imag),
                "abs_zeta": float(abs(value)),
            },
            "re_s",
        )
    logger.close()
