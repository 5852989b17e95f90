from typing import Dict, List, Sequence, Tuple

import numpy as np
import scipy.linalg

from diracflow.common.errors import AmbiguityError, StructureError, ValidationError
from diracflow.geometry.complex import OrientedComplex, permutation_sign

SELF_ADJOINT_TOL = 1e-12
STRUCTURE_TOL = 1e-9


class Grading:
    """
    Form-degree grading of the index set of a complex

    :param sizes: Block sizes, i.e. the f-vector
    :type sizes: sequence of int
    """

    def __init__(self, sizes: Sequence[int]):
        self._sizes = tuple(int(s) for s in sizes)
        self._offsets = tuple(int(sum(self._sizes[:p])) for p in range(len(self._sizes)))
        self._degrees = np.repeat(np.arange(len(self._sizes), dtype=int), np.array(self._sizes, dtype=int))

    @classmethod
    def of(cls, c: OrientedComplex) -> "Grading":
        return cls(c.f_vector)

    @classmethod
    def from_degrees(cls, degrees: Sequence[int]) -> "Grading":
        degrees = list(degrees)
        if any(b < a for a, b in zip(degrees, degrees[1:])) or (degrees and degrees[0] != 0):
            raise ValidationError("degrees must start at 0 and ascend")
        if any(b - a > 1 for a, b in zip(degrees, degrees[1:])):
            raise ValidationError("degrees must be contiguous")
        top = degrees[-1] + 1 if degrees else 0
        return cls([degrees.count(p) for p in range(top)])

    @property
    def sizes(self) -> Tuple[int, ...]:
        return self._sizes

    @property
    def offsets(self) -> Tuple[int, ...]:
        return self._offsets

    @property
    def degree_of_index(self) -> np.ndarray:
        return self._degrees

    @property
    def dim(self) -> int:
        return int(sum(self._sizes))

    @property
    def n_degrees(self) -> int:
        return len(self._sizes)

    def span(self, p: int) -> slice:
        return slice(self._offsets[p], self._offsets[p] + self._sizes[p])

    def parity(self) -> np.ndarray:
        """(-1)^p along the diagonal"""
        return np.where(self._degrees % 2 == 0, 1.0, -1.0)

    def __eq__(self, other) -> bool:
        return isinstance(other, Grading) and self._sizes == other._sizes

    def __repr__(self) -> str:
        return "Grading({})".format(self._sizes)


class GradedOperator:
    """
    Dense square matrix over a graded index set

    :param entries: Square matrix of size grading.dim
    :param grading: Grading of rows and columns
    :type entries: numpy.ndarray
    :type grading: Grading
    """

    def __init__(self, entries: np.ndarray, grading: Grading):
        entries = np.asarray(entries)
        if entries.shape != (grading.dim, grading.dim):
            raise ValidationError(
                "matrix of shape {} does not match grading of size {}".format(entries.shape, grading.dim)
            )
        self._entries = entries
        self._grading = grading

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def grading(self) -> Grading:
        return self._grading

    @property
    def H(self) -> "GradedOperator":
        return GradedOperator(np.conj(self._entries).T, self._grading)

    def block(self, p: int, q: int) -> np.ndarray:
        """Block mapping degree q into degree p"""
        return self._entries[self._grading.span(p), self._grading.span(q)]

    def is_self_adjoint(self, tol: float = SELF_ADJOINT_TOL) -> bool:
        return self_adjoint_residual(self._entries) <= tol

    def eigvalsh(self) -> np.ndarray:
        return scipy.linalg.eigvalsh(self._entries) if self._grading.dim else np.zeros(0)

    def _wrap(self, entries: np.ndarray) -> "GradedOperator":
        return GradedOperator(entries, self._grading)

    def _raw(self, other):
        return other._entries if isinstance(other, GradedOperator) else other

    def __add__(self, other):
        return self._wrap(self._entries + self._raw(other))

    def __sub__(self, other):
        return self._wrap(self._entries - self._raw(other))

    def __neg__(self):
        return self._wrap(-self._entries)

    def __mul__(self, scalar):
        return self._wrap(self._entries * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, GradedOperator):
            return self._wrap(self._entries @ other._entries)
        return self._entries @ other

    def __repr__(self) -> str:
        return "GradedOperator({}, {})".format(self._grading, self._entries.dtype)


def self_adjoint_residual(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix - np.conj(matrix).T)))


def exterior_derivative(c: OrientedComplex) -> GradedOperator:
    """
    Signed incidence matrix of the complex

    Entry (j, i) is (-1)^m times the sign matching the ordering of simplex j
    with the m-th vertex removed to the ordering of its face i.

    :param c: Oriented complex
    :type c: OrientedComplex
    :returns: Block-raising d with d d = 0
    :rtype: GradedOperator
    """
    grading = Grading.of(c)
    d = np.zeros((grading.dim, grading.dim))
    for k in range(1, c.max_dim + 1):
        for order in c.orientation[k]:
            j = c.index_of(order)
            for m in range(len(order)):
                face = order[:m] + order[m + 1:]
                i = c.index_of(face)
                d[j, i] = (-1) ** m * permutation_sign(face, c.oriented(face))
    return GradedOperator(d, grading)


def derivative_blocks(d: GradedOperator) -> List[np.ndarray]:
    """The maps d_p from degree p to p + 1, p = 0 .. top - 1"""
    return [d.block(p + 1, p) for p in range(d.grading.n_degrees - 1)]


def dirac(c: OrientedComplex, gamma: Sequence[float] = None) -> GradedOperator:
    """
    D = sum_p gamma_p (d_p + d_p^*)

    :param c: Oriented complex
    :param gamma: Couplings of d_0, d_1, ...; defaults to all ones
    :type c: OrientedComplex
    :type gamma: sequence of float
    :returns: Real symmetric Dirac operator
    :rtype: GradedOperator
    """
    d = scaled_derivative(c, gamma)
    return GradedOperator(d.entries + d.entries.T, d.grading)


def scaled_derivative(c: OrientedComplex, gamma: Sequence[float] = None) -> GradedOperator:
    d = exterior_derivative(c)
    grading = d.grading
    n_blocks = max(grading.n_degrees - 1, 0)
    gamma = normalize_gamma(gamma, n_blocks)
    entries = d.entries.copy()
    for p, g in enumerate(gamma):
        entries[grading.span(p + 1), grading.span(p)] *= g
    return GradedOperator(entries, grading)


def normalize_gamma(gamma: Sequence[float], n_blocks: int) -> List[float]:
    if gamma is None:
        return [1.0] * n_blocks
    gamma = [float(g) for g in gamma]
    if len(gamma) != n_blocks:
        raise ValidationError(
            "need {} couplings, got {}".format(n_blocks, len(gamma))
        )
    if any(g == 0 for g in gamma):
        raise ValidationError("degenerate coupling: gamma contains 0")
    return gamma


def laplacian(D: GradedOperator) -> GradedOperator:
    return D @ D


def grading_involution(grading: Grading) -> GradedOperator:
    return GradedOperator(np.diag(grading.parity()), grading)


def split(X: GradedOperator, tol: float = STRUCTURE_TOL):
    """
    Split a graded matrix into raising, diagonal and lowering parts

    :param X: Graded matrix
    :param tol: Largest tolerated entry in blocks jumping two or more degrees
    :type X: GradedOperator
    :type tol: float
    :returns: (raising, diagonal, lowering)
    """
    grading = X.grading
    parts = {1: np.zeros_like(X.entries), 0: np.zeros_like(X.entries), -1: np.zeros_like(X.entries)}
    for p in range(grading.n_degrees):
        for q in range(grading.n_degrees):
            block = X.block(p, q)
            jump = p - q
            if jump in parts:
                parts[jump][grading.span(p), grading.span(q)] = block
            elif block.size and np.max(np.abs(block)) > tol:
                raise StructureError(
                    "block from degree {} to {} has entries up to {:.3g}".format(
                        q, p, float(np.max(np.abs(block)))
                    )
                )
    return (
        GradedOperator(parts[1], grading),
        GradedOperator(parts[0], grading),
        GradedOperator(parts[-1], grading),
    )


def supertrace(X: GradedOperator) -> complex:
    diag = np.diag(X.entries)
    return complex(np.sum(X.grading.parity() * diag))


def betti(L: GradedOperator, p: int, tol: float = 1e-8, gap: float = 1e3) -> int:
    """
    Dimension of the kernel of the degree p block of L

    :param L: Block diagonal Laplacian
    :param p: Form degree
    :param tol: Eigenvalues below tol count as zero
    :param gap: Required ratio between the smallest nonzero eigenvalue and tol
    :returns: Betti number b_p
    :rtype: int
    """
    if p < 0 or p >= L.grading.n_degrees:
        return 0
    block = L.block(p, p)
    eigenvalues = np.abs(scipy.linalg.eigvalsh(block))
    zero = eigenvalues < tol
    nonzero = eigenvalues[~zero]
    if nonzero.size and nonzero.min() < gap * tol:
        raise AmbiguityError(
            "eigenvalue {:.3g} of L_{} lies within a factor {:g} of tol {:g}".format(
                nonzero.min(), p, gap, tol
            )
        )
    return int(np.count_nonzero(zero))


def betti_numbers(L: GradedOperator, tol: float = 1e-8, gap: float = 1e3) -> Tuple[int, ...]:
    return tuple(betti(L, p, tol, gap) for p in range(L.grading.n_degrees))


def numerical_rank(matrix: np.ndarray, rtol: float = 1e-6, gap: float = 1e3) -> int:
    """
    Rank separated by the widest gap among small singular values

    Singular values are scaled by the largest one. The cut is placed at the
    widest ratio between neighbours whose lower member is below rtol, and
    that ratio must reach `gap`.

    :param matrix: Any rectangular matrix
    :param rtol: Only values below rtol relative to the largest may be zero
    :param gap: Minimal ratio across the cut
    :returns: Numerical rank
    :rtype: int
    """
    if matrix.size == 0:
        return 0
    s = scipy.linalg.svdvals(matrix)
    if s[0] == 0:
        return 0
    r = s / s[0]
    if r[-1] >= rtol:
        return len(r)
    best, cut = 0.0, None
    for k in range(len(r) - 1):
        if r[k + 1] < rtol:
            ratio = r[k] / max(r[k + 1], np.finfo(float).tiny)
            if ratio > best:
                best, cut = ratio, k + 1
    if best < gap:
        raise AmbiguityError(
            "no singular value gap of {:g} (best {:.3g})".format(gap, best)
        )
    return cut


def betti_from_derivative(d: GradedOperator, rtol: float = 1e-6, gap: float = 1e3) -> Tuple[int, ...]:
    """b_p = dim Omega_p - rank d_p - rank d_(p-1)"""
    ranks = [numerical_rank(block, rtol, gap) for block in derivative_blocks(d)]
    sizes = d.grading.sizes
    result = []
    for p, size in enumerate(sizes):
        out_rank = ranks[p] if p < len(ranks) else 0
        in_rank = ranks[p - 1] if p > 0 else 0
        result.append(size - out_rank - in_rank)
    return tuple(result)


def superpartner_pairs(d: GradedOperator, tol: float = 1e-9):
    """
    Orthonormal McKean-Singer pairs of the unscaled complex

    For every degree p, f runs through eigenvectors of d_p^* d_p with
    eigenvalue lam > tol and g = d f / sqrt(lam); L f = lam f, L g = lam g.

    :param d: Exterior derivative
    :returns: list of (lam, f, g) with f, g full length vectors
    """
    grading = d.grading
    pairs = []
    for p, block in enumerate(derivative_blocks(d)):
        if block.size == 0:
            continue
        values, vectors = scipy.linalg.eigh(np.conj(block).T @ block)
        for lam, vec in zip(values, vectors.T):
            if lam <= tol:
                continue
            f = np.zeros(grading.dim, dtype=vectors.dtype)
            f[grading.span(p)] = vec
            g = d.entries @ f / np.sqrt(lam)
            pairs.append((float(lam), f, g))
    return pairs


def dump_operator(X: GradedOperator) -> Dict:
    """Matrix dump document {"n", "grading", "re", "im"}"""
    entries = np.asarray(X.entries, dtype=complex)
    return {
        "n": X.grading.dim,
        "grading": [int(p) for p in X.grading.degree_of_index],
        "re": [float(x) for x in entries.real.ravel()],
        "im": [float(x) for x in entries.imag.ravel()],
    }


def load_operator(doc: Dict) -> GradedOperator:
    try:
        n = int(doc["n"])
        grading = Grading.from_degrees(doc["grading"])
        entries = np.array(doc["re"], dtype=float) + 1j * np.array(doc["im"], dtype=float)
        entries = entries.reshape(n, n)
    except (KeyError, TypeError, ValueError) as err:
        raise ValidationError("malformed matrix dump: {}".format(err))
    if not np.any(entries.imag):
        entries = entries.real
    return GradedOperator(entries, grading)
