from typing import Dict, List, Sequence, Tuple

import networkx as nx
import numpy as np

from diracflow.common.errors import ValidationError
from diracflow.geometry.graph import Graph

Simplex = Tuple[int, ...]

MAX_SIMPLICES = 20000


class OrientedComplex:
    """
    Clique (Whitney) complex of a graph with an ordering fixed on every simplex

    Simplices are stored as ascending label tuples, grouped by dimension and
    sorted lexicographically inside each group. That order is the row order of
    every matrix built on the complex. `orientation[k][i]` is the vertex order
    chosen for `simplices[k][i]`.

    :param simplices: Ascending tuples grouped by dimension
    :param orientation: Ordered tuples, aligned with simplices
    :type simplices: list of lists of tuples
    :type orientation: list of lists of tuples
    """

    def __init__(
        self,
        simplices: Sequence[Sequence[Simplex]],
        orientation: Sequence[Sequence[Simplex]] = None,
    ):
        self._simplices = [list(group) for group in simplices]
        if orientation is None:
            orientation = self._simplices
        self._orientation = [[tuple(x) for x in group] for group in orientation]
        self._index = {}
        offset = 0
        for group in self._simplices:
            for i, simplex in enumerate(group):
                self._index[simplex] = offset + i
            offset += len(group)
        self._check()

    def _check(self) -> None:
        if len(self._orientation) != len(self._simplices):
            raise ValidationError("orientation does not match simplices")
        for k, (group, ordered) in enumerate(zip(self._simplices, self._orientation)):
            if len(group) != len(ordered):
                raise ValidationError("orientation does not match simplices in dimension {}".format(k))
            for simplex, order in zip(group, ordered):
                if len(simplex) != k + 1 or tuple(sorted(order)) != simplex:
                    raise ValidationError("orientation {} is not an ordering of {}".format(order, simplex))
                if k > 0:
                    for j in range(k + 1):
                        face = simplex[:j] + simplex[j + 1:]
                        if face not in self._index:
                            raise ValidationError("face {} of {} is missing".format(face, simplex))

    @property
    def simplices(self) -> List[List[Simplex]]:
        return self._simplices

    @property
    def orientation(self) -> List[List[Simplex]]:
        return self._orientation

    @property
    def f_vector(self) -> Tuple[int, ...]:
        return tuple(len(group) for group in self._simplices)

    @property
    def total_dim(self) -> int:
        return sum(self.f_vector)

    @property
    def max_dim(self) -> int:
        """Largest simplex dimension, -1 for the empty complex"""
        return len(self._simplices) - 1

    @property
    def vertices(self) -> List[int]:
        if not self._simplices:
            return []
        return [s[0] for s in self._simplices[0]]

    def simplices_of_dim(self, k: int) -> List[Simplex]:
        if k < 0 or k > self.max_dim:
            return []
        return self._simplices[k]

    def index_of(self, simplex: Sequence[int]) -> int:
        """Global row index of a simplex given in any vertex order"""
        key = tuple(sorted(simplex))
        if key not in self._index:
            raise KeyError("{} is not a simplex of the complex".format(tuple(simplex)))
        return self._index[key]

    def oriented(self, simplex: Sequence[int]) -> Simplex:
        key = tuple(sorted(simplex))
        k = len(key) - 1
        return self._orientation[k][self._index[key] - sum(self.f_vector[:k])]

    def with_orientation(self, orientation: Sequence[Sequence[Simplex]]) -> "OrientedComplex":
        return OrientedComplex(self._simplices, orientation)

    def __repr__(self) -> str:
        return "OrientedComplex(f={})".format(self.f_vector)


def build_complex(g: Graph, max_simplices: int = MAX_SIMPLICES) -> OrientedComplex:
    """
    Enumerate all cliques of g and orient each by ascending labels

    :param g: Source graph
    :param max_simplices: Fail once more simplices than this are found
    :type g: Graph
    :type max_simplices: int
    :returns: Oriented clique complex
    :rtype: OrientedComplex
    """
    groups: Dict[int, List[Simplex]] = {}
    count = 0
    for clique in nx.enumerate_all_cliques(g.to_networkx()):
        count += 1
        if count > max_simplices:
            raise ValidationError(
                "clique complex has more than {} simplices".format(max_simplices)
            )
        groups.setdefault(len(clique) - 1, []).append(tuple(sorted(clique)))
    simplices = [sorted(groups[k]) for k in range(len(groups))]
    return OrientedComplex(simplices)


def euler_characteristic(c: OrientedComplex) -> int:
    return sum((-1) ** k * v for k, v in enumerate(c.f_vector))


def reorient(c: OrientedComplex, seed: int) -> OrientedComplex:
    """
    Same complex with every simplex given a pseudo-random vertex order

    :param c: Complex to reorient
    :param seed: Seed of the permutation generator
    :type c: OrientedComplex
    :type seed: int
    :returns: Reoriented complex
    :rtype: OrientedComplex
    """
    rng = np.random.RandomState(seed)
    orientation = []
    for group in c.simplices:
        orientation.append([tuple(int(v) for v in rng.permutation(simplex)) for simplex in group])
    return c.with_orientation(orientation)


def permutation_sign(source: Sequence[int], target: Sequence[int]) -> int:
    """
    Sign of the permutation taking the tuple source to the tuple target

    Both tuples must list the same vertices.
    """
    position = {v: i for i, v in enumerate(target)}
    perm = [position[v] for v in source]
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign
