import itertools
from typing import Union

import networkx as nx
import numpy as np
import scipy.linalg
from scipy.optimize import minimize

from diracflow.common.errors import UsageError
from diracflow.geometry.complex import OrientedComplex
from diracflow.geometry.operators import GradedOperator

GRID_VERTICES = 4
GRID_RANGE = (-0.5, 1.5)
GRID_STEP = 0.01
ZERO_NORM = 1e-12


def mean_extension(c: OrientedComplex) -> np.ndarray:
    """
    Matrix extending a vertex function to every simplex by the mean over its vertices

    :returns: Array of shape (total_dim, number of vertices)
    """
    vertices = c.vertices
    column = {v: i for i, v in enumerate(vertices)}
    E = np.zeros((c.total_dim, len(vertices)))
    for group in c.simplices:
        for simplex in group:
            row = c.index_of(simplex)
            for v in simplex:
                E[row, column[v]] = 1.0 / len(simplex)
    return E


def commutator_norm(C: np.ndarray, f_hat: np.ndarray) -> float:
    """Operator norm of [C, diag(f_hat)], whose (i, j) entry is C_ij (f_j - f_i)"""
    if C.size == 0:
        return 0.0
    X = C * (f_hat[None, :] - f_hat[:, None])
    return float(scipy.linalg.svdvals(X)[0])


def _support_graph(C: np.ndarray, c: OrientedComplex) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(c.total_dim))
    rows, cols = np.nonzero(C)
    graph.add_edges_from((int(i), int(j)) for i, j in zip(rows, cols) if i != j)
    for group in c.simplices[1:]:
        for simplex in group:
            graph.add_edges_from((c.index_of(simplex), c.index_of((v,))) for v in simplex)
    return graph


def connes_distance(
    C: Union[GradedOperator, np.ndarray],
    c: OrientedComplex,
    x: int,
    y: int,
    seed: int = 0,
    n_starts: int = 20,
) -> float:
    """
    Connes pseudo distance between two vertices

    sup f(x) - f(y) over real vertex functions whose mean extension f_hat
    satisfies |[C, f_hat]| <= 1. With u(x) = 1 and u(y) = 0 fixed this is
    1 / min |[C, u_hat]| over the remaining vertex values. Complexes with at
    most four vertices are searched on a grid before local refinement, larger
    ones from n_starts seeded random starts.

    :param C: Operator on the complex, usually the free part C(t)
    :param c: Oriented complex
    :param x: Vertex label
    :param y: Vertex label
    :param seed: Seed of the random starts
    :param n_starts: Number of random starts
    :returns: Distance, infinity when the vertices are not linked by C
    :rtype: float
    """
    C = C.entries if isinstance(C, GradedOperator) else np.asarray(C)
    vertices = list(c.vertices)
    for v in (x, y):
        if v not in vertices:
            raise UsageError("vertex {} is not in the complex".format(v))
    if x == y:
        return 0.0
    if not nx.has_path(_support_graph(C, c), c.index_of((x,)), c.index_of((y,))):
        return float("inf")

    E = mean_extension(c)
    ix, iy = vertices.index(x), vertices.index(y)
    free = [i for i in range(len(vertices)) if i not in (ix, iy)]

    def objective(values: np.ndarray) -> float:
        u = np.zeros(len(vertices))
        u[ix] = 1.0
        u[free] = values
        return commutator_norm(C, E @ u)

    if not free:
        best = objective(np.zeros(0))
    else:
        if len(vertices) <= GRID_VERTICES:
            axis = np.arange(GRID_RANGE[0], GRID_RANGE[1] + GRID_STEP / 2, GRID_STEP)
            grid = (np.array(p) for p in itertools.product(axis, repeat=len(free)))
            starts = [min(grid, key=objective)]
        else:
            rng = np.random.RandomState(seed)
            starts = [rng.uniform(0.0, 1.0, len(free)) for _ in range(n_starts)]
        best = np.inf
        for start in starts:
            result = minimize(objective, start, method="Nelder-Mead", options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 5000})
            best = min(best, float(result.fun), objective(start))
    if best <= ZERO_NORM:
        return float("inf")
    return 1.0 / best
