import numpy as np
import pytest

from diracflow.common.errors import ValidationError
from diracflow.geometry import build_complex, dirac, euler_characteristic, reorient
from diracflow.geometry.complex import OrientedComplex, permutation_sign
from diracflow.geometry.graph import Graph, complete_graph, cycle_graph, random_graph


class TestBuildComplex:
    @pytest.mark.parametrize(
        "graph, f_vector",
        [(complete_graph(2), (2, 1)), (complete_graph(3), (3, 3, 1)), (cycle_graph(4), (4, 4)), (complete_graph(4), (4, 6, 4, 1))],
    )
    def test_f_vector(self, graph, f_vector):
        c = build_complex(graph)
        assert c.f_vector == f_vector
        assert c.total_dim == sum(f_vector)

    def test_ascending_orientation(self):
        c = build_complex(complete_graph(3))
        assert c.orientation == c.simplices
        assert c.simplices[1] == [(1, 2), (1, 3), (2, 3)]
        assert c.index_of((3, 1)) == 4

    def test_face_closure(self):
        c = build_complex(random_graph(8, 0.5, seed=0))
        for k in range(1, c.max_dim + 1):
            for simplex in c.simplices_of_dim(k):
                for j in range(k + 1):
                    c.index_of(simplex[:j] + simplex[j + 1:])

    def test_cap(self):
        with pytest.raises(ValidationError):
            build_complex(complete_graph(6), max_simplices=20)

    def test_empty_graph(self):
        c = build_complex(Graph())
        assert c.total_dim == 0
        assert c.max_dim == -1

    def test_missing_face(self):
        with pytest.raises(ValidationError):
            OrientedComplex([[(1,), (2,)], [(1, 3)]])


@pytest.mark.parametrize("graph, chi", [(complete_graph(2), 1), (complete_graph(3), 1), (cycle_graph(4), 0)])
def test_euler_characteristic(graph, chi):
    c = build_complex(graph)
    assert euler_characteristic(c) == chi
    assert euler_characteristic(reorient(c, seed=5)) == chi


class TestReorient:
    def test_deterministic(self):
        c = build_complex(complete_graph(3))
        assert reorient(c, 11).orientation == reorient(c, 11).orientation

    def test_single_vertex(self):
        c = build_complex(Graph([4]))
        assert reorient(c, 3).orientation == [[(4,)]]

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_spectrum_unchanged(self, seed):
        c = build_complex(complete_graph(3))
        np.testing.assert_allclose(
            dirac(reorient(c, seed)).eigvalsh(), dirac(c).eigvalsh(), atol=1e-12
        )


def test_permutation_sign():
    assert permutation_sign((1, 2, 3), (1, 2, 3)) == 1
    assert permutation_sign((2, 1, 3), (1, 2, 3)) == -1
    assert permutation_sign((2, 3, 1), (1, 2, 3)) == 1
