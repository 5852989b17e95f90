import numpy as np
import pytest

from diracflow.common.errors import AmbiguityError, StructureError, ValidationError
from diracflow.geometry import (
    GradedOperator,
    Grading,
    betti,
    betti_numbers,
    build_complex,
    dirac,
    exterior_derivative,
    grading_involution,
    laplacian,
    reorient,
    split,
    supertrace,
)
from diracflow.geometry.graph import Graph, complete_graph, cycle_graph, disjoint_union, random_graph, star_graph
from diracflow.geometry.operators import (
    betti_from_derivative,
    derivative_blocks,
    dump_operator,
    load_operator,
    numerical_rank,
    superpartner_pairs,
)

GRAPHS = [complete_graph(2), complete_graph(3), cycle_graph(4), star_graph(3), random_graph(8, 0.5, seed=0)]


def k2():
    return build_complex(complete_graph(2))


class TestGrading:
    def test_offsets(self):
        grading = Grading((3, 3, 1))
        assert grading.offsets == (0, 3, 6)
        assert grading.dim == 7
        assert list(grading.degree_of_index) == [0, 0, 0, 1, 1, 1, 2]
        assert list(grading.parity()) == [1, 1, 1, -1, -1, -1, 1]

    def test_from_degrees(self):
        assert Grading.from_degrees([0, 0, 1]) == Grading((2, 1))
        with pytest.raises(ValidationError):
            Grading.from_degrees([0, 2])
        with pytest.raises(ValidationError):
            Grading.from_degrees([1, 0])

    def test_size_mismatch(self):
        with pytest.raises(ValidationError):
            GradedOperator(np.zeros((2, 2)), Grading((2, 1)))


class TestExteriorDerivative:
    def test_k2(self):
        D = dirac(k2())
        expected = np.array([[0, 0, -1], [0, 0, 1], [-1, 1, 0]])
        np.testing.assert_array_equal(D.entries, expected)

    @pytest.mark.parametrize("graph", GRAPHS)
    def test_nilpotent(self, graph):
        d = exterior_derivative(build_complex(graph)).entries
        assert np.count_nonzero(d @ d) == 0

    def test_raising(self):
        d = exterior_derivative(build_complex(complete_graph(3)))
        raising, diagonal, lowering = split(d)
        np.testing.assert_array_equal(raising.entries, d.entries)
        assert not diagonal.entries.any() and not lowering.entries.any()

    def test_single_vertex(self):
        d = exterior_derivative(build_complex(Graph([1])))
        np.testing.assert_array_equal(d.entries, np.zeros((1, 1)))

    def test_blocks(self):
        d0, d1 = derivative_blocks(exterior_derivative(build_complex(complete_graph(3))))
        assert d0.shape == (3, 3) and d1.shape == (1, 3)
        np.testing.assert_array_equal(d0[0], [-1, 1, 0])
        assert not (d1 @ d0).any()


class TestDirac:
    def test_k2_spectrum(self):
        np.testing.assert_allclose(dirac(k2()).eigvalsh(), [-np.sqrt(2), 0, np.sqrt(2)], atol=1e-12)

    def test_coupling_scales(self):
        np.testing.assert_allclose(
            dirac(k2(), gamma=[3.0]).eigvalsh(), 3 * np.array([-np.sqrt(2), 0, np.sqrt(2)]), atol=1e-12
        )

    def test_k3_scaled(self):
        c = build_complex(complete_graph(3))
        D, scaled = dirac(c).entries, dirac(c, gamma=[1, 10]).entries
        np.testing.assert_array_equal(scaled[6, 3:6], 10 * D[6, 3:6])
        np.testing.assert_array_equal(scaled[3:6, 0:3], D[3:6, 0:3])

    def test_zero_coupling(self):
        with pytest.raises(ValidationError):
            dirac(build_complex(complete_graph(3)), gamma=[1, 0])

    @pytest.mark.parametrize("n, gamma", [(2, [1.0, 2.0]), (3, [1.0]), (3, [1.0, 1.0, 5.0])])
    def test_coupling_count(self, n, gamma):
        c = build_complex(complete_graph(n))
        with pytest.raises(ValidationError, match="couplings"):
            dirac(c, gamma=gamma)

    @pytest.mark.parametrize("graph", GRAPHS)
    def test_chiral_symmetry(self, graph):
        c = build_complex(graph)
        D = dirac(c)
        P = grading_involution(D.grading).entries
        np.testing.assert_allclose(P @ D.entries + D.entries @ P, 0, atol=1e-12)
        values = D.eigvalsh()
        np.testing.assert_allclose(values, -values[::-1], atol=1e-10)
        assert D.is_self_adjoint()
        assert abs(np.trace(D.entries)) == 0

    @pytest.mark.parametrize("seed", [1, 2])
    def test_orientation_is_a_sign_conjugation(self, seed):
        c = build_complex(complete_graph(4))
        D, E = dirac(c).entries, dirac(reorient(c, seed)).entries
        np.testing.assert_array_equal(np.abs(D), np.abs(E))


class TestLaplacian:
    def test_k2(self):
        L = laplacian(dirac(k2()))
        np.testing.assert_array_equal(L.entries, [[1, -1, 0], [-1, 1, 0], [0, 0, 2]])

    @pytest.mark.parametrize("graph", GRAPHS)
    def test_block_diagonal(self, graph):
        L = laplacian(dirac(build_complex(graph)))
        raising, _, lowering = split(L)
        assert np.max(np.abs(raising.entries), initial=0) < 1e-12
        assert np.max(np.abs(lowering.entries), initial=0) < 1e-12

    def test_zero(self):
        zero = GradedOperator(np.zeros((3, 3)), Grading((2, 1)))
        assert not laplacian(zero).entries.any()


class TestSplit:
    def test_dirac(self):
        c = build_complex(complete_graph(3))
        D, d = dirac(c), exterior_derivative(c)
        raising, diagonal, lowering = split(D)
        np.testing.assert_array_equal(raising.entries, d.entries)
        np.testing.assert_array_equal(lowering.entries, d.entries.T)
        assert not diagonal.entries.any()

    def test_block_diagonal(self):
        V = GradedOperator(np.array([[-1, 1, 0], [1, -1, 0], [0, 0, 2]]) / np.sqrt(2), Grading((2, 1)))
        raising, diagonal, lowering = split(V)
        np.testing.assert_array_equal(diagonal.entries, V.entries)
        assert not raising.entries.any() and not lowering.entries.any()

    def test_jump_of_two(self):
        X = np.zeros((7, 7))
        X[6, 0] = 1e-3
        with pytest.raises(StructureError):
            split(GradedOperator(X, Grading((3, 3, 1))))
        X[6, 0] = 1e-12
        split(GradedOperator(X, Grading((3, 3, 1))))


class TestSupertrace:
    def test_identity(self):
        assert supertrace(GradedOperator(np.eye(3), Grading((2, 1)))) == 1
        assert supertrace(GradedOperator(np.eye(8), Grading((4, 4)))) == 0

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_laplacian_powers(self, n):
        L = laplacian(dirac(build_complex(complete_graph(3)))).entries
        X = GradedOperator(np.linalg.matrix_power(L, n), Grading((3, 3, 1)))
        assert abs(supertrace(X)) < 1e-10


class TestBetti:
    @pytest.mark.parametrize(
        "graph, numbers",
        [
            (complete_graph(2), (1, 0)),
            (cycle_graph(4), (1, 1)),
            (complete_graph(3), (1, 0, 0)),
            (disjoint_union(complete_graph(2), complete_graph(2)), (2, 0)),
        ],
    )
    def test_numbers(self, graph, numbers):
        c = build_complex(graph)
        assert betti_numbers(laplacian(dirac(c))) == numbers
        assert betti_from_derivative(exterior_derivative(c)) == numbers

    def test_out_of_range(self):
        assert betti(laplacian(dirac(k2())), 5) == 0

    def test_ambiguous(self):
        L = GradedOperator(np.diag([0.0, 1e-6, 2.0]), Grading((3,)))
        with pytest.raises(AmbiguityError):
            betti(L, 0, tol=1e-8)

    def test_numerical_rank(self):
        assert numerical_rank(np.diag([1.0, 0.5, 1e-14])) == 2
        assert numerical_rank(np.zeros((2, 3))) == 0
        with pytest.raises(AmbiguityError):
            numerical_rank(np.diag([1.0, 1e-4, 5e-7]))


def test_superpartner_pairs():
    c = build_complex(complete_graph(3))
    d = exterior_derivative(c)
    L = laplacian(dirac(c)).entries
    pairs = superpartner_pairs(d)
    # nonzero spectrum of L is 3 (x2) on 0-forms and 1-forms, 3 on the 2-form
    assert len(pairs) == 3
    for lam, f, g in pairs:
        np.testing.assert_allclose(L @ f, lam * f, atol=1e-10)
        np.testing.assert_allclose(L @ g, lam * g, atol=1e-10)
        assert np.linalg.norm(g) == pytest.approx(1.0)


def test_dump_and_load():
    D = dirac(build_complex(complete_graph(3))) * (1 + 0.5j)
    doc = dump_operator(D)
    assert doc["n"] == 7 and doc["grading"] == [0, 0, 0, 1, 1, 1, 2]
    np.testing.assert_array_equal(load_operator(doc).entries, D.entries)
    with pytest.raises(ValidationError):
        load_operator({"n": 3, "grading": [0, 0, 1], "re": [0.0] * 4, "im": [0.0] * 4})
