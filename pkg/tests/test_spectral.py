import numpy as np
import pytest

from conftest import pipeline, random_graphs
from netres.errors import NumericalError
from netres.graph_core import symmetrize
from netres.spectral import eigendecompose, mode_coefficients


def test_chain2_spectrum(chain2):
    _, spec = pipeline(chain2)
    np.testing.assert_allclose(spec.lambdas, [0, 2], atol=1e-12)
    np.testing.assert_allclose(spec.omegas, [0, np.sqrt(2)])
    s = 1 / np.sqrt(2)
    np.testing.assert_allclose(spec.vectors, [[s, s], [s, -s]])


# Frozen from an independent numpy.linalg.eigvals call on the bundled Laplacians.
BUNDLED_OMEGAS = {
    "graph4": [0.0, 1.61836, 1.96294, 2.34687],
    "graph5": [0.0, 1.51763, 2.22699, 2.50682, 3.01217],
}


@pytest.mark.parametrize("name", sorted(BUNDLED_OMEGAS))
def test_bundled_omegas(name, request):
    _, spec = pipeline(request.getfixturevalue(name))
    np.testing.assert_allclose(spec.omegas, BUNDLED_OMEGAS[name], atol=1e-5)


@pytest.mark.parametrize("g", random_graphs(25, seed=11))
def test_orthonormal_and_matches_nonsymmetric_solve(g):
    sym, spec = pipeline(g)
    V = spec.vectors
    np.testing.assert_allclose(V.T @ V, np.eye(g.n), atol=1e-10)
    np.testing.assert_allclose(V @ np.diag(spec.lambdas) @ V.T, sym.S0, atol=1e-9)
    direct = np.sort(np.linalg.eigvals(sym.laplacian.entries).real)
    np.testing.assert_allclose(spec.lambdas, direct, atol=1e-7)
    assert spec.lambdas[0] == 0.0
    np.testing.assert_allclose(V[:, 0], np.sqrt(spec.m / g.n), atol=1e-9)


def test_signs_canonical(graph5):
    _, spec = pipeline(graph5)
    for mu in range(spec.n):
        col = spec.mode(mu)
        assert col[np.flatnonzero(np.abs(col) > 1e-12)[0]] > 0


def test_mode_coefficients(graph5):
    _, spec = pipeline(graph5)
    np.testing.assert_array_equal(mode_coefficients(spec, 2), spec.vectors[2, :])
    with pytest.raises(IndexError):
        mode_coefficients(spec, 5)


def test_negative_eigenvalue_rejected():
    with pytest.raises(NumericalError):
        eigendecompose(np.array([[1.0, 0.0], [0.0, -1.0]]), m=np.ones(2))


def test_triangle_degenerate_spectrum():
    from netres.graph_core import WeightedDigraph

    g = WeightedDigraph(3, tuple((i, j, 1.0) for i in range(3) for j in range(3) if i != j))
    _, spec = pipeline(g)
    np.testing.assert_allclose(spec.lambdas, [0, 3, 3], atol=1e-12)
    np.testing.assert_allclose(spec.vectors.T @ spec.vectors, np.eye(3), atol=1e-12)


def test_asymmetric_pair_spectrum():
    r = np.sqrt(2)
    spec = eigendecompose(np.array([[2, -r], [-r, 1]]), m=np.array([2 / 3, 4 / 3]))
    np.testing.assert_allclose(spec.lambdas, [0, 3], atol=1e-12)


@pytest.mark.parametrize("g", random_graphs(10, seed=5))
def test_unit_vector_expansion(g):
    _, spec = pipeline(g)
    for j in range(g.n):
        b = mode_coefficients(spec, j)
        assert np.sum(b**2) == pytest.approx(1.0)
        np.testing.assert_allclose(spec.vectors @ b, np.eye(g.n)[j], atol=1e-9)
