import numpy as np
import pytest

from netres.data import path as data_path
from netres.graph_core import WeightedDigraph, load_graph, symmetrize
from netres.spectral import eigendecompose


def random_symmetrizable_graph(rng: np.random.Generator, n: int, p: float = 0.5) -> WeightedDigraph:
    """Connected symmetrizable digraph with weights in [0.5, 3].

    Masses m_i ~ U[1, 2] and link conductances s_ij ~ U[1, 3]; w_ij = s_ij / m_i
    makes m_i w_ij = m_j w_ji hold by construction.
    """
    m = rng.uniform(1.0, 2.0, n)
    order = rng.permutation(n)
    pairs = {tuple(sorted((int(order[k]), int(order[rng.integers(0, k)])))) for k in range(1, n)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                pairs.add((i, j))
    edges = []
    for i, j in sorted(pairs):
        s = rng.uniform(1.0, 3.0)
        edges += [(i, j, s / m[i]), (j, i, s / m[j])]
    return WeightedDigraph(n, tuple(edges))


def random_graphs(count: int, seed: int = 2024, n_min: int = 2, n_max: int = 8):
    rng = np.random.default_rng(seed)
    return [random_symmetrizable_graph(rng, int(rng.integers(n_min, n_max + 1))) for _ in range(count)]


def pipeline(g):
    sym = symmetrize(g)
    return sym, eigendecompose(sym)


@pytest.fixture(scope="session")
def chain2():
    return load_graph(data_path("chain2.txt"))


@pytest.fixture(scope="session")
def graph4():
    return load_graph(data_path("graph4.txt"))


@pytest.fixture(scope="session")
def graph5():
    return load_graph(data_path("graph5.txt"))


@pytest.fixture(scope="session")
def graph5_spectrum(graph5):
    return pipeline(graph5)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


# Filled by tests/test_acceptance.py; echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
