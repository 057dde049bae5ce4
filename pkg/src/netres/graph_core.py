"""
Weighted directed graphs and their Laplacians.

Graphs are read from a plain edge-list document::

    # comment
    3          <- node count
    0 1 1.0    <- edge i -> j with weight w_ij
    1 0 1.0

The Laplacian is ``L = D - A`` with ``D`` the weighted out-degree matrix.
For a strongly connected graph the left null vector ``m`` of ``L`` is
unique up to scale and strictly positive; the graph is symmetrizable when
``m_i w_ij = m_j w_ji`` for every linked pair, in which case
``S0 = M^{1/2} L M^{-1/2}`` is a real symmetric matrix with the spectrum
of ``L``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.linalg import null_space
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import GraphFormatError, ModelAssumptionError

ROW_SUM_TOL = 1e-12
NULL_VECTOR_TOL = 1e-9
SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class WeightedDigraph:
    """Immutable weighted directed graph on nodes ``0..n-1``.

    Attributes:
        n: Number of nodes.
        edges: Tuple of ``(i, j, w_ij)`` triples, one per directed link.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise GraphFormatError(f"node count must be a positive integer, got {self.n!r}")
        seen = set()
        clean = []
        for i, j, w in self.edges:
            i, j, w = int(i), int(j), float(w)
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphFormatError(f"edge ({i}, {j}) has a node index outside [0, {self.n})")
            if i == j:
                raise GraphFormatError(f"self-loop on node {i}")
            if not (w > 0 and np.isfinite(w)):
                raise GraphFormatError(f"edge ({i}, {j}) has non-positive weight {w}")
            if (i, j) in seen:
                raise GraphFormatError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            clean.append((i, j, w))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", tuple(clean))

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for i, j, w in self.edges:
            A[i, j] = w
        return A

    def weight(self, i: int, j: int) -> float:
        """Weight of link ``i -> j`` (0.0 when absent)."""
        for a, b, w in self.edges:
            if a == i and b == j:
                return w
        return 0.0

    def scaled(self, factor: float) -> "WeightedDigraph":
        """Copy with every weight multiplied by ``factor``."""
        return WeightedDigraph(self.n, tuple((i, j, w * factor) for i, j, w in self.edges))

    def is_strongly_connected(self) -> bool:
        if self.n == 1:
            return True
        ncomp, _ = connected_components(csr_matrix(self.adjacency()), directed=True, connection="strong")
        return ncomp == 1


@dataclass(frozen=True)
class LaplacianMatrix:
    """``L = D - A`` together with the weighted out-degrees ``d_i``."""

    entries: np.ndarray
    degree: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class SymmetrizationData:
    """Left null vector ``m`` and the symmetric scaled Laplacian ``S0``."""

    m: np.ndarray
    S0: np.ndarray
    laplacian: LaplacianMatrix


class SymmetryCheck(NamedTuple):
    symmetrizable: bool
    violations: list[tuple[int, int]]


def parse_graph(text: str) -> WeightedDigraph:
    """Parse an edge-list document; see the module docstring for the format.

    Raises:
        GraphFormatError: malformed line, bad index, self-loop, non-positive
            weight or duplicate edge. The message carries the line number.
    """
    n = None
    edges: list[tuple[int, int, float]] = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 1:
                raise GraphFormatError("expected the node count on its own line", lineno)
            try:
                n = int(fields[0])
            except ValueError:
                raise GraphFormatError(f"node count {fields[0]!r} is not an integer", lineno) from None
            if n < 1:
                raise GraphFormatError(f"node count must be positive, got {n}", lineno)
            continue
        if len(fields) != 3:
            raise GraphFormatError(f"expected 'i j w', got {line!r}", lineno)
        try:
            i, j = int(fields[0]), int(fields[1])
            w = float(fields[2])
        except ValueError:
            raise GraphFormatError(f"cannot parse edge {line!r}", lineno) from None
        if not (0 <= i < n and 0 <= j < n):
            raise GraphFormatError(f"node index out of range [0, {n})", lineno)
        if i == j:
            raise GraphFormatError(f"self-loop on node {i}", lineno)
        if not (w > 0 and np.isfinite(w)):
            raise GraphFormatError(f"non-positive weight {fields[2]}", lineno)
        if (i, j) in seen:
            raise GraphFormatError(f"duplicate edge ({i}, {j}), first seen on line {seen[i, j]}", lineno)
        seen[i, j] = lineno
        edges.append((i, j, w))
    if n is None:
        raise GraphFormatError("empty document: missing node count")
    return WeightedDigraph(n, tuple(edges))


def load_graph(path: str | Path) -> WeightedDigraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def format_graph(g: WeightedDigraph) -> str:
    """Serialize ``g`` in the edge-list format (weights written with ``repr`` precision)."""
    lines = [str(g.n)]
    lines += [f"{i} {j} {w!r}" for i, j, w in g.edges]
    return "\n".join(lines) + "\n"


def laplacian(g: WeightedDigraph) -> LaplacianMatrix:
    A = g.adjacency()
    d = A.sum(axis=1)
    L = np.diag(d) - A
    # Row sums vanish by construction; guard against silent corruption anyway.
    assert np.all(np.abs(L.sum(axis=1)) <= ROW_SUM_TOL * max(1.0, d.max(initial=0.0)))
    return LaplacianMatrix(L, d)


def _norm_inf(a: np.ndarray) -> float:
    return float(np.abs(a).sum(axis=1).max()) if a.size else 0.0


def left_null_vector(L: LaplacianMatrix, normalize: bool = True, tol: float = NULL_VECTOR_TOL) -> np.ndarray:
    """Positive left null vector ``m`` with ``m @ L = 0``.

    Normalized to ``sum(m) == n`` unless ``normalize`` is False, in which case
    the raw unit-norm solution (made positive) is returned.

    Raises:
        ModelAssumptionError: the null space is not one-dimensional or has no
            strictly positive representative (graph not strongly connected).
    """
    entries = L.entries
    n = entries.shape[0]
    adjacency_mask = (entries != 0) & ~np.eye(n, dtype=bool)
    ncomp, _ = connected_components(csr_matrix(adjacency_mask), directed=True, connection="strong")
    if ncomp != 1:
        raise ModelAssumptionError(f"graph is not strongly connected ({ncomp} strong components)")
    scale = max(_norm_inf(entries), 1.0)
    ns = null_space(entries.T, rcond=tol)
    if ns.shape[1] != 1:
        raise ModelAssumptionError(f"left null space has dimension {ns.shape[1]}, expected 1")
    m = ns[:, 0]
    m = m if m.sum() > 0 else -m
    if np.any(m <= 0):
        raise ModelAssumptionError("left null vector has non-positive components")
    if normalize:
        m = m * (n / m.sum())
    residual = np.abs(m @ entries).max()
    if residual > tol * scale * np.abs(m).max():
        raise ModelAssumptionError(f"left null vector residual {residual:.3g} exceeds tolerance")
    return m


def check_symmetrizable(g: WeightedDigraph, m: np.ndarray, rtol: float = SYMMETRY_TOL) -> SymmetryCheck:
    """Test ``m_i w_ij == m_j w_ji`` for every link; one-way links always violate."""
    A = g.adjacency()
    violations = []
    for i, j, w in g.edges:
        back = A[j, i]
        lhs, rhs = m[i] * w, m[j] * back
        if back <= 0 or abs(lhs - rhs) > rtol * max(abs(lhs), abs(rhs)):
            violations.append((i, j))
    return SymmetryCheck(not violations, violations)


def scaled_laplacian(L: LaplacianMatrix, m: np.ndarray, tol: float = SYMMETRY_TOL) -> SymmetrizationData:
    """Compute ``S0 = M^{1/2} L M^{-1/2}``.

    ``m`` may carry any positive scale; ``S0`` does not depend on it.

    Raises:
        ModelAssumptionError: ``S0`` is not symmetric within ``tol * ||S0||_inf``.
    """
    m = np.asarray(m, dtype=float)
    root = np.sqrt(m)
    S0 = root[:, None] * L.entries / root[None, :]
    asym = np.abs(S0 - S0.T).max(initial=0.0)
    if asym > tol * max(_norm_inf(S0), 1e-300):
        bad = np.argwhere(np.abs(S0 - S0.T) > tol * _norm_inf(S0))
        pairs = sorted({(int(min(a, b)), int(max(a, b))) for a, b in bad})
        raise ModelAssumptionError(f"scaled Laplacian asymmetry {asym:.3g}: graph is not symmetrizable", pairs)
    return SymmetrizationData(m, S0, L)


def symmetrize(g: WeightedDigraph, tol: float = SYMMETRY_TOL) -> SymmetrizationData:
    """Full pipeline: Laplacian, left null vector, symmetrizability check, ``S0``.

    Raises:
        ModelAssumptionError: with the violating pairs when ``g`` is not symmetrizable.
    """
    L = laplacian(g)
    m = left_null_vector(L)
    check = check_symmetrizable(g, m, rtol=tol)
    if not check.symmetrizable:
        pairs = ", ".join(f"{i}->{j}" for i, j in check.violations)
        raise ModelAssumptionError(f"graph is not symmetrizable; violating links: {pairs}", check.violations)
    return scaled_laplacian(L, m, tol=tol)
