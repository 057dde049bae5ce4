"""Modal basis of the scaled Laplacian."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .graph_core import SymmetrizationData

ZERO_TOL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition of ``S0``.

    Attributes:
        lambdas: Eigenvalues, ascending, with ``|lambda| < 1e-9`` clamped to 0.
        vectors: Orthonormal eigenvectors as columns, ``vectors[:, mu]``.
        omegas: Eigenfrequencies ``sqrt(lambdas)``.
        m: Node masses (left null vector) the basis was built with.
    """

    lambdas: np.ndarray
    vectors: np.ndarray
    omegas: np.ndarray
    m: np.ndarray

    @property
    def n(self) -> int:
        return len(self.lambdas)

    def mode(self, mu: int) -> np.ndarray:
        return self.vectors[:, mu]


def _canonical_signs(V: np.ndarray) -> np.ndarray:
    V = V.copy()
    for k in range(V.shape[1]):
        col = V[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            V[:, k] = -col
    return V


def eigendecompose(data: SymmetrizationData | np.ndarray, m: np.ndarray | None = None) -> Spectrum:
    """Orthonormal eigenbasis of ``S0``.

    Accepts a :class:`SymmetrizationData` or a bare symmetric matrix (then
    ``m`` defaults to all ones). Eigenvector signs are canonicalized so the
    first non-negligible component is positive.
    """
    if isinstance(data, SymmetrizationData):
        S0, m = data.S0, data.m
    else:
        S0 = np.asarray(data, dtype=float)
        m = np.ones(S0.shape[0]) if m is None else np.asarray(m, dtype=float)
    try:
        lambdas, V = np.linalg.eigh(0.5 * (S0 + S0.T))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    order = np.argsort(lambdas, kind="stable")
    lambdas, V = lambdas[order], V[:, order]
    lambdas = np.where(np.abs(lambdas) < ZERO_TOL, 0.0, lambdas)
    if lambdas.min() < 0:
        raise NumericalError(f"negative eigenvalue {lambdas.min():.3g}; S0 is not a Laplacian")
    return Spectrum(lambdas, _canonical_signs(V), np.sqrt(lambdas), m)


def mode_coefficients(spectrum: Spectrum, j: int) -> np.ndarray:
    """Coefficients ``b_mu = v_mu(j)`` expanding the unit vector at node ``j``."""
    if not 0 <= j < spectrum.n:
        raise IndexError(f"node {j} out of range [0, {spectrum.n})")
    return spectrum.vectors[j, :].copy()
