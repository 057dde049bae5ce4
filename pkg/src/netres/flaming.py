"""
Resonance-shift model of flaming.

The network is assumed to restructure so that its eigenfrequency ``omega_nu``
(the largest nonzero one not exceeding the driving frequency) moves onto the
driving frequency. Every eigenfrequency is scaled by ``c = omega / omega_nu``,
which for a Laplacian is the same as multiplying every link weight by ``c**2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph_core import WeightedDigraph
from .spectral import Spectrum


class NoTargetModeError(ValueError):
    """The driving frequency lies below every nonzero eigenfrequency."""


@dataclass(frozen=True)
class RescalePlan:
    nu: int
    omega_nu: float
    omega: float
    c: float
    weight_factor: float

    def as_dict(self) -> dict:
        return dict(nu=self.nu, omega_nu=self.omega_nu, omega=self.omega, c=self.c, weight_factor=self.weight_factor)


def select_target_mode(spectrum: Spectrum, omega: float) -> int:
    """Index of the largest nonzero eigenfrequency ``<= omega``."""
    if omega <= 0:
        raise NoTargetModeError(f"driving frequency must be positive, got {omega}")
    om = spectrum.omegas
    # Relative slack so omega == omega_mu (up to rounding) selects mu.
    candidates = np.flatnonzero((om > 0) & (om <= omega * (1 + 1e-12)))
    if candidates.size == 0:
        positive = om[om > 0]
        lowest = positive.min() if positive.size else float("nan")
        raise NoTargetModeError(f"omega={omega} is below the smallest nonzero eigenfrequency {lowest}")
    return int(candidates[-1])


def plan_rescale(spectrum: Spectrum, omega: float) -> RescalePlan:
    nu = select_target_mode(spectrum, omega)
    omega_nu = float(spectrum.omegas[nu])
    c = max(omega / omega_nu, 1.0)
    return RescalePlan(nu, omega_nu, float(omega), c, c * c)


def rescale_network(g: WeightedDigraph, plan: RescalePlan) -> WeightedDigraph:
    """New graph with every link weight multiplied by ``plan.weight_factor``; ``g`` is untouched."""
    if plan.weight_factor == 1.0:
        return g
    return g.scaled(plan.weight_factor)
