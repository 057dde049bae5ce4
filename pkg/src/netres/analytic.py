"""
Closed-form stationary response of the driven, damped network.

A periodic force ``F cos(omega t)`` on node ``j`` excites each mode ``mu``
independently. In the stationary state mode ``mu`` oscillates with amplitude

    A_mu = sqrt(m_j) F v_mu(j) / sqrt((omega_mu^2 - omega^2)^2 + (gamma omega)^2)

and phase lag ``theta_mu = atan2(-gamma omega, omega_mu^2 - omega^2)``.
The per-node oscillation energy is ``E_i = 1/2 omega^2 sum_mu A_mu^2 v_mu(i)^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError
from .spectral import Spectrum

RESONANCE_TOL = 1e-12
DEFAULT_SWEEP_STEPS = 2000
DEFAULT_SWEEP_SPAN = 1.2


@dataclass(frozen=True)
class StimulusSpec:
    """Periodic stimulus ``F cos(omega t)`` on node ``node`` with damping ``gamma``.

    ``F = 0`` describes free, damped evolution.
    """

    node: int
    F: float = 1.0
    omega: float = 1.0
    gamma: float = 0.02

    def __post_init__(self):
        if self.F < 0:
            raise ValueError(f"stimulus amplitude must be non-negative, got {self.F}")
        if self.omega < 0:
            raise ValueError(f"driving frequency must be non-negative, got {self.omega}")
        if self.gamma < 0:
            raise ValueError(f"damping must be non-negative, got {self.gamma}")

    def with_(self, **changes) -> "StimulusSpec":
        fields = dict(node=self.node, F=self.F, omega=self.omega, gamma=self.gamma)
        fields.update(changes)
        return StimulusSpec(**fields)


def _check_node(spectrum: Spectrum, node: int) -> None:
    if not 0 <= node < spectrum.n:
        raise IndexError(f"node {node} out of range [0, {spectrum.n})")


def _denominators(spectrum: Spectrum, stim: StimulusSpec) -> np.ndarray:
    w = stim.omega
    denom = np.sqrt((spectrum.lambdas - w * w) ** 2 + (stim.gamma * w) ** 2)
    hit = (stim.gamma == 0 and np.abs(spectrum.omegas - w) < RESONANCE_TOL) | (denom == 0)
    if np.any(hit):
        mu = int(np.flatnonzero(hit)[0])
        raise DivergenceError(
            f"stationary amplitude of mode {mu} diverges (omega={w}, omega_mu={spectrum.omegas[mu]}, gamma={stim.gamma})"
        )
    return denom


def modal_amplitudes(spectrum: Spectrum, stim: StimulusSpec) -> np.ndarray:
    """Signed amplitudes ``A_mu`` for every mode; the sign is that of ``v_mu(j)``."""
    _check_node(spectrum, stim.node)
    j = stim.node
    return np.sqrt(spectrum.m[j]) * stim.F * spectrum.vectors[j, :] / _denominators(spectrum, stim)


def modal_amplitude(spectrum: Spectrum, stim: StimulusSpec, mu: int) -> float:
    return float(modal_amplitudes(spectrum, stim)[mu])


def modal_phases(spectrum: Spectrum, stim: StimulusSpec) -> np.ndarray:
    """Phase lags in ``(-pi, 0]``, continuous through each resonance."""
    w = stim.omega
    theta = np.arctan2(-stim.gamma * w, spectrum.lambdas - w * w)
    # atan2(-0.0, negative) gives -pi; atan2(0.0, negative) gives +pi. Keep the lag convention.
    return np.where(theta > 0, -np.pi, theta)


def modal_phase(spectrum: Spectrum, stim: StimulusSpec, mu: int) -> float:
    return float(modal_phases(spectrum, stim)[mu])


def stationary_solution(spectrum: Spectrum, stim: StimulusSpec, t) -> np.ndarray:
    """Node states ``x(t) = M^{-1/2} sum_mu A_mu cos(omega t + theta_mu) v_mu``.

    ``t`` may be a scalar (returns shape ``(n,)``) or an array (shape ``(len(t), n)``).
    """
    if stim.gamma <= 0:
        raise ValueError("a stationary state requires gamma > 0")
    A = modal_amplitudes(spectrum, stim)
    theta = modal_phases(spectrum, stim)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    a = A[None, :] * np.cos(stim.omega * t_arr[:, None] + theta[None, :])
    x = (a @ spectrum.vectors.T) / np.sqrt(spectrum.m)[None, :]
    return x[0] if np.ndim(t) == 0 else x


def stationary_velocity(spectrum: Spectrum, stim: StimulusSpec, t) -> np.ndarray:
    """Time derivative of :func:`stationary_solution`."""
    if stim.gamma <= 0:
        raise ValueError("a stationary state requires gamma > 0")
    A = modal_amplitudes(spectrum, stim)
    theta = modal_phases(spectrum, stim)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    a = -stim.omega * A[None, :] * np.sin(stim.omega * t_arr[:, None] + theta[None, :])
    v = (a @ spectrum.vectors.T) / np.sqrt(spectrum.m)[None, :]
    return v[0] if np.ndim(t) == 0 else v


def _energy_gain(lambdas: np.ndarray, omega: np.ndarray, gamma: float) -> np.ndarray:
    """``omega^2 / ((lambda - omega^2)^2 + (gamma omega)^2)`` on a grid, shape ``(len(omega), n_modes)``.

    The zero mode is evaluated in its cancelled form ``1 / (omega^2 + gamma^2)``,
    which stays finite at ``omega = 0`` when ``gamma > 0``.
    """
    w2 = (omega**2)[:, None]
    lam = lambdas[None, :]
    zero = lam == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        general = w2 / ((lam - w2) ** 2 + gamma**2 * w2)
        free = 1.0 / (w2 + gamma**2)
    gain = np.where(zero, free, general)
    if not np.all(np.isfinite(gain)):
        k = np.argwhere(~np.isfinite(gain))[0]
        raise DivergenceError(f"oscillation energy diverges at omega={omega[k[0]]} (mode {k[1]}, gamma={gamma})")
    return gain


def oscillation_energies(spectrum: Spectrum, stim: StimulusSpec) -> np.ndarray:
    """Energies ``E_i`` for every node at the stimulus frequency."""
    return energy_grid(spectrum, stim, np.array([stim.omega]))[0]


def oscillation_energy(spectrum: Spectrum, stim: StimulusSpec, i: int) -> float:
    _check_node(spectrum, i)
    return float(oscillation_energies(spectrum, stim)[i])


def energy_grid(spectrum: Spectrum, stim: StimulusSpec, omegas) -> np.ndarray:
    """``E_i(omega)`` for each ``omega`` in ``omegas``; shape ``(len(omegas), n)``."""
    _check_node(spectrum, stim.node)
    omegas = np.asarray(omegas, dtype=float)
    j = stim.node
    gain = _energy_gain(spectrum.lambdas, omegas, stim.gamma)
    if stim.gamma == 0:
        near = np.abs(omegas[:, None] - spectrum.omegas[None, :]) < RESONANCE_TOL
        if np.any(near & (spectrum.vectors[j, :] != 0)[None, :]):
            raise DivergenceError("undamped drive exactly at an eigenfrequency")
    weights = spectrum.m[j] * stim.F**2 * spectrum.vectors[j, :] ** 2  # per mode
    return 0.5 * (gain * weights[None, :]) @ (spectrum.vectors.T**2)


def resonance_peak(omega_mu: float, gamma: float) -> float | None:
    """Driving frequency maximizing ``|A_mu|``: ``sqrt(omega_mu^2 - gamma^2 / 2)``.

    Returns None for an overdamped mode (``omega_mu^2 <= gamma^2 / 2``), which has no interior peak.
    """
    arg = omega_mu * omega_mu - 0.5 * gamma * gamma
    if gamma > 0 and arg <= 0:
        return None
    return float(np.sqrt(max(arg, 0.0)))


def default_grid(spectrum: Spectrum, steps: int = DEFAULT_SWEEP_STEPS, span: float = DEFAULT_SWEEP_SPAN) -> np.ndarray:
    return np.linspace(0.0, span * spectrum.omegas[-1], steps)


@dataclass(frozen=True)
class SweepResult:
    """Energy table from :func:`energy_sweep`; ``energies[k, i]`` is ``E_i(omegas[k])``."""

    omegas: np.ndarray
    energies: np.ndarray
    stim: StimulusSpec

    @property
    def step(self) -> float:
        return float(self.omegas[1] - self.omegas[0]) if len(self.omegas) > 1 else 0.0

    def rows(self):
        """Yield ``(omega, node, energy)`` rows in the CSV column order."""
        for k, w in enumerate(self.omegas):
            for i, e in enumerate(self.energies[k]):
                yield float(w), i, float(e)

    def peak_near(self, node: int, center: float, half_width: float) -> float:
        """Grid ``omega`` maximizing ``E_node`` within ``[center - half_width, center + half_width]``."""
        mask = np.abs(self.omegas - center) <= half_width
        if not mask.any():
            raise ValueError(f"no grid point within {half_width} of {center}")
        idx = np.flatnonzero(mask)
        return float(self.omegas[idx[np.argmax(self.energies[idx, node])]])


def energy_sweep(spectrum: Spectrum, stim: StimulusSpec, omega_grid=None, steps: int = DEFAULT_SWEEP_STEPS) -> SweepResult:
    """Evaluate ``E_i(omega)`` for all nodes over a frequency grid.

    The default grid is ``steps`` uniform points on ``[0, 1.2 * omega_max]``.
    ``stim.omega`` is ignored; the grid supplies the driving frequencies.
    """
    if stim.gamma <= 0:
        raise ValueError("energy sweeps require gamma > 0")
    omegas = default_grid(spectrum, steps) if omega_grid is None else np.asarray(omega_grid, dtype=float)
    return SweepResult(omegas, energy_grid(spectrum, stim, omegas), stim)


def mode_window(spectrum: Spectrum, mu: int, upper: float | None = None) -> tuple[float, float]:
    """Frequency interval attributed to mode ``mu``: halfway to the neighbouring distinct eigenfrequencies."""
    om = spectrum.omegas
    w = om[mu]
    lower_nb = om[om < w - RESONANCE_TOL]
    upper_nb = om[om > w + RESONANCE_TOL]
    lo = 0.5 * (w + lower_nb.max()) if lower_nb.size else 0.0
    if upper_nb.size:
        hi = 0.5 * (w + upper_nb.min())
    else:
        hi = upper if upper is not None else 2 * w
    return lo, hi
