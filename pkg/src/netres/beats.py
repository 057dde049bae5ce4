"""
Beats in the transient response and their detection.

Started from rest and driven near an eigenfrequency, mode ``mu`` follows

    a_mu(t) = A_mu sin(omega t) - A_mu e^{-gamma t / 2} sin(omega'_mu t),
    omega'_mu = sqrt(omega_mu^2 - (gamma / 2)^2),

(the stationary phase is -pi/2 at resonance, so the free oscillation enters
with the opposite sign), which for small ``t`` is the product ``2 A_mu cos((omega + omega'_mu) t / 2) sin((omega - omega'_mu) t / 2)``.
The slow factor modulates the kinetic energy at ``|omega - omega'_mu|``; a
low-frequency modulation of that kind is what :func:`detect_beats` looks for.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .analytic import StimulusSpec, modal_amplitude
from .simulator import moving_average
from .spectral import Spectrum


class OverdampedModeError(ValueError):
    """Mode has ``omega_mu <= gamma / 2`` and does not oscillate."""


def damped_frequency(omega_mu: float, gamma: float) -> float:
    """``sqrt(omega_mu^2 - (gamma/2)^2)``; raises :class:`OverdampedModeError` if not real and positive."""
    arg = omega_mu * omega_mu - 0.25 * gamma * gamma
    if arg <= 0:
        raise OverdampedModeError(f"mode with omega_mu={omega_mu} is overdamped at gamma={gamma}")
    return math.sqrt(arg)


def transient_modal_solution(spectrum: Spectrum, stim: StimulusSpec, mu: int, t):
    """Modal coordinate after a start from rest, valid for ``omega`` near ``omega_mu`` and small ``gamma``.

    Vanishes at ``t = 0``; its slope there, ``A_mu (omega - omega'_mu)``, tends
    to zero as the drive approaches the damped eigenfrequency.
    """
    wp = damped_frequency(spectrum.omegas[mu], stim.gamma)
    A = modal_amplitude(spectrum, stim, mu)
    t = np.asarray(t, dtype=float)
    return A * np.sin(stim.omega * t) - A * np.exp(-0.5 * stim.gamma * t) * np.sin(wp * t)


def beat_approximation(spectrum: Spectrum, stim: StimulusSpec, mu: int, t):
    """Sum-to-product form of :func:`transient_modal_solution` with the decay dropped."""
    wp = damped_frequency(spectrum.omegas[mu], stim.gamma)
    A = modal_amplitude(spectrum, stim, mu)
    t = np.asarray(t, dtype=float)
    return 2 * A * np.cos(0.5 * (stim.omega + wp) * t) * np.sin(0.5 * (stim.omega - wp) * t)


def nearest_mode(spectrum: Spectrum, omega: float) -> int:
    """Nonzero mode whose eigenfrequency is closest to ``omega``."""
    candidates = np.flatnonzero(spectrum.omegas > 0)
    return int(candidates[np.argmin(np.abs(spectrum.omegas[candidates] - omega))])


def predicted_beat_frequency(spectrum: Spectrum, omega: float, gamma: float, domain: str = "energy") -> tuple[int, float]:
    """Nearest mode and its beat frequency.

    ``domain="energy"`` gives ``|omega - omega'_mu|`` (what kinetic-energy
    series show); ``"amplitude"`` gives half of that.
    """
    mu = nearest_mode(spectrum, omega)
    f = abs(omega - damped_frequency(spectrum.omegas[mu], gamma))
    return mu, f if domain == "energy" else 0.5 * f


@dataclass(frozen=True)
class BeatConfig:
    """Detector thresholds.

    Attributes:
        min_depth: A local minimum qualifies when it dips at least this
            fraction below the higher of its two surrounding maxima.
        max_spacing_cv: Largest coefficient of variation of the spacing
            between qualifying minima still counted as regular beats.
        low_freq_ratio: Beats must be slow: envelope frequency at most this
            fraction of the driving frequency (checked when it is known).
        presmooth_periods: Length, in driving periods, of the moving average
            applied twice before the search; suppresses ripple left by
            off-resonant modes. 0 disables it.
        domain: "energy" or "amplitude" for reported predicted frequencies.
        tail_fraction: Trailing share of the series averaged into ``converged_energy``.
    """

    min_depth: float = 0.005
    max_spacing_cv: float = 0.3
    low_freq_ratio: float = 0.1
    presmooth_periods: float = 2.5
    domain: str = "energy"
    tail_fraction: float = 0.1


@dataclass
class BeatReport:
    detected: bool
    envelope_frequency: float | None
    predicted_frequency: float | None
    envelope_minima_times: list[float]
    amplitude_growth: float | None
    converged_energy: float
    spacing_cv: float | None = None
    omega: float | None = None
    mode: int | None = None
    domain: str = "energy"
    node: int | None = None
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def detect_beats(series, times, *, omega: float | None = None, spectrum: Spectrum | None = None,
                 gamma: float | None = None, config: BeatConfig = BeatConfig(), node: int | None = None) -> BeatReport:
    """Find regular low-frequency dips in a smoothed kinetic-energy series.

    ``omega`` (driving frequency) enables pre-smoothing and the slowness test;
    ``spectrum`` with ``gamma`` adds the predicted frequency of the nearest mode.
    Frequencies are angular, ``2 pi / mean spacing`` of the qualifying minima.

    Raises:
        ValueError: fewer than 3 samples, or mismatched lengths.
    """
    y = np.asarray(series, dtype=float)
    t = np.asarray(times, dtype=float)
    if y.shape != t.shape or y.ndim != 1:
        raise ValueError("series and times must be 1-D arrays of equal length")
    if len(y) < 3:
        raise ValueError(f"series too short for beat detection ({len(y)} samples)")
    notes = []
    if config.presmooth_periods > 0 and omega and omega > 0:
        h = t[1] - t[0]
        w = max(1, int(round(config.presmooth_periods * 2 * math.pi / omega / h)))
        if 2 * w < len(y) - 2:
            for _ in range(2):
                y, t = moving_average(y, w), moving_average(t, w)
        else:
            notes.append("series too short to pre-smooth; skipped")

    mins, props = find_peaks(-y, prominence=0)
    ref = y[mins] + props["prominences"]
    with np.errstate(divide="ignore", invalid="ignore"):
        depth = np.where(ref > 0, props["prominences"] / ref, 0.0)
    qual = mins[depth >= config.min_depth]
    min_times = [float(x) for x in t[qual]]

    env_freq = cv = None
    if len(qual) >= 2:
        gaps = np.diff(t[qual])
        env_freq = 2 * math.pi / gaps.mean()
        cv = float(gaps.std() / gaps.mean()) if len(gaps) > 1 else 0.0
    detected = env_freq is not None and cv < config.max_spacing_cv
    if detected and omega:
        if env_freq > config.low_freq_ratio * omega:
            detected = False
            notes.append(f"modulation at {env_freq:.4g} is not slow relative to omega={omega:.4g}")
    if env_freq is not None and not detected and cv >= config.max_spacing_cv:
        notes.append(f"irregular minima spacing (cv={cv:.3g})")

    mode = pred = None
    if spectrum is not None and omega and gamma is not None:
        mode, pred = predicted_beat_frequency(spectrum, omega, gamma, config.domain)
    if env_freq is not None and config.domain == "amplitude":
        env_freq *= 0.5

    third = max(1, len(y) // 3)
    early = y[:third].max()
    growth = float(y[-third:].max() / early) if early > 0 else None
    tail = max(1, int(len(y) * config.tail_fraction))
    return BeatReport(
        detected=bool(detected),
        envelope_frequency=env_freq,
        predicted_frequency=pred,
        envelope_minima_times=min_times,
        amplitude_growth=growth,
        converged_energy=float(y[-tail:].mean()),
        spacing_cv=cv,
        omega=omega,
        mode=mode,
        domain=config.domain,
        node=node,
        notes=notes,
    )


def omen_score(report: BeatReport, peak_energy: float, config: BeatConfig = BeatConfig()) -> float:
    """Scalar flaming omen in ``[0, 1]``; 0 when no beats were detected.

    score = energy_term * slowness_term, with

    * ``energy_term = clip(converged_energy / peak_energy, 0, 1)``, where
      ``peak_energy`` is the node's analytic energy at the resonance peak;
    * ``slowness_term = 1 - f / (low_freq_ratio * omega)`` when the driving
      frequency is known, else ``1 / (1 + f)``, with ``f`` the envelope frequency.

    Both factors grow as the drive approaches the eigenfrequency.
    """
    if not report.detected or report.envelope_frequency is None or peak_energy <= 0:
        return 0.0
    energy_term = min(max(report.converged_energy / peak_energy, 0.0), 1.0)
    f = report.envelope_frequency * (2.0 if report.domain == "amplitude" else 1.0)
    if report.omega:
        slowness = 1.0 - f / (config.low_freq_ratio * report.omega)
    else:
        slowness = 1.0 / (1.0 + f)
    return float(min(max(energy_term * slowness, 0.0), 1.0))
