"""
Explicit time stepping of the forced, damped network oscillation.

Each step applies, for every node ``i``,

    v_i <- v_i - (gamma v_i + sum_j w_ij (x_i - x_j)) dt  [+ F cos(omega t) dt on the driven node]
    x_i <- x_i + v_i dt                                   (with the pre-update v_i)

which is forward Euler on ``x'' + gamma x' + L x = F cos(omega t) 1_j``.
The coupling sum is the Laplacian product ``(L x)_i``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .analytic import StimulusSpec
from .errors import NumericalError
from .graph_core import LaplacianMatrix, WeightedDigraph, laplacian

DEFAULT_STRIDE = 10


class StabilityWarning(RuntimeWarning):
    """The time step is too coarse for the explicit scheme to stay bounded."""


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one simulation run.

    Attributes:
        dt: Time step.
        t_end: Final time; ``round(t_end / dt)`` steps are taken.
        stim: Driven node, amplitude, frequency and damping.
        initial_x, initial_v: Initial state; all zeros when None.
        stride: Store every ``stride``-th step.
        semi_implicit: Advance ``x`` with the updated velocity (symplectic Euler).
            Off by default; the reference scheme uses the pre-update velocity.
        reject_unstable: Raise instead of warning when the step fails a stability check.
    """

    dt: float
    t_end: float
    stim: StimulusSpec
    initial_x: np.ndarray | None = None
    initial_v: np.ndarray | None = None
    stride: int = DEFAULT_STRIDE
    semi_implicit: bool = False
    reject_unstable: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True)
class SimulationRun:
    """Stored trajectories; rows are sample times, columns nodes.

    ``K[k, i] = 0.5 * m[i] * v[k, i]**2`` is the kinetic energy of node ``i``.
    """

    times: np.ndarray
    x: np.ndarray
    v: np.ndarray
    K: np.ndarray
    m: np.ndarray
    config: SimConfig = field(repr=False)

    @property
    def sample_dt(self) -> float:
        return self.config.dt * self.config.stride

    def default_window(self) -> int:
        return default_ma_window(self.config.stim.omega, self.config.dt, self.config.stride, len(self.times))

    def smoothed_energy(self, window: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Centered moving average of ``K`` and the matching (centered) times."""
        window = self.default_window() if window is None else window
        return moving_average(self.times, window), moving_average(self.K, window)


def stability_report(dt: float, gamma: float, omega_max: float) -> list[str]:
    """Human-readable stability problems of the explicit scheme, empty when none.

    Two checks: the classical ``dt * omega_max < 2`` bound, and damping
    outrunning the scheme's amplitude growth, ``omega_max**2 * dt < gamma``.
    """
    problems = []
    if dt * omega_max >= 2:
        problems.append(f"dt * omega_max = {dt * omega_max:.3g} >= 2")
    if omega_max > 0 and omega_max**2 * dt >= gamma:
        problems.append(
            f"omega_max^2 * dt = {omega_max**2 * dt:.3g} >= gamma = {gamma:.3g}; the highest mode grows instead of decaying"
        )
    return problems


def step(x: np.ndarray, v: np.ndarray, L: np.ndarray, stim: StimulusSpec, t: float, dt: float,
         semi_implicit: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Advance ``(x, v)`` from ``t`` to ``t + dt``; returns new arrays."""
    accel = -(stim.gamma * v + L @ x)
    accel[stim.node] += stim.F * math.cos(stim.omega * t)
    v_next = v + accel * dt
    x_next = x + (v_next if semi_implicit else v) * dt
    if not (np.all(np.isfinite(x_next)) and np.all(np.isfinite(v_next))):
        raise NumericalError(f"non-finite state at t={t + dt:.6g}")
    return x_next, v_next


def run(graph: WeightedDigraph | LaplacianMatrix, m: np.ndarray, config: SimConfig,
        omega_max: float | None = None) -> SimulationRun:
    """Integrate from ``t = 0`` to ``config.t_end``.

    ``omega_max`` (largest eigenfrequency) feeds the stability checks; it is
    computed from the Laplacian when not supplied.

    Raises:
        NumericalError: the state stopped being finite.
        ValueError: unstable step with ``config.reject_unstable``.
    """
    L = graph.entries if isinstance(graph, LaplacianMatrix) else laplacian(graph).entries
    n = L.shape[0]
    stim = config.stim
    if not 0 <= stim.node < n:
        raise IndexError(f"driven node {stim.node} out of range [0, {n})")
    m = np.asarray(m, dtype=float)
    if omega_max is None:
        omega_max = math.sqrt(max(np.linalg.eigvals(L).real.max(), 0.0))
    problems = stability_report(config.dt, stim.gamma, omega_max)
    if problems:
        msg = "unstable time step: " + "; ".join(problems)
        if config.reject_unstable:
            raise ValueError(msg)
        warnings.warn(msg, StabilityWarning, stacklevel=2)

    x = np.zeros(n) if config.initial_x is None else np.array(config.initial_x, dtype=float)
    v = np.zeros(n) if config.initial_v is None else np.array(config.initial_v, dtype=float)
    if x.shape != (n,) or v.shape != (n,):
        raise ValueError(f"initial state must have shape ({n},)")

    dt, k = config.dt, config.stride
    total = config.n_steps
    n_samples = total // k + 1
    xs = np.empty((n_samples, n))
    vs = np.empty((n_samples, n))
    gamma, F, omega, j = stim.gamma, stim.F, stim.omega, stim.node
    semi = config.semi_implicit
    for s in range(total + 1):
        if s % k == 0:
            row = s // k
            if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
                bad = int(np.flatnonzero(~(np.isfinite(x) & np.isfinite(v)))[0])
                raise NumericalError(f"simulation blew up at t={s * dt:.6g} (node {bad}); reduce dt or raise gamma")
            xs[row] = x
            vs[row] = v
        if s == total:
            break
        accel = -(gamma * v + L @ x)
        accel[j] += F * math.cos(omega * s * dt)
        v_next = v + accel * dt
        x = x + (v_next if semi else v) * dt
        v = v_next
    times = np.arange(n_samples) * (dt * k)
    K = 0.5 * m[None, :] * vs**2
    return SimulationRun(times, xs, vs, K, m, config)


def moving_average(series, window: int) -> np.ndarray:
    """Centered simple moving average along the first axis ("valid" mode).

    Output length is ``len(series) - window + 1``; sample ``k`` of the output
    averages input samples ``k .. k + window - 1``.
    """
    y = np.asarray(series, dtype=float)
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if window > len(y):
        raise ValueError(f"window {window} longer than series ({len(y)} samples)")
    if window == 1:
        return y.copy()
    c = np.cumsum(y, axis=0)
    c = np.concatenate([np.zeros((1,) + y.shape[1:]), c], axis=0)
    return (c[window:] - c[:-window]) / window


def default_ma_window(omega: float, dt: float, stride: int = DEFAULT_STRIDE, n_samples: int | None = None) -> int:
    """Samples per driving period, ``ceil(2 pi / (omega dt stride))``, capped at ``n_samples``."""
    if omega <= 0:
        w = 1
    else:
        w = math.ceil(2 * math.pi / (omega * dt * stride) - 1e-9)
    if n_samples is not None:
        w = min(w, n_samples)
    return max(w, 1)
