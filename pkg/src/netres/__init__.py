"""Forced-oscillation resonance, beats and a flaming model on weighted directed networks."""

from .analytic import (
    StimulusSpec,
    SweepResult,
    energy_sweep,
    modal_amplitude,
    modal_phase,
    oscillation_energy,
    oscillation_energies,
    resonance_peak,
    stationary_solution,
)
from .beats import BeatConfig, BeatReport, beat_approximation, detect_beats, omen_score, transient_modal_solution
from .errors import DivergenceError, GraphFormatError, ModelAssumptionError, NetresError, NumericalError
from .flaming import RescalePlan, plan_rescale, rescale_network, select_target_mode
from .graph_core import (
    LaplacianMatrix,
    SymmetrizationData,
    WeightedDigraph,
    check_symmetrizable,
    laplacian,
    left_null_vector,
    load_graph,
    parse_graph,
    scaled_laplacian,
    symmetrize,
)
from .simulator import SimConfig, SimulationRun, moving_average, run
from .spectral import Spectrum, eigendecompose, mode_coefficients

__version__ = "0.1.0"
