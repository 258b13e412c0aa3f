"""Single-photon scattering in two waveguides bridged by a two-level and a
lambda-type atom: closed-form amplitudes, an independent boundary-matching
solver, spectral sweeps, and parameter search."""

from .closed_form import (
    GiantAtomParams,
    SemiInfiniteParams,
    SmallAtomParams,
    giant_forward,
    giant_reverse,
    semi_infinite_forward,
    semi_infinite_reverse,
    small_overlap_forward,
    small_reverse,
    small_separated_forward,
)
from .core import (
    AtomSpec,
    ConfigError,
    CouplingLeg,
    DegenerateConfigError,
    EnergyScale,
    IncidentWave,
    InvalidAmplitudeError,
    NoFeasiblePointError,
    PhaseModel,
    ScatterAmplitudes,
    SingularityError,
    SystemConfig,
    TransferRates,
    combine_directions,
    effective_phases,
    effective_separation_phases,
    rates_from_amplitudes,
)
from .search import Bounds, Fixed, Linked, Objective, SearchReport, grid_refine_search
from .solver import ChannelLayout, LinearSystem, assemble, build_layout, solve
from .sweep import (
    Axis,
    FigurePreset,
    PhaseAxis,
    SweepResult,
    SweepSpec,
    figure_preset,
    isolation_report,
    run_sweep,
)
from .validate import ValidationReport, run_validation

__version__ = "0.1.0"

__all__ = [
    "AtomSpec",
    "Axis",
    "Bounds",
    "ChannelLayout",
    "ConfigError",
    "CouplingLeg",
    "DegenerateConfigError",
    "EnergyScale",
    "FigurePreset",
    "Fixed",
    "GiantAtomParams",
    "IncidentWave",
    "InvalidAmplitudeError",
    "LinearSystem",
    "Linked",
    "NoFeasiblePointError",
    "Objective",
    "PhaseAxis",
    "PhaseModel",
    "ScatterAmplitudes",
    "SearchReport",
    "SemiInfiniteParams",
    "SingularityError",
    "SmallAtomParams",
    "SweepResult",
    "SweepSpec",
    "SystemConfig",
    "TransferRates",
    "ValidationReport",
    "assemble",
    "build_layout",
    "combine_directions",
    "effective_phases",
    "effective_separation_phases",
    "figure_preset",
    "giant_forward",
    "giant_reverse",
    "grid_refine_search",
    "isolation_report",
    "rates_from_amplitudes",
    "run_sweep",
    "run_validation",
    "semi_infinite_forward",
    "semi_infinite_reverse",
    "small_overlap_forward",
    "small_reverse",
    "small_separated_forward",
    "solve",
]
