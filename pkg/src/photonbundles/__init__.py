"""Deterministic multi-photon bundle emission from a strongly coupled atom-cavity system.

The package computes the strong-coupling spectrum of the atom-cavity block,
designs two-tone adiabatic-passage pulse trains that load a chosen photon
number into the cavity through a dressed dark state, propagates closed and
dissipative dynamics in the dressed interaction picture, unravels the master
equation into quantum-jump trajectories, and evaluates generalized
photon-number correlation functions of the emitted bundles.
"""

from .errors import SimulationError
from .hilbert import ModelParams, SpaceConfig
from .rabi import RabiSpectrum, compute_spectrum, diagonalize
from .drive import (
    AdiabaticityReport,
    BundleTarget,
    PulseTrain,
    RwaValidityReport,
    adiabaticity_report,
    mixing_angles,
    rwa_validity_report,
    solve_carriers,
    with_solved_carriers,
)
from .effective import analytic_g2_equal_time, build_lambda_system
from .dynamics import (
    DecayRates,
    DensityMatrix,
    DressedBasis,
    JumpChannel,
    TermRetention,
    build_dressed_basis,
    build_jump_channels,
    build_term_table,
    closed_retention,
    open_retention,
    propagate_closed,
    propagate_master,
    two_time_correlator,
)
from .mcwf import EnsembleResult, TrajectoryRecord, ensemble_average, jump_statistics, run_trajectory
from .observables import (
    BundleOperator,
    build_X,
    bundle_observables,
    find_extremum,
    g2_delayed,
    g2_equal_time,
    g2_from_expectations,
)
from .scenario import Scenario, load_scenario, save_scenario
from .timeseries import TimeSeries

__all__ = [
    "SimulationError",
    "ModelParams",
    "SpaceConfig",
    "RabiSpectrum",
    "compute_spectrum",
    "diagonalize",
    "AdiabaticityReport",
    "BundleTarget",
    "PulseTrain",
    "RwaValidityReport",
    "adiabaticity_report",
    "mixing_angles",
    "rwa_validity_report",
    "solve_carriers",
    "with_solved_carriers",
    "analytic_g2_equal_time",
    "build_lambda_system",
    "DecayRates",
    "DensityMatrix",
    "DressedBasis",
    "JumpChannel",
    "TermRetention",
    "build_dressed_basis",
    "build_jump_channels",
    "build_term_table",
    "closed_retention",
    "open_retention",
    "propagate_closed",
    "propagate_master",
    "two_time_correlator",
    "EnsembleResult",
    "TrajectoryRecord",
    "ensemble_average",
    "jump_statistics",
    "run_trajectory",
    "BundleOperator",
    "build_X",
    "bundle_observables",
    "find_extremum",
    "g2_delayed",
    "g2_equal_time",
    "g2_from_expectations",
    "Scenario",
    "load_scenario",
    "save_scenario",
    "TimeSeries",
]

__version__ = "0.1.0"
