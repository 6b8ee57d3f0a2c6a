"""Bimodal bathtub commute equilibria with optional perimeter gating."""

from .scenario import (
    DerivedParams,
    ScenarioError,
    ScenarioParams,
    derive_params,
    load_scenario,
    parse_scenario,
    replace_param,
)
from .dynamics import Mode
from .equilibrium_ue import SolverError, UeRegime, UeSolution, solve_ue
from .equilibrium_pc import PcRegime, PcSolution, solve_pc
from .oracle import VerificationReport, verify
from .profiles import PiecewiseProfile, knot_grid

__all__ = [
    "DerivedParams",
    "Mode",
    "PcRegime",
    "PcSolution",
    "PiecewiseProfile",
    "ScenarioError",
    "ScenarioParams",
    "SolverError",
    "UeRegime",
    "UeSolution",
    "VerificationReport",
    "derive_params",
    "knot_grid",
    "load_scenario",
    "parse_scenario",
    "replace_param",
    "solve_pc",
    "solve_ue",
    "verify",
]
