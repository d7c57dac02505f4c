"""Asymptotic-preserving IMEX-RK finite volume solver for the scaled linear
wave equation system with advection, on periodic 1D/2D grids."""

from .diagnostics import (DefectReport, defect_report, distance_to_wellprepared, energy,
                          helmholtz_project, kinetic_energy, wellprepared_defect)
from .errors import ConfigurationError, NumericalBlowup, SolverFailure
from .grid import ModelParams, PeriodicGrid, State, central_derivative, delta, mu, norm
from .harness import EocRow, EocTable, RunConfig, run_aoc, run_ap, run_eoc, run_vortex
from .implicit_solver import (CirculantOperator, StageSolver, StageSystem, circulant_spectrum,
                              dense_stage_oracle, difference_generator, solve_stage)
from .problems import (ProblemSpec, cosine_wave, from_scaled, make_problem, schneider_vortex,
                       to_scaled, travelling_vortex, well_prepared_2d)
from .spatial import (InterfaceStates, central_flux, explicit_tendency, implicit_tendency,
                      muscl_reconstruct, rusanov_flux)
from .stepper import RunResult, StepContext, compute_dt, imex_step, run
from .tableau import (IMEXTableau, TableauType, builtin_tableau, check_order_conditions,
                      classify)

__version__ = "0.1.0"

__all__ = [
    "CirculantOperator", "ConfigurationError", "DefectReport", "EocRow", "EocTable",
    "IMEXTableau", "InterfaceStates", "ModelParams", "NumericalBlowup", "PeriodicGrid",
    "ProblemSpec", "RunConfig", "RunResult", "SolverFailure", "StageSolver", "StageSystem",
    "State", "StepContext", "TableauType", "builtin_tableau", "central_derivative",
    "central_flux", "check_order_conditions", "circulant_spectrum", "classify", "compute_dt",
    "cosine_wave", "defect_report", "delta", "dense_stage_oracle", "difference_generator",
    "distance_to_wellprepared", "energy", "explicit_tendency", "from_scaled",
    "helmholtz_project", "imex_step", "implicit_tendency", "kinetic_energy", "make_problem",
    "mu", "muscl_reconstruct", "norm", "run", "run_aoc", "run_ap", "run_eoc", "run_vortex",
    "rusanov_flux", "schneider_vortex", "solve_stage", "to_scaled", "travelling_vortex",
    "well_prepared_2d", "wellprepared_defect",
]
