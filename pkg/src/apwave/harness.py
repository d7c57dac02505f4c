"""Experiment drivers: convergence tables, energy and defect time series.

Error norms reported here are domain-averaged (per-cell mean) L1/L2 norms of
the difference to the reference solution sampled at cell centers.  The
averaging keeps table magnitudes independent of the domain size, matching
the convention the reference tables' internal L2/L1 ratios pin down; orders
of convergence are unaffected by the normalization either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .diagnostics import kinetic_energy, wellprepared_defect
from .errors import ConfigurationError
from .grid import State
from .problems import ProblemSpec, make_problem
from .stepper import run
from .tableau import builtin_tableau


@dataclass(frozen=True)
class RunConfig:
    """Configuration shared by the experiment drivers."""

    problem: str = "cosine_wave"
    epsilon: float = 1.0
    tableau: str = "ARS222"
    cfl: float = 0.45
    meshes: tuple[int, ...] = ()        # per-axis sizes for convergence sweeps
    mesh: tuple[int, ...] | None = None  # explicit mesh for single runs
    t_final: float | None = None
    solver_tol: float = 1e-12
    observe_every: int = 1
    epsilons: tuple[float, ...] = ()    # sweep values for the vortex driver

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise ConfigurationError(f"CFL number must lie in (0, 1), got {self.cfl}")
        if self.meshes and list(self.meshes) != sorted(set(self.meshes)):
            raise ConfigurationError(f"mesh sizes must be strictly increasing: {self.meshes}")
        if self.observe_every < 1:
            raise ConfigurationError("observe_every must be at least 1")


@dataclass
class EocRow:
    n_cells: int
    dx: float
    err_l1: dict[str, float]
    err_l2: dict[str, float]
    eoc_l1: dict[str, float | None] = field(default_factory=dict)
    eoc_l2: dict[str, float | None] = field(default_factory=dict)


@dataclass
class EocTable:
    problem: str
    epsilon: float
    variables: tuple[str, ...]
    rows: list[EocRow]
    max_density_drift: float | None = None  # only filled by the AOC driver


def eoc_value(err_coarse: float, err_fine: float, dx_coarse: float, dx_fine: float):
    """log(err_c/err_f) / log(dx_c/dx_f); None when an error vanishes."""
    if err_coarse <= 0.0 or err_fine <= 0.0:
        return None
    return math.log(err_coarse / err_fine) / math.log(dx_coarse / dx_fine)


def mean_error_norms(num: np.ndarray, ref: np.ndarray) -> tuple[float, float]:
    """Domain-averaged L1 and L2 error norms on a uniform grid."""
    diff = np.abs(np.asarray(num) - np.asarray(ref))
    return float(np.mean(diff)), float(np.sqrt(np.mean(diff ** 2)))


def _fill_eoc(rows: list[EocRow], variables: Sequence[str]) -> None:
    for i, row in enumerate(rows):
        if i == 0:
            row.eoc_l1 = {v: None for v in variables}
            row.eoc_l2 = {v: None for v in variables}
            continue
        prev = rows[i - 1]
        row.eoc_l1 = {v: eoc_value(prev.err_l1[v], row.err_l1[v], prev.dx, row.dx)
                      for v in variables}
        row.eoc_l2 = {v: eoc_value(prev.err_l2[v], row.err_l2[v], prev.dx, row.dx)
                      for v in variables}


def _convergence_sweep(spec: ProblemSpec, config: RunConfig) -> EocTable:
    if spec.exact_solution is None:
        raise ConfigurationError(
            f"problem {spec.name!r} has no exact solution; cannot run a convergence sweep")
    if not config.meshes:
        raise ConfigurationError("convergence sweep needs a list of mesh sizes")
    tab = builtin_tableau(config.tableau)
    t_final = config.t_final if config.t_final is not None else spec.t_final
    variables = spec.error_fields
    rows: list[EocRow] = []
    drift = 0.0
    for n in config.meshes:
        grid = spec.make_grid((n,) * len(spec.domain))
        result = run(spec.initial_state(grid), spec.params, tab, config.cfl, t_final,
                     solver_tol=config.solver_tol)
        exact = spec.exact_state(grid, t_final)
        num_fields = spec.extract_error_fields(result.state)
        ref_fields = spec.extract_error_fields(exact)
        err_l1, err_l2 = {}, {}
        for v in variables:
            err_l1[v], err_l2[v] = mean_error_norms(num_fields[v], ref_fields[v])
        rows.append(EocRow(n_cells=n, dx=grid.dx[0], err_l1=err_l1, err_l2=err_l2))
        drift = max(drift, float(np.max(np.abs(result.state.varrho - exact.varrho))))
    _fill_eoc(rows, variables)
    return EocTable(problem=spec.name, epsilon=spec.params.epsilon,
                    variables=variables, rows=rows, max_density_drift=drift)


def run_eoc(config: RunConfig) -> EocTable:
    """Convergence table against the problem's exact solution."""
    spec = make_problem(config.problem, config.epsilon)
    table = _convergence_sweep(spec, config)
    table.max_density_drift = None
    return table


def run_aoc(config: RunConfig) -> EocTable:
    """Convergence table against the incompressible reference fields.

    Only the divergence-free pulse problem supports this; the scaled density
    must remain at the constant 1, and the measured drift is recorded.
    """
    if config.problem != "schneider_vortex":
        raise ConfigurationError("asymptotic convergence runs on schneider_vortex only")
    spec = make_problem(config.problem, config.epsilon)
    return _convergence_sweep(spec, config)


@dataclass
class VortexResult:
    epsilons: tuple[float, ...]
    times: list[float]                      # shared across eps (eps-free CFL)
    relative_ke: dict[float, list[float]]   # KE(t) / KE(0), t=0 row included
    max_spread: float                       # max_t |KE_eps - KE_ref| / KE(0)
    final_ratio: dict[float, float]


def run_vortex(config: RunConfig) -> VortexResult:
    """Relative kinetic energy histories of the vortex across epsilon."""
    epsilons = config.epsilons or (1.0, 1e-1, 1e-2, 1e-3)
    tab = builtin_tableau(config.tableau)
    times: list[float] | None = None
    rel_ke: dict[float, list[float]] = {}
    for eps in epsilons:
        spec = make_problem("travelling_vortex", eps)
        grid = spec.make_grid(config.mesh)
        t_final = config.t_final if config.t_final is not None else spec.t_final
        initial = spec.initial_state(grid)
        ke0 = kinetic_energy(initial)
        result = run(initial, spec.params, tab, config.cfl, t_final,
                     observers={"ke": kinetic_energy},
                     observe_every=config.observe_every,
                     solver_tol=config.solver_tol)
        run_times = [0.0] + result.times
        if times is None:
            times = run_times
        elif len(times) != len(run_times) or any(
                abs(a - b) > 1e-12 for a, b in zip(times, run_times)):
            raise ConfigurationError("vortex sweeps must share one observation grid")
        rel_ke[eps] = [1.0] + [v / ke0 for v in result.series["ke"]]
    reference = rel_ke[epsilons[0]]
    spread = 0.0
    for eps in epsilons[1:]:
        spread = max(spread, max(abs(a - b) for a, b in zip(rel_ke[eps], reference)))
    return VortexResult(
        epsilons=tuple(epsilons),
        times=times or [],
        relative_ke=rel_ke,
        max_spread=spread,
        final_ratio={eps: rel_ke[eps][-1] for eps in epsilons},
    )


@dataclass
class ApResult:
    times: list[float]             # includes t = 0
    grad_rho: list[float]
    div_u: list[float]
    initial_state: State
    final_state: State


def run_ap(config: RunConfig) -> ApResult:
    """Defect history (density gradient, velocity divergence) over time."""
    spec = make_problem(config.problem if config.problem != "cosine_wave"
                        else "well_prepared_2d", config.epsilon)
    tab = builtin_tableau(config.tableau)
    grid = spec.make_grid(config.mesh)
    t_final = config.t_final if config.t_final is not None else spec.t_final
    initial = spec.initial_state(grid)
    grad0, div0 = wellprepared_defect(initial)

    def grad_obs(state: State) -> float:
        return wellprepared_defect(state)[0]

    def div_obs(state: State) -> float:
        return wellprepared_defect(state)[1]

    result = run(initial, spec.params, tab, config.cfl, t_final,
                 observers={"grad_rho": grad_obs, "div_u": div_obs},
                 observe_every=config.observe_every,
                 solver_tol=config.solver_tol)
    return ApResult(
        times=[0.0] + result.times,
        grad_rho=[grad0] + result.series["grad_rho"],
        div_u=[div0] + result.series["div_u"],
        initial_state=initial,
        final_state=result.state,
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    return "%.17g" % value


def write_csv(path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    """Plain CSV with %.17g floats and LF line endings."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else _fmt(v) for v in row) + "\n")


def eoc_csv_rows(table: EocTable) -> tuple[list[str], list[list]]:
    header = ["n", "dx"]
    for v in table.variables:
        header += [f"err_l1_{v}"]
    for v in table.variables:
        header += [f"eoc_l1_{v}"]
    for v in table.variables:
        header += [f"err_l2_{v}"]
    for v in table.variables:
        header += [f"eoc_l2_{v}"]
    rows = []
    for row in table.rows:
        out: list = [row.n_cells, row.dx]
        out += [row.err_l1[v] for v in table.variables]
        out += [row.eoc_l1[v] for v in table.variables]
        out += [row.err_l2[v] for v in table.variables]
        out += [row.eoc_l2[v] for v in table.variables]
        rows.append(out)
    return header, rows


def format_eoc_table(table: EocTable) -> str:
    """Human-readable table mirroring the convergence-table column order."""
    cols = ["N", "dx"]
    for v in table.variables:
        cols.append(f"L1 err {v}")
    cols.append("EOC(L1)")
    for v in table.variables:
        cols.append(f"L2 err {v}")
    cols.append("EOC(L2)")
    lines = []
    first = table.variables[0]
    data = []
    for row in table.rows:
        cells = [str(row.n_cells), f"{row.dx:.6f}"]
        cells += [f"{row.err_l1[v]:.3e}" for v in table.variables]
        cells.append("" if row.eoc_l1[first] is None else f"{row.eoc_l1[first]:.4f}")
        cells += [f"{row.err_l2[v]:.3e}" for v in table.variables]
        cells.append("" if row.eoc_l2[first] is None else f"{row.eoc_l2[first]:.4f}")
        data.append(cells)
    widths = [max(len(c), *(len(r[i]) for r in data)) for i, c in enumerate(cols)]
    lines.append("  ".join(c.rjust(w) for c, w in zip(cols, widths)))
    for cells in data:
        lines.append("  ".join(c.rjust(w) for c, w in zip(cells, widths)))
    return "\n".join(lines) + "\n"


def emit(table: EocTable, fmt: str, path) -> None:
    """Write a convergence table as csv or aligned text."""
    if fmt == "csv":
        header, rows = eoc_csv_rows(table)
        write_csv(path, header, rows)
    elif fmt == "table":
        with open(path, "w", newline="\n") as fh:
            fh.write(format_eoc_table(table))
    else:
        raise ConfigurationError(f"unknown emit format {fmt!r}")
