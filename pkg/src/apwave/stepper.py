"""IMEX Runge-Kutta time loop with advective CFL timestep selection.

Each step advances the state through the s stages of the chosen tableau:
explicit terms (Rusanov flux divergences of earlier stages) and implicit
terms (central acoustic flux divergences) accumulate into a stage right-hand
side, the diagonal implicit coefficient feeds the spectral stage solve, and
the final update recombines the cached stage tendencies with the tableau
weights.  The timestep comes from the advective CFL condition
dt * max_m(|u_bar_m| / dx_m) = nu, which is independent of epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigurationError, NumericalBlowup
from .grid import ModelParams, PeriodicGrid, State
from .implicit_solver import StageSolver, StageSystem
from .spatial import explicit_tendency, implicit_tendency
from .tableau import IMEXTableau


def compute_dt(grid: PeriodicGrid, params: ModelParams, nu: float,
               t_remaining: float) -> float:
    """Advective CFL timestep, clamped to the remaining time.

    When advection is off or u_bar vanishes the CFL condition degenerates;
    dt = nu * min_m dx_m is used instead (the acoustic part is
    unconditionally stable, so any O(dx) step is valid).
    """
    if not 0.0 < nu < 1.0:
        raise ConfigurationError(f"CFL number must lie in (0, 1), got {nu}")
    if t_remaining <= 0.0:
        raise ConfigurationError(f"nonpositive remaining time {t_remaining}")
    speeds = [abs(params.u_bar[m]) / grid.dx[m] for m in range(grid.dim)]
    if params.advection_on and max(speeds) > 0.0:
        dt = nu / max(speeds)
    else:
        dt = nu * min(grid.dx)
    return min(dt, t_remaining)


@dataclass
class StepContext:
    """Per-step bookkeeping: timestep, tableau, parameters, stage caches.

    The stage caches are rewritten by imex_step so the final update reuses
    exactly the stage values and tendencies of the current step.
    """

    dt: float
    tableau: IMEXTableau
    params: ModelParams
    stage_states: list = field(default_factory=list)
    stage_explicit_tend: list = field(default_factory=list)
    stage_implicit_tend: list = field(default_factory=list)

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ConfigurationError(f"timestep must be positive, got {self.dt}")

    def lam(self, grid: PeriodicGrid) -> tuple[float, ...]:
        """Mesh ratios dt / dx_m."""
        return tuple(self.dt / h for h in grid.dx)


def _stage_betas(grid: PeriodicGrid, params: ModelParams, dt: float, akk: float):
    return tuple(dt * params.stiffness * akk / (2.0 * grid.dx[m])
                 for m in range(grid.dim))


def imex_step(state: State, ctx: StepContext, solver: StageSolver) -> State:
    """Advance one timestep through all IMEX stages.

    Raises NumericalBlowup (naming the stage) if a stage value turns
    non-finite and propagates solver failures.
    """
    grid = state.grid
    tab = ctx.tableau
    dt = ctx.dt
    a_ex, a_im = tab.a_explicit, tab.a_implicit
    s = tab.s

    stages: list[State] = []
    et: list[State] = []
    it: list[State] = []
    for k in range(s):
        rhs_rho = state.varrho.copy()
        rhs_vel = state.vel.copy()
        for l in range(k):
            c_ex = dt * a_ex[k, l]
            if c_ex != 0.0:
                rhs_rho -= c_ex * et[l].varrho
                rhs_vel -= c_ex * et[l].vel
            c_im = dt * a_im[k, l]
            if c_im != 0.0:
                rhs_rho -= c_im * it[l].varrho
                rhs_vel -= c_im * it[l].vel
        rhs = State(grid, rhs_rho, rhs_vel)
        akk = a_im[k, k]
        if akk == 0.0:
            # Explicit first stage of a type-CK tableau: no solve.
            u_k = rhs
        else:
            u_k = solver.solve(StageSystem(grid, _stage_betas(grid, ctx.params, dt, akk), rhs))
        if not u_k.is_finite():
            raise NumericalBlowup(f"non-finite state in stage {k + 1}", stage=k + 1)
        stages.append(u_k)
        et.append(explicit_tendency(u_k, ctx.params))
        it.append(implicit_tendency(u_k, ctx.params))

    new_rho = state.varrho.copy()
    new_vel = state.vel.copy()
    for k in range(s):
        c_ex = dt * tab.w_explicit[k]
        if c_ex != 0.0:
            new_rho -= c_ex * et[k].varrho
            new_vel -= c_ex * et[k].vel
        c_im = dt * tab.w_implicit[k]
        if c_im != 0.0:
            new_rho -= c_im * it[k].varrho
            new_vel -= c_im * it[k].vel
    ctx.stage_states = stages
    ctx.stage_explicit_tend = et
    ctx.stage_implicit_tend = it
    result = State(grid, new_rho, new_vel)
    if not result.is_finite():
        raise NumericalBlowup("non-finite state in final update", stage=s)
    return result


Observer = Callable[[State], float]


@dataclass
class RunResult:
    state: State
    t: float
    n_steps: int
    times: list[float]
    series: dict[str, list[float]]


def run(initial: State, params: ModelParams, tableau: IMEXTableau, nu: float,
        t_final: float, solver: StageSolver | None = None,
        observers: Mapping[str, Observer] | None = None,
        observe_every: int = 1, solver_tol: float | None = None) -> RunResult:
    """Advance from t=0 to t_final, clamping the last step to land exactly.

    Observers are evaluated on the state after every observe_every-th step
    (and always after the final one); their values are collected per name
    alongside the observation times.
    """
    if t_final <= 0.0:
        raise ConfigurationError(f"t_final must be positive, got {t_final}")
    grid = initial.grid
    if solver is None:
        solver = StageSolver(grid) if solver_tol is None else StageSolver(grid, tol=solver_tol)
    observers = dict(observers or {})
    times: list[float] = []
    series: dict[str, list[float]] = {name: [] for name in observers}

    state = initial.copy()
    t = 0.0
    n_steps = 0
    while t < t_final - 1e-14 * t_final:
        dt = compute_dt(grid, params, nu, t_final - t)
        ctx = StepContext(dt=dt, tableau=tableau, params=params)
        try:
            state = imex_step(state, ctx, solver)
        except NumericalBlowup as exc:
            exc.step = n_steps + 1
            raise
        n_steps += 1
        t = min(t + dt, t_final)
        last = t >= t_final - 1e-14 * t_final
        if observers and (n_steps % observe_every == 0 or last):
            times.append(t)
            for name, fn in observers.items():
                series[name].append(float(fn(state)))
    return RunResult(state=state, t=t, n_steps=n_steps, times=times, series=series)
