"""Initial data, parameters, and reference solutions for the experiments.

All problems use reference density rho_bar = 1 and sound speed a_bar = 1.
Physical and scaled densities are related by rho = rho_bar (1 + (eps/a_bar)
varrho); the velocity carries no scaling.  Initial and exact fields are
pointwise callables sampled at cell centers (midpoint rule).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError
from .grid import ModelParams, PeriodicGrid, State

FieldFn = Callable[..., tuple[np.ndarray, list[np.ndarray]]]


def to_scaled(rho_phys: np.ndarray, params: ModelParams) -> np.ndarray:
    """Scaled density varrho = (rho/rho_bar - 1) * a_bar / eps."""
    return (np.asarray(rho_phys) / params.rho_bar - 1.0) * params.a_bar / params.epsilon


def from_scaled(varrho: np.ndarray, params: ModelParams) -> np.ndarray:
    """Physical density rho = rho_bar (1 + (eps/a_bar) varrho)."""
    return params.rho_bar * (1.0 + (params.epsilon / params.a_bar) * np.asarray(varrho))


@dataclass(frozen=True)
class ProblemSpec:
    """One experiment: parameters, domain, data, and optional reference."""

    name: str
    params: ModelParams
    domain: tuple[tuple[float, float], ...]
    default_mesh: tuple[int, ...]
    t_final: float
    cfl: float
    initial_data: FieldFn
    exact_solution: Optional[Callable] = None
    # Names and extractors of the fields errors are measured on.
    error_fields: tuple[str, ...] = ()

    def make_grid(self, mesh: tuple[int, ...] | None = None) -> PeriodicGrid:
        return PeriodicGrid(mesh or self.default_mesh, self.domain)

    def initial_state(self, grid: PeriodicGrid) -> State:
        varrho, vel = self.initial_data(*grid.centers())
        return _assemble(grid, varrho, vel)

    def exact_state(self, grid: PeriodicGrid, t: float) -> State:
        if self.exact_solution is None:
            raise ConfigurationError(f"problem {self.name!r} has no exact solution")
        varrho, vel = self.exact_solution(t, *grid.centers())
        return _assemble(grid, varrho, vel)

    def extract_error_fields(self, state: State) -> dict[str, np.ndarray]:
        """Fields the convergence tables report errors on."""
        out = {}
        for name in self.error_fields:
            if name == "rho":
                out[name] = from_scaled(state.varrho, self.params)
            elif name == "u":
                out[name] = state.vel[0]
            elif name in ("u1", "u2"):
                out[name] = state.vel[int(name[1]) - 1]
            else:
                raise ConfigurationError(f"unknown error field {name!r}")
        return out


def _assemble(grid: PeriodicGrid, varrho, vel) -> State:
    shape = tuple(grid.n_cells)
    rho = np.broadcast_to(np.asarray(varrho, dtype=float), shape).copy()
    v = np.stack([np.broadcast_to(np.asarray(c, dtype=float), shape).copy() for c in vel])
    return State(grid, rho, v)


def cosine_wave(epsilon: float) -> ProblemSpec:
    """1D cosine wave train on [-1/eps, 1/eps] with an exact solution.

    Physical data rho = 1 + (eps^2/1.185)(1 + cos(2 pi eps x)),
    u = eps (1 + cos(2 pi eps x)); advection speed 1.  The final time lets
    the profile traverse the domain three times at the combined speed:
    T = 3 * 2 / (u_bar + 1/eps).  The exact solution follows from the
    characteristic variables varrho +/- u transported at u_bar +/- a_bar/eps.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ConfigurationError(f"cosine wave expects epsilon in (0, 1], got {epsilon}")
    params = ModelParams(epsilon=epsilon, a_bar=1.0, u_bar=(1.0,), rho_bar=1.0)
    half = 1.0 / epsilon

    def profile(x):
        return 1.0 + np.cos(2.0 * np.pi * epsilon * x)

    def initial(x):
        return (epsilon / 1.185) * profile(x), [epsilon * profile(x)]

    c_plus = params.u_bar[0] + params.a_bar / epsilon
    c_minus = params.u_bar[0] - params.a_bar / epsilon

    def exact(t, x):
        rho0p, (u0p,) = initial(x - c_plus * t)
        rho0m, (u0m,) = initial(x - c_minus * t)
        w_plus = rho0p + u0p
        w_minus = rho0m - u0m
        return 0.5 * (w_plus + w_minus), [0.5 * (w_plus - w_minus)]

    return ProblemSpec(
        name="cosine_wave",
        params=params,
        domain=((-half, half),),
        default_mesh=(100,),
        t_final=3.0 * 2.0 / (params.u_bar[0] + 1.0 / epsilon),
        cfl=0.45,
        initial_data=initial,
        exact_solution=exact,
        error_fields=("rho", "u"),
    )


def vortex_speed(r: np.ndarray) -> np.ndarray:
    """Piecewise-linear azimuthal speed profile of the travelling vortex."""
    r = np.asarray(r, dtype=float)
    return np.where(r < 0.2, 5.0 * r, np.where(r < 0.4, 2.0 - 5.0 * r, 0.0))


def travelling_vortex(epsilon: float = 1.0) -> ProblemSpec:
    """2D vortex advected through [0, 4] x [0, 1]; qualitative reference only."""
    params = ModelParams(epsilon=epsilon, a_bar=1.0, u_bar=(1.0, 0.0), rho_bar=1.0)

    def initial(x1, x2):
        dx1 = x1 - 0.5
        dx2 = x2 - 0.5
        r = np.sqrt(dx1 ** 2 + dx2 ** 2)
        # K(r) (-sin theta, cos theta); K(r)/r is finite at the center.
        k_over_r = np.where(r > 0.0, vortex_speed(r) / np.where(r > 0.0, r, 1.0), 5.0)
        return np.zeros_like(r), [-k_over_r * dx2, k_over_r * dx1]

    return ProblemSpec(
        name="travelling_vortex",
        params=params,
        domain=((0.0, 4.0), (0.0, 1.0)),
        default_mesh=(256, 64),
        t_final=3.0,
        cfl=0.45,
        initial_data=initial,
    )


def well_prepared_2d(epsilon: float) -> ProblemSpec:
    """Well-prepared 2D data with O(eps^2) density and O(eps) divergence."""
    if epsilon <= 0.0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
    params = ModelParams(epsilon=epsilon, a_bar=1.0, u_bar=(1.0, 1.0), rho_bar=1.0)

    def initial(x1, x2):
        sum_phase = 2.0 * np.pi * (x1 + x2)
        diff_phase = 2.0 * np.pi * (x1 - x2)
        rho_phys = 1.0 + epsilon ** 2 * np.sin(sum_phase) ** 2
        u1 = np.sin(diff_phase) + epsilon * np.sin(sum_phase)
        u2 = np.sin(diff_phase) + epsilon * np.cos(sum_phase)
        return to_scaled(rho_phys, params), [u1, u2]

    return ProblemSpec(
        name="well_prepared_2d",
        params=params,
        domain=((0.0, 1.0), (0.0, 1.0)),
        default_mesh=(40, 40),
        t_final=3.0,
        cfl=0.45,
        initial_data=initial,
    )


def schneider_vortex(epsilon: float) -> ProblemSpec:
    """Divergence-free periodic pulse; reference is the incompressible flow.

    The initial velocity is an exact solution of the incompressible limit
    system translating with unit speed in both directions; the scaled
    density starts (and provably stays) at the constant 1.
    """
    if epsilon <= 0.0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
    params = ModelParams(epsilon=epsilon, a_bar=1.0, u_bar=(1.0, 1.0), rho_bar=1.0)

    def incompressible(t, x1, x2):
        p1 = 2.0 * np.pi * (x1 - t)
        p2 = 2.0 * np.pi * (x2 - t)
        u1 = 1.0 - 2.0 * np.cos(p1) * np.sin(p2)
        u2 = 1.0 + 2.0 * np.sin(p1) * np.cos(p2)
        return np.ones_like(u1), [u1, u2]

    def initial(x1, x2):
        return incompressible(0.0, x1, x2)

    return ProblemSpec(
        name="schneider_vortex",
        params=params,
        domain=((0.0, 1.0), (0.0, 1.0)),
        default_mesh=(40, 40),
        t_final=3.0,
        cfl=0.45,
        initial_data=initial,
        exact_solution=incompressible,
        error_fields=("u1", "u2"),
    )


PROBLEMS: dict[str, Callable[[float], ProblemSpec]] = {
    "cosine_wave": cosine_wave,
    "travelling_vortex": travelling_vortex,
    "well_prepared_2d": well_prepared_2d,
    "schneider_vortex": schneider_vortex,
}


def make_problem(name: str, epsilon: float) -> ProblemSpec:
    if name not in PROBLEMS:
        raise ConfigurationError(
            f"unknown problem {name!r}; available: {', '.join(sorted(PROBLEMS))}")
    return PROBLEMS[name](epsilon)
