"""Energy functionals, well-prepared-space defects, and the discrete
Helmholtz-Hodge-Leray projection.

The discrete well-prepared space pairs constant densities with velocities
whose wide-central-difference divergence vanishes: the same operators the
implicit terms use, so this is exactly the space the scheme preserves.  The
projection works mode-by-mode in Fourier space through the symbol of the
central derivative, i * sin(2 pi k_m / N_m) / dx_m; modes where every symbol
vanishes (the mean and the even-N checkerboards) belong to the discrete
kernel and are left untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import PeriodicGrid, State, central_derivative, norm


def energy(state: State) -> float:
    """Total energy 0.5 (||varrho||^2 + sum_m ||u_m||^2) in weighted L2."""
    vol = state.grid.cell_volume
    total = np.sum(state.varrho ** 2) + np.sum(state.vel ** 2)
    return 0.5 * float(total) * vol

def kinetic_energy(state: State) -> float:
    """Kinetic part 0.5 sum_m ||u_m||^2 in weighted L2."""
    return 0.5 * float(np.sum(state.vel ** 2)) * state.grid.cell_volume


def wellprepared_defect(state: State) -> tuple[float, float]:
    """L2 norms of the discrete density gradient and velocity divergence."""
    grid = state.grid
    grad_sq = 0.0
    div = np.zeros_like(state.varrho)
    for m in range(grid.dim):
        g = central_derivative(state.varrho, m, grid)
        grad_sq += np.sum(g * g)
        div += central_derivative(state.vel[m], m, grid)
    grad_norm = float(np.sqrt(grad_sq * grid.cell_volume))
    return grad_norm, norm(div, "L2", grid)


def _symbol_arrays(grid: PeriodicGrid) -> list[np.ndarray]:
    """Fourier symbols s_m = sin(2 pi k_m / N_m) / dx_m of the derivative."""
    out = []
    for m, n in enumerate(grid.n_cells):
        s = np.sin(2.0 * np.pi * np.arange(n) / n) / grid.dx[m]
        shape = [1] * grid.dim
        shape[m] = n
        out.append(s.reshape(shape))
    return out


def helmholtz_project(state: State) -> State:
    """Orthogonal projection onto the discrete well-prepared space.

    The density is replaced by its mean; the velocity loses its discrete
    gradient component mode-by-mode.  Idempotent and self-adjoint in the
    weighted L2 inner product.
    """
    grid = state.grid
    varrho = np.full_like(state.varrho, np.mean(state.varrho))
    symbols = _symbol_arrays(grid)
    v_hat = [np.fft.fftn(state.vel[m]) for m in range(grid.dim)]
    s_sq = sum(s * s for s in symbols)
    divergence = sum(s * vh for s, vh in zip(symbols, v_hat))
    scale = np.where(s_sq > 0.0, divergence / np.where(s_sq > 0.0, s_sq, 1.0), 0.0)
    vel = np.empty_like(state.vel)
    for m in range(grid.dim):
        vel[m] = np.fft.ifftn(v_hat[m] - symbols[m] * scale).real
    return State(grid, varrho, vel)


def distance_to_wellprepared(state: State) -> float:
    """Weighted L2 distance ||U - P U|| to the discrete well-prepared space."""
    projected = helmholtz_project(state)
    diff_sq = np.sum((state.varrho - projected.varrho) ** 2) \
        + np.sum((state.vel - projected.vel) ** 2)
    return float(np.sqrt(diff_sq * state.grid.cell_volume))


@dataclass(frozen=True)
class DefectReport:
    """Snapshot of the scalar diagnostics of one state."""

    grad_rho_norm: float
    div_u_norm: float
    dist_E: float
    energy: float
    kinetic: float


def defect_report(state: State) -> DefectReport:
    grad_norm, div_norm = wellprepared_defect(state)
    return DefectReport(
        grad_rho_norm=grad_norm,
        div_u_norm=div_norm,
        dist_E=distance_to_wellprepared(state),
        energy=energy(state),
        kinetic=kinetic_energy(state),
    )
