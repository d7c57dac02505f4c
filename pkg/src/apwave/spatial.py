"""Flux splitting, MUSCL reconstruction, and numerical flux divergences.

The advective (non-stiff) flux along axis m is F_m(U) = u_bar[m] * U, treated
with a MUSCL/Rusanov discretization.  The acoustic (stiff) flux is
G_m(U) = (a_bar/eps) * (u_m, varrho e_m), treated with a second-order central
flux so its divergence reduces to the wide central difference.

States are handled here as stacked arrays of shape (1 + dim,) + field shape,
component 0 being varrho.  Face arrays use the left-face convention of the
grid module (entry i lives on interface i - 1/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import ModelParams, PeriodicGrid, State, central_derivative


def stack_state(state: State) -> np.ndarray:
    return np.concatenate([state.varrho[None], state.vel], axis=0)


def unstack_state(grid: PeriodicGrid, stacked: np.ndarray) -> State:
    return State(grid, stacked[0], stacked[1:])


def advective_flux(w: np.ndarray, axis: int, params: ModelParams) -> np.ndarray:
    """Physical non-stiff flux F_m(U) = u_bar[m] * U, componentwise."""
    return params.u_bar[axis] * w


def acoustic_flux(w: np.ndarray, axis: int, params: ModelParams) -> np.ndarray:
    """Physical stiff flux G_m(U): (a_bar/eps) * (u_m, varrho e_m)."""
    out = np.zeros_like(w)
    out[0] = params.stiffness * w[1 + axis]
    out[1 + axis] = params.stiffness * w[0]
    return out


@dataclass
class InterfaceStates:
    """Reconstructed states on the faces orthogonal to one axis.

    left[i] is the state extrapolated from the cell on the lower side of
    interface i - 1/2, right[i] the one from the upper side.  For constant
    data both sides equal that constant.
    """

    left: np.ndarray
    right: np.ndarray


def muscl_reconstruct(cell_field: np.ndarray, axis: int, grid: PeriodicGrid) -> InterfaceStates:
    """Unlimited piecewise-linear reconstruction with central slopes.

    Slope sigma_i = (f[i+1] - f[i-1]) / (2 dx); the interface values are
    f_i +/- (dx/2) sigma, so dx cancels.  Works on stacked component arrays
    too (axis counts from the trailing field axes).
    """
    grid._check_axis(axis)
    ax = cell_field.ndim - grid.dim + axis
    half_jump = 0.25 * (np.roll(cell_field, -1, axis=ax) - np.roll(cell_field, 1, axis=ax))
    left = np.roll(cell_field + half_jump, 1, axis=ax)
    right = cell_field - half_jump
    return InterfaceStates(left=left, right=right)


def rusanov_flux(u_left: np.ndarray, u_right: np.ndarray, axis: int,
                 params: ModelParams) -> np.ndarray:
    """Rusanov flux for the advective part, componentwise on (varrho, u).

    Mean of the physical fluxes minus a |u_bar[axis]|/2 jump penalty; the
    absolute value keeps the flux dissipative for either advection sign.
    """
    speed = abs(params.u_bar[axis])
    return 0.5 * (advective_flux(u_right, axis, params) + advective_flux(u_left, axis, params)) \
        - 0.5 * speed * (u_right - u_left)


def central_flux(u_lo: np.ndarray, u_hi: np.ndarray, axis: int,
                 params: ModelParams) -> np.ndarray:
    """Arithmetic mean of the acoustic fluxes of two adjacent cell averages."""
    return 0.5 * (acoustic_flux(u_lo, axis, params) + acoustic_flux(u_hi, axis, params))


def explicit_tendency(state: State, params: ModelParams) -> State:
    """Divergence of the MUSCL/Rusanov advective flux, summed over axes.

    Returns sum_m delta_m(F faces) / dx_m as a state-shaped increment; the
    stepper scales by dt and the tableau coefficients.  Zero when advection
    is switched off.
    """
    grid = state.grid
    if not params.advection_on:
        return State.zeros(grid)
    w = stack_state(state)
    out = np.zeros_like(w)
    for m in range(grid.dim):
        faces = muscl_reconstruct(w, m, grid)
        flux = rusanov_flux(faces.left, faces.right, m, params)
        ax = 1 + m
        out += (np.roll(flux, -1, axis=ax) - flux) / grid.dx[m]
    return unstack_state(grid, out)


def implicit_tendency(state: State, params: ModelParams) -> State:
    """Divergence of the central acoustic flux, summed over axes.

    Algebraically this equals (a_bar/eps) times the wide central derivative
    applied to the conjugate component (varrho <-> u_m); the flux form is
    kept so the update telescopes conservatively.
    """
    grid = state.grid
    w = stack_state(state)
    out = np.zeros_like(w)
    for m in range(grid.dim):
        g = acoustic_flux(w, m, params)
        ax = 1 + m
        faces = 0.5 * (np.roll(g, 1, axis=ax) + g)
        out += (np.roll(faces, -1, axis=ax) - faces) / grid.dx[m]
    return unstack_state(grid, out)


def implicit_tendency_wide(state: State, params: ModelParams) -> State:
    """Same operator as implicit_tendency, written via central derivatives.

    Kept as a second code path for cross-checking: varrho picks up the
    discrete divergence of u, each u_m the discrete gradient of varrho.
    """
    grid = state.grid
    s = params.stiffness
    rho_inc = np.zeros_like(state.varrho)
    vel_inc = np.zeros_like(state.vel)
    for m in range(grid.dim):
        rho_inc += s * central_derivative(state.vel[m], m, grid)
        vel_inc[m] = s * central_derivative(state.varrho, m, grid)
    return State(grid, rho_inc, vel_inc)
