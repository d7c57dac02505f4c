"""Stage solves for the implicit acoustic part.

Each implicit stage requires solving (I + sum_m beta_m B_m) U = rhs, where
B_m couples varrho and u_m through the undivided periodic central difference
P_m f = f[i+1] - f[i-1] and beta_m = dt * (a_bar/eps) * a_kk / (2 dx_m).

On a uniform periodic grid P_m is circulant, so the system diagonalizes in
Fourier space: per mode the density is eliminated through the symbol
1 + 4 sum_m beta_m^2 sin^2(2 pi k_m / N_m) >= 1 (never singular, uniformly in
eps), after which the velocities follow by back-substitution.  A dense
direct solver over the assembled block matrix is kept as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, SolverFailure
from .grid import PeriodicGrid, State

DENSE_ORACLE_MAX_UNKNOWNS = 4096
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class CirculantOperator:
    """Circulant matrix given by its first row."""

    first_row: np.ndarray

    def __post_init__(self):
        row = np.asarray(self.first_row, dtype=float)
        row.setflags(write=False)
        object.__setattr__(self, "first_row", row)

    @property
    def size(self) -> int:
        return self.first_row.shape[0]

    def as_matrix(self) -> np.ndarray:
        n = self.size
        mat = np.empty((n, n))
        for i in range(n):
            mat[i] = np.roll(self.first_row, i)
        return mat


def circulant_spectrum(op: CirculantOperator) -> np.ndarray:
    """Eigenvalues lambda_k = sum_j row[j] exp(-2 pi i j k / N) (the DFT)."""
    return np.fft.fft(op.first_row)


def difference_generator(n: int) -> CirculantOperator:
    """The periodic central difference generator circ(0, 1, 0, ..., 0, -1)."""
    row = np.zeros(n)
    row[1] = 1.0
    row[-1] = -1.0
    return CirculantOperator(row)


def apply_difference(field: np.ndarray, axis: int) -> np.ndarray:
    """Apply the undivided difference P along an axis: f[i+1] - f[i-1]."""
    return np.roll(field, -1, axis=axis) - np.roll(field, 1, axis=axis)


@dataclass
class StageSystem:
    """One implicit stage system: coefficients, grid, and right-hand side.

    betas holds one beta_m per axis; all zero means the stage is explicit
    and the solve degenerates to the identity.
    """

    grid: PeriodicGrid
    betas: tuple[float, ...]
    rhs: State

    def __post_init__(self):
        self.betas = tuple(float(b) for b in self.betas)
        if len(self.betas) != self.grid.dim:
            raise ConfigurationError("one beta per grid axis required")
        if not all(np.isfinite(b) for b in self.betas):
            raise ConfigurationError("non-finite stage coefficient")


class StageSolver:
    """Spectral stage solver bound to one grid.

    Owns the per-axis Fourier symbols of the difference operators; instances
    are independent, one per simulation.
    """

    def __init__(self, grid: PeriodicGrid, tol: float = DEFAULT_TOL):
        self.grid = grid
        self.tol = float(tol)
        # sin(2 pi k / N) per axis, shaped to broadcast over the field shape.
        self._sines = []
        for m, n in enumerate(grid.n_cells):
            s = np.sin(2.0 * np.pi * np.arange(n) / n)
            shape = [1] * grid.dim
            shape[m] = n
            self._sines.append(s.reshape(shape))

    def solve(self, system: StageSystem) -> State:
        """Solve (I + sum_m beta_m B_m) U = rhs via FFT diagonalization.

        Raises ConfigurationError on non-finite input and SolverFailure if
        the real-space residual exceeds tol * ||rhs||_inf.
        """
        if system.grid is not self.grid and system.grid != self.grid:
            raise ConfigurationError("stage system grid does not match solver grid")
        rhs = system.rhs
        if not rhs.is_finite():
            raise ConfigurationError("non-finite right-hand side in stage solve")
        if all(b == 0.0 for b in system.betas):
            return rhs.copy()

        z_hat = np.fft.fftn(rhs.varrho)
        v_hat = [np.fft.fftn(rhs.vel[m]) for m in range(self.grid.dim)]
        # Per-mode elimination of the velocities into the density equation.
        coef = [2j * system.betas[m] * self._sines[m] for m in range(self.grid.dim)]
        denom = 1.0
        for m in range(self.grid.dim):
            denom = denom + 4.0 * (system.betas[m] * self._sines[m]) ** 2
        rho_hat = z_hat
        for m in range(self.grid.dim):
            rho_hat = rho_hat - coef[m] * v_hat[m]
        rho_hat = rho_hat / denom
        varrho = np.fft.ifftn(rho_hat).real
        vel = np.empty_like(rhs.vel)
        for m in range(self.grid.dim):
            vel[m] = np.fft.ifftn(v_hat[m] - coef[m] * rho_hat).real
        solution = State(self.grid, varrho, vel)

        residual = self._residual(system, solution)
        scale = max(np.max(np.abs(rhs.varrho)), np.max(np.abs(rhs.vel)), 1e-300)
        # Backward-error criterion: evaluating the residual itself carries
        # eps * ||A|| noise, so the raw form is unattainable once the betas
        # are large; ||A||_inf = 1 + 2 sum_m |beta_m|.
        op_norm = 1.0 + 2.0 * sum(abs(b) for b in system.betas)
        if residual > self.tol * op_norm * scale:
            raise SolverFailure(
                f"stage solve residual {residual:.3e} exceeds "
                f"{self.tol:.1e} * {op_norm:.3e} * {scale:.3e}",
                residual=residual)
        return solution

    def _residual(self, system: StageSystem, u: State) -> float:
        res_rho = u.varrho - system.rhs.varrho
        worst = 0.0
        for m in range(self.grid.dim):
            res_rho = res_rho + system.betas[m] * apply_difference(u.vel[m], m)
            res_vel = u.vel[m] + system.betas[m] * apply_difference(u.varrho, m) \
                - system.rhs.vel[m]
            worst = max(worst, float(np.max(np.abs(res_vel))))
        return max(worst, float(np.max(np.abs(res_rho))))


def solve_stage(system: StageSystem, tol: float = DEFAULT_TOL) -> State:
    """One-shot convenience wrapper around StageSolver."""
    return StageSolver(system.grid, tol=tol).solve(system)


def assemble_dense(system: StageSystem) -> np.ndarray:
    """Assemble the full (1+d) N x (1+d) N stage matrix explicitly."""
    grid = system.grid
    n_total = int(np.prod(grid.n_cells))
    d = grid.dim
    size = (1 + d) * n_total
    if size > DENSE_ORACLE_MAX_UNKNOWNS:
        raise ConfigurationError(
            f"dense oracle capped at {DENSE_ORACLE_MAX_UNKNOWNS} unknowns, got {size}")
    ident = np.eye(n_total)
    blocks = [[np.zeros((n_total, n_total)) for _ in range(1 + d)] for _ in range(1 + d)]
    for k in range(1 + d):
        blocks[k][k] = ident
    for m in range(d):
        p_axis = difference_generator(grid.n_cells[m]).as_matrix()
        if d == 1:
            k_m = p_axis
        elif m == 0:
            k_m = np.kron(p_axis, np.eye(grid.n_cells[1]))
        else:
            k_m = np.kron(np.eye(grid.n_cells[0]), p_axis)
        blocks[0][1 + m] = system.betas[m] * k_m
        blocks[1 + m][0] = system.betas[m] * k_m
    return np.block(blocks)


def dense_stage_oracle(system: StageSystem) -> State:
    """Direct-elimination reference solve used only in tests.

    Solves the assembled matrix with LU plus two steps of iterative
    refinement (extended-precision residuals), so the reference stays
    accurate even when beta ~ 1/eps makes the matrix badly scaled.
    """
    grid = system.grid
    if not system.rhs.is_finite():
        raise ConfigurationError("non-finite right-hand side in stage solve")
    mat = assemble_dense(system)
    n_total = int(np.prod(grid.n_cells))
    b = np.concatenate([system.rhs.varrho.ravel()]
                       + [system.rhs.vel[m].ravel() for m in range(grid.dim)])
    x = np.linalg.solve(mat, b)
    mat_ld = mat.astype(np.longdouble)
    b_ld = b.astype(np.longdouble)
    for _ in range(2):
        r = b_ld - mat_ld @ x.astype(np.longdouble)
        x = x + np.linalg.solve(mat, r.astype(np.float64))
    shape = tuple(grid.n_cells)
    varrho = x[:n_total].reshape(shape)
    vel = np.stack([x[(1 + m) * n_total:(2 + m) * n_total].reshape(shape)
                    for m in range(grid.dim)])
    return State(grid, varrho, vel)
