"""Periodic structured grids, cell-averaged fields, and discrete operators.

Fields live at cell centers of a uniform periodic mesh in 1D or 2D.  Face
quantities are transient arrays in the "left face" convention: entry i of a
face array holds the value on the interface between cells i-1 and i (index
i - 1/2).  All index arithmetic wraps around periodically; no ghost layers
are stored.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic cell mesh on a product of intervals.

    n_cells and domain are per-axis: n_cells=(N1,) or (N1, N2), domain is a
    matching tuple of (a, b) intervals.  Cell centers sit at a + (i + 1/2) dx.
    """

    n_cells: tuple[int, ...]
    domain: tuple[tuple[float, float], ...]

    def __post_init__(self):
        n = tuple(int(v) for v in self.n_cells)
        dom = tuple((float(a), float(b)) for a, b in self.domain)
        object.__setattr__(self, "n_cells", n)
        object.__setattr__(self, "domain", dom)
        if len(n) not in (1, 2):
            raise ConfigurationError(f"grid dimension must be 1 or 2, got {len(n)}")
        if len(dom) != len(n):
            raise ConfigurationError("domain and n_cells must have matching dimension")
        if any(nm < 4 for nm in n):
            raise ConfigurationError(f"need at least 4 cells per axis, got {n}")
        if any(b <= a for a, b in dom):
            raise ConfigurationError(f"degenerate domain {dom}")

    @property
    def dim(self) -> int:
        return len(self.n_cells)

    @property
    def dx(self) -> tuple[float, ...]:
        return tuple((b - a) / nm for (a, b), nm in zip(self.domain, self.n_cells))

    @property
    def cell_volume(self) -> float:
        vol = 1.0
        for h in self.dx:
            vol *= h
        return vol

    @property
    def domain_volume(self) -> float:
        vol = 1.0
        for a, b in self.domain:
            vol *= b - a
        return vol

    def axis_centers(self, axis: int) -> np.ndarray:
        (a, _), n, h = self.domain[axis], self.n_cells[axis], self.dx[axis]
        return a + (np.arange(n) + 0.5) * h

    def centers(self) -> tuple[np.ndarray, ...]:
        """Cell-center coordinate arrays, broadcastable to the field shape."""
        axes = [self.axis_centers(m) for m in range(self.dim)]
        if self.dim == 1:
            return (axes[0],)
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def zeros(self) -> np.ndarray:
        return np.zeros(self.n_cells)

    def _check_axis(self, axis: int):
        if not 0 <= axis < self.dim:
            raise ConfigurationError(f"axis {axis} out of range for a {self.dim}D grid")


@dataclass(frozen=True)
class ModelParams:
    """Scaling and linearization parameters of the wave system.

    epsilon is the Mach-like singular parameter, a_bar the reference sound
    speed, u_bar the constant advection velocity, rho_bar the reference
    density.  advection_on switches the non-stiff advective terms.
    """

    epsilon: float
    a_bar: float = 1.0
    u_bar: tuple[float, ...] = (1.0,)
    rho_bar: float = 1.0
    advection_on: bool = True

    def __post_init__(self):
        object.__setattr__(self, "u_bar", tuple(float(u) for u in self.u_bar))
        if not (self.epsilon > 0 and self.a_bar > 0 and self.rho_bar > 0):
            raise ConfigurationError("epsilon, a_bar and rho_bar must be strictly positive")

    @property
    def stiffness(self) -> float:
        """The acoustic coefficient a_bar / epsilon."""
        return self.a_bar / self.epsilon


@dataclass
class State:
    """Cell-averaged unknowns (varrho, u) on a grid.

    varrho has the grid's field shape; vel is stacked per component with
    shape (dim,) + field shape.
    """

    grid: PeriodicGrid
    varrho: np.ndarray
    vel: np.ndarray

    def __post_init__(self):
        self.varrho = np.asarray(self.varrho, dtype=float)
        self.vel = np.asarray(self.vel, dtype=float)
        shape = tuple(self.grid.n_cells)
        if self.varrho.shape != shape:
            raise ConfigurationError(
                f"varrho shape {self.varrho.shape} does not match grid {shape}")
        if self.vel.shape != (self.grid.dim,) + shape:
            raise ConfigurationError(
                f"vel shape {self.vel.shape} does not match grid {(self.grid.dim,) + shape}")

    def copy(self) -> "State":
        return State(self.grid, self.varrho.copy(), self.vel.copy())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.varrho)) and np.all(np.isfinite(self.vel)))

    @classmethod
    def zeros(cls, grid: PeriodicGrid) -> "State":
        return cls(grid, grid.zeros(), np.zeros((grid.dim,) + tuple(grid.n_cells)))


def delta(face_field: np.ndarray, axis: int, grid: PeriodicGrid) -> np.ndarray:
    """Per-cell difference of bounding face values along an axis.

    With faces in the left-face convention, cell i receives
    face[i+1] - face[i] (its right face minus its left face).
    """
    grid._check_axis(axis)
    return np.roll(face_field, -1, axis=axis) - face_field


def mu(face_field: np.ndarray, axis: int, grid: PeriodicGrid) -> np.ndarray:
    """Per-cell average of the two bounding face values along an axis."""
    grid._check_axis(axis)
    return 0.5 * (np.roll(face_field, -1, axis=axis) + face_field)


def central_derivative(cell_field: np.ndarray, axis: int, grid: PeriodicGrid) -> np.ndarray:
    """Wide central difference (f[i+1] - f[i-1]) / (2 dx) on cell data.

    This is the derivative the implicit acoustic terms induce; it annihilates
    constants and, for even cell counts, the checkerboard mode.
    """
    grid._check_axis(axis)
    h = grid.dx[axis]
    return (np.roll(cell_field, -1, axis=axis) - np.roll(cell_field, 1, axis=axis)) / (2.0 * h)


def norm(field: np.ndarray, which: str, grid: PeriodicGrid) -> float:
    """Cell-volume weighted norm of a cell field: L1, L2 or Linf."""
    vol = grid.cell_volume
    flat = np.asarray(field).ravel()
    if which == "L1":
        return float(np.sum(np.abs(flat)) * vol)
    if which == "L2":
        return float(np.sqrt(np.sum(flat * flat) * vol))
    if which == "Linf":
        return float(np.max(np.abs(flat))) if flat.size else 0.0
    raise ConfigurationError(f"unknown norm {which!r}; expected L1, L2 or Linf")


def inner(f: np.ndarray, g: np.ndarray, grid: PeriodicGrid) -> float:
    """Cell-volume weighted l2 inner product of two cell fields."""
    return float(np.sum(np.asarray(f) * np.asarray(g)) * grid.cell_volume)


def dump_matrix(field: np.ndarray, path) -> None:
    """Write a cell field as a plain-text matrix, one row per x2 index."""
    arr = np.asarray(field, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    else:
        arr = arr.T  # rows indexed by x2, columns by x1
    with open(path, "w", newline="\n") as fh:
        for row in arr:
            fh.write(" ".join("%.17g" % v for v in row))
            fh.write("\n")


def dump_csv(field: np.ndarray, grid: PeriodicGrid, path) -> None:
    """Write a cell field as CSV rows x1,x2,value (x2 = 0 in 1D)."""
    arr = np.asarray(field, dtype=float)
    x = grid.centers()
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x1", "x2", "value"])
        if grid.dim == 1:
            for x1, v in zip(x[0], arr):
                writer.writerow(["%.17g" % x1, "%.17g" % 0.0, "%.17g" % v])
        else:
            x1, x2 = x
            for idx in np.ndindex(arr.shape):
                writer.writerow(["%.17g" % x1[idx], "%.17g" % x2[idx], "%.17g" % arr[idx]])
