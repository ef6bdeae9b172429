"""Structured box domains and the discrete calculus every other module builds on.

Fields live at cell centers of a uniform (per axis) mesh on a 2D or 3D box.
Quadrature is the midpoint rule, boundary handling is Neumann ghost
reflection (ghost cell mirrors the adjacent interior cell), and cells are
indexed lexicographically with x fastest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GridError(ValueError):
    """Invalid grid construction or field/grid mismatch."""


@dataclass(frozen=True)
class Grid:
    """Cell-centered structured mesh on a box [0, L1] x ... x [0, Ldim].

    Attributes:
        dim: spatial dimension, 2 or 3.
        lengths: per-axis extent of the box.
        cells: per-axis cell count (>= 4 each).
        h: per-axis cell width, lengths[i] / cells[i].
    """

    dim: int
    lengths: tuple[float, ...]
    cells: tuple[int, ...]
    h: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise GridError(f"dim must be 2 or 3, got {self.dim}")
        if len(self.lengths) != self.dim or len(self.cells) != self.dim:
            raise GridError("lengths and cells must have one entry per axis")
        if any(L <= 0 for L in self.lengths):
            raise GridError(f"box lengths must be positive, got {self.lengths}")
        if any(n < 4 for n in self.cells):
            raise GridError(f"need at least 4 cells per axis, got {self.cells}")
        object.__setattr__(
            self, "h", tuple(L / n for L, n in zip(self.lengths, self.cells))
        )

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.cells))

    def axis_centers(self, axis: int) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        n, h = self.cells[axis], self.h[axis]
        return (np.arange(n) + 0.5) * h

    def center_mesh(self) -> list[np.ndarray]:
        """Full cell-center coordinate arrays, each shaped like a field."""
        axes = [self.axis_centers(a) for a in range(self.dim)]
        return list(np.meshgrid(*axes, indexing="ij"))


@dataclass
class GridField:
    """Scalar field sampled at the cell centers of a grid.

    values has shape grid.cells with axis 0 = x; flattening with
    order='F' yields the lexicographic, x-fastest cell ordering.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.cells:
            raise GridError(
                f"field shape {self.values.shape} does not match grid cells {self.grid.cells}"
            )

    def copy(self) -> "GridField":
        return GridField(self.grid, self.values.copy())

    def check_finite(self, what: str = "field") -> "GridField":
        if not np.all(np.isfinite(self.values)):
            raise GridError(f"{what} contains non-finite values")
        return self


def build_grid(dim: int, lengths, cells) -> Grid:
    """Build a box grid; rejects dim outside {2,3} and fewer than 4 cells per axis."""
    return Grid(int(dim), tuple(float(L) for L in lengths), tuple(int(n) for n in cells))


def constant_field(grid: Grid, value: float) -> GridField:
    return GridField(grid, np.full(grid.cells, float(value)))


def sample_field(grid: Grid, fn) -> GridField:
    """Sample a callable fn(*coords) at all cell centers."""
    return GridField(grid, np.asarray(fn(*grid.center_mesh()), dtype=float))


def integrate(f: GridField) -> float:
    """Midpoint-rule integral over the box; exact for cellwise-constant data."""
    f.check_finite("integrand")
    return float(np.sum(f.values)) * f.grid.cell_volume


def lp_norm(f: GridField, p: float) -> float:
    """L^p norm via the midpoint rule; p = inf returns the max cell magnitude."""
    f.check_finite("field")
    if np.isinf(p):
        return float(np.max(np.abs(f.values)))
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    vol = f.grid.cell_volume
    return float((np.sum(np.abs(f.values) ** p) * vol) ** (1.0 / p))


def _edge_padded(values: np.ndarray) -> np.ndarray:
    # Neumann ghost reflection: ghost cell copies the adjacent interior cell.
    return np.pad(values, 1, mode="edge")


def cell_gradient(f: GridField) -> list[np.ndarray]:
    """Per-axis central-difference gradient at cell centers with ghost reflection."""
    out = []
    padded = _edge_padded(f.values)
    inner = tuple(slice(1, -1) for _ in range(f.grid.dim))
    for axis in range(f.grid.dim):
        lo = list(inner)
        hi = list(inner)
        lo[axis] = slice(0, -2)
        hi[axis] = slice(2, None)
        out.append((padded[tuple(hi)] - padded[tuple(lo)]) / (2.0 * f.grid.h[axis]))
    return out


def gradient_energy(f: GridField, p: float) -> float:
    """Dirichlet energy of f^(p/2): integral of |grad(f^(p/2))|^2.

    Central differences with Neumann ghost reflection, so constant fields give
    exactly zero and the discrete normal derivative vanishes at the boundary.
    """
    if not (1.0 < p < np.inf):
        raise ValueError(f"p must lie in (1, inf), got {p}")
    f.check_finite("field")
    if np.min(f.values) < 0:
        vmax = float(np.max(f.values))
        if np.min(f.values) < -1e-13 * max(vmax, 1.0):
            raise ValueError("gradient_energy requires a nonnegative field")
    g = GridField(f.grid, np.maximum(f.values, 0.0) ** (p / 2.0))
    grads = cell_gradient(g)
    total = np.zeros(f.grid.cells)
    for d in grads:
        total += d * d
    return float(np.sum(total)) * f.grid.cell_volume


# Snapshot file format: one header line "KSLAB1 dim nx ny [nz] Lx Ly [Lz]"
# followed by the cell values in lexicographic order (x fastest).

SNAPSHOT_MAGIC = "KSLAB1"


def write_snapshot(path, f: GridField) -> None:
    g = f.grid
    header = " ".join(
        [SNAPSHOT_MAGIC, str(g.dim)]
        + [str(n) for n in g.cells]
        + [f"{L:.17g}" for L in g.lengths]
    )
    flat = f.values.flatten(order="F")
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for start in range(0, flat.size, 8):
            fh.write(" ".join(f"{v:.17g}" for v in flat[start : start + 8]) + "\n")


def read_snapshot(path) -> GridField:
    with open(path) as fh:
        header = fh.readline().split()
        body = fh.read().split()
    if not header or header[0] != SNAPSHOT_MAGIC:
        raise GridError(f"{path}: not a {SNAPSHOT_MAGIC} snapshot file")
    dim = int(header[1])
    if len(header) != 2 + 2 * dim:
        raise GridError(f"{path}: malformed snapshot header")
    cells = tuple(int(x) for x in header[2 : 2 + dim])
    lengths = tuple(float(x) for x in header[2 + dim :])
    grid = build_grid(dim, lengths, cells)
    flat = np.array([float(x) for x in body])
    if flat.size != grid.n_cells:
        raise GridError(
            f"{path}: expected {grid.n_cells} values, found {flat.size}"
        )
    return GridField(grid, flat.reshape(cells, order="F"))
