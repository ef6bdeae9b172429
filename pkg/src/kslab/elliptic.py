"""Helmholtz solver for the quasi-stationary signal equation 0 = lap(v) - v + g.

The discrete operator (I - lap_h) uses the standard 5/7-point Laplacian with
Neumann ghost reflection. It is symmetric positive definite and an M-matrix,
so nonnegative sources give nonnegative solutions. Two solve paths exist: a
fast cosine-transform diagonalization (exact for the discrete operator) and a
matrix-free conjugate-gradient iteration used as a cross-check.
"""

from __future__ import annotations

import functools
import time
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .grid import Grid, GridField, integrate, lp_norm


@dataclass
class EllipticSolveReport:
    iterations: int
    residual_l2: float
    wall_time: float


class EllipticConvergenceError(RuntimeError):
    def __init__(self, message: str, report: EllipticSolveReport):
        super().__init__(message)
        self.report = report


def laplacian(values: np.ndarray, grid: Grid) -> np.ndarray:
    """5/7-point Laplacian with Neumann ghost reflection."""
    padded = np.pad(values, 1, mode="edge")
    inner = tuple(slice(1, -1) for _ in range(grid.dim))
    out = np.zeros_like(values)
    for axis in range(grid.dim):
        lo = list(inner)
        hi = list(inner)
        lo[axis] = slice(0, -2)
        hi[axis] = slice(2, None)
        out += (padded[tuple(hi)] - 2.0 * values + padded[tuple(lo)]) / grid.h[axis] ** 2
    return out


@functools.lru_cache(maxsize=16)
def neumann_eigenvalues(grid: Grid) -> np.ndarray:
    """Eigenvalues of -lap_h on the DCT-II basis, shaped like a field."""
    lams = []
    for a in range(grid.dim):
        n, h = grid.cells[a], grid.h[a]
        k = np.arange(n)
        lams.append((2.0 / h**2) * (1.0 - np.cos(np.pi * k / n)))
    shape = [1] * grid.dim
    total = np.zeros(grid.cells)
    for a, lam in enumerate(lams):
        s = shape.copy()
        s[a] = grid.cells[a]
        total = total + lam.reshape(s)
    return total


def _solve_transform(source: GridField) -> np.ndarray:
    lam = neumann_eigenvalues(source.grid)
    shat = scipy.fft.dctn(source.values, type=2, norm="ortho")
    return scipy.fft.idctn(shat / (1.0 + lam), type=2, norm="ortho")


def _solve_cg(source: GridField, tol: float, maxiter: int):
    grid = source.grid
    b = source.values

    def apply_op(x):
        return x - laplacian(x, grid)

    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = float(np.sum(r * r))
    bnorm = np.sqrt(float(np.sum(b * b)))
    if bnorm == 0.0:
        return x, 0
    it = 0
    while np.sqrt(rs) > tol * bnorm:
        if it >= maxiter:
            return x, -it
        ap = apply_op(p)
        alpha = rs / float(np.sum(p * ap))
        x += alpha * p
        r -= alpha * ap
        rs_new = float(np.sum(r * r))
        p = r + (rs_new / rs) * p
        rs = rs_new
        it += 1
    return x, it


def solve_helmholtz_neumann(
    source: GridField,
    tol: float = 1e-10,
    method: str = "transform",
    maxiter: int = 50000,
) -> tuple[GridField, EllipticSolveReport]:
    """Solve (I - lap_h) v = source with homogeneous Neumann conditions.

    The transform path diagonalizes the operator exactly; the cg path iterates
    to a relative l2 residual of tol and raises EllipticConvergenceError (with
    the report attached) if the iteration cap is hit.
    """
    if not (0.0 < tol <= 1e-6):
        raise ValueError(f"tol must lie in (0, 1e-6], got {tol}")
    source.check_finite("elliptic source")
    start = time.perf_counter()
    if method == "transform":
        v = _solve_transform(source)
        iterations = 1
    elif method == "cg":
        v, iterations = _solve_cg(source, tol, maxiter)
    else:
        raise ValueError(f"unknown method {method!r}")
    resid = laplacian(v, source.grid) - v + source.values
    resid_l2 = float(np.sqrt(np.sum(resid * resid)))
    report = EllipticSolveReport(
        iterations=abs(iterations),
        residual_l2=resid_l2,
        wall_time=time.perf_counter() - start,
    )
    if iterations < 0:
        raise EllipticConvergenceError(
            f"elliptic solve did not converge within {maxiter} iterations "
            f"(residual {resid_l2:.3e})",
            report,
        )
    return GridField(source.grid, v), report


def contraction_check(v: GridField, source: GridField, r: float):
    """L^r comparison of the solution against its source.

    Returns (lhs, rhs, ok) with lhs = ||v||_r, rhs = ||source||_r and
    ok = lhs <= rhs * (1 + 1e-8).
    """
    lhs = lp_norm(v, r)
    rhs = lp_norm(source, r)
    return lhs, rhs, bool(lhs <= rhs * (1.0 + 1e-8))


class FaceGradient:
    """Per-axis face-centered differences of a field.

    faces[a] has one extra entry along axis a (one value per face); the
    boundary-normal entries are exactly zero, matching the Neumann condition.
    """

    def __init__(self, f: GridField):
        grid = f.grid
        self.grid = grid
        self.faces: list[np.ndarray] = []
        for a in range(grid.dim):
            shape = list(grid.cells)
            shape[a] += 1
            face = np.zeros(shape)
            interior = [slice(None)] * grid.dim
            interior[a] = slice(1, -1)
            hi = [slice(None)] * grid.dim
            hi[a] = slice(1, None)
            lo = [slice(None)] * grid.dim
            lo[a] = slice(0, -1)
            face[tuple(interior)] = (f.values[tuple(hi)] - f.values[tuple(lo)]) / grid.h[a]
            self.faces.append(face)

    def axis_inf_norms(self) -> list[float]:
        return [float(np.max(np.abs(face))) for face in self.faces]

    def cell_centered(self) -> list[np.ndarray]:
        """Average the two adjacent faces; equals the ghost-reflected central difference."""
        out = []
        for a, face in enumerate(self.faces):
            lo = [slice(None)] * self.grid.dim
            lo[a] = slice(0, -1)
            hi = [slice(None)] * self.grid.dim
            hi[a] = slice(1, None)
            out.append(0.5 * (face[tuple(lo)] + face[tuple(hi)]))
        return out

    def cell_magnitude(self) -> np.ndarray:
        total = np.zeros(self.grid.cells)
        for comp in self.cell_centered():
            total += comp * comp
        return np.sqrt(total)


def gradient(v: GridField) -> FaceGradient:
    """Face-centered gradient with exactly vanishing boundary-normal components."""
    v.check_finite("field")
    return FaceGradient(v)


def mean_identity_gap(v: GridField, source: GridField) -> float:
    """|integral(v) - integral(source)|, zero to solver tolerance."""
    return abs(integrate(v) - integrate(source))
