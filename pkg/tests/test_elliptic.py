"""Helmholtz solver: eigenmodes, contraction, positivity, solver path agreement."""

import numpy as np
import pytest

from kslab.elliptic import (
    EllipticConvergenceError,
    contraction_check,
    gradient,
    solve_helmholtz_neumann,
)
from kslab.grid import GridField, build_grid, constant_field, integrate, sample_field
from kslab.measures import RadonMeasure, mollify


def test_constant_source_is_fixed_point():
    g = build_grid(2, [1, 1], [32, 32])
    v, report = solve_helmholtz_neumann(constant_field(g, 2.5))
    assert np.allclose(v.values, 2.5, rtol=1e-13, atol=0)
    assert report.residual_l2 <= 1e-10


@pytest.mark.parametrize("method", ["transform", "cg"])
def test_cosine_mode_matches_discrete_eigenvalue(method):
    g = build_grid(2, [2.0, 1.0], [64, 32])
    Lx, h = g.lengths[0], g.h[0]
    src = sample_field(g, lambda x, y: 1.0 + np.cos(np.pi * x / Lx))
    lam_h = (2.0 / h**2) * (1.0 - np.cos(np.pi * h / Lx))
    expected = sample_field(g, lambda x, y: 1.0 + np.cos(np.pi * x / Lx) / (1.0 + lam_h))
    v, _ = solve_helmholtz_neumann(src, method=method)
    assert np.max(np.abs(v.values - expected.values)) <= 1e-10


def test_3d_cosine_mode():
    g = build_grid(3, [1, 1, 1], [16, 16, 16])
    h = g.h[2]
    src = sample_field(g, lambda x, y, z: 1.0 + np.cos(np.pi * z))
    lam_h = (2.0 / h**2) * (1.0 - np.cos(np.pi * h))
    v, _ = solve_helmholtz_neumann(src)
    expected = sample_field(g, lambda x, y, z: 1.0 + np.cos(np.pi * z) / (1.0 + lam_h))
    assert np.max(np.abs(v.values - expected.values)) <= 1e-12


def test_mollified_dirac_source_gives_positive_solution():
    g = build_grid(2, [1, 1], [64, 64])
    mu = RadonMeasure(atoms=[(np.array([0.5, 0.5]), 1.0)])
    v, _ = solve_helmholtz_neumann(mollify(mu, 0.01, g))
    assert v.values.min() > 0.0


def test_mean_identity():
    g = build_grid(2, [1, 1], [48, 48])
    rng = np.random.default_rng(2)
    src = GridField(g, rng.random(g.cells) * 3.0)
    v, _ = solve_helmholtz_neumann(src)
    assert integrate(v) == pytest.approx(integrate(src), rel=1e-12)


def test_contraction_equality_for_constants():
    g = build_grid(2, [1, 1], [16, 16])
    src = constant_field(g, 4.0)
    v, _ = solve_helmholtz_neumann(src)
    for r in (1.0, 2.0, np.inf):
        lhs, rhs, ok = contraction_check(v, src, r)
        assert ok
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_contraction_strict_for_cosine_mode():
    g = build_grid(2, [1, 1], [32, 32])
    src = sample_field(g, lambda x, y: 1.0 + np.cos(np.pi * x))
    v, _ = solve_helmholtz_neumann(src)
    lhs, rhs, ok = contraction_check(v, src, np.inf)
    assert ok and lhs < rhs


@pytest.mark.parametrize("r", [1.0, 2.0, np.inf])
def test_contraction_random_sources(r):
    g = build_grid(2, [1, 1.4], [32, 24])
    rng = np.random.default_rng(17)
    for _ in range(25):
        src = GridField(g, rng.random(g.cells) * rng.uniform(0.5, 20.0))
        v, _ = solve_helmholtz_neumann(src)
        lhs, rhs, ok = contraction_check(v, src, r)
        assert ok, f"contraction failed: {lhs} > {rhs}"
        assert v.values.min() >= -1e-13 * src.values.max()


def test_solver_paths_agree():
    g = build_grid(2, [1, 1], [48, 48])
    rng = np.random.default_rng(23)
    for _ in range(3):
        src = GridField(g, rng.random(g.cells) * 5.0)
        vt, _ = solve_helmholtz_neumann(src, method="transform")
        vc, _ = solve_helmholtz_neumann(src, method="cg")
        assert np.max(np.abs(vt.values - vc.values)) <= 1e-10


def test_cg_iteration_cap_raises_with_report():
    g = build_grid(2, [1, 1], [32, 32])
    rng = np.random.default_rng(4)
    src = GridField(g, rng.random(g.cells))
    with pytest.raises(EllipticConvergenceError) as err:
        solve_helmholtz_neumann(src, method="cg", maxiter=3)
    assert err.value.report.iterations == 3
    assert err.value.report.residual_l2 > 0


def test_tol_precondition():
    g = build_grid(2, [1, 1], [16, 16])
    with pytest.raises(ValueError):
        solve_helmholtz_neumann(constant_field(g, 1.0), tol=1e-3)


def test_gradient_of_constant_is_zero():
    g = build_grid(2, [1, 1], [16, 16])
    grad = gradient(constant_field(g, 3.0))
    for face in grad.faces:
        assert np.all(face == 0.0)


def test_gradient_boundary_normal_faces_are_zero():
    g = build_grid(2, [1, 1], [16, 16])
    rng = np.random.default_rng(9)
    grad = gradient(GridField(g, rng.random(g.cells)))
    assert np.all(grad.faces[0][0, :] == 0.0)
    assert np.all(grad.faces[0][-1, :] == 0.0)
    assert np.all(grad.faces[1][:, 0] == 0.0)
    assert np.all(grad.faces[1][:, -1] == 0.0)


def test_gradient_cosine_second_order():
    L = 1.0
    errs = []
    for n in (16, 32, 64):
        g = build_grid(2, [L, L], [n, n])
        v = sample_field(g, lambda x, y: np.cos(np.pi * x / L))
        gx = gradient(v).cell_centered()[0]
        x, _ = g.center_mesh()
        exact = -(np.pi / L) * np.sin(np.pi * x / L)
        errs.append(np.max(np.abs(gx - exact)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.3)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.3)
