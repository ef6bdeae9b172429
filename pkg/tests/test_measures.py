"""Radon measures, Gaussian mollification, vague distance, density loading."""

import numpy as np
import pytest

from kslab.grid import GridField, build_grid, constant_field, integrate, write_snapshot
from kslab.measures import (
    RadonMeasure,
    TestDictionary,
    UnderResolvedMollifierError,
    load_density,
    mollify,
    vague_distance,
)


@pytest.fixture
def unit_grid():
    return build_grid(2, [1, 1], [64, 64])


def dirac(x=0.5, y=0.5, w=1.0):
    return RadonMeasure(atoms=[(np.array([x, y]), w)])


def test_mollified_dirac_mass_is_exact(unit_grid):
    f = mollify(dirac(), 0.04, unit_grid)
    assert integrate(f) == pytest.approx(1.0, rel=1e-12)
    assert f.values.min() >= 0.0


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.02, 0.005])
def test_mass_preservation_across_eps(unit_grid, eps):
    mu = RadonMeasure(atoms=[(np.array([0.3, 0.7]), 2.5), (np.array([0.8, 0.2]), 0.5)])
    assert integrate(mollify(mu, eps, unit_grid)) == pytest.approx(3.0, rel=1e-12)


def test_mollify_uniform_density_is_constant(unit_grid):
    mu = RadonMeasure(density=constant_field(unit_grid, 2.0))
    f = mollify(mu, 0.1, unit_grid)
    assert np.allclose(f.values, 2.0, rtol=1e-14, atol=0)
    assert integrate(f) == pytest.approx(2.0, rel=1e-12)


def test_two_atom_half_masses_converge(unit_grid):
    mu = RadonMeasure(
        atoms=[(np.array([0.25, 0.5]), 1.0), (np.array([0.75, 0.5]), 2.0)]
    )
    errs = []
    for eps in (0.02, 0.01, 0.005):
        f = mollify(mu, eps, unit_grid)
        left = np.sum(f.values[:32, :]) * unit_grid.cell_volume
        errs.append(abs(left - 1.0))
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] < 1e-4


def test_mollify_is_linear_over_atoms(unit_grid):
    a = dirac(0.3, 0.4, 1.3)
    b = dirac(0.6, 0.7, 0.7)
    both = RadonMeasure(atoms=a.atoms + b.atoms)
    f = mollify(both, 0.02, unit_grid)
    fa = mollify(a, 0.02, unit_grid)
    fb = mollify(b, 0.02, unit_grid)
    assert np.allclose(f.values, fa.values + fb.values, rtol=0, atol=1e-12 * f.values.max())


def test_under_resolved_mollifier_rejected():
    g = build_grid(2, [1, 1], [8, 8])  # h = 0.125, need sqrt(eps) >= 0.25
    with pytest.raises(UnderResolvedMollifierError):
        mollify(dirac(), 0.01, g)


def test_boundary_atom_is_nudged_with_warning(unit_grid):
    mu = RadonMeasure(atoms=[(np.array([0.0, 0.5]), 1.0)])
    with pytest.warns(UserWarning, match="nudged"):
        f = mollify(mu, 0.04, unit_grid)
    assert integrate(f) == pytest.approx(1.0, rel=1e-12)


def test_atom_outside_box_rejected(unit_grid):
    mu = RadonMeasure(atoms=[(np.array([1.5, 0.5]), 1.0)])
    with pytest.raises(ValueError):
        mollify(mu, 0.04, unit_grid)


def test_measure_validation():
    with pytest.raises(ValueError):
        RadonMeasure(atoms=[(np.array([0.5, 0.5]), -1.0)])
    with pytest.raises(ValueError):
        RadonMeasure(atoms=[])  # zero mass


def test_vague_distance_identical_uniform(unit_grid):
    mu = RadonMeasure(density=constant_field(unit_grid, 3.0))
    f = constant_field(unit_grid, 3.0)
    d = TestDictionary(unit_grid.lengths, 4)
    assert vague_distance(f, mu, d) <= 1e-12


def test_vague_distance_decreases_with_eps(unit_grid):
    mu = dirac()
    d = TestDictionary(unit_grid.lengths, 4)
    dists = [vague_distance(mollify(mu, eps, unit_grid), mu, d) for eps in (0.1, 0.05, 0.025)]
    assert dists[0] > dists[1] > dists[2]


def test_constant_only_dictionary_sees_mass_exactly(unit_grid):
    mu = dirac(0.3, 0.3, 1.7)
    d = TestDictionary(unit_grid.lengths, 0)
    assert len(d) == 1
    f = mollify(mu, 0.05, unit_grid)
    assert vague_distance(f, mu, d) <= 1e-12


def test_empty_dictionary_rejected(unit_grid):
    with pytest.raises(ValueError):
        TestDictionary(unit_grid.lengths, -1)
    d = TestDictionary(unit_grid.lengths, 0)
    d.modes = []
    with pytest.raises(ValueError):
        vague_distance(constant_field(unit_grid, 1.0), dirac(), d)


def test_dictionary_contains_constant_and_respects_neumann(unit_grid):
    d = TestDictionary(unit_grid.lengths, 3)
    assert (0, 0) in d.modes
    # Evenness of each cosine across both walls: the mirrored ghost sample
    # equals the interior sample to roundoff, so ghost reflection is exact.
    for k in range(4):
        for a in range(2):
            L = unit_grid.lengths[a]
            h = unit_grid.h[a]
            inner_lo = np.cos(k * np.pi * (h / 2) / L)
            ghost_lo = np.cos(k * np.pi * (-h / 2) / L)
            inner_hi = np.cos(k * np.pi * (L - h / 2) / L)
            ghost_hi = np.cos(k * np.pi * (L + h / 2) / L)
            assert abs(inner_lo - ghost_lo) <= 1e-14
            assert abs(inner_hi - ghost_hi) <= 1e-14


def test_load_density_constant(tmp_path, unit_grid):
    path = tmp_path / "dens.dat"
    write_snapshot(path, constant_field(unit_grid, 2.0))
    mu = load_density(path, unit_grid, p=2.0)
    assert mu.mass == pytest.approx(2.0, rel=1e-14)
    assert mu.density_p == 2.0


def test_load_density_rejects_negative(tmp_path, unit_grid):
    vals = np.ones(unit_grid.cells)
    vals[3, 3] = -0.1
    path = tmp_path / "neg.dat"
    write_snapshot(path, GridField(unit_grid, vals))
    with pytest.raises(ValueError):
        load_density(path, unit_grid, p=2.0)


def test_load_density_rejects_grid_mismatch(tmp_path, unit_grid):
    other = build_grid(2, [1, 1], [32, 32])
    path = tmp_path / "dens.dat"
    write_snapshot(path, constant_field(other, 1.0))
    with pytest.raises(ValueError):
        load_density(path, unit_grid, p=2.0)


def test_load_density_integrable_spike_matches_quadrature(tmp_path):
    # f(x, y) = x^(-1/2): integrable; mass against an independent midpoint sum.
    g = build_grid(2, [1, 1], [128, 128])
    x, _ = g.center_mesh()
    vals = x ** (-0.5)
    path = tmp_path / "spike.dat"
    write_snapshot(path, GridField(g, vals))
    mu = load_density(path, g, p=1.5)
    oracle = float(sum(vals[i, j] for i in range(128) for j in range(128))) * g.cell_volume
    assert mu.mass == pytest.approx(oracle, abs=1e-10)


def test_scaled_measure(unit_grid):
    mu = RadonMeasure(
        atoms=[(np.array([0.5, 0.5]), 1.0)],
        density=constant_field(unit_grid, 1.0),
    )
    nu = mu.scaled(6.0)
    assert nu.mass == pytest.approx(6.0, rel=1e-12)
    assert nu.atom_mass == pytest.approx(3.0, rel=1e-12)
