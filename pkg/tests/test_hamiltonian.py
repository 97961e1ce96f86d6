import numpy as np
import pytest

from hpimc.dvr import DvrBand, kinetic_prefactor
from hpimc.errors import InvalidArgument, NumericalFailure
from hpimc.grid import make_grid
from hpimc.hamiltonian import (DoubleWell, Harmonic, System, Tabulated, assemble_dense,
                               double_well_value, eigendecompose, fourier_kinetic_matrix,
                               potential_on_grid)
from conftest import fig1_potential, fig1_system


def test_double_well_values():
    assert double_well_value(0.0, 1.0, 1.0, 1.0) == 0.0
    m, w, v0 = 2.0, 0.5, 0.3
    xmin = np.sqrt(4 * v0 / (m * w ** 2))
    assert double_well_value(xmin, m, w, v0) == pytest.approx(-v0, rel=1e-14)
    assert double_well_value(-xmin, m, w, v0) == pytest.approx(-v0, rel=1e-14)


def test_fig1_well_minimum():
    assert fig1_potential().minimum == pytest.approx(1.6938, abs=1e-4)


def test_double_well_symmetry():
    dw = fig1_potential()
    x = np.linspace(0.01, 5, 50)
    np.testing.assert_allclose(dw(x), dw(-x), rtol=1e-14)
    h = 1e-5
    dv = lambda y: (dw(y + h) - dw(y - h)) / (2 * h)
    np.testing.assert_allclose(dv(-x), -dv(x), rtol=1e-8, atol=1e-12)


def test_invalid_parameters():
    with pytest.raises(InvalidArgument):
        DoubleWell(1.0, -1.0, 1.0)
    with pytest.raises(InvalidArgument):
        potential_on_grid(Tabulated([0.0] * 3), make_grid(1.0, 2))


def test_two_by_two_reference():
    # smallest grid allowed is 4 points, so check the leading 2x2 block
    grid = make_grid(4.0, 2)
    h = assemble_dense(grid, Tabulated(np.zeros(4)), 1.0).matrix
    np.testing.assert_allclose(h[:2, :2], [[np.pi ** 2 / 6, -1.0], [-1.0, np.pi ** 2 / 6]], rtol=1e-15)


def test_constant_shift(rng):
    grid = make_grid(5.0, 4)
    base = eigendecompose(assemble_dense(grid, Tabulated(np.zeros(16)), 1.0)).eigenvalues
    shifted = eigendecompose(assemble_dense(grid, Tabulated(np.full(16, 0.37)), 1.0)).eigenvalues
    np.testing.assert_allclose(shifted, base + 0.37, atol=1e-13)


def test_dense_equals_band_plus_potential():
    grid = make_grid(12.0, 6)
    pot = Harmonic(1.0, 0.5)
    h = assemble_dense(grid, pot, 1.0)
    band = DvrBand(kinetic_prefactor(1.0, grid.spacing), 64, 64).to_dense()
    np.testing.assert_allclose(h.matrix, band + np.diag(pot(grid.positions)), rtol=1e-15)
    np.testing.assert_allclose(h.matrix, h.matrix.T, atol=0)
    np.testing.assert_allclose(h.potential_diagonal, pot(grid.positions), atol=1e-14)


def test_kinetic_positive():
    for n in (3, 6, 9):
        grid = make_grid(10.0, n)
        t = assemble_dense(grid, Tabulated(np.zeros(grid.num_points)), 1.0).matrix
        assert np.linalg.eigvalsh(t).min() > -1e-10


def test_fourier_kinetic_symmetric_and_plane_waves():
    grid = make_grid(6.0, 4)
    t = fourier_kinetic_matrix(grid, 2.0)
    np.testing.assert_allclose(t, t.T, atol=0)
    k = 3
    wave = np.exp(2j * np.pi * k * np.arange(16) / 16)
    p = 2 * np.pi * k / grid.length
    np.testing.assert_allclose(t @ wave, p ** 2 / 4.0 * wave, atol=1e-12)


def test_fig1_tunneling_doublet():
    e = fig1_system(8).spectrum.eigenvalues
    assert e[0] < e[1] < 0
    assert e[1] - e[0] == pytest.approx(3.3154680627e-07, rel=1e-6)
    assert e[2] - e[1] > 1000 * (e[1] - e[0])


def test_eigendecompose_examples(rng):
    s = eigendecompose(np.diag([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(s.eigenvalues, [1, 2, 3])
    np.testing.assert_allclose(np.abs(s.eigenvectors), np.eye(3))
    np.testing.assert_allclose(eigendecompose(np.array([[0.0, 1.0], [1.0, 0.0]])).eigenvalues, [-1, 1])
    for _ in range(10):
        a = rng.normal(size=(8, 8))
        h = a + a.T
        s = eigendecompose(h)
        assert np.all(np.diff(s.eigenvalues) >= 0)
        np.testing.assert_allclose(s.eigenvectors.T @ s.eigenvectors, np.eye(8), atol=1e-10)
        assert np.linalg.norm(h - s.function(lambda e: e)) <= 1e-9 * np.linalg.norm(h)


def test_eigendecompose_rejects_asymmetric():
    with pytest.raises(InvalidArgument):
        eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eigendecompose_nonfinite():
    with pytest.raises((NumericalFailure, InvalidArgument)):
        eigendecompose(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_system_shift():
    s = System(make_grid(8.0, 4), Harmonic(1.0, 1.0), 1.0)
    t = s.shifted(0.5)
    np.testing.assert_allclose(t.spectrum.eigenvalues, s.spectrum.eigenvalues - 0.5, atol=1e-13)
