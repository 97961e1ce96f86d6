import numpy as np
import pytest
from hypothesis import given, strategies as st

from hpimc.errors import InvalidArgument
from hpimc.grid import (HARTREE_PER_KELVIN, HARTREE_PER_WAVENUMBER, UniformGrid, basis_state,
                        kelvin_to_beta, make_grid, wavenumber_to_hartree)


def test_fig1_grid():
    g = make_grid(30.0, 8)
    assert g.num_points == 256
    assert g.spacing == pytest.approx(0.1171875, abs=1e-15)
    assert g.n_qubits == 8


def test_small_grid_positions():
    np.testing.assert_array_equal(make_grid(2.0, 2).positions, [-1.0, -0.5, 0.0, 0.5])


def test_64_point_spacing():
    g = make_grid(30.0, 6)
    assert (g.num_points, g.spacing) == (64, 0.46875)


def test_endpoints():
    g = make_grid(30.0, 5)
    assert g.position_of(0) == -15.0
    assert g.position_of(31) == pytest.approx(-15.0 + 31 * 30 / 32)


@pytest.mark.parametrize("length, n", [(0.0, 4), (-1.0, 4), (1.0, 1), (1.0, 17)])
def test_make_grid_rejects(length, n):
    with pytest.raises(InvalidArgument):
        make_grid(length, n)


def test_grid_rejects_non_power_of_two():
    with pytest.raises(InvalidArgument):
        UniformGrid(1.0, 12)


def test_basis_states():
    g = make_grid(1.0, 2)
    np.testing.assert_array_equal(basis_state(g, 0), [1, 0, 0, 0])
    np.testing.assert_array_equal(basis_state(g, 3), [0, 0, 0, 1])
    with pytest.raises(InvalidArgument):
        basis_state(g, 4)


def test_basis_orthonormal():
    g = make_grid(3.0, 4)
    b = np.array([basis_state(g, q) for q in range(g.num_points)])
    np.testing.assert_array_equal(b.conj() @ b.T, np.eye(16))


def test_unit_conversions():
    assert HARTREE_PER_WAVENUMBER == 4.556335e-6
    assert HARTREE_PER_KELVIN == 3.166812e-6
    assert wavenumber_to_hartree(500) == pytest.approx(2.27817e-3, rel=1e-5)
    assert wavenumber_to_hartree(1500) == pytest.approx(6.83450e-3, rel=1e-5)
    assert kelvin_to_beta(350) == pytest.approx(1 / (350 * 3.166812e-6), rel=1e-14)
    assert kelvin_to_beta(350) == pytest.approx(902.2142, rel=1e-7)
    with pytest.raises(InvalidArgument):
        wavenumber_to_hartree(0)
    with pytest.raises(InvalidArgument):
        kelvin_to_beta(-1)


@given(length=st.floats(0.1, 1e3), n=st.integers(2, 10))
def test_round_trip_and_uniform_gaps(length, n):
    g = make_grid(length, n)
    x = g.positions
    assert all(g.index_of(x[q]) == q for q in range(g.num_points))
    assert np.all(np.diff(x) > 0)
    np.testing.assert_allclose(np.diff(x), g.spacing, rtol=0, atol=1e-12 * length)
    assert g.spacing * g.num_points == pytest.approx(length, rel=1e-15)
