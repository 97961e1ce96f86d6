import numpy as np
import pytest

from hpimc.dvr import DvrBand, dvr_matrix, extract_diagonal, kinetic_prefactor
from hpimc.errors import InvalidArgument
from hpimc.grid import make_grid
from hpimc.sparse import (OneSparseMatrix, apply_exp_one_sparse, build_kinetic_propagator,
                          decompose_diagonal, decomposition_case, odd_part_split)
from oracles import dense_exp, fit_slope


def _pairs(part):
    return sorted((int(r) + 1, int(c) + 1) for r, c in zip(part.rows, part.cols))


def test_case2_example():
    (part,) = decompose_diagonal(8, 5, 0.3)
    assert _pairs(part) == [(1, 5), (2, 6), (3, 7), (4, 8)]
    assert set(part.rows.tolist()).isdisjoint(part.cols.tolist())
    part.validate()


def test_case3a_example():
    m1, m2 = decompose_diagonal(8, 2, -1.0)
    assert _pairs(m1) == [(1, 2), (3, 4), (5, 6), (7, 8)]
    assert _pairs(m2) == [(2, 3), (4, 5), (6, 7)]


def test_case3b_example():
    assert odd_part_split(3) == (1, 1)
    m1, m2 = decompose_diagonal(8, 3, 0.25)
    assert _pairs(m1) == [(1, 3), (2, 4), (5, 7), (6, 8)]
    assert _pairs(m2) == [(3, 5), (4, 6)]


def test_case1_single_diagonal():
    (part,) = decompose_diagonal(4, 1, 2.0)
    np.testing.assert_array_equal(part.to_dense(), 2 * np.eye(4))


@pytest.mark.parametrize("D", [4, 8, 16, 32, 64])
def test_decomposition_exhaustive(D):
    K = 0.7
    band = DvrBand(K, D, D)
    for nu in range(1, D + 1):
        value = band.values[nu - 1]
        parts = decompose_diagonal(D, nu, value)
        case = decomposition_case(D, nu)
        assert len(parts) == (1 if case in ("1", "2") else 2)
        total = np.zeros((D, D))
        for part in parts:
            part.validate()
            total += part.to_dense()
        np.testing.assert_array_equal(total, extract_diagonal(band, nu).to_dense())


@pytest.mark.parametrize("D", [4, 8, 16, 32, 64, 128])
def test_odd_part_split_unique(D):
    for nu in range(3, D // 2 + 1, 2):
        found = [(p, (nu - 1) // 2 ** p) for p in range(1, 12)
                 if (nu - 1) % 2 ** p == 0 and ((nu - 1) // 2 ** p) % 2 == 1]
        assert found == [odd_part_split(nu)]


def test_decompose_rejects():
    with pytest.raises(InvalidArgument):
        decompose_diagonal(12, 2, 1.0)
    with pytest.raises(InvalidArgument):
        decompose_diagonal(8, 9, 1.0)
    with pytest.raises(InvalidArgument):
        decompose_diagonal(8, 0, 1.0)


def random_one_sparse(rng, d):
    perm = rng.permutation(d)
    n_pairs = rng.integers(0, d // 2 + 1)
    rows, cols = [], []
    for i in range(n_pairs):
        r, c = sorted(perm[2 * i:2 * i + 2])
        rows.append(r)
        cols.append(c)
    for q in perm[2 * n_pairs:]:
        if rng.random() < 0.5:
            rows.append(q)
            cols.append(q)
    vals = rng.normal(size=len(rows))
    return OneSparseMatrix(d, np.array(rows, dtype=int), np.array(cols, dtype=int), vals)


def test_apply_identity_at_zero(rng):
    m = random_one_sparse(rng, 16)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    np.testing.assert_array_equal(apply_exp_one_sparse(m, 0.0, "real", psi), psi)
    np.testing.assert_array_equal(apply_exp_one_sparse(m, 0.0, "imaginary", psi), psi)


def test_pauli_x_rotation():
    a, theta = 0.7, 0.4
    m = OneSparseMatrix(2, np.array([0]), np.array([1]), np.array([a]))
    out = apply_exp_one_sparse(m, theta, "real", np.array([1, 0], dtype=complex))
    np.testing.assert_allclose(out, [np.cos(a * theta), -1j * np.sin(a * theta)], atol=1e-16)


@pytest.mark.parametrize("kind", ["real", "imaginary"])
def test_matches_dense_exponential(rng, kind):
    for _ in range(20):
        m = random_one_sparse(rng, 16)
        theta = rng.uniform(-2, 2)
        psi = rng.normal(size=16) + 1j * rng.normal(size=16)
        ref = dense_exp(m.to_dense(), theta, kind) @ psi
        np.testing.assert_allclose(apply_exp_one_sparse(m, theta, kind, psi), ref, atol=1e-12)


def test_batch_columns_match_single(rng):
    m = random_one_sparse(rng, 8)
    states = rng.normal(size=(8, 5)) + 0j
    batch = apply_exp_one_sparse(m, 0.3, "real", states)
    for j in range(5):
        np.testing.assert_allclose(batch[:, j], apply_exp_one_sparse(m, 0.3, "real", states[:, j]))


def test_real_time_norm_and_imaginary_positivity(rng):
    m = random_one_sparse(rng, 32)
    psi = rng.normal(size=32) + 1j * rng.normal(size=32)
    out = apply_exp_one_sparse(m, 1.3, "real", psi)
    assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(psi), rel=1e-13)
    mat = apply_exp_one_sparse(m, 0.8, "imaginary", np.eye(32))
    np.testing.assert_allclose(mat, mat.T, atol=1e-14)
    assert np.all(np.linalg.eigvalsh(mat.real) > 0)


def test_disjoint_blocks_commute(rng):
    a = OneSparseMatrix(8, np.array([0, 2]), np.array([1, 5]), np.array([0.3, -1.1]))
    b = OneSparseMatrix(8, np.array([3, 4]), np.array([7, 6]), np.array([0.9, 0.4]))
    psi = rng.normal(size=8) + 0j
    ab = apply_exp_one_sparse(a, 0.5, "real", apply_exp_one_sparse(b, 0.5, "real", psi))
    ba = apply_exp_one_sparse(b, 0.5, "real", apply_exp_one_sparse(a, 0.5, "real", psi))
    np.testing.assert_allclose(ab, ba, atol=1e-15)


def test_dimension_mismatch():
    m = OneSparseMatrix(4, np.array([0]), np.array([1]), np.array([1.0]))
    with pytest.raises(InvalidArgument):
        apply_exp_one_sparse(m, 1.0, "real", np.zeros(8))


def test_kinetic_propagator_structure():
    grid = make_grid(10.0, 5)
    prop = build_kinetic_propagator(grid, 2.0, 7, 0.1, "real")
    assert len(prop.factors) <= 2 * 7
    assert [f.nu for f in prop.factors] == sorted(f.nu for f in prop.factors)
    u = prop.to_dense()
    np.testing.assert_allclose(u.conj().T @ u, np.eye(32), atol=1e-10)


def test_ell_one_is_global_phase(rng):
    grid = make_grid(10.0, 4)
    mass, dt = 1.5, 0.37
    K = kinetic_prefactor(mass, grid.spacing)
    prop = build_kinetic_propagator(grid, mass, 1, dt, "real")
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    np.testing.assert_allclose(prop.apply(psi), np.exp(-1j * K * np.pi ** 2 / 6 * dt) * psi, atol=1e-14)


def test_full_band_first_order_convergence(rng):
    grid = make_grid(8.0, 4)
    mass = 1.0
    t = dvr_matrix(16, kinetic_prefactor(mass, grid.spacing))
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi /= np.linalg.norm(psi)
    dts = 0.05 * 2.0 ** -np.arange(6)
    errs = [np.linalg.norm(build_kinetic_propagator(grid, mass, 16, dt, "real").apply(psi)
                           - dense_exp(t, dt, "real") @ psi) for dt in dts]
    assert fit_slope(dts, errs) == pytest.approx(2.0, abs=0.1)
