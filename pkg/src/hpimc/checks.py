"""Self-contained validation suites with machine-readable reports.

Each suite returns ``{"suite", "passed", "checks": [...]}`` where every
check records its name, the measured value, the threshold and a verdict.
"""
from __future__ import annotations

from typing import Callable, Dict

import numpy as np

from .budget import tcf_error_bound, trace_norm
from .dvr import (diagonal_value, dvr_matrix, error_lower_bound, error_upper_bound,
                  exact_truncation_error)
from .grid import make_grid, wavenumber_to_hartree
from .hamiltonian import DoubleWell, System, eigendecompose, fourier_kinetic_matrix
from .mc import McConfig, mc_tcf
from .propagators import StepScheme, imaginary_time_step, real_time_step, step_matrix
from .sparse import OneSparseMatrix, apply_exp_one_sparse, decompose_diagonal, decomposition_case, odd_part_split
from .tcf import contract_tcf


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _check(name, passed, measured, threshold):
    measured = _plain(measured)
    return {"name": name, "passed": bool(passed), "measured": measured, "threshold": threshold}


def _report(suite, checks):
    return {"suite": suite, "passed": all(c["passed"] for c in checks), "checks": checks}


def _slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def _dense_eigh_exp(m, theta, kind):
    vals, vecs = np.linalg.eigh(m)
    f = np.exp(-1j * vals * theta) if kind == "real" else np.exp(-vals * theta)
    return (vecs * f) @ vecs.conj().T


def check_decompose(dims=(4, 8, 16, 32, 64)) -> dict:
    """Every diagonal of every size splits into at most two symmetric one-sparse parts."""
    bad_sum = bad_sparse = bad_sym = bad_count = bad_split = 0
    total = 0
    for D in dims:
        dense = dvr_matrix(D, 1.0)
        for nu in range(1, D + 1):
            total += 1
            k = nu - 1
            idx = np.arange(D)
            target = np.where(np.abs(idx[:, None] - idx[None, :]) == k, dense, 0.0)
            parts = decompose_diagonal(D, nu, diagonal_value(nu, 1.0))
            mats = [p.to_dense() for p in parts]
            bad_sum += not np.array_equal(sum(mats), target)
            for m in mats:
                occ = m != 0
                bad_sparse += bool(np.any(occ.sum(axis=0) > 1) or np.any(occ.sum(axis=1) > 1))
                bad_sym += not np.array_equal(m, m.T)
            bad_count += len(parts) > 2
            if decomposition_case(D, nu) == "3b":
                pairs = [(p, (nu - 1) >> p) for p in range(1, 32)
                         if (nu - 1) % (1 << p) == 0 and ((nu - 1) >> p) % 2 == 1]
                bad_split += pairs != [odd_part_split(nu)]
    return _report("decompose", [
        _check("parts sum to the diagonal", bad_sum == 0, f"{bad_sum}/{total} mismatches", "0"),
        _check("parts are one-sparse", bad_sparse == 0, f"{bad_sparse} violations", "0"),
        _check("parts are symmetric", bad_sym == 0, f"{bad_sym} violations", "0"),
        _check("at most two parts", bad_count == 0, f"{bad_count} violations", "0"),
        _check("odd-part split unique", bad_split == 0, f"{bad_split} violations", "0"),
    ])


def random_one_sparse(rng, d) -> OneSparseMatrix:
    perm = rng.permutation(d)
    n_pairs = int(rng.integers(0, d // 2 + 1))
    rows, cols = [], []
    for i in range(n_pairs):
        r, c = sorted(perm[2 * i:2 * i + 2])
        rows.append(r)
        cols.append(c)
    for q in perm[2 * n_pairs:]:
        if rng.random() < 0.5:
            rows.append(q)
            cols.append(q)
    return OneSparseMatrix(d, np.array(rows, dtype=int), np.array(cols, dtype=int),
                           rng.normal(size=len(rows)))


def check_onesparse_exp(trials=100, d=32, seed=7) -> dict:
    """Block exponentials against dense spectral exponentials."""
    rng = np.random.default_rng(seed)
    checks = []
    for kind in ("real", "imaginary"):
        worst = 0.0
        for _ in range(trials):
            m = random_one_sparse(rng, d)
            theta = rng.uniform(-2.0, 2.0)
            got = apply_exp_one_sparse(m, theta, kind, np.eye(d, dtype=complex))
            worst = max(worst, float(np.max(np.abs(got - _dense_eigh_exp(m.to_dense(), theta, kind)))))
        checks.append(_check(f"{kind}-time max deviation", worst <= 1e-12, worst, 1e-12))
    return _report("onesparse_exp", checks)


def slope_system() -> System:
    mass = 1836.0
    potential = DoubleWell(mass, wavenumber_to_hartree(500.0), wavenumber_to_hartree(1500.0))
    return System(make_grid(30.0, 6), potential, mass)


def trotter_slopes() -> dict:
    """Local error exponents of one step on the D=64 double well.

    Real time compares against the exact propagator of the Fourier-kinetic
    Hamiltonian used by the split, with steps 2^-4 .. 2^-10 a.u.  Imaginary
    time compares exp(-(dbeta/2) H) for the DVR Hamiltonian with half-steps
    2^-4 .. 2^-10 times 1/||H||, the regime where the step is small.
    """
    system = slope_system()
    eye = np.eye(64, dtype=complex)
    steps = 2.0 ** -np.arange(4, 11)
    h_fourier = eigendecompose(fourier_kinetic_matrix(system.grid, system.mass)
                               + np.diag(system.potential_values))
    real = [np.linalg.norm(real_time_step(StepScheme(dt, 0.0, 1), system, eye) - h_fourier.propagator(dt), 2)
            for dt in steps]
    halves = steps / np.linalg.norm(system.hamiltonian.matrix, 2)
    imag = [np.linalg.norm(imaginary_time_step(StepScheme(0.0, 2 * a, 1), system, eye)
                           - system.spectrum.thermal(a), 2) for a in halves]
    return {"real": (steps, np.array(real)), "imaginary": (halves, np.array(imag))}


def check_trotter_slopes() -> dict:
    data = trotter_slopes()
    s_real = _slope(*data["real"])
    s_imag = _slope(*data["imaginary"])
    return _report("trotter_slopes", [
        _check("real-time local slope", abs(s_real - 3.0) <= 0.2, s_real, "3.0 +/- 0.2"),
        _check("imaginary-time local slope", abs(s_imag - 2.0) <= 0.2, s_imag, "2.0 +/- 0.2"),
    ])


def error_bound_trials(trials=100, d=8, seed=1234):
    """(measured, bound) pairs for randomly perturbed complex-time propagators."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(trials):
        h = rng.normal(size=(d, d))
        h = (h + h.T) / 2
        beta = rng.uniform(0.2, 3.0)
        t = rng.uniform(0.0, 5.0)
        vals, vecs = np.linalg.eigh(h)
        vals = vals - vals[0]
        u = (vecs * np.exp(-1j * vals * (t - 0.5j * beta))) @ vecs.conj().T
        half = (vecs * np.exp(-beta * vals / 2)) @ vecs.T
        z = float(np.sum(np.exp(-beta * vals)))
        a = np.diag(rng.normal(size=d))
        b = np.diag(rng.normal(size=d))
        pert = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        pert *= 10 ** rng.uniform(-6, -1) * trace_norm(u) / trace_norm(pert)
        u_tilde = u + pert
        c = np.trace(u.conj().T @ a @ u @ b) / z
        c_tilde = np.trace(u_tilde.conj().T @ a @ u_tilde @ b) / z
        bound = tcf_error_bound(trace_norm(a), trace_norm(b), trace_norm(half), trace_norm(pert), z)
        out.append((float(abs(c - c_tilde)), bound))
    return out


def check_error_bound(trials=100) -> dict:
    pairs = error_bound_trials(trials)
    inside = sum(m <= b for m, b in pairs)
    worst = max(m / b for m, b in pairs)
    return _report("error_bound", [
        _check("trials within bound", inside == trials, f"{inside}/{trials}", f"{trials}/{trials}"),
        _check("largest measured/bound ratio", worst <= 1.0, worst, 1.0),
    ])


def mc_toy():
    """D=8, N=2 double well at t=0: forward, backward, x, Z and the quadrature value."""
    system = System(make_grid(6.0, 3), DoubleWell(1.0, 1.5, 0.7), 1.0)
    shifted = system.shifted(system.spectrum.eigenvalues[0])
    beta = 2.0
    z = float(np.sum(np.exp(-beta * shifted.spectrum.eigenvalues)))
    uf = step_matrix(StepScheme(0.0, beta, 2), shifted)
    x = shifted.grid.positions
    return uf, uf.conj().T, x, z, contract_tcf(np.linalg.matrix_power(uf, 2), x, x, z)


def check_mc_convergence(sizes=(10_000, 100_000, 1_000_000), seed=0) -> dict:
    uf, ub, x, z, ref = mc_toy()
    results = [mc_tcf(uf, ub, x, x, 2, z, McConfig(n_sweeps=m, seed=seed)) for m in sizes]
    zs = [abs(r.estimate - ref) / r.standard_error for r in results]
    slope = _slope(sizes, [r.standard_error for r in results])
    twin = mc_tcf(uf, ub, x, x, 2, z, McConfig(n_sweeps=sizes[0], seed=seed))
    return _report("mc_convergence", [
        _check("within 3 standard errors at every M", max(zs) < 3, [round(v, 3) for v in zs], 3),
        _check("standard-error slope", abs(slope + 0.5) <= 0.1, slope, "-0.5 +/- 0.1"),
        _check("seeded rerun identical", twin == results[0], twin.estimate == results[0].estimate, True),
    ])


def dense_truncation_errors(D: int, K: float) -> np.ndarray:
    """Frobenius norm of the dense D x D matrix with diagonals nu <= ell removed, ell = 1 .. D-1."""
    dense = dvr_matrix(D, K)
    offsets = np.abs(np.subtract.outer(np.arange(D), np.arange(D)))
    per_offset = np.bincount(offsets.ravel(), weights=(dense ** 2).ravel(), minlength=D)
    tails = np.cumsum(per_offset[::-1])[::-1]
    return np.sqrt(tails[1:])


def check_bounds(D=512, Ks=(1e-2, 1.0, 1e2)) -> dict:
    """Bound ordering, tightness of the lower bound and the dense cross-check."""
    checks = []
    for K in Ks:
        ells = range(1, D - 2)
        exact = np.array([exact_truncation_error(l, D, K) for l in ells])
        lower = np.array([error_lower_bound(l, K) for l in ells])
        upper = np.array([error_upper_bound(l, K) for l in ells])
        ordered = int(np.sum((lower < exact) & (exact < upper)))
        gap_l = float(np.mean(np.abs(exact - lower)))
        gap_u = float(np.mean(np.abs(upper - exact)))
        checks.append(_check(f"K={K:g} ordering for ell <= D-3", ordered == len(exact),
                             f"{ordered}/{len(exact)}", "all"))
        checks.append(_check(f"K={K:g} lower bound closer on average", gap_l < gap_u,
                             [gap_l, gap_u], "lower gap < upper gap"))
        dense = dense_truncation_errors(D, K)
        rel = max(abs(exact_truncation_error(l, D, K) - dense[l - 1]) / dense[l - 1] for l in ells)
        checks.append(_check(f"K={K:g} closed form equals dense Frobenius norm", rel <= 1e-12, rel, 1e-12))
    return _report("bounds", checks)


SUITES: Dict[str, Callable[[], dict]] = {
    "decompose": check_decompose,
    "onesparse_exp": check_onesparse_exp,
    "trotter_slopes": check_trotter_slopes,
    "error_bound": check_error_bound,
    "mc_convergence": check_mc_convergence,
    "bounds": check_bounds,
}


def run_check(suite: str) -> dict:
    try:
        fn = SUITES[suite]
    except KeyError:
        raise ValueError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}") from None
    return fn()
