"""Correlation-function error bound, error budget and asymptotic cost model."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument


def trace_norm(m) -> float:
    """Sum of singular values."""
    return float(np.sum(np.linalg.svd(np.asarray(m), compute_uv=False)))


def tcf_error_bound(norm1_A: float, norm1_B: float, norm1_thermal: float, eps_U: float, Z: float) -> float:
    """(2/Z) ||A||_1 ||B||_1 ||exp(-beta H/2)||_1 eps_U."""
    if min(norm1_A, norm1_B, norm1_thermal, Z) <= 0 or eps_U < 0:
        raise InvalidArgument("norms and Z must be positive and eps_U non-negative")
    return 2.0 / Z * norm1_A * norm1_B * norm1_thermal * eps_U


def _ceil(x: float) -> int:
    # tolerate representation error such as 1/0.01**2 = 10000.000000000002
    return int(math.ceil(x * (1 - 1e-12)))


@dataclass(frozen=True)
class ErrorBudget:
    eps: float
    eps_C: float
    eps_MC: float
    M: int
    N: int
    N_exact: float
    Omega: float
    k: int


def monte_carlo_iterations(eps_MC: float) -> int:
    if not eps_MC > 0:
        raise InvalidArgument("eps_MC must be positive")
    return max(1, _ceil(1.0 / eps_MC ** 2))


def trotter_steps(eps_C: float, k: int, Omega: float, tc_abs: float, norm_A: float,
                  norm_B: float, norm_thermal: float, Z: float) -> float:
    """Unrounded (||A|| ||B|| ||e^{-bH/2}|| Omega^{2k+1} |t_c|^{2k+1} / (Z eps_C))^{1/2k}."""
    if k < 1:
        raise InvalidArgument("Suzuki order k must be >= 1")
    if min(eps_C, Omega, tc_abs, norm_A, norm_B, norm_thermal, Z) <= 0:
        raise InvalidArgument("all magnitudes must be positive")
    inner = norm_A * norm_B * norm_thermal * (Omega * tc_abs) ** (2 * k + 1) / (Z * eps_C)
    return inner ** (1.0 / (2 * k))


def splitting_norm(h1, h2) -> float:
    """Omega = max(||H1||, ||H2||) in the spectral norm."""
    return max(float(np.linalg.norm(h1, 2)), float(np.linalg.norm(h2, 2)))


def error_budget(eps_total: float, Omega: float, tc_abs: float, norm_A: float, norm_B: float,
                 norm_thermal: float, Z: float, k: int = 1, split: float = 0.5) -> ErrorBudget:
    """Split ``eps_total = eps_C/2 + eps_MC/2`` and size M and N accordingly.

    ``split`` is the share of ``eps_total`` given to the propagator error.
    """
    if not eps_total > 0:
        raise InvalidArgument("eps_total must be positive")
    if not 0 < split < 1:
        raise InvalidArgument("split must lie in (0, 1)")
    eps_C = 2 * split * eps_total
    eps_MC = 2 * (1 - split) * eps_total
    n_exact = trotter_steps(eps_C, k, Omega, tc_abs, norm_A, norm_B, norm_thermal, Z)
    return ErrorBudget(eps_total, eps_C, eps_MC, monte_carlo_iterations(eps_MC),
                       max(1, _ceil(n_exact)), n_exact, Omega, k)


@dataclass(frozen=True)
class CostEstimate:
    pimc_runtime: float
    pimc_space: float
    hpimc_runtime: float
    hpimc_space: float


def cost_model(M: int, N: int, P: int, d: int, Q_U: float, anc_U: float) -> CostEstimate:
    """Leading-order costs with unit constants: comparison numbers, not wall-clock times."""
    if min(M, N, P, d) < 1 or Q_U < 0 or anc_U < 0:
        raise InvalidArgument("cost model inputs must be positive")
    n = math.log2(P)
    return CostEstimate(
        pimc_runtime=float(M * N + P ** (3 * d)),
        pimc_space=float(P ** d * P ** d),
        hpimc_runtime=float(M * N * Q_U),
        hpimc_space=float(d * n + anc_U),
    )
