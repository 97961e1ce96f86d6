"""Sinc-DVR kinetic energy in banded Toeplitz form and its truncation error.

Diagonals are numbered from 1: ``nu = 1`` is the main diagonal and ``nu``
labels the pair of diagonals at offset ``nu - 1``.  A band keeps diagonals
``1..ell``; everything with ``nu > ell`` is dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidArgument
from .grid import UniformGrid


def kinetic_prefactor(mass: float, spacing: float) -> float:
    """K = 1 / (m dx^2) in atomic units."""
    if not (mass > 0 and spacing > 0):
        raise InvalidArgument("mass and spacing must be positive")
    return 1.0 / (mass * spacing ** 2)


def dvr_element(i: int, j: int, K: float) -> float:
    if i == j:
        return K * np.pi ** 2 / 6
    k = i - j
    return (-1.0) ** k * K / k ** 2


def diagonal_value(nu: int, K: float) -> float:
    """Value carried by every element of diagonal ``nu``."""
    if nu < 1:
        raise InvalidArgument(f"diagonal index must be >= 1, got {nu}")
    if nu == 1:
        return K * np.pi ** 2 / 6
    return (-1.0) ** (nu - 1) * K / (nu - 1) ** 2


def dvr_matrix(num_points: int, K: float) -> np.ndarray:
    """Dense D x D sinc-DVR kinetic matrix."""
    idx = np.arange(num_points)
    k = idx[:, None] - idx[None, :]
    safe = np.where(k == 0, 1, k)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    return np.where(k == 0, K * np.pi ** 2 / 6, sign * K / safe.astype(float) ** 2)


@dataclass(frozen=True)
class DiagonalDescriptor:
    """diag(DVR, nu): the value ``value`` on the upper and lower ``nu``-th diagonals."""

    value: float
    nu: int
    num_points: int

    def to_dense(self) -> np.ndarray:
        d = self.num_points
        k = self.nu - 1
        m = np.zeros((d, d))
        if k == 0:
            np.fill_diagonal(m, self.value)
        elif k < d:
            idx = np.arange(d - k)
            m[idx, idx + k] = self.value
            m[idx + k, idx] = self.value
        return m


@dataclass(frozen=True)
class DvrBand:
    K: float
    num_points: int
    ell: int

    def __post_init__(self):
        if not 1 <= self.ell <= self.num_points:
            raise InvalidArgument(f"ell must lie in [1, {self.num_points}], got {self.ell}")

    @cached_property
    def values(self) -> np.ndarray:
        """Per-diagonal values; ``values[nu - 1]`` belongs to diagonal ``nu``."""
        return np.array([diagonal_value(nu, self.K) for nu in range(1, self.ell + 1)])

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.num_points, self.num_points))
        for nu in range(1, self.ell + 1):
            out += extract_diagonal(self, nu).to_dense()
        return out


def dvr_band(grid: UniformGrid, mass: float, ell: int | None = None) -> DvrBand:
    K = kinetic_prefactor(mass, grid.spacing)
    return DvrBand(K, grid.num_points, grid.num_points if ell is None else int(ell))


def extract_diagonal(band: DvrBand, nu: int) -> DiagonalDescriptor:
    if not 1 <= nu <= band.ell:
        raise InvalidArgument(f"diagonal {nu} not kept by band with ell={band.ell}")
    return DiagonalDescriptor(float(band.values[nu - 1]), nu, band.num_points)


def truncation_threshold(delta: float, K: float) -> int:
    """Number of diagonals to keep for a truncation-error tolerance ``delta``."""
    if not (delta > 0 and K > 0):
        raise InvalidArgument("delta and K must be positive")
    ratio = 2 * K / delta
    ell = int(np.floor(ratio ** (2.0 / 3.0) * (1 + 1e-14)))
    return max(ell, 1)


def _tail_sum(ell: int, D: int, weight) -> float:
    # descending nu keeps small terms from being swamped
    nu = np.arange(D, ell, -1, dtype=float)
    return math.fsum(weight(nu) / (nu - 1) ** 4)


def _check_truncation(ell, D):
    if not 1 <= ell < D:
        raise InvalidArgument(f"ell must lie in [1, D-1] = [1, {D - 1}], got {ell}")


def exact_truncation_error(ell: int, D: int, K: float) -> float:
    """sqrt(2 K^2 sum_{nu=ell+1}^{D} nu / (nu-1)^4).

    This is the closed-form error used to derive the bounds below.  Its
    multiplicity ``nu`` per diagonal differs from the element count
    ``D - nu + 1`` of a D x D matrix; :func:`frobenius_truncation_error`
    gives the latter.
    """
    _check_truncation(ell, D)
    return float(np.sqrt(2 * K ** 2 * _tail_sum(ell, D, lambda nu: nu)))


def frobenius_truncation_error(ell: int, D: int, K: float) -> float:
    """Frobenius norm of the dropped diagonals of the D x D matrix."""
    _check_truncation(ell, D)
    return float(np.sqrt(2 * K ** 2 * _tail_sum(ell, D, lambda nu: D - nu + 1)))


def error_upper_bound(ell: int, K: float) -> float:
    """sqrt(2) K (ell^(1/2) + 1) / ell^(3/2)."""
    if ell < 1:
        raise InvalidArgument(f"ell must be >= 1, got {ell}")
    return float(np.sqrt(2) * K * (np.sqrt(ell) + 1) / ell ** 1.5)


def error_upper_bound_simple(ell: int, K: float) -> float:
    """Looser upper bound 2 sqrt(2) K / ell."""
    if ell < 1:
        raise InvalidArgument(f"ell must be >= 1, got {ell}")
    return float(2 * np.sqrt(2) * K / ell)


def error_lower_bound(ell: int, K: float) -> float:
    """2 K / ell^(3/2); valid while D >= ell + 3."""
    if ell < 1:
        raise InvalidArgument(f"ell must be >= 1, got {ell}")
    return float(2 * K / ell ** 1.5)
