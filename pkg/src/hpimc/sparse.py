"""One-sparse decomposition of DVR diagonals and exact one-sparse exponentials.

Each diag(DVR, nu) is split into at most two symmetric matrices with at most
one entry per row and column.  Those exponentiate exactly as independent
2 x 2 blocks, which gives the diagonal-Trotter kinetic propagator.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .dvr import DvrBand, dvr_band
from .errors import InvalidArgument
from .grid import UniformGrid

TimeKind = Literal["real", "imaginary"]


@dataclass(frozen=True)
class OneSparseMatrix:
    """Symmetric one-sparse matrix stored as unordered index pairs.

    ``rows[i] <= cols[i]``; a pair with ``rows[i] == cols[i]`` is a diagonal
    entry, otherwise the mirror ``(cols[i], rows[i])`` is implied.
    """

    dimension: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        for name in ("rows", "cols", "values"):
            arr = np.asarray(getattr(self, name))
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if np.any(self.rows > self.cols):
            raise InvalidArgument("pairs must be stored with row <= col")

    def entries(self):
        """All (row, col, value) triples including mirrors."""
        out = []
        for r, c, a in zip(self.rows.tolist(), self.cols.tolist(), self.values.tolist()):
            out.append((r, c, a))
            if r != c:
                out.append((c, r, a))
        return out

    def to_dense(self) -> np.ndarray:
        m = np.zeros((self.dimension, self.dimension))
        for r, c, a in self.entries():
            m[r, c] += a
        return m

    def validate(self) -> None:
        """Brute-force occupancy scan; raises AssertionError on any violation."""
        dense = self.to_dense()
        nz = dense != 0
        assert np.all(nz.sum(axis=1) <= 1), "a row holds more than one entry"
        assert np.all(nz.sum(axis=0) <= 1), "a column holds more than one entry"
        assert np.array_equal(dense, dense.T), "matrix is not symmetric"
        seen_r = [r for r, _, _ in self.entries()]
        assert len(seen_r) == len(set(seen_r)), "row index repeated"


def odd_part_split(nu: int) -> tuple[int, int]:
    """(p, b) with nu - 1 = b * 2**p, b odd and p >= 1, for odd nu > 1."""
    if nu < 3 or nu % 2 == 0:
        raise InvalidArgument(f"odd-part split needs odd nu > 1, got {nu}")
    k = nu - 1
    p = (k & -k).bit_length() - 1
    return p, k >> p


def decomposition_case(D: int, nu: int) -> str:
    if nu == 1:
        return "1"
    if nu > D // 2:
        return "2"
    return "3a" if nu % 2 == 0 else "3b"


def _make(D, j, k, value):
    # j is 1-based position along the diagonal; storage is 0-based
    rows = j - 1
    return OneSparseMatrix(D, rows, rows + k, np.full(len(j), float(value)))


def decompose_diagonal(D: int, nu: int, value: float) -> list[OneSparseMatrix]:
    """Split diag(DVR, nu) with constant ``value`` into one or two one-sparse parts."""
    if D < 4 or D & (D - 1):
        raise InvalidArgument(f"D must be a power of two >= 4, got {D}")
    if not 1 <= nu <= D:
        raise InvalidArgument(f"nu must lie in [1, {D}], got {nu}")
    k = nu - 1
    j = np.arange(1, D - k + 1)
    case = decomposition_case(D, nu)
    if case in ("1", "2"):
        return [_make(D, j, k, value)]
    if case == "3a":
        first = j % 2 == 1
    else:
        p, _ = odd_part_split(nu)
        first = ((j - 1) >> p) % 2 == 0
    return [_make(D, j[first], k, value), _make(D, j[~first], k, value)]


def apply_exp_one_sparse(m: OneSparseMatrix, theta: float, kind: TimeKind, psi) -> np.ndarray:
    """exp(-i M theta) psi (real time) or exp(-M theta) psi (imaginary time).

    ``psi`` may be a single state or a 2-D array of states as columns.
    """
    psi = np.asarray(psi)
    if psi.shape[0] != m.dimension:
        raise InvalidArgument(f"state dimension {psi.shape[0]} != matrix dimension {m.dimension}")
    out = np.array(psi, dtype=complex, copy=True)
    diag = m.rows == m.cols
    a = m.values * theta
    if np.any(diag):
        r = m.rows[diag]
        if kind == "real":
            f = np.exp(-1j * a[diag])
        elif kind == "imaginary":
            f = np.exp(-a[diag])
        else:
            raise InvalidArgument(f"unknown time kind {kind!r}")
        out[r] *= f.reshape((-1,) + (1,) * (psi.ndim - 1))
    off = ~diag
    if np.any(off):
        r, c, ao = m.rows[off], m.cols[off], a[off]
        shape = (-1,) + (1,) * (psi.ndim - 1)
        if kind == "real":
            cs, sn = np.cos(ao).reshape(shape), (-1j * np.sin(ao)).reshape(shape)
        elif kind == "imaginary":
            cs, sn = np.cosh(ao).reshape(shape), (-np.sinh(ao)).reshape(shape)
        else:
            raise InvalidArgument(f"unknown time kind {kind!r}")
        pr, pc = psi[r], psi[c]
        out[r] = cs * pr + sn * pc
        out[c] = sn * pr + cs * pc
    return out


@dataclass(frozen=True)
class KineticFactor:
    nu: int
    sigma: int
    matrix: OneSparseMatrix


@dataclass(frozen=True)
class KineticPropagator:
    """Product over nu = 1..ell (ascending) and sigma = 1, 2 of one-sparse exponentials.

    Factors are stored in product order (leftmost first) and applied to a
    state right-to-left.
    """

    factors: tuple
    theta: float
    kind: TimeKind
    band: DvrBand
    metadata: dict = field(default_factory=dict)

    def apply(self, psi) -> np.ndarray:
        out = np.asarray(psi, dtype=complex)
        for f in reversed(self.factors):
            out = apply_exp_one_sparse(f.matrix, self.theta, self.kind, out)
        return out

    __call__ = apply

    def to_dense(self) -> np.ndarray:
        return self.apply(np.eye(self.band.num_points, dtype=complex))


def build_kinetic_propagator(grid: UniformGrid, mass: float, ell: int, theta: float,
                             kind: TimeKind) -> KineticPropagator:
    """Diagonal-Trotter approximation to exp(-i T theta) or exp(-T theta) with ``ell`` kept diagonals."""
    band = dvr_band(grid, mass, ell)
    factors = []
    for nu in range(1, band.ell + 1):
        parts = decompose_diagonal(band.num_points, nu, band.values[nu - 1])
        for sigma, part in enumerate(parts, start=1):
            factors.append(KineticFactor(nu, sigma, part))
    meta = {"factor_order": "nu ascending, sigma ascending; applied right-to-left",
            "ell": band.ell, "kind": kind}
    return KineticPropagator(tuple(factors), float(theta), kind, band, meta)
