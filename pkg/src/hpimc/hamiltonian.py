"""Model potentials, dense grid Hamiltonians and the eigendecomposition oracle."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

from .dvr import dvr_matrix, kinetic_prefactor
from .errors import InvalidArgument, NumericalFailure
from .grid import UniformGrid


def double_well_value(x, mass, barrier_freq, barrier_height):
    """V(x) = -m w^2 x^2 / 2 + m^2 w^4 x^4 / (16 V0)."""
    if not (mass > 0 and barrier_freq > 0 and barrier_height > 0):
        raise InvalidArgument("double-well parameters must be positive")
    x = np.asarray(x, dtype=float)
    w2 = barrier_freq ** 2
    return -0.5 * mass * w2 * x ** 2 + mass ** 2 * w2 ** 2 / (16 * barrier_height) * x ** 4


@dataclass(frozen=True)
class DoubleWell:
    mass: float
    barrier_freq: float
    barrier_height: float

    def __post_init__(self):
        if not (self.mass > 0 and self.barrier_freq > 0 and self.barrier_height > 0):
            raise InvalidArgument("double-well parameters must be positive")

    def __call__(self, x):
        return double_well_value(x, self.mass, self.barrier_freq, self.barrier_height)

    @property
    def minimum(self) -> float:
        """Positive location of the well minimum, where V = -V0."""
        return float(np.sqrt(4 * self.barrier_height / (self.mass * self.barrier_freq ** 2)))


@dataclass(frozen=True)
class Harmonic:
    mass: float
    omega: float

    def __post_init__(self):
        if not (self.mass > 0 and self.omega > 0):
            raise InvalidArgument("harmonic parameters must be positive")

    def __call__(self, x):
        return 0.5 * self.mass * self.omega ** 2 * np.asarray(x, dtype=float) ** 2


@dataclass(frozen=True)
class Tabulated:
    values: tuple

    def __init__(self, values):
        object.__setattr__(self, "values", tuple(float(v) for v in np.ravel(values)))


PotentialSpec = Union[DoubleWell, Harmonic, Tabulated]


def potential_on_grid(potential: PotentialSpec, grid: UniformGrid) -> np.ndarray:
    if isinstance(potential, Tabulated):
        if len(potential.values) != grid.num_points:
            raise InvalidArgument(
                f"tabulated potential has {len(potential.values)} values, grid has {grid.num_points}")
        return np.array(potential.values)
    return np.asarray(potential(grid.positions), dtype=float)


def fourier_kinetic_matrix(grid: UniformGrid, mass: float) -> np.ndarray:
    """Position-basis matrix of p^2/2m on the discrete momentum grid p_k = 2 pi k / L."""
    p = 2 * np.pi * np.fft.fftfreq(grid.num_points, grid.spacing)
    eye = np.eye(grid.num_points)
    t = np.fft.ifft(p[:, None] ** 2 / (2 * mass) * np.fft.fft(eye, axis=0), axis=0)
    t = t.real
    return 0.5 * (t + t.T)


@dataclass(frozen=True)
class DenseHamiltonian:
    matrix: np.ndarray
    grid: UniformGrid
    mass: float

    @property
    def potential_diagonal(self) -> np.ndarray:
        K = kinetic_prefactor(self.mass, self.grid.spacing)
        return np.diag(self.matrix) - K * np.pi ** 2 / 6


def assemble_dense(grid: UniformGrid, potential: PotentialSpec, mass: float,
                   kinetic: str = "dvr") -> DenseHamiltonian:
    """H = T + diag(V(x_q)); ``kinetic`` is ``"dvr"`` (sinc DVR) or ``"fourier"``."""
    v = potential_on_grid(potential, grid)
    if kinetic == "dvr":
        t = dvr_matrix(grid.num_points, kinetic_prefactor(mass, grid.spacing))
    elif kinetic == "fourier":
        t = fourier_kinetic_matrix(grid, mass)
    else:
        raise InvalidArgument(f"unknown kinetic representation {kinetic!r}")
    return DenseHamiltonian(t + np.diag(v), grid, float(mass))


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def function(self, f) -> np.ndarray:
        """Dense matrix f(H) = E diag(f(lambda)) E^T."""
        vals = f(self.eigenvalues)
        return (self.eigenvectors * vals) @ self.eigenvectors.T

    def propagator(self, t: complex) -> np.ndarray:
        """exp(-i H t) for complex ``t``; Im t < 0 gives Boltzmann damping."""
        return self.function(lambda e: np.exp(-1j * e * t))

    def thermal(self, beta: float) -> np.ndarray:
        return self.function(lambda e: np.exp(-beta * e))

    def partition_function(self, beta: float) -> float:
        return float(np.sum(np.exp(-beta * self.eigenvalues)))

    def to_eigenbasis(self, op) -> np.ndarray:
        """Matrix elements of a position-basis operator (1-D diagonal or 2-D) in the eigenbasis."""
        op = np.asarray(op)
        u = self.eigenvectors
        if op.ndim == 1:
            return u.T @ (op[:, None] * u)
        return u.T @ op @ u


def eigendecompose(h) -> Spectrum:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a real symmetric matrix."""
    m = h.matrix if isinstance(h, DenseHamiltonian) else np.asarray(h, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidArgument("Hamiltonian must be a square matrix")
    scale = max(np.linalg.norm(m), 1e-300)
    if np.linalg.norm(m - m.T) > 1e-12 * scale:
        raise InvalidArgument("Hamiltonian is not symmetric")
    try:
        vals, vecs = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    residual = np.linalg.norm(m - (vecs * vals) @ vecs.T)
    if not residual <= 1e-9 * scale:
        raise NumericalFailure(f"reconstruction residual {residual:.3e} too large", residual)
    return Spectrum(vals, vecs)


@dataclass(frozen=True)
class System:
    """A particle of mass ``mass`` in ``potential`` on ``grid``.

    Caches the potential values, the dense DVR Hamiltonian and its spectrum.
    """

    grid: UniformGrid
    potential: PotentialSpec
    mass: float
    energy_shift: float = field(default=0.0)

    @cached_property
    def potential_values(self) -> np.ndarray:
        v = potential_on_grid(self.potential, self.grid) - self.energy_shift
        v.flags.writeable = False
        return v

    @cached_property
    def hamiltonian(self) -> DenseHamiltonian:
        h = assemble_dense(self.grid, Tabulated(self.potential_values), self.mass)
        return h

    @cached_property
    def spectrum(self) -> Spectrum:
        return eigendecompose(self.hamiltonian)

    def shifted(self, shift: float) -> "System":
        """Same system with all energies lowered by ``shift`` (total shift, not incremental)."""
        return System(self.grid, self.potential, self.mass, float(shift))
