"""Uniform position grids, basis states and atomic-unit conversions."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidArgument

#: hartree per wavenumber (cm^-1)
HARTREE_PER_WAVENUMBER = 4.556335e-6
#: hartree per kelvin (Boltzmann constant in atomic units)
HARTREE_PER_KELVIN = 3.166812e-6

MIN_QUBITS = 2
MAX_QUBITS = 16


@dataclass(frozen=True)
class UniformGrid:
    """Grid of ``num_points`` positions x_q = -L/2 + q*L/D, q = 0..D-1.

    The spacing and offset are derived from ``length`` and ``num_points``,
    so there is no point at +L/2.
    """

    length: float
    num_points: int

    def __post_init__(self):
        if not self.length > 0:
            raise InvalidArgument(f"grid length must be positive, got {self.length}")
        d = self.num_points
        if d < 4 or d & (d - 1):
            raise InvalidArgument(f"num_points must be a power of two >= 4, got {d}")

    @property
    def spacing(self) -> float:
        return self.length / self.num_points

    @property
    def offset(self) -> float:
        return -self.length / 2

    @property
    def n_qubits(self) -> int:
        return self.num_points.bit_length() - 1

    @cached_property
    def positions(self) -> np.ndarray:
        x = self.offset + self.spacing * np.arange(self.num_points)
        x.flags.writeable = False
        return x

    def position_of(self, q: int) -> float:
        if not 0 <= q < self.num_points:
            raise InvalidArgument(f"grid index {q} outside [0, {self.num_points})")
        return self.offset + q * self.spacing

    def index_of(self, x: float) -> int:
        """Nearest grid index to position ``x``."""
        q = int(np.rint((x - self.offset) / self.spacing))
        if not 0 <= q < self.num_points:
            raise InvalidArgument(f"position {x} lies outside the grid")
        return q


def make_grid(length: float, n_qubits: int) -> UniformGrid:
    """Grid of 2**n_qubits points spanning ``length`` bohr."""
    if not length > 0:
        raise InvalidArgument(f"grid length must be positive, got {length}")
    if not (isinstance(n_qubits, (int, np.integer)) and MIN_QUBITS <= n_qubits <= MAX_QUBITS):
        raise InvalidArgument(f"n_qubits must be an integer in [{MIN_QUBITS}, {MAX_QUBITS}], got {n_qubits}")
    return UniformGrid(float(length), 2 ** int(n_qubits))


def basis_state(grid: UniformGrid, q: int) -> np.ndarray:
    """Complex unit vector localized on grid point ``q``."""
    if not 0 <= q < grid.num_points:
        raise InvalidArgument(f"grid index {q} outside [0, {grid.num_points})")
    psi = np.zeros(grid.num_points, dtype=complex)
    psi[q] = 1.0
    return psi


def check_state(grid: UniformGrid, psi) -> np.ndarray:
    """Validate a state (or a stack of states as columns) against ``grid``."""
    psi = np.asarray(psi)
    if psi.shape[0] != grid.num_points:
        raise InvalidArgument(
            f"state has leading dimension {psi.shape[0]}, grid has {grid.num_points} points")
    return psi


def wavenumber_to_hartree(w: float) -> float:
    if not w > 0:
        raise InvalidArgument(f"wavenumber must be positive, got {w}")
    return w * HARTREE_PER_WAVENUMBER


def kelvin_to_beta(temperature: float) -> float:
    """Inverse temperature in 1/hartree."""
    if not temperature > 0:
        raise InvalidArgument(f"temperature must be positive, got {temperature}")
    return 1.0 / (temperature * HARTREE_PER_KELVIN)
