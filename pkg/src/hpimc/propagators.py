"""Complex-time short-step propagators and their matrix elements.

One step is exp(-i H dt) exp(-(dbeta/2) H), with the imaginary-time factor
applied first.  The real-time factor is a symmetric Strang split about V;
the imaginary-time factor is a first-order split (or a PITE emulation).
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .dvr import dvr_matrix, kinetic_prefactor
from .errors import InvalidArgument
from .grid import UniformGrid, basis_state
from .hamiltonian import System
from .sparse import TimeKind, build_kinetic_propagator

DEFAULT_M0 = 1 / np.sqrt(2)

REAL_TIME_SCHEMES = ("trotter2_fourier", "trotter2_dvr")
IMAGINARY_TIME_SCHEMES = ("trotter1_fourier", "trotter1_dvr", "pite")

#: recorded in fingerprints and output metadata
ORDERING = ("step = real(dt) @ imaginary(dbeta); "
            "real = exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2); "
            "imaginary = exp(-V dbeta/2) exp(-T dbeta/2); "
            "dvr kinetic factors nu ascending, sigma ascending")


@dataclass(frozen=True)
class StepScheme:
    """How one complex-time step of a calculation with ``n_steps`` slices is realized.

    ``ell`` is the number of kept DVR diagonals (``None`` keeps all of them).
    """

    total_time: float
    beta: float
    n_steps: int
    real_time: str = "trotter2_fourier"
    imaginary_time: str = "trotter1_dvr"
    ell: Optional[int] = None
    m0: float = DEFAULT_M0

    def __post_init__(self):
        if self.real_time not in REAL_TIME_SCHEMES:
            raise InvalidArgument(f"real_time must be one of {REAL_TIME_SCHEMES}, got {self.real_time!r}")
        if self.imaginary_time not in IMAGINARY_TIME_SCHEMES:
            raise InvalidArgument(
                f"imaginary_time must be one of {IMAGINARY_TIME_SCHEMES}, got {self.imaginary_time!r}")
        if not (isinstance(self.n_steps, (int, np.integer)) and self.n_steps >= 1):
            raise InvalidArgument(f"n_steps must be a positive integer, got {self.n_steps}")
        if self.beta < 0 or not np.isfinite(self.total_time):
            raise InvalidArgument("beta must be non-negative and time finite")
        if self.ell is not None and self.ell < 1:
            raise InvalidArgument(f"ell must be >= 1, got {self.ell}")
        if not 0 < self.m0 < 1:
            raise InvalidArgument(f"m0 must lie in (0, 1), got {self.m0}")

    @property
    def dt(self) -> float:
        return self.total_time / self.n_steps

    @property
    def dbeta(self) -> float:
        return self.beta / self.n_steps

    def at_time(self, t: float) -> "StepScheme":
        return StepScheme(float(t), self.beta, self.n_steps, self.real_time,
                          self.imaginary_time, self.ell, self.m0)

    def kept_diagonals(self, grid: UniformGrid) -> int:
        return grid.num_points if self.ell is None else min(int(self.ell), grid.num_points)

    def describe(self) -> dict:
        return {"real_time": self.real_time, "imaginary_time": self.imaginary_time,
                "ell": self.ell, "m0": self.m0, "n_steps": int(self.n_steps),
                "dt": self.dt, "dbeta": self.dbeta, "ordering": ORDERING}


@lru_cache(maxsize=256)
def _dvr_kinetic(grid, mass, ell, theta, kind):
    return build_kinetic_propagator(grid, mass, ell, theta, kind)


def potential_phase(potential_values, theta: float, kind: TimeKind, psi) -> np.ndarray:
    """Multiply amplitude q by exp(-i V_q theta) or exp(-V_q theta)."""
    v = np.asarray(potential_values, dtype=float)
    if kind == "real":
        f = np.exp(-1j * v * theta)
    elif kind == "imaginary":
        f = np.exp(-v * theta)
    else:
        raise InvalidArgument(f"unknown time kind {kind!r}")
    psi = np.asarray(psi)
    return f.reshape((-1,) + (1,) * (psi.ndim - 1)) * psi


def momentum_grid(grid: UniformGrid) -> np.ndarray:
    """p_k = 2 pi k / L in FFT order (k = 0..D/2-1, then -D/2..-1)."""
    return 2 * np.pi * np.fft.fftfreq(grid.num_points, grid.spacing)


def kinetic_fourier(grid: UniformGrid, mass: float, theta: float, kind: TimeKind, psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[0] != grid.num_points:
        raise InvalidArgument("state dimension does not match grid")
    e = momentum_grid(grid) ** 2 / (2 * mass)
    if kind == "real":
        f = np.exp(-1j * e * theta)
    elif kind == "imaginary":
        f = np.exp(-e * theta)
    else:
        raise InvalidArgument(f"unknown time kind {kind!r}")
    f = f.reshape((-1,) + (1,) * (psi.ndim - 1))
    return np.fft.ifft(f * np.fft.fft(psi, axis=0), axis=0)


def kinetic_dvr(grid: UniformGrid, mass: float, ell: int, theta: float, kind: TimeKind, psi) -> np.ndarray:
    return _dvr_kinetic(grid, float(mass), int(ell), float(theta), kind).apply(psi)


def real_time_step(scheme: StepScheme, system: System, psi) -> np.ndarray:
    dt = scheme.dt
    v = system.potential_values
    out = potential_phase(v, dt / 2, "real", psi)
    if scheme.real_time == "trotter2_fourier":
        out = kinetic_fourier(system.grid, system.mass, dt, "real", out)
    else:
        out = kinetic_dvr(system.grid, system.mass, scheme.kept_diagonals(system.grid), dt, "real", out)
    return potential_phase(v, dt / 2, "real", out)


def imaginary_time_step(scheme: StepScheme, system: System, psi) -> np.ndarray:
    half = scheme.dbeta / 2
    if scheme.imaginary_time == "pite":
        h = pite_hamiltonian(system, scheme.kept_diagonals(system.grid))
        success, _ = pite_step(h, psi, scheme.dbeta, scheme.m0)
        return success / scheme.m0
    if scheme.imaginary_time == "trotter1_fourier":
        out = kinetic_fourier(system.grid, system.mass, half, "imaginary", psi)
    else:
        out = kinetic_dvr(system.grid, system.mass, scheme.kept_diagonals(system.grid), half, "imaginary", psi)
    return potential_phase(system.potential_values, half, "imaginary", out)


def pite_hamiltonian(system: System, ell: int) -> np.ndarray:
    """T^DVR truncated to ``ell`` diagonals plus V, as a dense matrix."""
    d = system.grid.num_points
    t = dvr_matrix(d, kinetic_prefactor(system.mass, system.grid.spacing))
    idx = np.arange(d)
    t[np.abs(idx[:, None] - idx[None, :]) >= ell] = 0.0
    return t + np.diag(system.potential_values)


def pite_success_scale(m0: float) -> float:
    """s1 = m0 / sqrt(1 - m0^2)."""
    if not 0 < m0 < 1:
        raise InvalidArgument(f"m0 must lie in (0, 1), got {m0}")
    return m0 / np.sqrt(1 - m0 ** 2)


def pite_step(h, psi, delta_beta: float, m0: float = DEFAULT_M0):
    """Success branch m0 (1 - H tau) psi of one PITE application and its probability.

    tau = s1 * delta_beta / 2.  The returned state is not renormalized.
    """
    s1 = pite_success_scale(m0)
    tau = s1 * delta_beta / 2
    psi = np.asarray(psi, dtype=complex)
    success = m0 * (psi - tau * (np.asarray(h) @ psi))
    prob = float(np.vdot(success, success).real / np.vdot(psi, psi).real)
    return success, prob


def complex_time_step(scheme: StepScheme, system: System, psi) -> np.ndarray:
    return real_time_step(scheme, system, imaginary_time_step(scheme, system, psi))


def step_matrix(scheme: StepScheme, system: System) -> np.ndarray:
    """Full D x D table of <x_row| U(dt_c) |x_col>."""
    return complex_time_step(scheme, system, np.eye(system.grid.num_points, dtype=complex))


def complex_time_element(row: int, col: int, scheme: StepScheme, system: System) -> complex:
    """<x_row| U(dt_c) |x_col>, read off from the propagated basis state ``col``."""
    d = system.grid.num_points
    if not (0 <= row < d):
        raise InvalidArgument(f"row index {row} outside [0, {d})")
    psi = complex_time_step(scheme, system, basis_state(system.grid, col))
    return complex(psi[row])


def fingerprint(scheme: StepScheme, system: System) -> bytes:
    """32-byte digest of everything that determines a step matrix element."""
    v = np.ascontiguousarray(system.potential_values, dtype="<f8")
    payload = {
        "version": 1,
        "length": repr(float(system.grid.length)),
        "num_points": int(system.grid.num_points),
        "mass": repr(float(system.mass)),
        "potential_sha256": hashlib.sha256(v.tobytes()).hexdigest(),
        "total_time": repr(float(scheme.total_time)),
        "beta": repr(float(scheme.beta)),
        "n_steps": int(scheme.n_steps),
        "real_time": scheme.real_time,
        "imaginary_time": scheme.imaginary_time,
        "ell": scheme.kept_diagonals(system.grid),
        "m0": repr(float(scheme.m0)),
        "ordering": ORDERING,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).digest()
