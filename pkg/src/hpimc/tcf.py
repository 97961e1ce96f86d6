"""Symmetrized real-time thermal correlation functions.

C_AB(t) = Tr(U^dag(t_c) A U(t_c) B) / Z with t_c = t - i beta / 2, evaluated
exactly from the spectrum or by contracting N short complex-time steps.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import InvalidArgument
from .grid import UniformGrid
from .hamiltonian import Spectrum, System
from .propagators import StepScheme, imaginary_time_step, real_time_step


@dataclass(frozen=True)
class Observable:
    """An operator diagonal in the position representation."""

    values: np.ndarray
    name: str = "tabulated"

    @classmethod
    def position(cls, grid: UniformGrid) -> "Observable":
        return cls(np.array(grid.positions), "position")

    @classmethod
    def tabulated(cls, grid: UniformGrid, values) -> "Observable":
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.num_points,):
            raise InvalidArgument(f"observable needs {grid.num_points} values, got shape {values.shape}")
        return cls(values)

    @classmethod
    def identity(cls, grid: UniformGrid) -> "Observable":
        return cls(np.ones(grid.num_points), "identity")

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.values)


def _operator(op):
    """Observable or array -> (diag vector or None, dense matrix)."""
    if isinstance(op, Observable):
        return op.values, None
    op = np.asarray(op)
    if op.ndim == 1:
        return op, None
    return None, op


@dataclass(frozen=True)
class TcfSeries:
    times: np.ndarray
    values: np.ndarray
    normalized: bool = False
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if t.shape != v.shape or t.ndim != 1:
            raise InvalidArgument("times and values must be 1-D arrays of equal length")
        if np.any(np.diff(t) <= 0):
            raise InvalidArgument("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def normalize(self, mode: str = "abs") -> "TcfSeries":
        """Divide by max |C| (``mode="abs"``) or max |Re C| (``mode="real"``)."""
        if mode == "abs":
            scale = np.max(np.abs(self.values))
        elif mode == "real":
            scale = np.max(np.abs(self.values.real))
        else:
            raise InvalidArgument(f"unknown normalization mode {mode!r}")
        if scale == 0:
            raise InvalidArgument("cannot normalize an identically zero series")
        meta = dict(self.metadata, normalization=mode)
        return replace(self, values=self.values / scale, normalized=True, metadata=meta)

    def max_deviation(self, other: "TcfSeries") -> float:
        if not np.array_equal(self.times, other.times):
            raise InvalidArgument("series are on different time grids")
        return float(np.max(np.abs(self.values - other.values)))


def exact_tcf(spectrum: Spectrum, A, B, beta: float, times) -> TcfSeries:
    """Spectral evaluation of the symmetrized correlation function.

    Energies are measured from the ground state, which leaves C unchanged
    and keeps the Boltzmann factors finite.
    """
    if not beta > 0:
        raise InvalidArgument(f"beta must be positive, got {beta}")
    times = np.asarray(times, dtype=float)
    e = spectrum.eigenvalues - spectrum.eigenvalues[0]
    half = np.exp(-beta * e / 2)
    z = np.sum(half ** 2)
    a_diag, a_mat = _operator(A)
    b_diag, b_mat = _operator(B)
    a = spectrum.to_eigenbasis(a_diag if a_mat is None else a_mat)
    b = spectrum.to_eigenbasis(b_diag if b_mat is None else b_mat)
    # C(t) = sum_mn w_m w_n e^{i(E_m - E_n)t} A_mn B_nm / Z
    kernel = (half[:, None] * half[None, :]) * a * b.T / z
    values = np.empty(len(times), dtype=complex)
    for i, t in enumerate(times):
        ph = np.exp(1j * e * t)
        values[i] = ph @ kernel @ ph.conj()
    return TcfSeries(times, values, metadata={"method": "exact", "beta": beta})


def contract_tcf(forward_n, A, B, z: float, backward_n=None) -> complex:
    """Tr(Ub^N A Uf^N B) / Z from N-step forward and backward products.

    ``backward_n`` defaults to the conjugate transpose of ``forward_n``.
    """
    if backward_n is None:
        backward_n = forward_n.conj().T
    a_diag, a_mat = _operator(A)
    b_diag, b_mat = _operator(B)
    left = backward_n * a_diag[None, :] if a_mat is None else backward_n @ a_mat
    right = forward_n * b_diag[None, :] if b_mat is None else forward_n @ b_mat
    return complex(np.sum(left * right.T) / z)


def trotterized_tcf(system: System, A, B, n_steps: int, beta: float, times,
                    real_time: str = "trotter2_fourier", imaginary_time: str = "trotter1_dvr",
                    ell: Optional[int] = None, m0: Optional[float] = None,
                    backward: str = "adjoint", cache_dir=None) -> TcfSeries:
    """Correlation function from N-fold products of the single-step matrix.

    ``backward="adjoint"`` uses the conjugate transpose of the forward step;
    ``backward="split"`` uses exp(+iH dt) exp(-(dbeta/2) H) under the same splitting.
    Z comes from the eigendecomposition of the DVR Hamiltonian.
    """
    if backward not in ("adjoint", "split"):
        raise InvalidArgument(f"backward must be 'adjoint' or 'split', got {backward!r}")
    times = np.asarray(times, dtype=float)
    shifted = system.shifted(system.spectrum.eigenvalues[0] + system.energy_shift)
    e = shifted.spectrum.eigenvalues
    z = float(np.sum(np.exp(-beta * e)))
    kwargs = {} if m0 is None else {"m0": m0}
    base = StepScheme(0.0, beta, n_steps, real_time, imaginary_time, ell, **kwargs)

    stats = {"hits": 0, "misses": 0, "uncached": 0}
    if cache_dir is not None:
        from .cache import ElementCache, cached_step_matrix

        def table(s):
            cache = ElementCache.for_context(s, shifted, cache_dir)
            out = cached_step_matrix(cache, s, shifted)
            for key in stats:
                stats[key] += getattr(cache, key)
            return out
    else:
        # the imaginary half does not depend on t, so it is built once
        imag = imaginary_time_step(base, shifted, np.eye(shifted.grid.num_points, dtype=complex))

        def table(s):
            return real_time_step(s, shifted, imag)

    values = np.empty(len(times), dtype=complex)
    for i, t in enumerate(times):
        scheme = base.at_time(t)
        uf = table(scheme)
        fn = np.linalg.matrix_power(uf, n_steps)
        if backward == "adjoint":
            values[i] = contract_tcf(fn, A, B, z)
        else:
            ub = table(base.at_time(-t))
            values[i] = contract_tcf(fn, A, B, z, np.linalg.matrix_power(ub, n_steps))
    meta = {"method": "trotterized", "beta": beta, "backward": backward,
            "scheme": base.describe(), "num_points": system.grid.num_points}
    if cache_dir is not None:
        meta["cache"] = stats
    meta["scheme"].pop("dt")
    return TcfSeries(times, values, metadata=meta)


def dominant_frequency(series: TcfSeries, pad: int = 16) -> float:
    """Angular frequency of the largest non-DC peak in the spectrum of Re C (mean removed)."""
    t = series.times
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-9):
        raise InvalidArgument("dominant_frequency needs a uniform time grid")
    r = series.values.real - series.values.real.mean()
    n = len(r) * pad
    spec = np.abs(np.fft.rfft(r, n=n))
    k = int(np.argmax(spec[1:])) + 1
    return 2 * np.pi * k / (n * dt[0])
