"""Figure and demo runners that write self-describing CSV files.

Every CSV starts with ``#`` header lines holding the code version, the
member description, the step fingerprint and the full effective config,
followed by a column line and rows in ``%.17e`` format.  Nothing
time-dependent is written, so identical configs give identical files.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .cache import CACHE_DIR_ENV
from .config import ExperimentConfig
from .dvr import error_lower_bound, error_upper_bound, exact_truncation_error
from .grid import make_grid, wavenumber_to_hartree
from .hamiltonian import DoubleWell, System
from .mc import McConfig, mc_tcf
from .propagators import ORDERING, StepScheme, fingerprint, step_matrix
from .tcf import Observable, TcfSeries, contract_tcf, dominant_frequency, exact_tcf, trotterized_tcf

PANELS = ("a", "b", "c", "d")


@dataclass(frozen=True)
class Member:
    """One approximate curve of a panel."""

    label: str
    n_qubits: int
    n_steps: int
    ell: Optional[int]


@dataclass
class RunResult:
    files: List[Path] = field(default_factory=list)
    rows: List[dict] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and all(p.exists() for p in self.files)


def build_system(config: ExperimentConfig, n_qubits: int, length: Optional[float] = None) -> System:
    potential = DoubleWell(config.mass, wavenumber_to_hartree(config.barrier_frequency),
                           wavenumber_to_hartree(config.barrier_height))
    return System(make_grid(config.length if length is None else length, n_qubits), potential,
                  config.mass)


def time_grid(config: ExperimentConfig) -> np.ndarray:
    return np.linspace(0.0, config.t_max, config.n_times)


def panel_members(panel: str, config: ExperimentConfig) -> List[Member]:
    if panel == "a":
        return [Member(f"N{n}", config.n_qubits, n, config.ell) for n in config.steps_sweep]
    if panel == "b":
        return [Member(f"n{q}", q, config.n_steps, config.ell) for q in config.qubits_sweep]
    if panel == "c":
        return [Member(f"l{l}", config.panel_c_qubits, config.n_steps, l) for l in config.ell_sweep]
    if panel == "d":
        return [Member("d", config.panel_d_qubits, config.panel_d_steps, config.panel_d_ell)]
    raise ValueError(f"unknown panel {panel!r}; choose from {PANELS}")


def _cache_dir(config: ExperimentConfig):
    if config.cache_dir is not None:
        return config.cache_dir
    return os.environ.get(CACHE_DIR_ENV) or None


def _workers(config: ExperimentConfig, jobs: int) -> int:
    return config.workers or max(1, min(jobs, os.cpu_count() or 1))


def exact_reference(config: ExperimentConfig) -> TcfSeries:
    system = build_system(config, config.reference_qubits)
    x = Observable.position(system.grid)
    return exact_tcf(system.spectrum, x, x, config.beta, time_grid(config)).normalize(config.normalization)


def member_scheme(member: Member, config: ExperimentConfig) -> StepScheme:
    return StepScheme(config.t_max, config.beta, member.n_steps, config.real_time,
                      config.imaginary_time, member.ell, config.m0)


def run_member(member: Member, config: ExperimentConfig) -> TcfSeries:
    system = build_system(config, member.n_qubits)
    x = Observable.position(system.grid)
    series = trotterized_tcf(system, x, x, member.n_steps, config.beta, time_grid(config),
                             config.real_time, config.imaginary_time, member.ell, config.m0,
                             config.backward, _cache_dir(config))
    return series.normalize(config.normalization)


def _header(config: ExperimentConfig, describe: str, fp: str) -> List[str]:
    lines = [f"hpimc {__version__}", describe, f"fingerprint: {fp}", f"ordering: {ORDERING}", "config:"]
    lines += config.serialize().splitlines()
    return lines


def write_csv(path: Path, header: List[str], columns: List[str], data: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in np.atleast_2d(data):
            fh.write(",".join("%.17e" % v for v in row) + "\n")
    return path


def read_csv(path) -> tuple:
    """(header lines without '# ', column names, float array)."""
    header, body = [], []
    columns = None
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            header.append(line[2:])
        elif columns is None:
            columns = line.split(",")
        elif line:
            body.append([float(v) for v in line.split(",")])
    return header, columns, np.array(body)


def _series_columns(series: TcfSeries) -> np.ndarray:
    return np.column_stack([series.times, series.values.real, series.values.imag])


def _check_series(name: str, series: TcfSeries, mode: str) -> List[str]:
    bad = []
    if not np.all(np.isfinite(series.values)):
        bad.append(f"{name}: non-finite values")
    scale = np.max(np.abs(series.values)) if mode == "abs" else np.max(np.abs(series.values.real))
    if abs(scale - 1.0) > 1e-12:
        bad.append(f"{name}: normalization peak {scale!r} != 1")
    return bad


def run_fig1(panel: str, config: ExperimentConfig, out_dir) -> RunResult:
    """Exact and approximate position correlation functions for one panel of the double-well figure."""
    out_dir = Path(out_dir) / f"fig1{panel}"
    members = panel_members(panel, config)
    with ThreadPoolExecutor(max_workers=_workers(config, len(members) + 1)) as pool:
        exact_job = pool.submit(exact_reference, config)
        jobs = [pool.submit(run_member, m, config) for m in members]
        exact = exact_job.result()
        curves = [j.result() for j in jobs]

    result = RunResult()
    omega_exact = dominant_frequency(exact)
    ref_system = build_system(config, config.reference_qubits)
    result.files.append(write_csv(
        out_dir / "exact.csv",
        _header(config, f"curve: exact spectral reference, n_qubits={config.reference_qubits}",
                "spectral"),
        ["t", "re", "im"], _series_columns(exact)))
    result.failures += _check_series("exact", exact, config.normalization)
    for member, curve in zip(members, curves):
        system = build_system(config, member.n_qubits)
        fp = fingerprint(member_scheme(member, config), system.shifted(system.spectrum.eigenvalues[0]))
        ell = "none" if member.ell is None else member.ell
        describe = (f"curve: approx {member.label}, n_qubits={member.n_qubits} "
                    f"n_steps={member.n_steps} ell={ell} (fingerprint of the t=t_max step)")
        result.files.append(write_csv(out_dir / f"approx_{member.label}.csv",
                                      _header(config, describe, fp.hex()),
                                      ["t", "re", "im"], _series_columns(curve)))
        result.failures += _check_series(member.label, curve, config.normalization)
        result.rows.append({
            "label": member.label, "n_qubits": member.n_qubits, "n_steps": member.n_steps,
            "ell": member.ell, "max_deviation": curve.max_deviation(exact),
            "dominant_frequency": dominant_frequency(curve), "exact_frequency": omega_exact,
        })
    summary = np.array([[r["n_qubits"], r["n_steps"], -1 if r["ell"] is None else r["ell"],
                         r["max_deviation"], r["dominant_frequency"], r["exact_frequency"]]
                        for r in result.rows])
    result.files.append(write_csv(
        out_dir / "summary.csv",
        _header(config, f"summary: panel {panel} deviations from the exact curve (ell=-1 keeps all)",
                "n/a") + [f"exact reference grid: {ref_system.grid.num_points} points"],
        ["n_qubits", "n_steps", "ell", "max_deviation", "dominant_frequency", "exact_frequency"],
        summary))
    return result


def bounds_table(K: float, D: int) -> np.ndarray:
    """Rows (ell, exact, lower, upper, and the same three over the largest exact error), ell = 1 .. D-1."""
    ells = np.arange(1, D)
    exact = np.array([exact_truncation_error(int(l), D, K) for l in ells])
    lower = np.array([error_lower_bound(int(l), K) for l in ells])
    upper = np.array([error_upper_bound(int(l), K) for l in ells])
    scale = exact.max()
    return np.column_stack([ells, exact, lower, upper, exact / scale, lower / scale, upper / scale])


BOUNDS_COLUMNS = ["ell", "delta_exact", "delta_lower", "delta_upper",
                  "normalized_exact", "normalized_lower", "normalized_upper"]


def run_bounds(config: ExperimentConfig, out_dir) -> RunResult:
    """Truncation error and its bounds against the number of kept diagonals."""
    out_dir = Path(out_dir) / "bounds"
    result = RunResult()
    D = config.dimension
    for K in config.k_values:
        table = bounds_table(K, D)
        header = _header(config, f"bounds: K={K!r} D={D}, normalized columns divide by the max exact error",
                         "n/a")
        result.files.append(write_csv(out_dir / f"bounds_K{K:g}.csv", header, BOUNDS_COLUMNS, table))
        head = table[table[:, 0] <= D - 3]
        ordered = bool(np.all((head[:, 2] < head[:, 1]) & (head[:, 1] < head[:, 3])))
        if not ordered:
            result.failures.append(f"K={K}: bound ordering violated for some ell <= D-3")
        result.rows.append({"K": K, "ordered": ordered,
                            "mean_gap_lower": float(np.mean(np.abs(head[:, 1] - head[:, 2]))),
                            "mean_gap_upper": float(np.mean(np.abs(head[:, 3] - head[:, 1])))})
    return result


def run_mc(config: ExperimentConfig, out_dir) -> RunResult:
    """Path Monte Carlo estimates next to the quadrature value at each requested time."""
    out_dir = Path(out_dir) / "mc"
    system = build_system(config, config.mc_qubits, config.mc_length)
    shifted = system.shifted(system.spectrum.eigenvalues[0])
    z = float(np.sum(np.exp(-config.beta * shifted.spectrum.eigenvalues)))
    x = shifted.grid.positions
    n = config.mc_steps
    rows = []
    result = RunResult()
    for t in config.mc_times:
        scheme = StepScheme(t, config.beta, n, config.real_time, config.imaginary_time, config.ell, config.m0)
        uf = step_matrix(scheme, shifted)
        ub = uf.conj().T
        ref = contract_tcf(np.linalg.matrix_power(uf, n), x, x, z)
        mc = mc_tcf(uf, ub, x, x, n, z, McConfig(n_sweeps=config.mc_sweeps, window=config.mc_window,
                                                 n_chains=config.mc_chains, seed=config.mc_seed))
        rows.append([t, mc.estimate.real, mc.estimate.imag, mc.standard_error, ref.real, ref.imag,
                     mc.F_estimate, mc.acceptance, abs(mc.mean_phase)])
        if not (np.isfinite(mc.estimate) and np.isfinite(mc.standard_error)):
            result.failures.append(f"t={t}: non-finite estimate")
        result.rows.append({"t": t, "estimate": mc.estimate, "standard_error": mc.standard_error,
                            "quadrature": ref, "F": mc.F_estimate, "acceptance": mc.acceptance})
    describe = (f"mc: n_qubits={config.mc_qubits} length={system.grid.length!r} n_steps={n}, "
                "quadrature columns are the exact contraction of the same step matrices")
    result.files.append(write_csv(out_dir / "mc.csv", _header(config, describe, "n/a"),
                                  ["t", "re", "im", "standard_error", "quadrature_re", "quadrature_im",
                                   "F", "acceptance", "mean_abs_phase"], np.array(rows)))
    return result
