"""Flat ``key = value`` experiment configuration.

One assignment per line, ``#`` starts a comment, list values are comma
separated and ``none`` clears an optional field.  Every field is validated
before any computation starts; failures raise :class:`ConfigError` naming
the offending key.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

from .errors import ConfigError
from .propagators import DEFAULT_M0, IMAGINARY_TIME_SCHEMES, REAL_TIME_SCHEMES

EXPERIMENTS = ("fig1", "bounds", "mc")


def parse_config_text(text: str) -> dict:
    """Raw ``{key: value}`` strings from config text."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}", "empty key")
        if key in out:
            raise ConfigError(key, f"set twice (line {lineno})")
        out[key] = value
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """Physical and numerical parameters of one run.

    Energies are given in cm^-1, temperature in K and everything else in
    atomic units.  ``n_qubits`` and ``n_steps`` are the panel-a grid and the
    panel-b/c step count; panel c runs at ``panel_c_qubits`` and panel d at
    ``panel_d_*``.  Exact references always use ``reference_qubits``.
    """

    experiment: str = "fig1"
    # double-well system
    mass: float = 1836.0
    barrier_frequency: float = 500.0
    barrier_height: float = 1500.0
    temperature: float = 350.0
    length: float = 30.0
    # propagation
    n_qubits: int = 8
    n_steps: int = 80
    ell: Optional[int] = None
    real_time: str = "trotter2_fourier"
    imaginary_time: str = "trotter1_dvr"
    m0: float = DEFAULT_M0
    backward: str = "adjoint"
    t_max: float = 7000.0
    n_times: int = 200
    normalization: str = "abs"
    # fig1 sweeps
    reference_qubits: int = 8
    steps_sweep: Tuple[int, ...] = (10, 20, 40, 80)
    qubits_sweep: Tuple[int, ...] = (5, 6, 7, 8)
    panel_c_qubits: int = 7
    ell_sweep: Tuple[int, ...] = (4, 8, 16, 32, 128)
    panel_d_qubits: int = 6
    panel_d_steps: int = 40
    panel_d_ell: int = 4
    # bounds
    dimension: int = 512
    k_values: Tuple[float, ...] = (1.0,)
    # monte carlo
    mc_qubits: int = 3
    mc_length: float = 4.0
    mc_steps: int = 2
    mc_times: Tuple[float, ...] = (0.0,)
    mc_sweeps: int = 100_000
    mc_chains: int = 32
    mc_window: Optional[int] = None
    mc_seed: int = 0
    # execution
    workers: int = 0
    cache_dir: Optional[str] = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        def need(ok, name, msg):
            if not ok:
                raise ConfigError(name, msg)

        need(self.experiment in EXPERIMENTS, "experiment", f"must be one of {EXPERIMENTS}")
        for name in ("mass", "barrier_frequency", "barrier_height", "temperature", "length", "t_max", "mc_length"):
            v = getattr(self, name)
            need(math.isfinite(v) and v > 0, name, f"must be positive and finite, got {v}")
        for name in ("n_qubits", "reference_qubits", "panel_c_qubits", "panel_d_qubits", "mc_qubits"):
            v = getattr(self, name)
            need(2 <= v <= 12, name, f"qubit count must lie in [2, 12], got {v}")
        for v in self.qubits_sweep:
            need(2 <= v <= 12, "qubits_sweep", f"qubit count must lie in [2, 12], got {v}")
        for name in ("n_steps", "panel_d_steps", "mc_steps", "mc_chains"):
            v = getattr(self, name)
            need(v >= 1, name, f"must be >= 1, got {v}")
        need(all(v >= 1 for v in self.steps_sweep), "steps_sweep", "step counts must be >= 1")
        need(self.n_times >= 2, "n_times", "need at least two time points")
        need(self.real_time in REAL_TIME_SCHEMES, "real_time", f"must be one of {REAL_TIME_SCHEMES}")
        need(self.imaginary_time in IMAGINARY_TIME_SCHEMES, "imaginary_time",
             f"must be one of {IMAGINARY_TIME_SCHEMES}")
        need(0 < self.m0 < 1, "m0", f"must lie in (0, 1), got {self.m0}")
        need(self.backward in ("adjoint", "split"), "backward", "must be 'adjoint' or 'split'")
        need(self.normalization in ("abs", "real"), "normalization", "must be 'abs' or 'real'")
        need(self.ell is None or self.ell >= 1, "ell", "must be >= 1 or none")
        need(self.ell is None or self.ell <= 2 ** self.n_qubits, "ell", "cannot exceed the grid size")
        for v in self.ell_sweep:
            need(1 <= v <= 2 ** self.panel_c_qubits, "ell_sweep",
                 f"{v} outside [1, {2 ** self.panel_c_qubits}]")
        need(1 <= self.panel_d_ell <= 2 ** self.panel_d_qubits, "panel_d_ell",
             f"outside [1, {2 ** self.panel_d_qubits}]")
        for name in ("steps_sweep", "qubits_sweep", "ell_sweep", "k_values", "mc_times"):
            need(len(getattr(self, name)) >= 1, name, "must list at least one value")
        need(self.dimension >= 8 and self.dimension & (self.dimension - 1) == 0, "dimension",
             f"must be a power of two >= 8, got {self.dimension}")
        need(all(math.isfinite(k) and k > 0 for k in self.k_values), "k_values", "must be positive")
        need(all(math.isfinite(t) for t in self.mc_times), "mc_times", "must be finite")
        need(list(self.mc_times) == sorted(set(self.mc_times)), "mc_times", "must be strictly increasing")
        need(self.mc_sweeps >= self.mc_chains, "mc_sweeps", "must be at least mc_chains")
        need(self.mc_window is None or self.mc_window >= 1, "mc_window", "must be >= 1 or none")
        need(self.workers >= 0, "workers", "must be >= 0 (0 picks automatically)")

    @property
    def beta(self) -> float:
        from .grid import kelvin_to_beta
        return kelvin_to_beta(self.temperature)

    def serialize(self) -> str:
        """Canonical text form; ``from_text(c.serialize()) == c``."""
        lines = []
        for f in dataclasses.fields(self):
            lines.append(f"{f.name} = {_format(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_mapping(cls, raw: dict) -> "ExperimentConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, text in raw.items():
            if key not in known:
                raise ConfigError(key, "unknown key")
            kwargs[key] = _convert(key, known[key].type, text)
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        return cls.from_mapping(parse_config_text(text))


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    return ExperimentConfig.from_text(text)


def _format(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _convert(key: str, annotation: str, text: str):
    optional = annotation.startswith("Optional[")
    if optional:
        if text.lower() == "none":
            return None
        annotation = annotation[len("Optional["):-1]
    try:
        if annotation.startswith("Tuple["):
            inner = annotation[len("Tuple["):].split(",")[0].strip()
            parts = [p.strip() for p in text.split(",") if p.strip()]
            return tuple(_scalar(inner, p) for p in parts)
        return _scalar(annotation, text)
    except ValueError as exc:
        raise ConfigError(key, f"cannot parse {text!r} as {annotation}") from exc


def _scalar(kind: str, text: str):
    if kind == "int":
        value = float(text)
        if not value.is_integer():
            raise ValueError(text)
        return int(value)
    if kind == "float":
        return float(text)
    return text
