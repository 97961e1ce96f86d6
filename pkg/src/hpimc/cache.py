"""Persistent look-up table of step-matrix elements.

File layout: an 8-byte magic, the 32-byte context fingerprint, then
append-only little-endian records ``(row: u32, col: u32, re: f64, im: f64)``.
A trailing partial record (an interrupted append) is ignored on load.
"""
from __future__ import annotations

import logging
import os
import struct
import threading
from pathlib import Path

import numpy as np

from .errors import CacheIOError, InvalidArgument, StaleCacheError
from .hamiltonian import System
from .propagators import StepScheme, complex_time_element, fingerprint, step_matrix

log = logging.getLogger(__name__)

MAGIC = b"HPIMCEC1"
RECORD = struct.Struct("<IIdd")
HEADER_SIZE = len(MAGIC) + 32
CACHE_DIR_ENV = "HPIMC_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_DIR_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "hpimc"


class ElementCache:
    """Element table bound to one context fingerprint, optionally backed by a file.

    Reads never see a torn record: records are appended whole under a lock
    and partial trailing bytes are discarded when loading.
    """

    def __init__(self, fp: bytes, path=None):
        if len(fp) != 32:
            raise InvalidArgument("fingerprint must be 32 bytes")
        self.fingerprint = bytes(fp)
        self.path = Path(path) if path is not None else None
        self.hits = 0
        self.misses = 0
        self.uncached = 0
        self.last_error = None
        self._table = {}
        self._lock = threading.RLock()
        if self.path is not None:
            self._load()

    @classmethod
    def for_context(cls, scheme: StepScheme, system: System, directory=None) -> "ElementCache":
        fp = fingerprint(scheme, system)
        directory = Path(directory) if directory is not None else default_cache_dir()
        return cls(fp, directory / f"{fp.hex()}.bin")

    def __len__(self):
        return len(self._table)

    def __contains__(self, key):
        return key in self._table

    def _load(self):
        if not self.path.exists():
            return
        try:
            data = self.path.read_bytes()
        except OSError as exc:
            raise CacheIOError(f"cannot read cache {self.path}: {exc}") from exc
        header = MAGIC + self.fingerprint
        if len(data) < HEADER_SIZE and header.startswith(data):
            # interrupted before the header was complete
            self._truncate(0)
            return
        if len(data) < HEADER_SIZE or data[:len(MAGIC)] != MAGIC:
            raise CacheIOError(f"{self.path} is not an element cache file")
        if data[len(MAGIC):HEADER_SIZE] != self.fingerprint:
            raise StaleCacheError(f"{self.path} was written for a different context")
        body = data[HEADER_SIZE:]
        usable = len(body) - len(body) % RECORD.size
        for row, col, re, im in RECORD.iter_unpack(body[:usable]):
            self._table[(row, col)] = complex(re, im)
        if usable != len(body):
            # drop the torn tail so later appends stay record-aligned
            self._truncate(HEADER_SIZE + usable)

    def _truncate(self, size):
        try:
            os.truncate(self.path, size)
        except OSError as exc:
            raise CacheIOError(f"cannot repair cache {self.path}: {exc}") from exc

    def _append(self, items):
        if self.path is None:
            return True
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            new = not self.path.exists() or self.path.stat().st_size == 0
            with open(self.path, "ab") as fh:
                if new:
                    fh.write(MAGIC + self.fingerprint)
                fh.write(b"".join(RECORD.pack(r, c, v.real, v.imag) for (r, c), v in items))
            return True
        except OSError as exc:
            self.last_error = CacheIOError(f"cannot write cache {self.path}: {exc}")
            log.warning("%s", self.last_error)
            return False

    def lookup(self, row: int, col: int):
        with self._lock:
            return self._table.get((row, col))

    def store(self, items) -> bool:
        """Insert ``{(row, col): value}`` entries; returns False if persisting failed."""
        items = list(items.items() if isinstance(items, dict) else items)
        with self._lock:
            for key, value in items:
                self._table[key] = complex(value)
            ok = self._append(items)
            if not ok:
                self.uncached += len(items)
            return ok

    def check(self, scheme: StepScheme, system: System) -> None:
        if fingerprint(scheme, system) != self.fingerprint:
            raise StaleCacheError("cache fingerprint does not match the requested context")


def cached_element(cache: ElementCache, row: int, col: int, scheme: StepScheme,
                   system: System) -> complex:
    """Element from ``cache``, computed and stored on a miss."""
    cache.check(scheme, system)
    value = cache.lookup(row, col)
    if value is not None:
        cache.hits += 1
        return value
    value = complex_time_element(row, col, scheme, system)
    cache.misses += 1
    cache.store({(row, col): value})
    return value


def cached_step_matrix(cache: ElementCache, scheme: StepScheme, system: System) -> np.ndarray:
    """Full step-matrix table, computing only the elements missing from ``cache``."""
    cache.check(scheme, system)
    d = system.grid.num_points
    out = np.empty((d, d), dtype=complex)
    missing = []
    with cache._lock:
        for r in range(d):
            for c in range(d):
                v = cache._table.get((r, c))
                if v is None:
                    missing.append((r, c))
                else:
                    out[r, c] = v
    cache.hits += d * d - len(missing)
    if missing:
        full = step_matrix(scheme, system)
        new = {}
        for r, c in missing:
            out[r, c] = full[r, c]
            new[(r, c)] = full[r, c]
        cache.misses += len(missing)
        cache.store(new)
    return out
