"""Path Monte Carlo estimate of the Trotterized correlation function.

A path is ``x = (x_0, ..., x_{2N-1})`` with ``x_{2N} = x_0``.  The forward
half carries ``Uf[x_{k+1}, x_k]`` for k < N and the backward half
``Ub[x_{k+1}, x_k]`` for N <= k < 2N.  Chains sample |Theta I| with
Metropolis moves and average A(x_N) B(x_0) times the unit phase of Theta I.
A sweep proposes a windowed displacement of every bead in turn, then one
translation of the whole path.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgument, SamplerStuckError

ENUMERATION_LIMIT = 10 ** 6

InfluenceHook = Callable[[np.ndarray], np.ndarray]


def gas_phase(paths: np.ndarray) -> np.ndarray:
    """Default influence functional: 1 for every path."""
    return np.ones(np.shape(paths)[:-1], dtype=complex)


def constant_influence(c: complex) -> InfluenceHook:
    def hook(paths):
        return np.full(np.shape(paths)[:-1], c, dtype=complex)
    return hook


def gaussian_damping(gamma: float, positions: np.ndarray) -> InfluenceHook:
    """exp(-gamma * sum_k (x_k - x_{2N-k})^2) over forward/backward bead pairs.

    ``positions`` maps bead indices to coordinates.
    """
    positions = np.asarray(positions, dtype=float)

    def hook(paths):
        x = positions[np.asarray(paths)]
        n2 = x.shape[-1]
        mirror = x[..., (-np.arange(n2)) % n2]
        return np.exp(-gamma * np.sum((x - mirror) ** 2, axis=-1) / 2).astype(complex)
    return hook


def theta_weight(paths, forward, backward, n_steps: int) -> np.ndarray:
    """Product of forward then backward step elements along each path (last axis = beads)."""
    paths = np.asarray(paths)
    if paths.shape[-1] != 2 * n_steps:
        raise InvalidArgument(f"paths need {2 * n_steps} beads, got {paths.shape[-1]}")
    nxt = np.roll(paths, -1, axis=-1)
    fw = forward[nxt[..., :n_steps], paths[..., :n_steps]]
    bw = backward[nxt[..., n_steps:], paths[..., n_steps:]]
    return np.prod(fw, axis=-1) * np.prod(bw, axis=-1)


def _all_paths(d, n_steps):
    return np.array(list(itertools.product(range(d), repeat=2 * n_steps)), dtype=np.int64)


def path_normalization(forward, backward, n_steps: int, hook: Optional[InfluenceHook] = None) -> float:
    """F = sum over all paths of |Theta I|, by exact enumeration."""
    d = forward.shape[0]
    if d ** (2 * n_steps) > ENUMERATION_LIMIT:
        raise InvalidArgument("path space too large to enumerate; use the sampled estimate")
    paths = _all_paths(d, n_steps)
    w = theta_weight(paths, forward, backward, n_steps)
    if hook is not None:
        w = w * hook(paths)
    return float(np.sum(np.abs(w)))


def transfer_normalization(forward, backward, n_steps: int) -> float:
    """Gas-phase F = Tr(|Ub|^N |Uf|^N) with elementwise magnitudes; exact at any size."""
    fw = np.linalg.matrix_power(np.abs(forward), n_steps)
    bw = np.linalg.matrix_power(np.abs(backward), n_steps)
    return float(np.sum(bw * fw.T))


def enumerated_tcf(forward, backward, A, B, n_steps: int, z: float,
                   hook: Optional[InfluenceHook] = None) -> complex:
    """Exact path sum (1/Z) sum_x A(x_N) B(x_0) Theta(x) I(x) for diagonal A, B."""
    paths = _all_paths(forward.shape[0], n_steps)
    w = theta_weight(paths, forward, backward, n_steps)
    if hook is not None:
        w = w * hook(paths)
    a = np.asarray(A)[paths[:, n_steps]]
    b = np.asarray(B)[paths[:, 0]]
    return complex(np.sum(a * b * w) / z)


@dataclass(frozen=True)
class McConfig:
    """Sampler settings.  ``n_sweeps`` is the total number of sweeps over all chains."""

    n_sweeps: int = 10_000
    window: Optional[int] = None
    burn_in: float = 0.1
    n_batches: int = 32
    n_chains: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.n_sweeps < 1:
            raise InvalidArgument("n_sweeps must be >= 1")
        if not 0 <= self.burn_in < 1:
            raise InvalidArgument("burn_in must lie in [0, 1)")
        if self.n_chains < 1 or self.n_batches < 1:
            raise InvalidArgument("n_chains and n_batches must be >= 1")
        if self.n_sweeps < self.n_chains:
            raise InvalidArgument("n_sweeps must be at least n_chains")


@dataclass(frozen=True)
class McResult:
    estimate: complex
    standard_error: float
    F_estimate: float
    acceptance: float
    n_measurements: int
    F_exact: bool
    mean_phase: complex = 1.0
    phase_standard_error: float = 0.0


def mc_tcf(forward, backward, A, B, n_steps: int, z: float, config: McConfig = McConfig(),
           hook: Optional[InfluenceHook] = None) -> McResult:
    """Metropolis estimate of (F/Z) < A(x_N) B(x_0) phase(Theta I) >_W.

    Chains are independent with seeds spawned from ``config.seed`` and are
    advanced together; results merge in chain order, so a fixed seed gives
    bit-identical output.  F is enumerated for small path spaces, taken from
    the transfer matrix for the gas phase, and otherwise estimated from the
    same chain as F_gas / <1/|I|>_W.
    """
    hook = hook or gas_phase
    forward = np.asarray(forward)
    backward = np.asarray(backward)
    d = forward.shape[0]
    nb = 2 * n_steps
    a = np.asarray(A.values if hasattr(A, "values") else A)
    b = np.asarray(B.values if hasattr(B, "values") else B)
    w = config.window if config.window is not None else max(1, d // 8)
    w = min(w, d // 2)
    n_chains = config.n_chains
    sweeps = config.n_sweeps // n_chains
    burn = int(config.burn_in * sweeps)
    kept = sweeps - burn
    if kept < 1:
        raise InvalidArgument("no measurements remain after burn-in")

    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(config.seed).spawn(n_chains)]
    # each chain starts on a constant path drawn by its closed-loop weight, so
    # chains do not share one basin of a multi-well weight
    diag = np.abs(np.diag(forward)) ** n_steps * np.abs(np.diag(backward)) ** n_steps
    if not diag.sum() > 0:
        raise SamplerStuckError("no constant path has nonzero weight", {"window": w})
    starts = np.array([r.choice(d, p=diag / diag.sum()) for r in rngs], dtype=np.int64)
    paths = np.repeat(starts[:, None], nb, axis=1)

    def weigh(p):
        inf = hook(p)
        return theta_weight(p, forward, backward, n_steps) * inf, inf

    theta, influence = weigh(paths)
    if np.any(theta == 0):
        raise SamplerStuckError("initial path has zero weight", {"start": paths[0].tolist()})

    # all random numbers are drawn per chain up front, so chains never share a stream
    steps = np.stack([r.integers(1, 2 * w + 1, size=(sweeps, nb)) for r in rngs], axis=1)
    steps = np.where(steps > w, steps - 2 * w - 1, steps)
    uniforms = np.stack([r.random((sweeps, nb)) for r in rngs], axis=1)
    # one whole-path translation per sweep lets paths cross barriers
    shifts = np.stack([r.integers(1, d, size=sweeps) for r in rngs], axis=1)
    shift_uniforms = np.stack([r.random(sweeps) for r in rngs], axis=1)

    obs = np.empty((kept, n_chains), dtype=complex)
    phases = np.empty((kept, n_chains), dtype=complex)
    inv_influence = np.empty((kept, n_chains))
    accepted = np.zeros(n_chains, dtype=np.int64)
    chain_idx = np.arange(n_chains)
    batch_len = max(1, kept // max(1, config.n_batches // n_chains))
    since_accept = np.zeros(n_chains, dtype=np.int64)
    def propose(trial, u):
        nonlocal paths, theta, influence, accepted, since_accept
        new, new_inf = weigh(trial)
        acc = u < np.abs(new) / np.abs(theta)
        paths = np.where(acc[:, None], trial, paths)
        theta = np.where(acc, new, theta)
        influence = np.where(acc, new_inf, influence)
        accepted += acc
        since_accept = np.where(acc, 0, since_accept + 1)

    for s in range(sweeps):
        for k in range(nb):
            trial = paths.copy()
            trial[:, k] = (paths[:, k] + steps[s, :, k]) % d
            propose(trial, uniforms[s, :, k])
        propose((paths + shifts[s][:, None]) % d, shift_uniforms[s])
        if np.any(since_accept >= batch_len * (nb + 1)):
            stuck = chain_idx[since_accept >= batch_len * (nb + 1)]
            raise SamplerStuckError(
                f"chains {stuck.tolist()} accepted no move in a full batch",
                {"sweep": s, "window": w, "paths": paths[stuck].tolist()})
        if s >= burn:
            mag = np.abs(theta)
            phases[s - burn] = theta / mag
            obs[s - burn] = a[paths[:, n_steps]] * b[paths[:, 0]] * phases[s - burn]
            inv_influence[s - burn] = 1.0 / np.abs(influence)

    all_paths_count = float(d) ** nb
    if all_paths_count <= ENUMERATION_LIMIT:
        f_value = path_normalization(forward, backward, n_steps, hook)
        f_exact = True
    else:
        # F = F_gas <1/|I|>_W^-1, with F_gas from the transfer matrix; only the
        # influence share is sampled, which keeps the harmonic mean well conditioned
        f_gas = transfer_normalization(forward, backward, n_steps)
        if hook is gas_phase:
            f_value, f_exact = f_gas, True
        else:
            f_value, f_exact = f_gas / float(np.mean(inv_influence)), False

    per_chain = max(1, config.n_batches // n_chains)
    usable = (kept // per_chain) * per_chain

    def batch_error(samples):
        means = samples[:usable].reshape(per_chain, usable // per_chain, n_chains).mean(axis=1).ravel()
        return float(np.std(means, ddof=1) / np.sqrt(len(means))) if len(means) > 1 else float("nan")

    scale = f_value / z
    return McResult(complex(obs.mean() * scale), batch_error(obs) * scale, f_value,
                    float(accepted.sum() / (sweeps * (nb + 1) * n_chains)), kept * n_chains, f_exact,
                    complex(phases.mean()), batch_error(phases))
