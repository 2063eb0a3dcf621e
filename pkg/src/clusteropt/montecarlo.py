"""Statistical oracle for the analytic error variances.

Ancilla quadratures are sampled as independent zero-mean Gaussians with
variance ``sigma2``. Each ancilla slot draws from its own stream, seeded from
``(seed, slot)``, so results do not depend on thread count or on how many
other slots are sampled.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .schemes import ErrorMap, SchemeRealization
from .symplectic import check_sigma2

DEFAULT_SIGMA2 = 0.05
_CHUNK = 1 << 17


@dataclass(frozen=True)
class SampleConfig:
    trials: int = 1_000_000
    seed: int = 0
    sigma2: float = DEFAULT_SIGMA2

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        check_sigma2(self.sigma2)


def relative_tolerance(trials: int) -> float:
    """Three standard errors of a Gaussian variance estimate, relative to the variance."""
    return 3.0 * math.sqrt(2.0 / trials)


def slot_generator(seed: int, slot: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(slot,)))


def _chunks(trials: int):
    lo = 0
    while lo < trials:
        hi = min(lo + _CHUNK, trials)
        yield hi - lo
        lo = hi


def sample_squeezed(n: int, cfg: SampleConfig, threads: int = 1) -> np.ndarray:
    """``(trials, n)`` array of i.i.d. ancilla samples with variance ``cfg.sigma2``."""
    scale = math.sqrt(cfg.sigma2)

    def column(slot: int) -> np.ndarray:
        g = slot_generator(cfg.seed, slot)
        return scale * np.concatenate([g.standard_normal(k) for k in _chunks(cfg.trials)])

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        cols = list(pool.map(column, range(n)))
    return np.stack(cols, axis=1) if cols else np.empty((cfg.trials, 0))


def estimate_variance(e: ErrorMap | np.ndarray, cfg: SampleConfig, threads: int = 1) -> np.ndarray:
    """Empirical per-output variance of ``E @ y`` over ``cfg.trials`` draws.

    Samples are generated chunk by chunk from the per-slot streams and
    merged with the pairwise (Chan) update in fixed chunk order.
    """
    m = e.matrix if isinstance(e, ErrorMap) else np.asarray(e, dtype=float)
    k, n = m.shape
    gens = [slot_generator(cfg.seed, s) for s in range(n)]
    scale = math.sqrt(cfg.sigma2)
    count = 0
    mean = np.zeros(k)
    m2 = np.zeros(k)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for size in _chunks(cfg.trials):
            cols = list(pool.map(lambda g: g.standard_normal(size), gens))
            y = scale * np.stack(cols, axis=1) if cols else np.zeros((size, 0))
            out = y @ m.T
            c_mean = out.mean(axis=0)
            c_m2 = np.sum((out - c_mean) ** 2, axis=0)
            delta = c_mean - mean
            total = count + size
            mean = mean + delta * (size / total)
            m2 = m2 + c_m2 + delta**2 * (count * size / total)
            count = total
    if count < 2:
        return m2 * 0.0
    return m2 / (count - 1)


def check_covariance(cov, tol_sym: float = 1e-12, tol_eig: float = 1e-9) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise DimensionError(f"covariance must be square, got shape {cov.shape}")
    if np.max(np.abs(cov - cov.T), initial=0.0) > tol_sym:
        raise DomainError("covariance matrix is not symmetric")
    if cov.size and np.min(np.linalg.eigvalsh(cov)) < -tol_eig:
        raise DomainError("covariance matrix is not positive semidefinite")
    return cov


def vacuum(modes: int) -> np.ndarray:
    return 0.25 * np.eye(2 * modes)


def propagate(cov, matrix, error, sigma2: float) -> np.ndarray:
    """``U cov U^T + sigma2 E E^T``."""
    u = np.asarray(matrix, dtype=float)
    e = np.asarray(error, dtype=float)
    if u.shape[1] != cov.shape[0] or e.shape[0] != u.shape[0]:
        raise DimensionError(
            f"cannot propagate covariance {cov.shape} through {u.shape} with error {e.shape}"
        )
    out = u @ cov @ u.T + sigma2 * (e @ e.T)
    return 0.5 * (out + out.T)


def output_covariance(r: SchemeRealization, input_cov, sigma2: float) -> np.ndarray:
    """Output covariance of a realization fed with ``input_cov``."""
    check_sigma2(sigma2)
    cov = check_covariance(input_cov)
    return propagate(cov, r.matrix, r.error_map.matrix, sigma2)
