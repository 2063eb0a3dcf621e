"""Cross-scheme comparison: phase matching, L-inf norms, surface scans, minima."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .errors import DomainError
from .schemes import (
    FOUR_NODE,
    SchemeId,
    SchemePhases,
    four_node_variance_closed_form,
    pair_case1_variance,
)
from .symplectic import EPS_PHASE, canonical_angle, safe_cot

#: L-inf norm of the best pair-of-two-node scheme (case 2), units of sigma2.
PAIR_NORM = 4.0


@dataclass(frozen=True)
class MatchedPhases:
    """Phase sets ``{j: SchemePhases}`` under which all five four-node schemes
    realize the same transformation (configs 2 and 4 up to ``R(+-pi/2)``).

    ``theta3``, ``theta4`` and ``theta_plus`` hold the per-configuration
    derived values; every configuration uses ``theta_minus = pi/2``.
    """

    theta3: dict[int, float]
    theta4: dict[int, float]
    theta_plus: dict[int, float]

    def phases(self, j: int) -> SchemePhases:
        return SchemePhases.from_sums(
            self.theta_plus[j], math.pi / 2, self.theta3[j], self.theta4[j]
        )

    def all(self) -> dict[SchemeId, SchemePhases]:
        return {s: self.phases(s.config) for s in FOUR_NODE}


def match_phases(theta3: float, theta4: float, theta_plus: float) -> MatchedPhases:
    """Derive phases for configurations 1..5 from configuration-3 phases.

    ``theta_plus`` for configurations 2 and 5 is ``theta_plus3 - pi``; with
    ``pi - theta_plus3`` the matrices of configs 3 and 5 only coincide when
    ``theta_plus3`` is 0 or pi.
    """
    c3, c4 = safe_cot(theta3), safe_cot(theta4)
    a3 = -math.atan(c3)
    a4 = -math.atan(c4)
    tp1 = canonical_angle(theta_plus - math.pi / 2)
    tp2 = canonical_angle(theta_plus - math.pi)
    return MatchedPhases(
        theta3={1: a3, 2: theta3, 3: theta3, 4: a3, 5: a3},
        theta4={1: theta4, 2: a4, 3: theta4, 4: a4, 5: a4},
        theta_plus={1: tp1, 2: tp2, 3: canonical_angle(theta_plus), 4: tp1, 5: tp2},
    )


def linf_norm(v) -> float:
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        raise DomainError("L-inf norm of an empty vector")
    return float(np.max(np.abs(v)))


@dataclass(frozen=True)
class ScanGrid:
    """``n`` points per axis on ``[0, pi]``; points within ``margin`` of a pole are dropped."""

    n: int = 1001
    margin: float = 1e-6

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"grid needs n >= 2 points per axis, got {self.n}")
        if not (math.isfinite(self.margin) and self.margin >= EPS_PHASE):
            raise DomainError(f"grid margin must be >= {EPS_PHASE}, got {self.margin}")

    def tables(self):
        return kernels.grid_tables(self.n, self.margin)


class ScanRow(NamedTuple):
    theta3: float
    theta4: float
    norm_four_node: float
    norm_pair: float


@dataclass(frozen=True)
class ScanResult:
    theta: np.ndarray
    norms: np.ndarray  # norms[i, j] at (theta[i], theta[j]); NaN where excluded
    excluded: int

    def rows(self) -> Iterator[ScanRow]:
        """Kept cells in theta3-major order."""
        n = self.theta.size
        for i in range(n):
            for j in range(n):
                v = self.norms[i, j]
                if not math.isnan(v):
                    yield ScanRow(float(self.theta[i]), float(self.theta[j]), float(v), PAIR_NORM)


def scan_surface(grid: ScanGrid, *, transpose: bool = False, threads: int = 1,
                 backend: str | None = None) -> ScanResult:
    """L-inf norm of the four-node variance over the ``(theta3, theta4)`` grid."""
    theta, cot, csc2, ok = grid.tables()
    norms = kernels.get(backend).norm_grid(cot, csc2, ok, transpose, threads)
    kept = int(ok.sum())
    return ScanResult(theta, norms, grid.n * grid.n - kept * kept)


@dataclass(frozen=True)
class AreaCounts:
    pair_better: int  # S2: pair norm < four-node norm
    four_node_better: int  # S1
    ties: int
    excluded: int

    @property
    def ratio(self) -> float:
        """``S2 / S1``."""
        if self.four_node_better == 0:
            raise DomainError("area ratio undefined: no cell where the four-node norm is smaller")
        return self.pair_better / self.four_node_better


def area_counts(grid: ScanGrid, *, transpose: bool = False, threads: int = 1,
                backend: str | None = None,
                four_node_norm: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
                ) -> AreaCounts:
    """Count grid cells where each scheme has the smaller L-inf norm.

    ``four_node_norm(theta3, theta4)`` overrides the closed form (vectorized,
    evaluated on the numpy path). Exact ties count in neither area.
    """
    if four_node_norm is None:
        _, cot, csc2, ok = grid.tables()
        below, above, ties, excl = kernels.get(backend).count_regions(
            cot, csc2, ok, PAIR_NORM, transpose, threads
        )
        return AreaCounts(above, below, ties, excl)
    theta, _, _, ok = grid.tables()
    keep = theta[ok.astype(bool)]
    a, b = np.meshgrid(keep, keep, indexing="ij")
    if transpose:
        a, b = b, a
    v = np.broadcast_to(np.asarray(four_node_norm(a, b), dtype=float), a.shape)
    below = int(np.count_nonzero(v < PAIR_NORM))
    above = int(np.count_nonzero(v > PAIR_NORM))
    return AreaCounts(above, below, v.size - below - above, grid.n * grid.n - v.size)


def area_ratio(grid: ScanGrid, **kwargs) -> float:
    """``S2 / S1``: cells where the pair scheme wins over cells where the four-node scheme wins."""
    return area_counts(grid, **kwargs).ratio


def _closed_component(component: int):
    def f(p):
        return float(four_node_variance_closed_form(p[0], p[1])[component])

    return f


def minimize_variance_component(component: str, grid: ScanGrid, refine: bool = False,
                                backend: str | None = None) -> tuple[float, float, float]:
    """Minimum of one four-node variance component over the grid.

    Returns ``(value, theta3, theta4)`` in units of ``sigma2``. With
    ``refine`` the best grid cell seeds a bounded Nelder-Mead descent kept
    inside the grid margins.
    """
    if component not in ("x", "y"):
        raise DomainError(f"component must be 'x' or 'y', got {component!r}")
    k = 0 if component == "x" else 1
    theta, cot, csc2, ok = grid.tables()
    value, i, j = kernels.get(backend).grid_min(cot, csc2, ok, k)
    if i < 0:
        raise DomainError("grid has no cells outside the margins")
    t3, t4 = float(theta[i]), float(theta[j])
    if refine:
        lo, hi = grid.margin, math.pi - grid.margin
        res = minimize(
            _closed_component(k),
            x0=[t3, t4],
            method="Nelder-Mead",
            bounds=[(lo, hi), (lo, hi)],
            options={"xatol": 1e-10, "fatol": 1e-10, "maxiter": 500},
        )
        if res.fun < value:
            value, t3, t4 = float(res.fun), float(res.x[0]), float(res.x[1])
    return value, t3, t4


def minimize_pair_norm(n: int = 1001) -> tuple[float, float, float]:
    """Grid minimum of the pair case-1 L-inf norm over ``(theta_plus2, theta_minus2)``.

    ``theta_plus2`` spans ``[-pi, pi]`` and ``theta_minus2`` the open interval
    ``(0, pi)``. Returns ``(value, theta_plus2, theta_minus2)``.
    """
    tp = np.linspace(-math.pi, math.pi, n)
    tm = kernels.grid_thetas(n)[1:-1]
    a, b = np.meshgrid(tp, tm, indexing="ij")
    s2 = np.sin(b) ** 2
    k = np.cos(a) * np.cos(b)
    norm = 4.0 * (1.0 + np.abs(k)) / s2
    i, j = np.unravel_index(int(np.argmin(norm)), norm.shape)
    value = float(np.max(pair_case1_variance(tp[i], tm[j])))
    return value, float(tp[i]), float(tm[j])
