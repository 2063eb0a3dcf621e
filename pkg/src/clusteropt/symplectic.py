"""Small exact matrix algebra on quadrature vectors.

Single-mode matrices act on ``(x, y)``; two-mode matrices act on
``(x1, x2, y1, y2)``. The commutator is ``[x, y] = i/2`` so the vacuum
variance is 1/4 and the symplectic form carries entries of +-1/2.

All returned arrays are read-only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError, NotSymplecticError, SingularPhaseError

#: Pole-proximity tolerance (radians) for every tan/cot singularity check.
EPS_PHASE = 1e-9
#: Max-entry tolerance for matrix equality and symplecticity checks.
MATRIX_TOL = 1e-9
#: Squeezing factors within this distance of 1 are treated as pure rotations.
_ROTATION_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise DomainError(f"non-finite value {v!r}")


def canonical_angle(theta: float) -> float:
    """Map ``theta`` into ``(-pi, pi]``."""
    check_finite(theta)
    t = math.remainder(theta, 2 * math.pi)
    if t <= -math.pi:
        t += 2 * math.pi
    return t + 0.0


def check_sigma2(sigma2: float) -> float:
    """Validate a squeeze variance: finite and strictly between 0 and the vacuum 1/4."""
    check_finite(sigma2)
    if not 0.0 < sigma2 < 0.25:
        raise DomainError(f"squeeze variance must satisfy 0 < sigma2 < 0.25, got {sigma2}")
    return float(sigma2)


def safe_tan(theta: float) -> float:
    check_finite(theta)
    if abs(math.cos(theta)) <= EPS_PHASE:
        raise SingularPhaseError(f"singular phase configuration: tan diverges at {theta}")
    return math.tan(theta)


def safe_cot(theta: float) -> float:
    check_finite(theta)
    if abs(math.sin(theta)) <= EPS_PHASE:
        raise SingularPhaseError(f"singular phase configuration: cot diverges at {theta}")
    return math.cos(theta) / math.sin(theta)


def max_abs_diff(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))))


def rotation(theta: float) -> np.ndarray:
    check_finite(theta)
    c, s = math.cos(theta), math.sin(theta)
    return _frozen([[c, -s], [s, c]])


def squeeze(r: float) -> np.ndarray:
    """``diag(e^-r, e^r)``: squeezes x, stretches y for ``r > 0``."""
    check_finite(r)
    return _frozen([[math.exp(-r), 0.0], [0.0, math.exp(r)]])


def measurement_gate(theta_minus: float) -> np.ndarray:
    """Squeeze produced by a two-node measurement at phase difference ``theta_minus``.

    Returns ``diag(1/t, t)`` with ``t = tan(theta_minus / 2)``. The tangent is
    kept signed, so negative ``t`` (e.g. ``theta_minus = -arctan 2``) is
    representable; for ``t > 0`` this equals ``squeeze(log t)``.

    Raises
    ------
    SingularPhaseError
        If ``t`` is within ``EPS_PHASE`` of zero or diverges.
    """
    check_finite(theta_minus)
    half = 0.5 * theta_minus
    if abs(math.sin(half)) <= EPS_PHASE or abs(math.cos(half)) <= EPS_PHASE:
        raise SingularPhaseError(f"degenerate squeeze phase: theta_minus={theta_minus}")
    t = math.tan(half)
    return _frozen([[1.0 / t, 0.0], [0.0, t]])


def symplectic_form(modes: int) -> np.ndarray:
    """Symplectic form for ordering ``(x1..xn, y1..yn)`` with ``[x, y] = i/2``."""
    eye = np.eye(modes)
    zero = np.zeros((modes, modes))
    return _frozen(0.5 * np.block([[zero, eye], [-eye, zero]]))


def symplectic_defect(m) -> float:
    """Max-entry deviation of ``m`` from symplecticity (``|det - 1|`` for 2x2)."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise DimensionError(f"expected an even square matrix, got shape {m.shape}")
    if m.shape == (2, 2):
        return abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] - 1.0)
    omega = symplectic_form(m.shape[0] // 2)
    return max_abs_diff(m @ omega @ m.T, omega)


def check_symplectic(m, tol: float = MATRIX_TOL) -> np.ndarray:
    """Return ``m`` as a float array, raising if it is not symplectic.

    The tolerance is relative to the squared largest entry, since the
    determinant of a floating-point matrix with entries of size ``k``
    carries rounding error of order ``k**2 * eps``.
    """
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(m))) ** 2)
    defect = symplectic_defect(m)
    if not defect <= tol * scale:
        raise NotSymplecticError(f"not symplectic: defect {defect:.3e}")
    return m


def compose(ms: Sequence) -> np.ndarray:
    """Matrix product in listed order, so the last listed matrix acts first."""
    if len(ms) == 0:
        raise DimensionError("compose needs at least one matrix")
    mats = [np.asarray(m, dtype=float) for m in ms]
    shape = mats[0].shape
    for m in mats[1:]:
        if m.shape != shape:
            raise DimensionError(f"cannot compose {shape} with {m.shape}")
    out = mats[0]
    for m in mats[1:]:
        out = out @ m
    return _frozen(out)


def direct_sum_modes(a, b) -> np.ndarray:
    """Block-combine single-mode ``a`` (mode 1) and ``b`` (mode 2) in ``(x1,x2,y1,y2)`` order."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return _frozen(
        [
            [a[0, 0], 0.0, a[0, 1], 0.0],
            [0.0, b[0, 0], 0.0, b[0, 1]],
            [a[1, 0], 0.0, a[1, 1], 0.0],
            [0.0, b[1, 0], 0.0, b[1, 1]],
        ]
    )


@dataclass(frozen=True)
class EulerFactors:
    """``target = rotation(alpha) @ diag(s, 1/s) @ rotation(beta)`` with ``s >= 1``."""

    alpha: float
    s: float
    beta: float

    def matrix(self) -> np.ndarray:
        return compose(
            [rotation(self.alpha), np.diag([self.s, 1.0 / self.s]), rotation(self.beta)]
        )


def euler_decompose(u) -> EulerFactors:
    """Factor a 2x2 symplectic matrix as ``R(alpha) diag(s, 1/s) R(beta)``.

    Uses the closed-form 2x2 SVD. Canonical branch: ``s >= 1``; a pure
    rotation gets ``beta = 0``; otherwise ``beta`` is taken in
    ``(-pi/2, pi/2]``, which resolves the ``(alpha + pi, beta + pi)``
    ambiguity.
    """
    u = check_symplectic(u)
    if u.shape != (2, 2):
        raise DimensionError(f"euler_decompose needs a 2x2 matrix, got {u.shape}")
    a, b = u[0]
    c, d = u[1]
    e, f = 0.5 * (a + d), 0.5 * (a - d)
    g, h = 0.5 * (c + b), 0.5 * (c - b)
    q = math.hypot(e, h)
    r = math.hypot(f, g)
    s = q + r
    if s - 1.0 <= _ROTATION_TOL:
        return EulerFactors(canonical_angle(math.atan2(h, e)), 1.0, 0.0)
    a1 = math.atan2(g, f)
    a2 = math.atan2(h, e)
    alpha = 0.5 * (a2 + a1)
    beta = 0.5 * (a2 - a1)
    # R(alpha+pi) S R(beta+pi) == R(alpha) S R(beta); pick beta in (-pi/2, pi/2]
    k = math.ceil((beta - 0.5 * math.pi) / math.pi)
    beta -= k * math.pi
    alpha += k * math.pi
    return EulerFactors(canonical_angle(alpha), s, beta)
