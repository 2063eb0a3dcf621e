"""Compile Gaussian circuits onto two-node clusters with an exact error budget.

Every single-mode gate becomes one two-node cluster plus a noiseless
rotator; every CZ becomes beam splitter, two rotator gates, beam splitter.
Gates are lowered one by one in source order; nothing is fused or
reordered, so the budget is the per-gate accounting of the source circuit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, NotSymplecticError
from .montecarlo import propagate
from .schemes import (
    BEAM_SPLITTER,
    GATE_A,
    GATE_B,
    SQRT2,
    SchemePhases,
    rotator_realization,
)
from .symplectic import (
    MATRIX_TOL,
    canonical_angle,
    check_finite,
    check_sigma2,
    check_symplectic,
    euler_decompose,
    max_abs_diff,
    rotation,
)

Matrix2 = tuple[tuple[float, float], tuple[float, float]]


def _as_matrix2(m) -> Matrix2:
    a = np.asarray(m, dtype=float)
    if a.shape != (2, 2):
        raise DomainError(f"single-mode gate matrix must be 2x2, got shape {a.shape}")
    return ((float(a[0, 0]), float(a[0, 1])), (float(a[1, 0]), float(a[1, 1])))


@dataclass(frozen=True)
class SingleGate:
    mode: int
    matrix: Matrix2

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_matrix2(self.matrix))


@dataclass(frozen=True)
class CZGate:
    mode_a: int
    mode_b: int


Gate = Union[SingleGate, CZGate]


@dataclass(frozen=True)
class Circuit:
    modes: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))

    def validate(self) -> None:
        """Raise ``DomainError`` (or ``NotSymplecticError``) naming the first bad gate."""
        if not isinstance(self.modes, int) or self.modes < 1:
            raise DomainError(f"circuit needs a positive integer mode count, got {self.modes!r}")
        for i, g in enumerate(self.gates):
            if isinstance(g, SingleGate):
                self._check_mode(i, g.mode)
                try:
                    check_symplectic(g.matrix)
                except NotSymplecticError as exc:
                    raise NotSymplecticError(f"gate {i}: {exc}") from None
                except DomainError as exc:
                    raise DomainError(f"gate {i}: {exc}") from None
            elif isinstance(g, CZGate):
                self._check_mode(i, g.mode_a)
                self._check_mode(i, g.mode_b)
                if g.mode_a == g.mode_b:
                    raise DomainError(f"gate {i}: cz needs two distinct modes")
            else:
                raise DomainError(f"gate {i}: unknown gate {g!r}")

    def _check_mode(self, i: int, mode) -> None:
        if not isinstance(mode, int) or not 0 <= mode < self.modes:
            raise DomainError(f"gate {i}: mode {mode!r} outside 0..{self.modes - 1}")


@dataclass(frozen=True)
class TwoNodeStep:
    mode: int
    theta_plus: float
    theta_minus: float
    rotator_phi: float
    source: int


@dataclass(frozen=True)
class BeamSplitterStep:
    mode_a: int
    mode_b: int
    source: int


PlanStep = Union[TwoNodeStep, BeamSplitterStep]


@dataclass(frozen=True)
class ErrorBudget:
    """Accumulated input-independent error covariance, absolute units."""

    covariance: np.ndarray

    @property
    def variance_vector(self) -> np.ndarray:
        return np.diag(self.covariance).copy()


@dataclass(frozen=True)
class Plan:
    steps: tuple[PlanStep, ...]
    budget: tuple[float, ...] = ()
    sigma2: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "budget", tuple(float(b) for b in self.budget))

    @property
    def modes(self) -> int:
        return len(self.budget) // 2


# --- single-mode lowering -----------------------------------------------------------


def decompose_single_mode_gate(target) -> tuple[float, float, float]:
    """Rotator-scheme phases ``(phi, theta_plus, theta_minus)`` realizing ``target``.

    From the Euler factors ``(alpha, s, beta)``: ``theta_plus = -2 beta``,
    ``theta_minus = 2 arctan(1/s)`` in ``(0, pi/2]``, ``phi = alpha - beta``.
    """
    f = euler_decompose(target)
    return (
        canonical_angle(f.alpha - f.beta),
        canonical_angle(-2.0 * f.beta),
        2.0 * math.atan(1.0 / f.s),
    )


def rotator_matrix(phi: float, theta_plus: float, theta_minus: float) -> np.ndarray:
    return rotator_realization(SchemePhases((phi, theta_plus, theta_minus))).matrix


def normalize_phases(phi: float, theta_plus: float, theta_minus: float) -> tuple[float, float, float]:
    """Canonical phases for the gate that ``(phi, theta_plus, theta_minus)`` realizes.

    Accepts any valid parameter set (e.g. one with a negative squeeze
    tangent) and re-derives the canonical branch; the reconstruction is
    checked against the original gate.
    """
    target = rotator_matrix(phi, theta_plus, theta_minus)
    out = decompose_single_mode_gate(target)
    err = max_abs_diff(rotator_matrix(*out), target)
    if err > MATRIX_TOL * max(1.0, float(np.max(np.abs(target)))):
        raise DomainError(f"phase normalization failed to reconstruct the gate (error {err:.2e})")
    return out


def lower_single(gate: SingleGate, source: int) -> list[PlanStep]:
    phi, tp, tm = decompose_single_mode_gate(gate.matrix)
    return [TwoNodeStep(gate.mode, tp, tm, phi, source)]


_A_PHASES = decompose_single_mode_gate(GATE_A)
_B_PHASES = decompose_single_mode_gate(GATE_B)


def lower_cz(gate: CZGate, source: int = 0) -> list[PlanStep]:
    """Beam splitter, gate A on ``mode_a``, gate B on ``mode_b``, beam splitter."""
    a, b = gate.mode_a, gate.mode_b
    pa, pb = _A_PHASES, _B_PHASES
    return [
        BeamSplitterStep(a, b, source),
        TwoNodeStep(a, pa[1], pa[2], pa[0], source),
        TwoNodeStep(b, pb[1], pb[2], pb[0], source),
        BeamSplitterStep(a, b, source),
    ]


# --- plan evaluation ------------------------------------------------------------------


def _embed(block: np.ndarray, modes_: list[int], n: int) -> np.ndarray:
    """Embed a ``(x.., y..)``-ordered block acting on ``modes_`` into ``n`` modes."""
    idx = list(modes_) + [n + m for m in modes_]
    out = np.eye(2 * n)
    out[np.ix_(idx, idx)] = block
    return out


def step_realization(step: PlanStep, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(U, E)`` of one step on ``n`` modes; ``E`` has one column per ancilla."""
    if isinstance(step, BeamSplitterStep):
        return _embed(BEAM_SPLITTER, [step.mode_a, step.mode_b], n), np.zeros((2 * n, 0))
    u = rotator_matrix(step.rotator_phi, step.theta_plus, step.theta_minus)
    e = np.zeros((2 * n, 2))
    e[[step.mode, n + step.mode], :] = SQRT2 * rotation(step.rotator_phi)
    return _embed(u, [step.mode], n), e


def gate_matrix(gate: Gate, n: int) -> np.ndarray:
    if isinstance(gate, SingleGate):
        return _embed(np.asarray(gate.matrix), [gate.mode], n)
    cz = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0], [0, 1.0, 1.0, 0], [1.0, 0, 0, 1.0]])
    return _embed(cz, [gate.mode_a, gate.mode_b], n)


def circuit_matrix(c: Circuit) -> np.ndarray:
    """Total symplectic of the circuit; gates listed first act first."""
    out = np.eye(2 * c.modes)
    for g in c.gates:
        out = gate_matrix(g, c.modes) @ out
    return out


def plan_matrix(steps, n: int) -> np.ndarray:
    out = np.eye(2 * n)
    for s in steps:
        out = step_realization(s, n)[0] @ out
    return out


def plan_error_map(steps, n: int) -> np.ndarray:
    """All step errors pushed through the remaining steps, side by side."""
    e_total = np.zeros((2 * n, 0))
    for s in steps:
        u, e = step_realization(s, n)
        e_total = np.hstack([u @ e_total, e])
    return e_total


def propagate_budget(steps, n: int, sigma2: float) -> ErrorBudget:
    cov = np.zeros((2 * n, 2 * n))
    for s in steps:
        u, e = step_realization(s, n)
        cov = propagate(cov, u, e, sigma2)
    return ErrorBudget(cov)


def compile_circuit(c: Circuit, sigma2: float = 0.05) -> tuple[Plan, ErrorBudget]:
    """Lower every gate in order and propagate the error budget exactly."""
    check_sigma2(sigma2)
    c.validate()
    steps: list[PlanStep] = []
    for i, g in enumerate(c.gates):
        steps.extend(lower_single(g, i) if isinstance(g, SingleGate) else lower_cz(g, i))
    budget = propagate_budget(steps, c.modes, sigma2)
    plan = Plan(tuple(steps), tuple(budget.variance_vector), sigma2)
    return plan, budget


def budget_norm(b: ErrorBudget) -> float:
    v = b.variance_vector
    return float(np.max(np.abs(v))) if v.size else 0.0


def check_plan_phases(plan: Plan) -> None:
    for i, s in enumerate(plan.steps):
        if isinstance(s, TwoNodeStep):
            try:
                check_finite(s.theta_plus, s.theta_minus, s.rotator_phi)
                rotator_matrix(s.rotator_phi, s.theta_plus, s.theta_minus)
            except DomainError as exc:
                raise DomainError(f"step {i}: {exc}") from None
