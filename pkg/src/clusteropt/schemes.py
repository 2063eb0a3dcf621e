"""Every computation scheme as an exact (transformation matrix, error map) pair.

A realization maps input quadratures ``q`` to ``U q + E y`` where ``y`` are
the squeezed ancilla quadratures, independent with common variance
``sigma2``. Output ordering is ``(x1..xn, y1..yn)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .symplectic import (
    EPS_PHASE,
    _frozen,
    canonical_angle,
    check_finite,
    compose,
    direct_sum_modes,
    measurement_gate,
    rotation,
    safe_cot,
    safe_tan,
)

SQRT2 = math.sqrt(2.0)
D1 = math.sqrt(5.0) + 3.0
D2 = math.sqrt(5.0 * (5.0 + 2.0 * math.sqrt(5.0)))

U_CZ = _frozen(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 1.0, 1.0, 0.0],
        [1.0, 0.0, 0.0, 1.0],
    ]
)

# Symmetric 50:50 mixer, identical on the x and y blocks; it is its own inverse.
_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / SQRT2
BEAM_SPLITTER = _frozen(np.kron(np.eye(2), _H))

GATE_A = _frozen([[1.0, 0.0], [1.0, 1.0]])
GATE_B = _frozen([[1.0, 0.0], [-1.0, 1.0]])

# Fixed phases of the rotator gates feeding the beam-splitter CZ.
GATE_A_PHASES = (math.pi / 2, math.atan(2.0), math.atan(2.0))
GATE_B_PHASES = (math.pi / 2, -math.atan(2.0), -math.atan(2.0))

# Two-node stretch diag(1/sqrt2, sqrt2) at theta_plus = 0.
STRETCH_THETA_MINUS = 2.0 * math.atan(SQRT2)

CZ_FOUR_NODE_VARIANCE = (2.0, 2.0, 3.0, 3.0)


class SchemeId(enum.Enum):
    FourNode1 = "FourNode1"
    FourNode2 = "FourNode2"
    FourNode3 = "FourNode3"
    FourNode4 = "FourNode4"
    FourNode5 = "FourNode5"
    TwoNode = "TwoNode"
    PairTwoNodeCase1 = "PairTwoNodeCase1"
    PairTwoNodeCase2 = "PairTwoNodeCase2"
    TwoNodeRotator = "TwoNodeRotator"
    CzFourNode = "CzFourNode"
    CzTwoNodeStretch = "CzTwoNodeStretch"
    CzBeamSplitter = "CzBeamSplitter"

    @property
    def arity(self) -> int:
        return _ARITY[self]

    @property
    def ancillas(self) -> int:
        return _ANCILLAS[self]

    @property
    def is_four_node(self) -> bool:
        return self.value.startswith("FourNode")

    @property
    def config(self) -> int:
        """Configuration number 1..5 of a four-node scheme."""
        if not self.is_four_node:
            raise ValueError(f"{self.value} is not a four-node scheme")
        return int(self.value[-1])


FOUR_NODE = tuple(SchemeId(f"FourNode{j}") for j in range(1, 6))
CZ_SCHEMES = (SchemeId.CzFourNode, SchemeId.CzTwoNodeStretch, SchemeId.CzBeamSplitter)

_ARITY = {s: 4 for s in FOUR_NODE}
_ARITY.update(
    {
        SchemeId.TwoNode: 2,
        SchemeId.PairTwoNodeCase1: 4,
        SchemeId.PairTwoNodeCase2: 4,
        SchemeId.TwoNodeRotator: 3,
        SchemeId.CzFourNode: 0,
        SchemeId.CzTwoNodeStretch: 0,
        SchemeId.CzBeamSplitter: 0,
    }
)
_ANCILLAS = {s: 4 for s in FOUR_NODE}
_ANCILLAS.update(
    {
        SchemeId.TwoNode: 2,
        SchemeId.PairTwoNodeCase1: 4,
        SchemeId.PairTwoNodeCase2: 4,
        SchemeId.TwoNodeRotator: 2,
        SchemeId.CzFourNode: 4,
        SchemeId.CzTwoNodeStretch: 6,
        SchemeId.CzBeamSplitter: 4,
    }
)


@dataclass(frozen=True)
class SchemePhases:
    """Local-oscillator phases of a scheme, in radians.

    Layout by scheme:

    * four-node: ``(theta1, theta2, theta3, theta4)``
    * ``TwoNode``: ``(theta_plus, theta_minus)``
    * pair schemes: ``(theta_plus1, theta_minus1, theta_plus2, theta_minus2)``
    * ``TwoNodeRotator``: ``(phi, theta_plus, theta_minus)``
    * CZ schemes: ``()``
    """

    theta: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(float(t) for t in self.theta))
        check_finite(*self.theta)

    @classmethod
    def from_sums(cls, theta_plus: float, theta_minus: float, theta3: float, theta4: float):
        """Four-node phases from ``theta+- = theta2 +- theta1`` and the last two detectors."""
        return cls(
            (0.5 * (theta_plus - theta_minus), 0.5 * (theta_plus + theta_minus), theta3, theta4)
        )

    @property
    def theta_plus(self) -> float:
        """``theta2 + theta1`` of a four-node phase set."""
        return self.theta[1] + self.theta[0]

    @property
    def theta_minus(self) -> float:
        return self.theta[1] - self.theta[0]

    def check_arity(self, scheme: SchemeId) -> None:
        if len(self.theta) != scheme.arity:
            raise DomainError(
                f"{scheme.value} takes {scheme.arity} phases, got {len(self.theta)}"
            )


@dataclass(frozen=True)
class ErrorMap:
    """Linear map from squeezed ancilla quadratures to additive output error.

    ``surrogate`` marks maps that only reproduce a known variance vector
    rather than the physical ancilla wiring.
    """

    matrix: np.ndarray
    surrogate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    @property
    def outputs(self) -> int:
        return self.matrix.shape[0]

    @property
    def ancillas(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class SchemeRealization:
    scheme: SchemeId
    matrix: np.ndarray
    error_map: ErrorMap
    phases: SchemePhases = field(default_factory=SchemePhases)

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    def variance(self, sigma2: float = 1.0) -> np.ndarray:
        return variance_from_error_map(self.error_map, sigma2)


def variance_from_error_map(e: ErrorMap | np.ndarray, sigma2: float = 1.0) -> np.ndarray:
    """Per-output error variance ``sigma2 * diag(E E^T)`` for independent ancillas."""
    m = e.matrix if isinstance(e, ErrorMap) else np.asarray(e, dtype=float)
    return _frozen(sigma2 * np.sum(m * m, axis=1))


def two_node_matrix(theta_plus: float, theta_minus: float) -> np.ndarray:
    """``R(-theta_plus/2) M(theta_minus) R(-theta_plus/2)``."""
    half = rotation(-0.5 * theta_plus)
    return compose([half, measurement_gate(theta_minus), half])


# --- four-node clusters -------------------------------------------------------

_D_MATRICES = {
    1: [[D1 - 1, -1, 0, 0], [-1, D1, 0, 0], [0, 0, D1, -1], [0, 0, -1, D1 - 1]],
    2: [[D1, -1, 0, 0], [-1, D1 - 1, 0, 0], [0, 0, D1 - 1, -1], [0, 0, -1, D1]],
    3: [[D1, 0, 0, -1], [0, D1, -1, 0], [0, -1, D1 - 1, 0], [-1, 0, 0, D1 - 1]],
    4: [[D1 - 1, 0, 0, -1], [0, D1 - 1, -1, 0], [0, -1, D1, 0], [-1, 0, 0, D1]],
    5: [[D1, 0, 0, -2], [0, D1, -2, 0], [0, -2, D1, 0], [-2, 0, 0, D1]],
}


def _four_node_parts(j: int, th3: float, th4: float):
    """Outer prefactor, phase-dependent error rows and scalar for configuration ``j``."""
    if j == 1:
        c4, t3 = safe_cot(th4), safe_tan(th3)
        outer = compose([[[-c4 * t3 - 1, c4], [t3, -1]], rotation(math.pi / 2)])
        rows = [[3 * c4, c4, -1 - 2 * c4 * t3, -3 - c4 * t3], [-2, 1, 2 * t3, t3]]
        scale = 1.0 / D2
    elif j == 2:
        c3, t4 = safe_cot(th3), safe_tan(th4)
        outer = compose([rotation(math.pi / 2), [[-c3 * t4 - 1, -t4], [-c3, -1]]])
        rows = [[2 * c3, c3, -3, -1], [-2 * c3 * t4 - 1, 2 - c3 * t4, 2 * t4, -t4]]
        scale = 1.0 / D2
    elif j == 3:
        c3, c4 = safe_cot(th3), safe_cot(th4)
        outer = compose([[[c4 * c3 - 1, c4], [-c3, -1]], rotation(math.pi)])
        rows = [[1 - 2 * c3 * c4, c3, 3 * c3, -2 - c3 * c4], [2 * c4, 1, -2, c4]]
        scale = 1.0 / D2
    elif j == 4:
        t3, t4 = safe_tan(th3), safe_tan(th4)
        outer = compose(
            [
                rotation(-math.pi / 2),
                [[t3 * t4 - 1, -t4], [t3, -1]],
                rotation(math.pi / 2),
            ]
        )
        rows = [[-3, t3, 2 * t3, -1], [2 * t4, 3 - t3 * t4, 1 - 2 * t3 * t4, -t4]]
        scale = 1.0 / D2
    elif j == 5:
        t3, t4 = safe_tan(th3), safe_tan(th4)
        outer = _frozen([[t3 * t4 - 1, -t4], [t3, -1]])
        rows = [[t3 * t4 - 3, 2 * t4, 3 * t4, -t3 * t4 - 2], [t3, 3, 2, -t3]]
        scale = 1.0 / (D1 + 2)
    else:
        raise ValueError(f"four-node configuration must be 1..5, got {j}")
    return outer, np.array(rows, dtype=float), scale


def four_node_realization(scheme: SchemeId, phases: SchemePhases) -> SchemeRealization:
    """Four-node cluster configuration ``j``: ``U_j`` and the error map ``e_j``.

    ``phases`` holds ``(theta1, theta2, theta3, theta4)``; the inner two-node
    factor uses ``theta+- = theta2 +- theta1``.
    """
    if not scheme.is_four_node:
        raise ValueError(f"{scheme.value} is not a four-node scheme")
    phases.check_arity(scheme)
    j = scheme.config
    _, _, th3, th4 = phases.theta
    outer, rows, scale = _four_node_parts(j, th3, th4)
    inner = two_node_matrix(phases.theta_plus, phases.theta_minus)
    e = scale * rows @ np.array(_D_MATRICES[j], dtype=float)
    return SchemeRealization(scheme, outer @ inner, ErrorMap(e), phases)


def four_node_variance_closed_form(theta3: float, theta4: float) -> np.ndarray:
    """Four-node error variance in units of ``sigma2``, configuration-3 phases.

    ``x = 2 c3 c4 (1 + c3 c4) + 3 csc^2(theta4)``, ``y = 3 + 2 c3^2`` with
    ``c = cot(theta)``.
    """
    c3, c4 = safe_cot(theta3), safe_cot(theta4)
    s4 = math.sin(theta4)
    u = c3 * c4
    return _frozen([2 * u * (1 + u) + 3 / (s4 * s4), 3 + 2 * c3 * c3])


# --- two-node clusters ----------------------------------------------------------


def two_node_realization(phases: SchemePhases) -> SchemeRealization:
    """Single two-node cluster: ``R(-tp/2) M(tm) R(-tp/2)``, error ``sqrt2 * I``.

    Not universal, since both rotation angles are equal.
    """
    phases.check_arity(SchemeId.TwoNode)
    tp, tm = phases.theta
    return SchemeRealization(
        SchemeId.TwoNode, two_node_matrix(tp, tm), ErrorMap(SQRT2 * np.eye(2)), phases
    )


def pair_two_node_realization(scheme: SchemeId, phases: SchemePhases) -> SchemeRealization:
    """Two two-node clusters in series, one of them pinned to ``theta_minus = pi/2``.

    Case 1 pins the first cluster, case 2 the second. The general series
    form is ``K2 K1`` with error ``[sqrt2 K2 | sqrt2 I]`` over ancillas
    ``(y1, y2 | y3, y4)``.
    """
    if scheme not in (SchemeId.PairTwoNodeCase1, SchemeId.PairTwoNodeCase2):
        raise ValueError(f"{scheme.value} is not a pair scheme")
    phases.check_arity(scheme)
    tp1, tm1, tp2, tm2 = phases.theta
    pinned = tm1 if scheme is SchemeId.PairTwoNodeCase1 else tm2
    if abs(canonical_angle(pinned) - math.pi / 2) > EPS_PHASE:
        raise DomainError(f"{scheme.value} requires its pinned theta_minus = pi/2, got {pinned}")
    k1 = two_node_matrix(tp1, tm1)
    k2 = two_node_matrix(tp2, tm2)
    e = np.hstack([SQRT2 * k2, SQRT2 * np.eye(2)])
    return SchemeRealization(scheme, k2 @ k1, ErrorMap(e), phases)


def pair_case1_variance(theta_plus2: float, theta_minus2: float) -> np.ndarray:
    """Closed form ``(4 / sin^2 tm)(1 +- cos tp cos tm)`` in units of ``sigma2``."""
    s = math.sin(theta_minus2)
    if abs(s) <= EPS_PHASE:
        raise DomainError(f"degenerate squeeze phase: theta_minus={theta_minus2}")
    k = math.cos(theta_plus2) * math.cos(theta_minus2)
    return _frozen([4 * (1 + k) / (s * s), 4 * (1 - k) / (s * s)])


def rotator_realization(phases: SchemePhases) -> SchemeRealization:
    """Two-node cluster followed by a noiseless quadrature rotation ``R(phi)``."""
    phases.check_arity(SchemeId.TwoNodeRotator)
    phi, tp, tm = phases.theta
    m = compose([rotation(phi - 0.5 * tp), measurement_gate(tm), rotation(-0.5 * tp)])
    return SchemeRealization(
        SchemeId.TwoNodeRotator, m, ErrorMap(SQRT2 * rotation(phi)), phases
    )


# --- CZ schemes -------------------------------------------------------------------


def cz_four_node() -> SchemeRealization:
    """CZ on a four-node linear cluster.

    The nullifier-to-ancilla wiring is not modelled, so the error map is the
    diagonal surrogate ``diag(sqrt2, sqrt2, sqrt3, sqrt3)`` with the correct
    variance ``(2, 2, 3, 3)``.
    """
    e = np.diag(np.sqrt(CZ_FOUR_NODE_VARIANCE))
    return SchemeRealization(SchemeId.CzFourNode, U_CZ, ErrorMap(e, surrogate=True))


def cz_stretch_stages() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """``(stage1, error1, stage2, error2)`` of the two-node-stretch CZ.

    Error maps are over ancillas ``(y1..y6)``.
    """
    stage1 = np.diag([SQRT2, SQRT2, 1 / SQRT2, 1 / SQRT2]) @ U_CZ
    e1 = np.zeros((4, 6))
    e1[2, 0] = e1[3, 1] = -1.0
    stretch = two_node_matrix(0.0, STRETCH_THETA_MINUS)
    stage2 = direct_sum_modes(stretch, stretch)
    e2 = np.zeros((4, 6))
    e2[:, 2:] = SQRT2 * np.eye(4)
    return _frozen(stage1), _frozen(e1), stage2, _frozen(e2)


def cz_two_node_stretch() -> SchemeRealization:
    """CZ from a two-node stage that also squeezes, undone by two two-node stretches."""
    stage1, e1, stage2, e2 = cz_stretch_stages()
    return SchemeRealization(
        SchemeId.CzTwoNodeStretch, stage2 @ stage1, ErrorMap(stage2 @ e1 + e2)
    )


def cz_beam_splitter() -> SchemeRealization:
    """CZ as beam splitter, rotator gates ``A`` and ``B``, beam splitter.

    Gate ``A`` on the first mixed mode uses ancillas ``(y1, y2)``; gate ``B``
    on the second uses ``(y3, y4)``.
    """
    ra = rotator_realization(SchemePhases(GATE_A_PHASES))
    rb = rotator_realization(SchemePhases(GATE_B_PHASES))
    middle = direct_sum_modes(ra.matrix, rb.matrix)
    ea, eb = ra.error_map.matrix, rb.error_map.matrix
    e_mid = np.zeros((4, 4))
    e_mid[np.ix_([0, 2], [0, 1])] = ea
    e_mid[np.ix_([1, 3], [2, 3])] = eb
    m = compose([BEAM_SPLITTER, middle, BEAM_SPLITTER])
    return SchemeRealization(SchemeId.CzBeamSplitter, m, ErrorMap(BEAM_SPLITTER @ e_mid))


def realize(scheme: SchemeId | str, phases: SchemePhases | Sequence[float] = ()) -> SchemeRealization:
    """Dispatch to the realization of ``scheme``."""
    scheme = SchemeId(scheme)
    if not isinstance(phases, SchemePhases):
        phases = SchemePhases(tuple(phases))
    phases.check_arity(scheme)
    if scheme.is_four_node:
        return four_node_realization(scheme, phases)
    if scheme is SchemeId.TwoNode:
        return two_node_realization(phases)
    if scheme in (SchemeId.PairTwoNodeCase1, SchemeId.PairTwoNodeCase2):
        return pair_two_node_realization(scheme, phases)
    if scheme is SchemeId.TwoNodeRotator:
        return rotator_realization(phases)
    if scheme is SchemeId.CzFourNode:
        return cz_four_node()
    if scheme is SchemeId.CzTwoNodeStretch:
        return cz_two_node_stretch()
    return cz_beam_splitter()
