"""Backend selection for the grid-scan kernels.

The compiled Cython extension is used when it imports; otherwise the numpy
implementation. Both take the tables from :func:`grid_tables` and expose
``norm_grid``, ``count_regions`` and ``grid_min`` with identical signatures
and bit-identical results.
"""
from __future__ import annotations

import math
from types import ModuleType

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # pragma: no cover - depends on build
    _ckernels = None

BACKENDS: dict[str, ModuleType] = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["compiled"] = _ckernels

_active = "compiled" if _ckernels is not None else "python"


def backend_name() -> str:
    return _active


def set_backend(name: str) -> None:
    """Force ``"python"`` or ``"compiled"``."""
    global _active
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    _active = name


def get(name: str | None = None) -> ModuleType:
    return BACKENDS[name or _active]


def grid_thetas(n: int) -> np.ndarray:
    """``n`` evenly spaced angles on ``[0, pi]``, endpoints included."""
    return math.pi * np.arange(n, dtype=float) / (n - 1)


def grid_tables(n: int, margin: float):
    """Per-axis ``(theta, cot, csc2, ok)`` for an ``n``-point grid.

    Cells closer than ``margin`` to 0 or pi are flagged not-ok; their table
    entries are set to 0 so no infinities leak into the kernels.
    """
    t = grid_thetas(n)
    ok = (t >= margin) & ((math.pi - t) >= margin)
    s = np.where(ok, np.sin(t), 1.0)
    cot = np.where(ok, np.cos(t) / s, 0.0)
    csc2 = np.where(ok, 1.0 / (s * s), 0.0)
    return t, np.ascontiguousarray(cot), np.ascontiguousarray(csc2), ok.astype(np.uint8)
