"""Pure-numpy scan kernels; the fallback when the compiled extension is absent.

Takes the same per-axis tables as ``_ckernels`` and evaluates the same
arithmetic in the same order, so results agree bit for bit.
"""
from __future__ import annotations

import math

import numpy as np

_BLOCK = 256


def _norm(c3, c4, csc2_4):
    u = c3 * c4
    x = 2.0 * u * (1.0 + u) + 3.0 * csc2_4
    y = 3.0 + 2.0 * c3 * c3
    return np.maximum(x, y)


def _block(cot, csc2, lo, hi, cols, transpose):
    r = slice(lo, hi)
    if transpose:
        return _norm(cot[cols][None, :], cot[r][:, None], csc2[r][:, None])
    return _norm(cot[r][:, None], cot[cols][None, :], csc2[cols][None, :])


def norm_grid(cot, csc2, ok, transpose=False, threads=1):
    n = cot.shape[0]
    ok = np.asarray(ok, dtype=bool)
    out = np.empty((n, n))
    cols = np.arange(n)
    with np.errstate(invalid="ignore", over="ignore"):
        for lo in range(0, n, _BLOCK):
            out[lo : lo + _BLOCK] = _block(cot, csc2, lo, min(lo + _BLOCK, n), cols, transpose)
    out[~ok, :] = np.nan
    out[:, ~ok] = np.nan
    return out


def count_regions(cot, csc2, ok, level, transpose=False, threads=1):
    ok = np.asarray(ok, dtype=bool)
    keep = np.flatnonzero(ok)
    c, s = cot[keep], csc2[keep]
    below = above = 0
    with np.errstate(over="ignore"):
        for lo in range(0, keep.size, _BLOCK):
            v = _block(c, s, lo, min(lo + _BLOCK, keep.size), slice(None), transpose)
            below += int(np.count_nonzero(v < level))
            above += int(np.count_nonzero(v > level))
    kept = keep.size * keep.size
    return below, above, kept - below - above, cot.shape[0] ** 2 - kept


def grid_min(cot, csc2, ok, component):
    keep = np.flatnonzero(np.asarray(ok, dtype=bool))
    if keep.size == 0:
        return math.inf, -1, -1
    c3 = cot[keep][:, None]
    if component == 0:
        u = c3 * cot[keep][None, :]
        v = 2.0 * u * (1.0 + u) + 3.0 * csc2[keep][None, :]
    else:
        v = np.broadcast_to(3.0 + 2.0 * c3 * c3, (keep.size, keep.size))
    k = int(np.argmin(v))
    i, j = divmod(k, keep.size)
    return float(v[i, j]), int(keep[i]), int(keep[j])
