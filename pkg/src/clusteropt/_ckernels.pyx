# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled scan kernels over the (theta3, theta4) grid.

Inputs are per-axis tables built once by ``kernels.grid_tables``: ``cot``
holds cot(theta_i), ``csc2`` holds 1/sin^2(theta_i) and ``ok`` flags cells
outside the pole margins. The per-cell arithmetic is written in the same
order as ``_pykernels`` so both backends produce identical bits.
"""
import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport INFINITY, NAN

cnp.import_array()


cdef inline double _norm(double c3, double c4, double csc2_4) noexcept nogil:
    cdef double u = c3 * c4
    cdef double x = 2.0 * u * (1.0 + u) + 3.0 * csc2_4
    cdef double y = 3.0 + 2.0 * c3 * c3
    return x if x > y else y


def norm_grid(const double[::1] cot, const double[::1] csc2, const unsigned char[::1] ok,
              bint transpose=False, int threads=1):
    """Four-node L-inf norm on the grid, rows indexed by the first axis; NaN where excluded."""
    cdef Py_ssize_t n = cot.shape[0], i, j
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] view = out
    for i in prange(n, nogil=True, num_threads=threads, schedule="static"):
        for j in range(n):
            if not (ok[i] and ok[j]):
                view[i, j] = NAN
            elif transpose:
                view[i, j] = _norm(cot[j], cot[i], csc2[i])
            else:
                view[i, j] = _norm(cot[i], cot[j], csc2[j])
    return out


def count_regions(const double[::1] cot, const double[::1] csc2, const unsigned char[::1] ok,
                  double level, bint transpose=False, int threads=1):
    """Return ``(below, above, ties, excluded)`` counts of the norm against ``level``."""
    cdef Py_ssize_t n = cot.shape[0], i, j
    cdef long long below = 0, above = 0, ties = 0, excluded = 0
    cdef double v
    for i in prange(n, nogil=True, num_threads=threads, schedule="static"):
        for j in range(n):
            if not (ok[i] and ok[j]):
                excluded += 1
            else:
                if transpose:
                    v = _norm(cot[j], cot[i], csc2[i])
                else:
                    v = _norm(cot[i], cot[j], csc2[j])
                if v < level:
                    below += 1
                elif v > level:
                    above += 1
                else:
                    ties += 1
    return int(below), int(above), int(ties), int(excluded)


def grid_min(const double[::1] cot, const double[::1] csc2, const unsigned char[::1] ok,
             int component):
    """Minimum of component 0 (x) or 1 (y) over kept cells; first (i, j) wins ties."""
    cdef Py_ssize_t n = cot.shape[0], i, j, bi = -1, bj = -1
    cdef double u, v, best = INFINITY
    with nogil:
        for i in range(n):
            if not ok[i]:
                continue
            for j in range(n):
                if not ok[j]:
                    continue
                if component == 0:
                    u = cot[i] * cot[j]
                    v = 2.0 * u * (1.0 + u) + 3.0 * csc2[j]
                else:
                    v = 3.0 + 2.0 * cot[i] * cot[i]
                if v < best:
                    best = v
                    bi = i
                    bj = j
    return best, bi, bj
