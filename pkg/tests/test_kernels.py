import subprocess
import sys

import numpy as np
import pytest

from clusteropt import kernels
from clusteropt.analysis import ScanGrid, area_counts, area_ratio, minimize_variance_component, scan_surface

compiled = pytest.mark.skipif("compiled" not in kernels.BACKENDS, reason="extension not built")


@compiled
@pytest.mark.parametrize("transpose", [False, True])
def test_backends_bit_identical(transpose):
    g = ScanGrid(257, 1e-3)
    a = scan_surface(g, transpose=transpose, backend="python").norms
    b = scan_surface(g, transpose=transpose, backend="compiled").norms
    assert np.array_equal(a, b, equal_nan=True)
    assert area_counts(g, transpose=transpose, backend="python") == area_counts(
        g, transpose=transpose, backend="compiled"
    )


@compiled
@pytest.mark.parametrize("component", ["x", "y"])
def test_grid_min_identical(component):
    g = ScanGrid(201, 0.05)
    assert minimize_variance_component(component, g, backend="python") == minimize_variance_component(
        component, g, backend="compiled"
    )


@compiled
def test_threads_do_not_change_counts():
    g = ScanGrid(513)
    assert area_counts(g, threads=1) == area_counts(g, threads=3)


def test_set_backend_roundtrip():
    old = kernels.backend_name()
    try:
        kernels.set_backend("python")
        assert kernels.get() is kernels.BACKENDS["python"]
    finally:
        kernels.set_backend(old)
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_grid_tables_mask():
    t, cot, csc2, ok = kernels.grid_tables(5, 1e-6)
    assert list(ok) == [0, 1, 1, 1, 0]
    assert cot[0] == cot[-1] == 0.0 and csc2[0] == 0.0
    assert np.all(np.isfinite(cot)) and np.all(np.isfinite(csc2))
    assert t[2] == np.pi / 2


def test_fallback_when_extension_missing():
    code = (
        "import sys; sys.modules['clusteropt._ckernels'] = None\n"
        "from clusteropt import kernels\n"
        "from clusteropt.analysis import ScanGrid, area_ratio\n"
        "assert kernels.backend_name() == 'python' and 'compiled' not in kernels.BACKENDS\n"
        "print(area_ratio(ScanGrid(501)))\n"
    )
    r = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert float(r.stdout) == pytest.approx(area_ratio(ScanGrid(501)), rel=0)
