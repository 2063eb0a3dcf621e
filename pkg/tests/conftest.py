import math

import numpy as np
import pytest

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def random_symplectic(rng, max_log10_s=6.0):
    from clusteropt.symplectic import rotation

    s = 10 ** rng.uniform(0, max_log10_s)
    a, b = rng.uniform(-math.pi, math.pi, 2)
    return rotation(a) @ np.diag([s, 1 / s]) @ rotation(b)
