import io
import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clusteropt.analysis import ScanGrid, scan_surface
from clusteropt.compiler import BeamSplitterStep, Circuit, CZGate, Plan, SingleGate, TwoNodeStep, compile_circuit
from clusteropt.serialize import (
    CSV_HEADER,
    SchemaError,
    circuit_from_dict,
    circuit_to_dict,
    dumps,
    plan_from_dict,
    plan_to_dict,
    write_scan_csv,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(
    st.lists(
        st.one_of(
            st.builds(lambda m, a, b, c, d: SingleGate(m, [[a, b], [c, d]]), st.integers(0, 5), finite, finite, finite, finite),
            st.builds(CZGate, st.integers(0, 5), st.integers(0, 5)),
        ),
        max_size=8,
    )
)
def test_circuit_round_trip(gates):
    c = Circuit(6, gates)
    assert circuit_from_dict(json.loads(dumps(circuit_to_dict(c)))) == c


def test_plan_round_trip():
    plan, _ = compile_circuit(Circuit(2, [SingleGate(0, [[1, 0], [1, 1]]), CZGate(1, 0)]))
    back = plan_from_dict(json.loads(dumps(plan_to_dict(plan))))
    assert back == plan
    assert isinstance(back.steps[1], BeamSplitterStep)


def test_plan_schema_keys():
    d = plan_to_dict(Plan((TwoNodeStep(0, 0.1, 0.2, 0.3, 0), BeamSplitterStep(0, 1, 1)), (1.0, 2.0, 3.0, 4.0), 0.1))
    assert d == {
        "steps": [
            {"type": "two_node_gate", "mode": 0, "theta_plus": 0.1, "theta_minus": 0.2, "rotator_phi": 0.3, "source": 0},
            {"type": "beam_splitter", "modes": [0, 1], "source": 1},
        ],
        "budget": [1.0, 2.0, 3.0, 4.0],
        "sigma2": 0.1,
    }


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"modes": 1},
        {"modes": 1.5, "gates": []},
        {"modes": 1, "gates": {}},
        {"modes": 1, "gates": [{"type": "swap"}]},
        {"modes": 1, "gates": [{"type": "single", "mode": 0, "matrix": [[1, 0]]}]},
        {"modes": 1, "gates": [{"type": "single", "mode": 0, "matrix": [[1, 0], [0, "x"]]}]},
        {"modes": 2, "gates": [{"type": "cz", "modes": [0]}]},
        {"modes": 2, "gates": [{"type": "cz", "modes": [True, 1]}]},
    ],
)
def test_bad_circuits(doc):
    with pytest.raises(SchemaError):
        circuit_from_dict(doc)


def test_bad_plans():
    with pytest.raises(SchemaError):
        plan_from_dict({"steps": [{"type": "teleport"}]})
    with pytest.raises(SchemaError):
        plan_from_dict({"steps": [], "budget": 3})


def test_scan_csv():
    buf = io.StringIO()
    n = write_scan_csv(scan_surface(ScanGrid(3)), buf)
    assert n == 1
    assert buf.getvalue() == CSV_HEADER + "\n1.570796327,1.570796327,3.000000000,4.000000000\n"


def test_scan_csv_row_count():
    buf = io.StringIO()
    assert write_scan_csv(scan_surface(ScanGrid(21, 0.01)), buf) == 19 * 19
    lines = buf.getvalue().splitlines()
    assert len(lines) == 19 * 19 + 1
    assert all(len(line.split(",")) == 4 for line in lines)
    assert float(lines[1].split(",")[0]) == pytest.approx(math.pi / 20, abs=1e-9)
