"""JSON formats for circuits and plans, and the scan CSV."""
from __future__ import annotations

import json
from typing import IO

from .analysis import ScanResult
from .compiler import BeamSplitterStep, Circuit, CZGate, Plan, SingleGate, TwoNodeStep
from .errors import DomainError

CSV_HEADER = "theta3,theta4,norm_four_node,norm_pair"


class SchemaError(DomainError):
    """A JSON document parsed but does not follow the schema."""


def _int(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"{what} must be an integer, got {v!r}")
    return v


def _num(v, what: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{what} must be a number, got {v!r}")
    return float(v)


def _pair(v, what: str) -> tuple[int, int]:
    if not isinstance(v, list) or len(v) != 2:
        raise SchemaError(f"{what} must be a list of two mode indices, got {v!r}")
    return _int(v[0], what), _int(v[1], what)


def circuit_to_dict(c: Circuit) -> dict:
    gates = []
    for g in c.gates:
        if isinstance(g, SingleGate):
            gates.append({"type": "single", "mode": g.mode, "matrix": [list(r) for r in g.matrix]})
        else:
            gates.append({"type": "cz", "modes": [g.mode_a, g.mode_b]})
    return {"modes": c.modes, "gates": gates}


def circuit_from_dict(d) -> Circuit:
    if not isinstance(d, dict) or "modes" not in d or "gates" not in d:
        raise SchemaError('circuit must be an object with "modes" and "gates"')
    gates = []
    if not isinstance(d["gates"], list):
        raise SchemaError('"gates" must be a list')
    for i, g in enumerate(d["gates"]):
        kind = g.get("type") if isinstance(g, dict) else None
        if kind == "single":
            m = g.get("matrix")
            if not (isinstance(m, list) and len(m) == 2 and all(isinstance(r, list) and len(r) == 2 for r in m)):
                raise SchemaError(f"gate {i}: matrix must be [[a, b], [c, d]]")
            gates.append(
                SingleGate(
                    _int(g.get("mode"), f"gate {i} mode"),
                    tuple(tuple(_num(x, f"gate {i} matrix entry") for x in r) for r in m),
                )
            )
        elif kind == "cz":
            gates.append(CZGate(*_pair(g.get("modes"), f"gate {i} modes")))
        else:
            raise SchemaError(f"gate {i}: type must be 'single' or 'cz', got {kind!r}")
    return Circuit(_int(d["modes"], "modes"), tuple(gates))


def plan_to_dict(p: Plan) -> dict:
    steps = []
    for s in p.steps:
        if isinstance(s, TwoNodeStep):
            steps.append(
                {
                    "type": "two_node_gate",
                    "mode": s.mode,
                    "theta_plus": s.theta_plus,
                    "theta_minus": s.theta_minus,
                    "rotator_phi": s.rotator_phi,
                    "source": s.source,
                }
            )
        else:
            steps.append({"type": "beam_splitter", "modes": [s.mode_a, s.mode_b], "source": s.source})
    return {"steps": steps, "budget": list(p.budget), "sigma2": p.sigma2}


def plan_from_dict(d) -> Plan:
    if not isinstance(d, dict) or not isinstance(d.get("steps"), list):
        raise SchemaError('plan must be an object with a "steps" list')
    steps = []
    for i, s in enumerate(d["steps"]):
        kind = s.get("type") if isinstance(s, dict) else None
        if kind == "two_node_gate":
            steps.append(
                TwoNodeStep(
                    _int(s.get("mode"), f"step {i} mode"),
                    _num(s.get("theta_plus"), f"step {i} theta_plus"),
                    _num(s.get("theta_minus"), f"step {i} theta_minus"),
                    _num(s.get("rotator_phi"), f"step {i} rotator_phi"),
                    _int(s.get("source"), f"step {i} source"),
                )
            )
        elif kind == "beam_splitter":
            a, b = _pair(s.get("modes"), f"step {i} modes")
            steps.append(BeamSplitterStep(a, b, _int(s.get("source"), f"step {i} source")))
        else:
            raise SchemaError(f"step {i}: type must be 'two_node_gate' or 'beam_splitter'")
    budget = d.get("budget", [])
    if not isinstance(budget, list):
        raise SchemaError('"budget" must be a list')
    return Plan(
        tuple(steps),
        tuple(_num(b, "budget entry") for b in budget),
        _num(d.get("sigma2", 0.05), "sigma2"),
    )


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_scan_csv(result: ScanResult, fh: IO[str]) -> int:
    """Write kept cells in theta3-major order, fixed 9-decimal floats. Returns row count."""
    fh.write(CSV_HEADER + "\n")
    count = 0
    for r in result.rows():
        fh.write(f"{r.theta3:.9f},{r.theta4:.9f},{r.norm_four_node:.9f},{r.norm_pair:.9f}\n")
        count += 1
    return count
