"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 usage or parse error,
3 domain or singularity error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager
from typing import Sequence

import numpy as np

from . import kernels
from .analysis import ScanGrid, area_counts, linf_norm, match_phases, scan_surface
from .compiler import budget_norm, compile_circuit
from .errors import DomainError, NotSymplecticError
from .montecarlo import DEFAULT_SIGMA2, SampleConfig, estimate_variance, relative_tolerance
from .schemes import SchemeId, SchemePhases, four_node_realization, realize
from .serialize import SchemaError, circuit_from_dict, dumps, plan_to_dict, write_scan_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_USAGE, message)


def fmt(v: float, digits: int = 12) -> str:
    s = f"{v:.{digits}g}"
    return "0" if s == "-0" else s


def fmt_vec(v, digits: int = 12) -> str:
    return " ".join(fmt(float(x), digits) for x in v)


def _chop(m: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(m))))
    return np.where(np.abs(m) < 1e-12 * scale, 0.0, m)


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc.strerror}") from None
    with fh:
        yield fh


def _phases(scheme: SchemeId, values: Sequence[float]) -> SchemePhases:
    if len(values) != scheme.arity:
        raise CliError(EXIT_USAGE, f"{scheme.value} takes {scheme.arity} phases, got {len(values)}")
    if scheme.is_four_node:
        return SchemePhases.from_sums(*values)
    return SchemePhases(tuple(values))


def _realize(scheme: SchemeId, values):
    phases = _phases(scheme, values)
    try:
        if scheme.is_four_node:
            return four_node_realization(scheme, phases)
        return realize(scheme, phases)
    except DomainError as exc:
        raise CliError(EXIT_DOMAIN, _singular_message(exc)) from None


def _singular_message(exc: Exception) -> str:
    msg = str(exc)
    return msg if msg.startswith("singular phase configuration") else f"singular phase configuration: {msg}"


# --- commands ----------------------------------------------------------------


def cmd_scheme(args) -> int:
    scheme = SchemeId(args.scheme)
    r = _realize(scheme, args.phases)
    v = r.variance(1.0)
    print(f"scheme: {scheme.value}")
    print("matrix:")
    for row in _chop(r.matrix):
        print(fmt_vec(row))
    print(f"variance (units of sigma2): {fmt_vec(v)}")
    print(f"variance (sigma2={fmt(args.sigma2)}): {fmt_vec(v * args.sigma2)}")
    print(f"linf (units of sigma2): {fmt(linf_norm(v))}")
    if r.error_map.surrogate:
        print("note: error map is a diagonal surrogate reproducing the known variance")
    return EXIT_OK


def cmd_match(args) -> int:
    try:
        m = match_phases(args.theta3, args.theta4, args.theta_plus)
        mats = {s.config: four_node_realization(s, p).matrix for s, p in m.all().items()}
    except DomainError as exc:
        raise CliError(EXIT_DOMAIN, _singular_message(exc)) from None
    print("config theta3 theta4 theta_plus theta_minus")
    for j in range(1, 6):
        row = _chop(np.array([m.theta3[j], m.theta4[j], m.theta_plus[j], math.pi / 2]))
        print(f"{j} {fmt_vec(row)}")
    for j in range(1, 6):
        print(f"U{j}: {fmt_vec(_chop(mats[j]).ravel())}")
    return EXIT_OK


def cmd_scan(args) -> int:
    grid = ScanGrid(args.grid, args.margin)
    result = scan_surface(grid, threads=args.threads)
    with _output(args.out) as fh:
        try:
            rows = write_scan_csv(result, fh)
        except OSError as exc:
            raise CliError(EXIT_IO, f"write failed: {exc}") from None
    if args.out not in (None, "-"):
        print(f"wrote {rows} rows ({result.excluded} cells excluded) to {args.out}")
    return EXIT_OK


def cmd_area_ratio(args) -> int:
    if args.grid < 500:
        raise CliError(EXIT_USAGE, f"--grid must be >= 500 for an area estimate, got {args.grid}")
    counts = area_counts(ScanGrid(args.grid, args.margin), transpose=args.transpose,
                         threads=args.threads)
    try:
        ratio = counts.ratio
    except DomainError as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from None
    if args.reverse:
        print(f"S1/S2 = {fmt(1.0 / ratio, 9)}")
    else:
        print(f"S2/S1 = {fmt(ratio, 9)}")
    print(f"S2 (pair better) = {counts.pair_better}")
    print(f"S1 (four-node better) = {counts.four_node_better}")
    print(f"ties = {counts.ties}")
    print(f"excluded = {counts.excluded}")
    return EXIT_OK


def cmd_compile(args) -> int:
    try:
        with open(args.circuit, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {args.circuit}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(
            EXIT_USAGE, f"{args.circuit}:{exc.lineno}:{exc.colno}: JSON parse error: {exc.msg}"
        ) from None
    try:
        circuit = circuit_from_dict(doc)
        circuit.validate()
    except NotSymplecticError as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from None
    except (SchemaError, DomainError) as exc:
        raise CliError(EXIT_USAGE, f"invalid circuit: {exc}") from None
    plan, budget = compile_circuit(circuit, args.sigma2)
    text = dumps(plan_to_dict(plan))
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with _output(args.out) as fh:
            fh.write(text)
    v = budget.variance_vector
    print(f"budget: {fmt_vec(v)}")
    print(f"budget (units of sigma2): {fmt_vec(v / args.sigma2)}")
    print(f"linf: {fmt(budget_norm(budget))}")
    return EXIT_OK


def cmd_validate(args) -> int:
    scheme = SchemeId(args.scheme)
    r = _realize(scheme, args.phases)
    cfg = SampleConfig(args.trials, args.seed, args.sigma2)
    analytic = r.variance(args.sigma2)
    if args.expect is not None:
        if len(args.expect) != analytic.size:
            raise CliError(EXIT_USAGE, f"--expect needs {analytic.size} values")
        analytic = np.asarray(args.expect, dtype=float) * args.sigma2
    empirical = estimate_variance(r.error_map, cfg, threads=args.threads)
    rel = relative_tolerance(cfg.trials)
    ok = bool(np.all(np.abs(empirical - analytic) <= rel * np.abs(analytic)))
    print(f"scheme: {scheme.value}  trials: {cfg.trials}  seed: {cfg.seed}  sigma2: {fmt(cfg.sigma2)}")
    print(f"analytic:  {fmt_vec(analytic, 9)}")
    print(f"empirical: {fmt_vec(empirical, 9)}")
    print(f"tolerance: relative {fmt(rel, 6)}")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


# --- parser ---------------------------------------------------------------------------


def _positive_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _finite(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {s!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {s!r}")
    return v


def _sigma2(s: str) -> float:
    v = _finite(s)
    if not 0.0 < v < 0.25:
        raise argparse.ArgumentTypeError(f"sigma2 must satisfy 0 < sigma2 < 0.25, got {v}")
    return v


def _seed(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {s!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2**64), got {v}")
    return v


def _grid(s: str) -> int:
    v = _positive_int(s)
    if v < 2:
        raise argparse.ArgumentTypeError(f"grid needs at least 2 points, got {v}")
    return v


def _margin(s: str) -> float:
    v = _finite(s)
    if v < 1e-9:
        raise argparse.ArgumentTypeError(f"margin must be >= 1e-9, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--sigma2", type=_sigma2, default=DEFAULT_SIGMA2,
                        help="ancilla squeeze variance, vacuum = 0.25 (default 0.05)")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--grid", type=_grid, default=1001, help="points per axis")
    common.add_argument("--margin", type=_margin, default=1e-6,
                        help="pole exclusion margin in radians")
    common.add_argument("--trials", type=_positive_int, default=1_000_000)
    common.add_argument("--threads", type=_positive_int, default=1)

    p = _Parser(prog="clusteropt", description=__doc__.splitlines()[0])
    p.add_argument("--backend", choices=sorted(kernels.BACKENDS), default=None,
                   help="scan kernel backend (default: compiled if available)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    schemes = [s.value for s in SchemeId]

    s = sub.add_parser("scheme", parents=[common],
                       help="print a scheme's matrix and variance vector",
                       description="Four-node phases are given as theta_plus theta_minus theta3 theta4.")
    s.add_argument("scheme", choices=schemes)
    s.add_argument("phases", nargs="*", type=_finite)
    s.set_defaults(func=cmd_scheme)

    s = sub.add_parser("match", parents=[common], help="phase-match the five four-node schemes")
    s.add_argument("theta3", type=_finite)
    s.add_argument("theta4", type=_finite)
    s.add_argument("theta_plus", type=_finite)
    s.set_defaults(func=cmd_match)

    s = sub.add_parser("scan", parents=[common], help="write the error-surface CSV")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("area-ratio", parents=[common], help="ratio of areas where each scheme wins")
    s.add_argument("--reverse", action="store_true", help="print S1/S2 instead")
    s.add_argument("--transpose", action="store_true", help="swap the theta3/theta4 axes")
    s.set_defaults(func=cmd_area_ratio)

    s = sub.add_parser("compile", parents=[common], help="compile a circuit JSON into a plan")
    s.add_argument("circuit")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("validate", parents=[common], help="Monte-Carlo check of a scheme's variance")
    s.add_argument("scheme", choices=schemes)
    s.add_argument("phases", nargs="*", type=_finite)
    s.add_argument("--expect", nargs="+", type=_finite, default=None,
                   help="expected variance in units of sigma2 (overrides the analytic value)")
    s.set_defaults(func=cmd_validate)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.backend:
            kernels.set_backend(args.backend)
        return args.func(args)
    except CliError as exc:
        print(f"clusteropt: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
