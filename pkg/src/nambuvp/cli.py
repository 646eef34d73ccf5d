"""Scenario runner: one command per check, JSON scenarios in, JSON/CSV reports out.

Exit status: 0 every check passed, 1 some check failed, 2 malformed input,
3 a truncation window prevented a verdict (and nothing failed).
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable

import jsonschema
import numpy as np

from . import flows, forms, hierarchy, nambu
from .symalg import JetOrderError, MultiPoly, Variable, VariableTable, WindowError, random_poly

__all__ = ["Scenario", "Report", "BadInput", "run", "emit", "main", "COMMANDS",
           "EXIT_PASS", "EXIT_FAIL", "EXIT_BAD_INPUT", "EXIT_INDETERMINATE"]

EXIT_PASS, EXIT_FAIL, EXIT_BAD_INPUT, EXIT_INDETERMINATE = 0, 1, 2, 3

DEFAULTS: dict[str, dict[str, Any]] = {
    "bracket": {},
    "fi-check": {"n": 3, "trials": 100, "max_degree": 2, "seed": 0},
    "decompose": {"trials": 200, "N": 6, "n": 3, "seed": 0, "include_canonical": True},
    "rigid-body": {"I": [1, 2, 3], "k": 1, "dt": 1e-3, "t_end": 10, "initial": [1, 0.2, 0.1],
                   "tol": 1e-8, "precision": "double", "order_check": False},
    "euler-top": {"dt": 1e-3, "t_end": 10, "initial": [1, 0.2, 0.1], "tol": 1e-8,
                  "precision": "double", "order_check": False},
    "dkp-zc": {"K": 6, "flows": [2, 3]},
    "dkp-flow": {"K": 4, "n": 2},
    "vp-vacuum": {"K": 4},
    "vp-check": {"K": 2},
    "plebanski": {},
    "pencil": {"l": 1},
    "metric3": {},
    "hydro": {"mode": "auto", "grid": [200, 200], "x_range": [-1, 1], "t_range": [0, 0.1], "tol": 1e-6},
    "twistor-data": {},
}

COMMANDS = tuple(DEFAULTS)

_PRECISION = {"double": np.float64, "extended": np.longdouble}


class BadInput(ValueError):
    """The scenario cannot be interpreted."""


def _schema(name: str) -> dict:
    text = resources.files("nambuvp").joinpath("schemas", name).read_text()
    return json.loads(text)


@dataclass
class Scenario:
    command: str
    options: dict = field(default_factory=dict)
    input: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, data) -> "Scenario":
        try:
            jsonschema.validate(data, _schema("scenario.schema.json"))
        except jsonschema.ValidationError as exc:
            raise BadInput(f"scenario does not match the schema: {exc.message}") from None
        options = dict(DEFAULTS[data["command"]])
        options.update(data.get("options", {}))
        return cls(data["command"], options, dict(data.get("input", {})))

    def to_json(self) -> dict:
        return {"command": self.command, "options": self.options, "input": self.input}


@dataclass
class Report:
    scenario: Scenario
    checks: list[dict]
    trajectory: flows.Trajectory | None = None
    timing: float | None = None

    @property
    def verdict(self) -> str:
        verdicts = [c["verdict"] for c in self.checks]
        if "fail" in verdicts:
            return "fail"
        if "indeterminate" in verdicts:
            return "indeterminate"
        return "pass"

    @property
    def exit_code(self) -> int:
        return {"pass": EXIT_PASS, "fail": EXIT_FAIL, "indeterminate": EXIT_INDETERMINATE}[self.verdict]

    def to_json(self) -> dict:
        out = {"scenario": self.scenario.to_json(), "checks": self.checks, "verdict": self.verdict}
        if self.timing is not None:
            out["timing"] = self.timing
        return out


# ----------------------------------------------------------------------
# deterministic serialization
# ----------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with sorted keys and floats at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    return json.dumps(str(obj))


def emit(report: Report, fmt: str = "json", path=None) -> str:
    """Render ``report``; writes to ``path`` when given and returns the text."""
    if fmt == "json":
        text = dumps(report.to_json()) + "\n"
    elif fmt == "csv":
        if report.trajectory is not None:
            text = report.trajectory.to_csv()
        else:
            lines = ["check,verdict"] + [f"{c['name']},{c['verdict']}" for c in report.checks]
            text = "\n".join(lines) + "\n"
    else:
        raise BadInput(f"unknown output format {fmt!r}")
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


# ----------------------------------------------------------------------
# input helpers
# ----------------------------------------------------------------------

def _check(name: str, ok: bool, **details) -> dict:
    return {"name": name, "verdict": "pass" if ok else "fail", **details}


def _table(inp: dict, default: list[str] | None = None) -> VariableTable:
    names = inp.get("variables", default)
    if not names:
        raise BadInput("input.variables is required")
    inv = set(inp.get("invertible", []))
    return VariableTable(tuple(Variable(n, invertible=n in inv) for n in names))


def _poly(text, table: VariableTable) -> MultiPoly:
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return table.poly(repr(text))
    if not isinstance(text, str):
        raise BadInput(f"expected a polynomial string, got {text!r}")
    return table.poly(text)


def _laurent_report(name: str, residuals, indices=()) -> dict:
    rep = hierarchy.residual_report(name, residuals, indices)
    return {"name": name, **{k: v for k, v in rep.to_json().items() if k != "check"}}


def _indeterminate(name: str, indices, exc: Exception) -> dict:
    rep = hierarchy.indeterminate_report(name, indices, str(exc)).to_json()
    rep.pop("check")
    return {"name": name, **rep}


def _form_check(name: str, form) -> dict:
    return _check(name, form.is_zero(), residual=str(form))


def _pencil_check(name: str, pencil: forms.FormPencil) -> dict:
    nonzero = [{"monomial": list(m), "form": str(f)} for m, f in pencil.nonzero_members()]
    return _check(name, not nonzero, nonzero_members=nonzero)


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def _cmd_bracket(sc: Scenario) -> list[dict]:
    table = _table(sc.input)
    coords = sc.input.get("coordinates", list(table.names))
    fs = [_poly(f, table) for f in sc.input.get("functions", [])]
    space = nambu.BracketSpace(table, tuple(coords))
    if len(fs) != len(coords):
        raise BadInput(f"{len(coords)} coordinates need {len(coords)} functions")
    value = nambu.nambu_bracket(fs, space)
    if "expected" in sc.input:
        expected = _poly(sc.input["expected"], table)
        return [_check("bracket", value == expected, value=str(value), expected=str(expected))]
    return [_check("bracket", True, value=str(value))]


def _cmd_fi_check(sc: Scenario) -> list[dict]:
    if "functions" in sc.input:
        table = _table(sc.input)
        coords = tuple(sc.input.get("coordinates", table.names))
        fs = [_poly(f, table) for f in sc.input["functions"]]
        if len(fs) != 2 * len(coords) - 1:
            raise BadInput(f"the identity needs {2 * len(coords) - 1} functions")
        r = nambu.fundamental_identity_residual(fs, nambu.BracketSpace(table, coords))
        return [_check("fundamental-identity", not r, residual=str(r))]
    o = sc.options
    n = int(o["n"])
    table = VariableTable.of([f"x{i}" for i in range(1, n + 1)])
    space = nambu.BracketSpace(table, table.names)
    rng = random.Random(int(o["seed"]))
    failures = []
    for trial in range(int(o["trials"])):
        fs = [random_poly(table, rng, int(o["max_degree"])) for _ in range(2 * n - 1)]
        r = nambu.fundamental_identity_residual(fs, space)
        if r:
            failures.append({"trial": trial, "functions": [str(f) for f in fs], "residual": str(r)})
    return [_check("fundamental-identity", not failures, trials=int(o["trials"]), failures=failures)]


def _decompose_one(eta: nambu.NambuTensor) -> dict:
    alg = nambu.algebraic_constraint_residual(eta)
    diff = nambu.differential_constraint_residual(eta)
    oracle = nambu.is_decomposable_oracle(eta)
    residual_zero = not alg and not diff
    return {"oracle_decomposable": oracle, "residual_zero": residual_zero,
            "algebraic_nonzero": len(alg), "differential_nonzero": len(diff),
            "agree": oracle == residual_zero}


def _cmd_decompose(sc: Scenario) -> list[dict]:
    if "tensor" in sc.input:
        eta = nambu.NambuTensor.from_json(sc.input["tensor"])
        res = _decompose_one(eta)
        return [_check("decomposability", res["agree"], **res)]
    o = sc.options
    rng = random.Random(int(o["seed"]))
    N, n = int(o["N"]), int(o["n"])
    tensors = [nambu.random_constant_tensor(rng, N, n) for _ in range(int(o["trials"]))]
    if o["include_canonical"]:
        if N < 2 * n:
            raise BadInput("the canonical non-decomposable tensor needs N >= 2n")
        table = tensors[0].table if tensors else VariableTable.of([f"x{i}" for i in range(1, N + 1)])
        tensors.append(nambu.NambuTensor.basis(table, table.names, tuple(range(1, n + 1)),
                                               tuple(range(n + 1, 2 * n + 1))))
    disagreements = []
    decomposable = 0
    for i, eta in enumerate(tensors):
        res = _decompose_one(eta)
        decomposable += res["oracle_decomposable"]
        if not res["agree"]:
            disagreements.append({"index": i, "tensor": eta.to_json(), **res})
    return [_check("decomposability", not disagreements, tensors=len(tensors),
                   decomposable=decomposable, disagreements=disagreements)]


def _integration_checks(sc: Scenario, system: flows.NambuSystem, name: str) -> tuple[list[dict], Any]:
    o = sc.options
    precision = o["precision"]
    if precision not in _PRECISION:
        raise BadInput(f"precision must be one of {sorted(_PRECISION)}")
    dtype = _PRECISION[precision]
    field_ = flows.vector_field(system.bound())
    div = flows.divergence(field_, system.coordinates)
    checks = [
        _check("vector-field", True, components=[str(f) for f in field_]),
        _check("divergence", not div, divergence=str(div)),
    ]
    H = [h.substitute(system.constants) for h in system.hamiltonians]
    tol = float(o["tol"])
    dt, t_end = float(o["dt"]), float(o["t_end"])
    try:
        traj = flows.integrate(system, o["initial"], t_end, dt, dtype=dtype)
    except flows.IntegrationError as exc:
        checks.append(_check(f"{name}-integration", False, blowup_time=exc.time,
                             message=str(exc)))
        return checks, None
    drift = flows.conserved_drift(traj, H)
    checks.append(_check("hamiltonian-drift", all(d <= tol for d in drift),
                         drift=drift, tol=tol, samples=len(traj)))
    if o["order_check"]:
        fine = flows.integrate(system, o["initial"], t_end, dt / 2, dtype=dtype)
        fine_drift = flows.conserved_drift(fine, H)
        ratios = [d / f if f > 0 else float("inf") for d, f in zip(drift, fine_drift)]
        checks.append(_check("step-halving", all(r >= 12 for r in ratios), ratios=ratios,
                             drift_half_step=fine_drift))
    return checks, traj


def _cmd_rigid_body(sc: Scenario):
    system = flows.rigid_body_from_inertia(sc.options["I"], sc.options["k"])
    return _integration_checks(sc, system, "rigid-body")


def _cmd_euler_top(sc: Scenario):
    return _integration_checks(sc, flows.euler_top(), "euler-top")


def _dkp_state(sc: Scenario) -> hierarchy.DkpState:
    max_jet = sc.options.get("max_jet")
    return hierarchy.DkpState.generic(int(sc.options["K"]), None if max_jet is None else int(max_jet))


def _cmd_dkp_zc(sc: Scenario) -> list[dict]:
    pairs = sc.options["flows"]
    if pairs and not isinstance(pairs[0], list):
        pairs = [pairs]
    state = _dkp_state(sc)
    checks = []
    for n, m in pairs:
        name = f"zero-curvature-{n}-{m}"
        try:
            R = hierarchy.zero_curvature_residual(state, int(n), int(m))
        except (WindowError, JetOrderError) as exc:
            checks.append(_indeterminate(name, [n, m], exc))
            continue
        checks.append(_laurent_report(name, R, [n, m]))
    return checks


def _cmd_dkp_flow(sc: Scenario) -> list[dict]:
    state = _dkp_state(sc)
    n = int(sc.options["n"])
    name = f"dkp-flow-{n}"
    try:
        flow = hierarchy.dkp_flow(state, n)
        R = hierarchy.poisson2(hierarchy.lax_projection(state, n), state.L)
    except (WindowError, JetOrderError) as exc:
        return [_indeterminate(name, [n], exc)]
    leaked = {e: str(R.coefficient(e)) for e in R.nonzero_exponents() if e >= 0}
    checks = [_check(name, not leaked, flows={f"u{m}": str(p) for m, p in sorted(flow.items())},
                     nonnegative_powers=leaked)]
    expected = sc.input.get("expected")
    if expected:
        table = state.table
        bad = {k: str(flow[int(k[1:])]) for k, v in expected.items()
               if int(k[1:]) not in flow or flow[int(k[1:])] != _poly(v, table)}
        checks.append(_check(f"{name}-expected", not bad, mismatched=bad))
    return checks


def _vp_checks(triple: hierarchy.VpTriple) -> list[dict]:
    K = triple.K
    checks = []
    for n in range(1, K + 1):
        checks.append(_laurent_report(f"flow-{n}", hierarchy.vp_flow_residual(triple, n), [n]))
    checks.append(_laurent_report("volume-constraint", hierarchy.volume_constraint_residual(triple)))
    for n in range(1, K + 1):
        for m in range(n + 1, K + 1):
            checks.append(_laurent_report(f"cross-flow-{n}-{m}", hierarchy.cross_flow_residual(triple, n, m), [n, m]))
    dOmega, sq, thm = forms.omega3_check(triple)
    checks.append(_form_check("omega-closed", dOmega))
    checks.append(_form_check("omega-wedge-square", sq))
    checks.append(_form_check("omega-equals-dL-dM-dN", thm))
    checks.append(_form_check("krichever-closedness", forms.krichever_closedness(triple)))
    return checks


def _cmd_vp_vacuum(sc: Scenario) -> list[dict]:
    return _vp_checks(hierarchy.vacuum_solution(int(sc.options["K"])))


def _cmd_vp_check(sc: Scenario) -> list[dict]:
    K = int(sc.options["K"])
    try:
        L, M, N = (sc.input[k] for k in ("L", "M", "N"))
    except KeyError as exc:
        raise BadInput(f"input.{exc.args[0]} is required") from None
    return _vp_checks(hierarchy.VpTriple.from_polys(L, M, N, K))


def _cmd_plebanski(sc: Scenario) -> list[dict]:
    coords = tuple(sc.input.get("coordinates", forms.PLEBANSKI_COORDINATES))
    table = _table(sc.input, list(coords))
    if "Omega" not in sc.input:
        raise BadInput("input.Omega is required")
    W = _poly(sc.input["Omega"], table)
    r = forms.plebanski_residual(W, coords)
    closed, square = forms.plebanski_pencil(W, coords)
    return [_check("heavenly-equation", not r, residual=str(r)),
            _pencil_check("pencil-closed", closed),
            _pencil_check("pencil-wedge-square", square)]


def _pencil_from_input(inp: dict) -> forms.FormPencil:
    if "pencil" in inp:
        return forms.FormPencil.from_json(inp["pencil"])
    try:
        coords, params, terms = inp["coordinates"], inp["params"], inp["terms"]
    except KeyError as exc:
        raise BadInput(f"input.{exc.args[0]} is required") from None
    names = list(coords) + [p for p in params if p not in coords] + \
        [v for v in inp.get("variables", []) if v not in coords and v not in params]
    table = VariableTable.of(names)
    form = None
    for basis, coef in terms:
        term = forms.DifferentialForm.basis(table, coords, basis, _poly(coef, table))
        form = term if form is None else form + term
    if form is None:
        raise BadInput("a pencil needs at least one term")
    return forms.FormPencil(form, params)


def _cmd_pencil(sc: Scenario) -> list[dict]:
    res = forms.gindikin_check(_pencil_from_input(sc.input), int(sc.options["l"]))
    out = res.to_json()
    return [
        _check("power-l-plus-1-vanishes", out["power_residual_zero"],
               residual=[{"monomial": list(m), "form": str(f)} for m, f in res.power_residual.nonzero_members()]),
        _check("power-l-nonzero", out["witness"] is not None, witness=out["witness"]),
        _check("closed", out["closedness_zero"],
               residual=[{"monomial": list(m), "form": str(f)} for m, f in res.closedness.nonzero_members()]),
    ]


def _cmd_metric3(sc: Scenario) -> list[dict]:
    inp = sc.input
    coords = inp.get("coordinates")
    frame = inp.get("frame")
    if not coords or not frame:
        raise BadInput("input.coordinates and input.frame are required")
    table = _table(inp, list(coords))
    rows = []
    for row in frame:
        out_row = []
        for entry in row:
            f = forms.DifferentialForm.zero(table, coords, 1)
            for name, coef in entry.items():
                f = f + forms.DifferentialForm.basis(table, coords, (name,), _poly(coef, table))
            out_row.append(f)
        rows.append(out_row)
    g = forms.det_metric3(rows)
    terms = [{"basis": [coords[i] for i in k], "coefficient": str(c)} for k, c in sorted(g.terms.items())]
    checks = [_check("metric", True, metric=str(g), terms=terms)]
    if "expected" in inp:
        want = {tuple(sorted(coords.index(n) for n in b)): _poly(c, table) for b, c in inp["expected"]}
        ok = {k: v for k, v in want.items() if v} == g.terms
        checks.append(_check("metric-expected", ok))
    return checks


def _cmd_hydro(sc: Scenario) -> list[dict]:
    inp, o = sc.input, sc.options
    table = VariableTable.of("u x t")
    try:
        A = [[_poly(v, table) for v in row] for row in inp["A"]]
        B = [[_poly(v, table) for v in row] for row in inp["B"]]
        u_text = inp["u"]
    except KeyError as exc:
        raise BadInput(f"input.{exc.args[0]} is required") from None
    num = _poly(u_text, table)
    den = _poly(inp["u_denominator"], table) if "u_denominator" in inp else None
    mode = o["mode"]
    if mode == "auto":
        mode = "grid" if den is not None else "symbolic"
    if mode == "symbolic":
        if den is not None:
            raise BadInput("symbolic mode needs a polynomial u (no denominator)")
        flux, comm = forms.hydro_compat_residual(A, B, num)
        flux_nz = [str(v) for row in flux for v in row if v]
        comm_nz = [str(v) for row in comm for v in row if v]
        return [_check("flux-compatibility", not flux_nz, residual=[[str(v) for v in r] for r in flux]),
                _check("commutator", not comm_nz, residual=[[str(v) for v in r] for r in comm])]
    if mode != "grid":
        raise BadInput(f"unknown hydro mode {mode!r}")
    nx, nt = (int(v) for v in o["grid"])
    xs = np.linspace(*map(float, o["x_range"]), nx)
    ts = np.linspace(*map(float, o["t_range"]), nt)
    T, X = np.meshgrid(ts, xs, indexing="ij")
    num_f = _grid_eval(num, X, T)
    U = num_f / _grid_eval(den, X, T) if den is not None else num_f
    res = forms.hydro_compat_residual(A, B, U, grid=(xs, ts))
    tol = float(o["tol"])
    return [_check("flux-compatibility", res.flux_residual <= tol, max_residual=res.flux_residual, tol=tol,
                   grid=[nx, nt]),
            _check("commutator", res.commutator_residual <= tol, max_residual=res.commutator_residual, tol=tol)]


def _grid_eval(p: MultiPoly, X: np.ndarray, T: np.ndarray) -> np.ndarray:
    if "u" in p.variables_used():
        raise BadInput("u(x, t) may not depend on u")
    ns: dict = {}
    code = p.compile(["x", "t"], coerce=float, namespace=ns)
    fn = eval(f"lambda x, t: {code}", ns)  # generated from a parsed polynomial
    return np.broadcast_to(np.asarray(fn(X, T), dtype=float), X.shape)


def _cmd_twistor(sc: Scenario) -> list[dict]:
    table = VariableTable.of("p q")
    try:
        fs = [hierarchy.laurent_from_lam_poly(sc.input[k], table) for k in ("f1", "f2", "f3")]
    except KeyError as exc:
        raise BadInput(f"input.{exc.args[0]} is required") from None
    return [_laurent_report("canonical-relation", forms.twistor_residual(*fs))]


_HANDLERS: dict[str, Callable] = {
    "bracket": _cmd_bracket,
    "fi-check": _cmd_fi_check,
    "decompose": _cmd_decompose,
    "rigid-body": _cmd_rigid_body,
    "euler-top": _cmd_euler_top,
    "dkp-zc": _cmd_dkp_zc,
    "dkp-flow": _cmd_dkp_flow,
    "vp-vacuum": _cmd_vp_vacuum,
    "vp-check": _cmd_vp_check,
    "plebanski": _cmd_plebanski,
    "pencil": _cmd_pencil,
    "metric3": _cmd_metric3,
    "hydro": _cmd_hydro,
    "twistor-data": _cmd_twistor,
}


def run(scenario: Scenario, timing: bool = False) -> Report:
    """Dispatch ``scenario``; malformed payloads raise :class:`BadInput`."""
    start = time.perf_counter()
    try:
        result = _HANDLERS[scenario.command](scenario)
    except BadInput:
        raise
    except (WindowError, JetOrderError) as exc:
        result = [_indeterminate(scenario.command, [], exc)]
    except (ValueError, KeyError, TypeError, IndexError, SyntaxError, ZeroDivisionError) as exc:
        raise BadInput(f"{type(exc).__name__}: {exc}") from exc
    trajectory = None
    if isinstance(result, tuple):
        result, trajectory = result
    elapsed = time.perf_counter() - start if timing else None
    return Report(scenario, result, trajectory, elapsed)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nambuvp", description="Run a Nambu / volume-preserving hierarchy check.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--scenario", help="scenario JSON file (options and input); defaults apply when absent")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, help="seed for randomized sweeps (overrides options.seed)")
    p.add_argument("--quiet", action="store_true", help="print nothing; rely on the exit status")
    p.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte-determinism)")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        data = {"command": args.command}
        if args.scenario:
            with open(args.scenario) as fh:
                loaded = json.load(fh)
            if not isinstance(loaded, dict):
                raise BadInput("a scenario file must hold a JSON object")
            if loaded.get("command", args.command) != args.command:
                raise BadInput(f"scenario is for {loaded['command']!r}, not {args.command!r}")
            data.update(loaded)
        if args.seed is not None:
            data.setdefault("options", {})
            data["options"] = {**data["options"], "seed": args.seed}
        scenario = Scenario.from_json(data)
        report = run(scenario, timing=args.timing)
        text = emit(report, args.format, args.out)
    except (BadInput, OSError, json.JSONDecodeError) as exc:
        if not args.quiet:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    if not args.quiet and args.out is None:
        sys.stdout.write(text)
    elif not args.quiet:
        print(f"{args.command}: {report.verdict}")
    return report.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
