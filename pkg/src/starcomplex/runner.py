"""Scenario loading and task execution behind the command-line interface.

A scenario file bundles one group, one validated affine action, named
cochains / slices / additive tables, and a list of tasks.  Reports are
deterministic functions of the scenario bytes: task order is preserved,
every failure carries a replayable witness, and the JSON rendering is
byte-stable (sorted keys, no timing fields).
"""

from __future__ import annotations

import hashlib
import json
import os
from typing import Dict, List, Optional, Tuple

from . import serialize, solver
from .cochains import (
    Cochain,
    MCElement,
    additive_cocycle_check,
    coboundary_intertwiner_check,
    cup_star,
    differential_d,
    mc_residual,
    representation_check,
    xi_multiplicative_cocycle_check,
)
from .errors import Obstruction, StarComplexError, ValidationError
from .groups import action_validate
from .polynomials import PolyFunction
from .symbols import FormalSymbol, XiPolynomial

TOOL_VERSION = "0.1.0"
FORMAT_VERSION = 1

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2


def _resolve_section(obj, base_dir: str, location: str):
    """Inline value, or {"$file": relative-path} indirection."""
    if isinstance(obj, dict) and set(obj) == {"$file"}:
        path = os.path.join(base_dir, obj["$file"])
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return json.load(fh)
        except OSError as exc:
            raise ValidationError(f"cannot read referenced file: {exc}", location) from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad JSON in {path}: {exc}", location) from None
    return obj


class Scenario:
    """Parsed and validated scenario, ready to execute."""

    def __init__(self, path: str, raw: dict, sha256: str):
        self.path = path
        self.sha256 = sha256
        base_dir = os.path.dirname(os.path.abspath(path))
        if raw.get("format_version") != FORMAT_VERSION:
            raise ValidationError("missing or unsupported format_version", path)
        self.name = raw.get("name") or os.path.splitext(os.path.basename(path))[0]
        self.dimension = raw.get("dimension")
        if not isinstance(self.dimension, int) or self.dimension < 1:
            raise ValidationError("dimension missing or invalid", path)
        self.order = raw.get("truncation_order")
        if not isinstance(self.order, int) or self.order < 0:
            raise ValidationError("truncation_order missing or invalid", path)

        group_obj = _resolve_section(raw.get("group"), base_dir, f"{path}#group")
        self.group = serialize.group_from_json(group_obj, location=f"{path}#group")
        action_obj = _resolve_section(raw.get("action"), base_dir, f"{path}#action")
        self.action = serialize.action_from_json(
            action_obj, self.group, self.dimension, location=f"{path}#action"
        )
        report = action_validate(self.action)
        if not report.passed:
            raise ValidationError(f"action validation failed: {report}", f"{path}#action")

        self.cochains: Dict[str, Cochain] = {}
        for name, obj in (raw.get("cochains") or {}).items():
            obj = _resolve_section(obj, base_dir, f"{path}#cochains.{name}")
            self.cochains[name] = serialize.cochain_from_json(
                obj, self.action, self.order, location=f"{path}#cochains.{name}"
            )

        self.slices: Dict[str, Tuple[int, dict]] = {}
        for name, obj in (raw.get("slices") or {}).items():
            obj = _resolve_section(obj, base_dir, f"{path}#slices.{name}")
            self.slices[name] = serialize.slice_from_json(
                obj, self.action, location=f"{path}#slices.{name}"
            )

        self.additive: Dict[str, Dict[str, PolyFunction]] = {}
        for name, obj in (raw.get("additive_cocycles") or {}).items():
            loc = f"{path}#additive_cocycles.{name}"
            if not isinstance(obj, dict):
                raise ValidationError("additive cocycle must map elements to polynomials", loc)
            table = {}
            for g in self.group.elements:
                if g not in obj:
                    raise ValidationError(f"missing entry for element {g!r}", loc)
                table[g] = serialize.poly_from_json(obj[g], self.dimension, loc)
            self.additive[name] = table

        self.potentials: Dict[str, PolyFunction] = {}
        for name, obj in (raw.get("potentials") or {}).items():
            self.potentials[name] = serialize.poly_from_json(
                obj, self.dimension, f"{path}#potentials.{name}"
            )

        self.tasks: List[dict] = raw.get("tasks") or []
        if not isinstance(self.tasks, list):
            raise ValidationError("tasks must be a list", path)

    @classmethod
    def load(cls, path: str) -> "Scenario":
        try:
            with open(path, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise ValidationError(f"cannot read scenario: {exc}", path) from None
        try:
            raw = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ValidationError(f"bad JSON: {exc}", path) from None
        return cls(path, raw, hashlib.sha256(data).hexdigest())

    def cochain(self, name: str, location: str) -> Cochain:
        if name not in self.cochains:
            raise ValidationError(f"unknown cochain {name!r}", location)
        return self.cochains[name]


# ---------------------------------------------------------------------------
# Witness rendering
# ---------------------------------------------------------------------------


def _difference_json(diff) -> dict:
    if isinstance(diff, FormalSymbol):
        return {"symbol": serialize.symbol_to_json(diff)}
    if isinstance(diff, XiPolynomial):
        return {"xi_polynomial": serialize.xi_polynomial_to_json(diff)}
    if isinstance(diff, PolyFunction):
        return {"polynomial": serialize.poly_to_json(diff)}
    return {"value": str(diff)}


def _witnesses(report) -> list:
    return [
        {"tuple": list(t), "difference": _difference_json(diff)}
        for t, diff in report.failures
    ]


# ---------------------------------------------------------------------------
# Task execution
# ---------------------------------------------------------------------------


def _run_check_dga(scenario: Scenario, task: dict) -> dict:
    """d^2, graded Leibniz and associativity on the scenario's named cochains."""
    witnesses = []
    names = sorted(scenario.cochains)
    for name in names:
        a = scenario.cochains[name]
        dd = differential_d(differential_d(a))
        if not dd.is_zero():
            bad = next(t for t, v in dd.values.items() if not v.is_zero())
            witnesses.append({"identity": "d_squared", "cochain": name, "tuple": list(bad)})
    for na in names:
        for nb in names:
            a, b = scenario.cochains[na], scenario.cochains[nb]
            if a.degree + b.degree + 1 > 4:
                continue
            lhs = differential_d(cup_star(a, b))
            rhs = cup_star(differential_d(a), b)
            signed = cup_star(a, differential_d(b))
            rhs = rhs + (signed if a.degree % 2 == 0 else -signed)
            if lhs != rhs:
                witnesses.append({"identity": "leibniz", "pair": [na, nb]})
    for na in names:
        for nb in names:
            for nc in names:
                a, b, c = (scenario.cochains[n] for n in (na, nb, nc))
                if a.degree + b.degree + c.degree > 3:
                    continue
                if cup_star(cup_star(a, b), c) != cup_star(a, cup_star(b, c)):
                    witnesses.append({"identity": "associativity", "triple": [na, nb, nc]})
    return {
        "outcome": "pass" if not witnesses else "fail",
        "witnesses": witnesses,
        "detail": {"cochains": names},
    }


def _run_check_mc(scenario: Scenario, task: dict, location: str) -> dict:
    a = scenario.cochain(task.get("cochain"), location)
    residual = mc_residual(a)
    failures = [(t, v) for t, v in sorted(residual.values.items()) if not v.is_zero()]
    return {
        "outcome": "pass" if not failures else "fail",
        "witnesses": [
            {"tuple": list(t), "difference": _difference_json(v)} for t, v in failures
        ],
        "detail": {"cochain": task.get("cochain")},
    }


def _run_check_representation(scenario: Scenario, task: dict, location: str) -> dict:
    a = scenario.cochain(task.get("cochain"), location)
    report = representation_check(a)
    return {
        "outcome": "pass" if report.passed else "fail",
        "witnesses": _witnesses(report),
        "detail": {"cochain": task.get("cochain")},
    }


def _run_check_multiplicative(scenario: Scenario, task: dict, location: str) -> dict:
    a = scenario.cochain(task.get("cochain"), location)
    report = xi_multiplicative_cocycle_check(a)
    return {
        "outcome": "pass" if report.passed else "fail",
        "witnesses": _witnesses(report),
        "detail": {"cochain": task.get("cochain")},
    }


def _run_check_additive(scenario: Scenario, task: dict, location: str) -> dict:
    name = task.get("cocycle")
    if name not in scenario.additive:
        raise ValidationError(f"unknown additive cocycle {name!r}", location)
    report = additive_cocycle_check(scenario.action, scenario.additive[name])
    return {
        "outcome": "pass" if report.passed else "fail",
        "witnesses": _witnesses(report),
        "detail": {"cocycle": name},
    }


def _run_check_intertwiner(scenario: Scenario, task: dict, location: str) -> dict:
    s_name, t_name, k_name = task.get("cocycle"), task.get("cocycle_tilde"), task.get("potential")
    if s_name not in scenario.additive or t_name not in scenario.additive:
        raise ValidationError("unknown additive cocycle name", location)
    if k_name not in scenario.potentials:
        raise ValidationError(f"unknown potential {k_name!r}", location)
    report = coboundary_intertwiner_check(
        scenario.action,
        scenario.additive[s_name],
        scenario.additive[t_name],
        scenario.potentials[k_name],
    )
    return {
        "outcome": "pass" if report.passed else "fail",
        "witnesses": _witnesses(report),
        "detail": {"cocycle": s_name, "cocycle_tilde": t_name, "potential": k_name},
    }


def _leading_mc(scenario: Scenario, name: str, location: str) -> MCElement:
    cochain = scenario.cochain(name, location)
    try:
        element = MCElement(cochain)
    except ValueError as exc:
        raise ValidationError(f"cochain {name!r} is not Maurer-Cartan: {exc}", location) from None
    return element


def _run_solve_mc(scenario: Scenario, task: dict, location: str) -> dict:
    order = task.get("order")
    if not isinstance(order, int) or order < 1:
        raise ValidationError("solve_mc needs a positive integer order", location)
    p0 = _leading_mc(scenario, task.get("p0"), location)
    if not p0.is_leading_order():
        raise ValidationError("p0 must be concentrated at hbar order 0", location)
    slice_name = task.get("p1")
    if slice_name not in scenario.slices:
        raise ValidationError(f"unknown slice {slice_name!r}", location)
    degree, table = scenario.slices[slice_name]
    if degree != 1:
        raise ValidationError("p1 slice must have degree 1", location)
    try:
        omega = solver.mc_extend(p0, table, order)
    except Obstruction as exc:
        return {
            "outcome": "fail",
            "witnesses": [{"obstruction": exc.certificate}],
            "detail": {"order": order, "p0": task.get("p0"), "p1": slice_name},
        }
    except ValueError as exc:
        raise ValidationError(str(exc), location) from None
    residual_zero = mc_residual(omega.cochain).is_zero()
    if not residual_zero:
        raise StarComplexError("internal inconsistency: extension residual nonzero")  # pragma: no cover
    save_as = task.get("save_as")
    if save_as:
        scenario.cochains[save_as] = omega.cochain
    solved = {
        str(n): solver.slice_of(omega.cochain, n) for n in range(1, order + 1)
    }
    return {
        "outcome": "pass",
        "witnesses": [],
        "detail": {
            "order": order,
            "p0": task.get("p0"),
            "p1": slice_name,
            "residual_zero": True,
            "saved_as": save_as,
            "solved_orders": {
                n: {
                    ",".join(t): serialize.xi_polynomial_to_json(v)
                    for t, v in sorted(tbl.items())
                }
                for n, tbl in solved.items()
            },
        },
    }


def _run_solve_rigidity(scenario: Scenario, task: dict, location: str) -> dict:
    name = task.get("mc")
    element = _leading_mc(scenario, name, location)
    order = task.get("order", element.order)
    if not isinstance(order, int) or order < 0 or order > element.order:
        raise ValidationError("solve_rigidity order must be within the truncation", location)
    try:
        unit = solver.rigidity_gauge(element, order)
    except Obstruction as exc:
        return {
            "outcome": "fail",
            "witnesses": [{"obstruction": exc.certificate}],
            "detail": {"mc": name, "order": order},
        }
    return {
        "outcome": "pass",
        "witnesses": [],
        "detail": {
            "mc": name,
            "order": order,
            "unit": serialize.symbol_to_json(unit),
            "gauge_identity_holds": True,
        },
    }


def _run_cohomology(scenario: Scenario, task: dict, location: str) -> dict:
    for field in ("xi_degree", "cochain_degree", "x_degree"):
        if not isinstance(task.get(field), int) or task[field] < 0:
            raise ValidationError(f"cohomology needs a nonnegative integer {field}", location)
    p0 = _leading_mc(scenario, task.get("p0"), location)
    if not p0.is_leading_order():
        raise ValidationError("p0 must be concentrated at hbar order 0", location)
    report = solver.cohomology_report(
        p0, task["xi_degree"], task["cochain_degree"], task["x_degree"]
    )
    detail = report.to_json()
    detail["p0"] = task.get("p0")
    return {"outcome": "pass", "witnesses": [], "detail": detail}


_TASK_RUNNERS = {
    "check_dga": lambda s, t, loc: _run_check_dga(s, t),
    "check_mc": _run_check_mc,
    "check_representation": _run_check_representation,
    "check_multiplicative_cocycle": _run_check_multiplicative,
    "check_additive_cocycle": _run_check_additive,
    "check_coboundary_intertwiner": _run_check_intertwiner,
    "solve_mc": _run_solve_mc,
    "solve_rigidity": _run_solve_rigidity,
    "cohomology": _run_cohomology,
}


def run_scenario(scenario: Scenario, tasks: Optional[List[dict]] = None) -> Tuple[dict, int]:
    """Execute tasks in declared order; returns (report dict, exit code)."""
    if tasks is None:
        tasks = scenario.tasks
    results = []
    exit_code = EXIT_PASS
    for index, task in enumerate(tasks):
        location = f"{scenario.path}#tasks[{index}]"
        kind = task.get("kind") if isinstance(task, dict) else None
        entry = {"index": index, "kind": kind}
        runner = _TASK_RUNNERS.get(kind)
        if runner is None:
            entry.update({"outcome": "error", "error": f"unknown task kind {kind!r}"})
            results.append(entry)
            exit_code = EXIT_INVALID
            break
        try:
            entry.update(runner(scenario, task, location))
        except ValidationError as exc:
            entry.update({"outcome": "error", "error": str(exc)})
            results.append(entry)
            exit_code = EXIT_INVALID
            break
        results.append(entry)
        if entry["outcome"] == "fail":
            exit_code = max(exit_code, EXIT_CHECK_FAILED)
    passed = sum(1 for r in results if r.get("outcome") == "pass")
    failed = sum(1 for r in results if r.get("outcome") == "fail")
    errors = sum(1 for r in results if r.get("outcome") == "error")
    report = {
        "format_version": FORMAT_VERSION,
        "tool": "starcomplex",
        "tool_version": TOOL_VERSION,
        "scenario": {
            "name": scenario.name,
            "file": os.path.basename(scenario.path),
            "sha256": scenario.sha256,
        },
        "tasks": results,
        "summary": {
            "total": len(results),
            "passed": passed,
            "failed": failed,
            "errors": errors,
        },
    }
    return report, exit_code


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def report_to_text(report: dict, verbose: bool = False) -> str:
    lines = [
        f"scenario: {report['scenario']['name']} ({report['scenario']['file']})",
        f"sha256:   {report['scenario']['sha256']}",
    ]
    for task in report["tasks"]:
        outcome = task.get("outcome", "?").upper()
        label = task.get("kind", "?")
        target = (
            task.get("detail", {}).get("cochain")
            or task.get("detail", {}).get("cocycle")
            or task.get("detail", {}).get("mc")
            or task.get("detail", {}).get("p0")
            or ""
        )
        suffix = f" {target}" if target else ""
        lines.append(f"[{outcome}] {label}{suffix}")
        if task.get("error"):
            lines.append(f"    error: {task['error']}")
        for witness in task.get("witnesses", []) if (verbose or outcome != "PASS") else []:
            if "tuple" in witness:
                lines.append(f"    witness at ({', '.join(witness['tuple'])})")
            elif "obstruction" in witness:
                lines.append(f"    obstruction in window {witness['obstruction'].get('window')}")
            else:
                lines.append(f"    witness: {witness}")
        if verbose and task.get("detail", {}).get("H_dim") is not None:
            lines.append(f"    H_dim = {task['detail']['H_dim']}")
    summary = report["summary"]
    lines.append(
        f"summary: {summary['passed']} passed, {summary['failed']} failed, "
        f"{summary['errors']} errors (of {summary['total']})"
    )
    return "\n".join(lines) + "\n"
