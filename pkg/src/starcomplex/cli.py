"""Command-line interface: batch verification and solving over scenario files.

Exit codes: 0 all tasks passed, 1 at least one check failed (witnesses in
the report), 2 input or validation error.  JSON reports are byte-identical
across runs of the same scenario file.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from importlib import resources

from .errors import ValidationError
from .runner import (
    EXIT_INVALID,
    Scenario,
    report_to_json,
    report_to_text,
    run_scenario,
)


def bundled_scenario_names():
    root = resources.files("starcomplex").joinpath("data/scenarios")
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def resolve_scenario_path(spec: str) -> str:
    if os.path.exists(spec):
        return spec
    if os.sep not in spec and not spec.endswith(".json"):
        candidate = resources.files("starcomplex").joinpath(f"data/scenarios/{spec}.json")
        if candidate.is_file():
            return str(candidate)
    raise ValidationError(f"scenario not found: {spec}")


def _emit(report, fmt, out_path, elapsed):
    if fmt == "json":
        text = report_to_json(report)
    else:
        verbose = bool(os.environ.get("STARCOMPLEX_VERBOSE"))
        text = report_to_text(report, verbose=verbose)
        text += f"elapsed: {elapsed:.3f}s\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run(spec, fmt, out_path, tasks=None) -> int:
    start = time.monotonic()
    try:
        scenario = Scenario.load(resolve_scenario_path(spec))
        report, code = run_scenario(scenario, tasks)
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    _emit(report, fmt, out_path, time.monotonic() - start)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starcomplex",
        description="Exact verification and order-by-order solving for deformation scenarios.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_format=True):
        p.add_argument("scenario", help="scenario file path or bundled scenario name")
        if with_format:
            p.add_argument("--format", choices=("text", "json"), default="text")
            p.add_argument("--output", help="write the report to this file instead of stdout")

    p_run = sub.add_parser("run", help="execute the scenario's declared task list")
    add_common(p_run)

    p_report = sub.add_parser("report", help="same as run; --format selects the rendering")
    add_common(p_report)
    p_report.set_defaults(format="json")

    p_check = sub.add_parser("check", help="run a single check against a scenario")
    check_sub = p_check.add_subparsers(dest="check_kind", required=True)

    p_dga = check_sub.add_parser("dga", help="d^2 = 0, Leibniz and associativity on the scenario data")
    add_common(p_dga)

    p_mc = check_sub.add_parser("mc", help="Maurer-Cartan residual of a named cochain")
    add_common(p_mc)
    p_mc.add_argument("--cochain", required=True)

    p_rep = check_sub.add_parser("representation", help="multiplicativity of a named cochain")
    add_common(p_rep)
    p_rep.add_argument("--cochain", required=True)

    p_coc = check_sub.add_parser("cocycle", help="cocycle identities for named tables")
    add_common(p_coc)
    mode = p_coc.add_mutually_exclusive_group(required=True)
    mode.add_argument("--multiplicative", metavar="COCHAIN")
    mode.add_argument("--additive", metavar="COCYCLE")

    p_solve = sub.add_parser("solve", help="order-by-order solvers")
    solve_sub = p_solve.add_subparsers(dest="solve_kind", required=True)

    p_smc = solve_sub.add_parser("mc", help="extend (p0, p1) to a full solution")
    add_common(p_smc)
    p_smc.add_argument("--order", type=int, required=True)
    p_smc.add_argument("--p0", required=True)
    p_smc.add_argument("--p1", required=True)
    p_smc.add_argument("--save-as", default=None)

    p_sr = solve_sub.add_parser("rigidity", help="gauge a solution back to its leading term")
    add_common(p_sr)
    p_sr.add_argument("--order", type=int, default=None)
    p_sr.add_argument("--cochain", required=True)

    p_coh = sub.add_parser("cohomology", help="exact rank report on one window")
    add_common(p_coh)
    p_coh.add_argument("--xi-degree", type=int, required=True)
    p_coh.add_argument("--cochain-degree", type=int, required=True)
    p_coh.add_argument("--x-degree", type=int, required=True)
    p_coh.add_argument("--p0", required=True)

    sub.add_parser("scenarios", help="list bundled scenarios")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = getattr(args, "format", "text")
    out = getattr(args, "output", None)

    if args.command == "scenarios":
        for name in bundled_scenario_names():
            sys.stdout.write(name + "\n")
        return 0
    if args.command in ("run", "report"):
        return _run(args.scenario, fmt, out)
    if args.command == "check":
        if args.check_kind == "dga":
            tasks = [{"kind": "check_dga"}]
        elif args.check_kind == "mc":
            tasks = [{"kind": "check_mc", "cochain": args.cochain}]
        elif args.check_kind == "representation":
            tasks = [{"kind": "check_representation", "cochain": args.cochain}]
        else:
            if args.multiplicative:
                tasks = [{"kind": "check_multiplicative_cocycle", "cochain": args.multiplicative}]
            else:
                tasks = [{"kind": "check_additive_cocycle", "cocycle": args.additive}]
        return _run(args.scenario, fmt, out, tasks)
    if args.command == "solve":
        if args.solve_kind == "mc":
            tasks = [{
                "kind": "solve_mc",
                "p0": args.p0,
                "p1": args.p1,
                "order": args.order,
                "save_as": args.save_as,
            }]
        else:
            task = {"kind": "solve_rigidity", "mc": args.cochain}
            if args.order is not None:
                task["order"] = args.order
            tasks = [task]
        return _run(args.scenario, fmt, out, tasks)
    if args.command == "cohomology":
        tasks = [{
            "kind": "cohomology",
            "p0": args.p0,
            "xi_degree": args.xi_degree,
            "cochain_degree": args.cochain_degree,
            "x_degree": args.x_degree,
        }]
        return _run(args.scenario, fmt, out, tasks)
    return EXIT_INVALID  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
