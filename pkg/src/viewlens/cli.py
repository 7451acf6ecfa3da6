"""Command-line interface.

Every command emits a machine-readable report (JSON with a stable field
order, or a text summary with --format text) and exits with 0 when every
verdict is decided, 2 when some verdict is unknown, and 1 on errors. Reports
are byte-stable across runs on identical inputs; timing is only filled in
with --timing.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import __version__
from .chase import (
    DEFAULT_BUDGET,
    DEFAULT_DOMAIN_BOUND,
    UNKNOWN,
    enumerate_models,
    implies,
)
from .complement import is_complement, respects_constant_complement
from .determinacy import Rewriting, is_invertible, synthesize_all
from .errors import ViewlensError
from .model import Instance
from .parser import ParseError, parse_dependency, parse_facts, parse_spec, parse_update
from .printer import print_cq, print_dependency, print_fact, print_step
from .updates import translatable_at, translatable_everywhere
from .deps import ViewSpec

BUDGET_ENV = "VIEWLENS_BUDGET"

EXIT_DECIDED = 0
EXIT_ERROR = 1
EXIT_UNKNOWN = 2


# ---------------------------------------------------------------------------
# Report plumbing


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _read_input(path: str, role: str, inputs: list[dict]) -> str:
    with open(path, "rb") as handle:
        data = handle.read()
    inputs.append({"role": role, "path": path, "sha256": _sha256(data)})
    return data.decode("utf-8")


def _inline_input(text: str, role: str, inputs: list[dict]) -> str:
    inputs.append({"role": role, "path": "<inline>", "sha256": _sha256(text.encode("utf-8"))})
    return text


def _instance_facts(instance: Instance) -> list[str]:
    return [print_fact(f) for f in instance.sorted_facts]


def _rewriting_text(rw: Rewriting) -> str:
    return print_cq(rw.query)[len("def ") :]


def _render_text(report: dict, out) -> None:
    print(f"command: {report['command']}", file=out)
    if "error" in report:
        err = report["error"]
        print(f"error: {err.get('type', 'error')}", file=out)
        for diag in err.get("diagnostics", []):
            print(
                f"  {diag['file']}:{diag['line']}:{diag['column']}: {diag['code']}: {diag['message']}",
                file=out,
            )
        if err.get("message"):
            print(f"  {err['message']}", file=out)
        return
    for key, value in report["verdicts"].items():
        print(f"{key}: {json.dumps(value)}", file=out)
    for key, value in report.get("certificates", {}).items():
        print(f"{key}: {json.dumps(value)}", file=out)


def _emit(report: dict, args, exit_code: int, started: float) -> int:
    report["timing"] = {"seconds": round(time.monotonic() - started, 3)} if args.timing else None
    out = sys.stdout
    if args.format == "json":
        out.write(json.dumps(report, indent=2) + "\n")
    else:
        _render_text(report, out)
    return exit_code


def _base_report(command: str, args, inputs: list[dict]) -> dict:
    return {
        "command": command,
        "version": __version__,
        "inputs": inputs,
        "options": {
            "budget": args.budget,
            "domain_bound": args.domain_bound,
            "seed": args.seed,
        },
        "verdicts": {},
        "certificates": {},
    }


def _error_report(command: str, args, inputs: list[dict], exc: Exception) -> dict:
    report = _base_report(command, args, inputs)
    del report["verdicts"]
    del report["certificates"]
    if isinstance(exc, ParseError):
        report["error"] = {
            "type": "parse-error",
            "diagnostics": [
                {
                    "file": d.span.file,
                    "line": d.span.line,
                    "column": d.span.column,
                    "length": d.span.length,
                    "code": d.code,
                    "message": d.message,
                }
                for d in exc.diagnostics
            ],
        }
    else:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
    return report


# ---------------------------------------------------------------------------
# Commands


def _cmd_check_invertibility(args) -> int:
    started = time.monotonic()
    inputs: list[dict] = []
    try:
        spec = parse_spec(_read_input(args.spec, "spec", inputs), args.spec)
        report = _base_report("check-invertibility", args, inputs)
        result = is_invertible(spec, budget=args.budget, domain_bound=args.domain_bound)
        per_symbol = {}
        certificates = {}
        for name, verdict in result.verdicts:
            per_symbol[name] = {"status": verdict.status, "reason": verdict.reason}
            if verdict.counterexample is not None:
                first, second = verdict.counterexample
                certificates[f"counterexample:{name}"] = {
                    "first": _instance_facts(first),
                    "second": _instance_facts(second),
                }
        report["verdicts"] = {"status": result.status, "invertible": result.invertible,
                              "per_symbol": per_symbol}
        report["certificates"] = certificates
        code = EXIT_UNKNOWN if result.status == UNKNOWN else EXIT_DECIDED
        return _emit(report, args, code, started)
    except ViewlensError as exc:
        return _emit(_error_report("check-invertibility", args, inputs, exc), args, EXIT_ERROR, started)


def _cmd_rewrite(args) -> int:
    started = time.monotonic()
    inputs: list[dict] = []
    try:
        spec = parse_spec(_read_input(args.spec, "spec", inputs), args.spec)
        report = _base_report("rewrite", args, inputs)
        report["options"]["max_atoms"] = args.max_atoms
        rewritings = synthesize_all(spec, max_atoms=args.max_atoms, budget=args.budget)
        found = {}
        for name in spec.db_schema.names():
            rw = rewritings[name]
            found[name] = _rewriting_text(rw) if rw is not None else None
        report["verdicts"] = {"complete": all(v is not None for v in found.values())}
        report["certificates"] = {"rewritings": found}
        code = EXIT_DECIDED if report["verdicts"]["complete"] else EXIT_UNKNOWN
        return _emit(report, args, code, started)
    except ViewlensError as exc:
        return _emit(_error_report("rewrite", args, inputs, exc), args, EXIT_ERROR, started)


def _cmd_check_complement(args) -> int:
    started = time.monotonic()
    inputs: list[dict] = []
    try:
        first = parse_spec(_read_input(args.spec, "spec", inputs), args.spec)
        second = parse_spec(_read_input(args.spec2, "complement-spec", inputs), args.spec2)
        report = _base_report("check-complement", args, inputs)
        check = is_complement(first, second, budget=args.budget, domain_bound=args.domain_bound)
        report["verdicts"] = {
            "complement": check.status,
            "combined_invertibility": check.invertibility.status,
        }
        code = EXIT_UNKNOWN if check.status == UNKNOWN else EXIT_DECIDED
        return _emit(report, args, code, started)
    except ViewlensError as exc:
        return _emit(_error_report("check-complement", args, inputs, exc), args, EXIT_ERROR, started)


def _cmd_translate(args) -> int:
    started = time.monotonic()
    inputs: list[dict] = []
    try:
        spec = parse_spec(_read_input(args.spec, "spec", inputs), args.spec)
        state = parse_facts(_read_input(args.facts, "facts", inputs), spec.db_schema, args.facts)
        program = parse_update(_read_input(args.update, "update", inputs), spec.view_schema, args.update)
        report = _base_report("translate", args, inputs)
        verdict = translatable_at(
            spec, program, state, budget=args.budget, domain_bound=args.domain_bound
        )
        report["verdicts"] = {"status": verdict.status, "reason": verdict.reason}
        certificates = {}
        if verdict.translation is not None:
            certificates["translation"] = {
                "insert": [print_fact(f) for f in sorted(verdict.translation.insertions, key=lambda f: f.sort_key())],
                "delete": [print_fact(f) for f in sorted(verdict.translation.deletions, key=lambda f: f.sort_key())],
            }
            certificates["new_database_state"] = _instance_facts(verdict.new_db_state)
        if verdict.post_view is not None:
            certificates["updated_view_state"] = _instance_facts(verdict.post_view)
        report["certificates"] = certificates
        code = EXIT_UNKNOWN if verdict.status == UNKNOWN else EXIT_DECIDED
        return _emit(report, args, code, started)
    except ViewlensError as exc:
        return _emit(_error_report("translate", args, inputs, exc), args, EXIT_ERROR, started)


def _cmd_check_update(args) -> int:
    started = time.monotonic()
    inputs: list[dict] = []
    command = "check-update"
    try:
        spec = parse_spec(_read_input(args.spec, "spec", inputs), args.spec)
        program = parse_update(_read_input(args.update, "update", inputs), spec.view_schema, args.update)
        report = _base_report(command, args, inputs)
        if args.everywhere:
            verdict = translatable_everywhere(
                spec, program, budget=args.budget, domain_bound=args.domain_bound
            )
            report["verdicts"] = {"everywhere": verdict.status, "reason": verdict.reason}
            if verdict.counterexample_state is not None:
                report["certificates"]["counterexample_state"] = _instance_facts(verdict.counterexample_state)
                report["certificates"]["counterexample_database"] = _instance_facts(verdict.counterexample_db)
            code = EXIT_UNKNOWN if verdict.status == UNKNOWN else EXIT_DECIDED
            return _emit(report, args, code, started)
        if args.facts is None:
            raise ViewlensError("check-update needs --facts F (or --everywhere)")
        state = parse_facts(_read_input(args.facts, "facts", inputs), spec.db_schema, args.facts)
        report["inputs"] = inputs
        verdict = translatable_at(
            spec, program, state, budget=args.budget, domain_bound=args.domain_bound
        )
        report["verdicts"] = {"status": verdict.status, "reason": verdict.reason}
        if verdict.translation is not None:
            report["certificates"]["translation"] = {
                "insert": [print_fact(f) for f in sorted(verdict.translation.insertions, key=lambda f: f.sort_key())],
                "delete": [print_fact(f) for f in sorted(verdict.translation.deletions, key=lambda f: f.sort_key())],
            }
        code = EXIT_UNKNOWN if verdict.status == UNKNOWN else EXIT_DECIDED
        return _emit(report, args, code, started)
    except ViewlensError as exc:
        return _emit(_error_report(command, args, inputs, exc), args, EXIT_ERROR, started)


def _cmd_implies(args) -> int:
    started = time.monotonic()
    inputs: list[dict] = []
    try:
        spec = parse_spec(_read_input(args.spec, "spec", inputs), args.spec)
        if os.path.exists(args.goal):
            goal_text = _read_input(args.goal, "goal", inputs)
        else:
            goal_text = _inline_input(args.goal, "goal", inputs)
        goal = parse_dependency(goal_text, spec.combined_schema, "<goal>")
        report = _base_report("implies", args, inputs)
        verdict = implies(
            spec.full_constraints,
            goal,
            budget=args.budget,
            domain_bound=args.domain_bound,
            schema=spec.combined_schema,
        )
        report["verdicts"] = {"status": verdict.status, "reason": verdict.reason}
        report["certificates"] = {"goal": print_dependency(goal)}
        if verdict.countermodel is not None:
            report["certificates"]["countermodel"] = _instance_facts(verdict.countermodel)
        code = EXIT_UNKNOWN if verdict.status == UNKNOWN else EXIT_DECIDED
        return _emit(report, args, code, started)
    except ViewlensError as exc:
        return _emit(_error_report("implies", args, inputs, exc), args, EXIT_ERROR, started)


def _cmd_oracle(args) -> int:
    started = time.monotonic()
    inputs: list[dict] = []
    try:
        spec = parse_spec(_read_input(args.spec, "spec", inputs), args.spec)
        report = _base_report("oracle", args, inputs)
        report["options"]["domain"] = args.domain
        report["options"]["limit"] = args.limit
        models = []
        count = 0
        for model in enumerate_models(spec.full_constraints, spec.combined_schema, args.domain):
            if count < args.limit:
                models.append(_instance_facts(model))
            count += 1
        report["verdicts"] = {"model_count": count, "domain": args.domain}
        report["certificates"] = {"models": models, "truncated": count > args.limit}
        return _emit(report, args, EXIT_DECIDED, started)
    except ViewlensError as exc:
        return _emit(_error_report("oracle", args, inputs, exc), args, EXIT_ERROR, started)


# ---------------------------------------------------------------------------
# Argument parsing


def _default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is not None:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_BUDGET


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=_default_budget(),
                        help=f"chase step budget (default {DEFAULT_BUDGET}; env {BUDGET_ENV})")
    common.add_argument("--domain-bound", type=int, default=DEFAULT_DOMAIN_BOUND,
                        help="domain size bound for bounded searches (default 3)")
    common.add_argument("--format", choices=("json", "text"), default="json",
                        help="report format (default json)")
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (recorded; used by corpus generation scripts only)")
    common.add_argument("--timing", action="store_true",
                        help="include wall-clock timing in the report (breaks byte-stability)")

    parser = argparse.ArgumentParser(
        prog="viewlens",
        description="Decide invertibility of exact conjunctive-query views, synthesize inverse "
        "rewritings, and translate view updates onto the underlying database.",
    )
    parser.add_argument("--version", action="version", version=f"viewlens {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-invertibility", parents=[common],
                       help="decide invertibility of a view specification")
    p.add_argument("spec")
    p.set_defaults(func=_cmd_check_invertibility)

    p = sub.add_parser("rewrite", parents=[common],
                       help="synthesize inverse rewritings for every database symbol")
    p.add_argument("spec")
    p.add_argument("--max-atoms", type=int, default=4, help="candidate body size bound (default 4)")
    p.set_defaults(func=_cmd_rewrite)

    p = sub.add_parser("check-complement", parents=[common],
                       help="check that a second view is a complement of the first")
    p.add_argument("spec")
    p.add_argument("spec2")
    p.set_defaults(func=_cmd_check_complement)

    p = sub.add_parser("translate", parents=[common],
                       help="translate a view update at a concrete database state")
    p.add_argument("spec")
    p.add_argument("--facts", required=True)
    p.add_argument("--update", required=True)
    p.set_defaults(func=_cmd_translate)

    p = sub.add_parser("check-update", parents=[common],
                       help="check translatability of a view update")
    p.add_argument("spec")
    p.add_argument("--update", required=True)
    p.add_argument("--facts", default=None, help="database state (per-state check)")
    p.add_argument("--everywhere", action="store_true",
                   help="check translatability with respect to every consistent view state")
    p.set_defaults(func=_cmd_check_update)

    p = sub.add_parser("implies", parents=[common],
                       help="decide logical implication of a dependency from the spec's constraints")
    p.add_argument("spec")
    p.add_argument("--goal", required=True,
                   help="dependency statement (inline text, or a path to a file containing one)")
    p.set_defaults(func=_cmd_implies)

    p = sub.add_parser("oracle", parents=[common],
                       help="enumerate finite models of the spec's constraints")
    p.add_argument("spec")
    p.add_argument("--domain", type=int, required=True, help="domain size")
    p.add_argument("--limit", type=int, default=50, help="models to include in the report")
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
