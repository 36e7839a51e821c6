"""Command-line entry point: ``dscpsc validate|build|solve|sensitivity|report|example``.

Exit codes: 0 success, 1 invalid instance, 2 solver failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from ..errors import BudgetExceeded, DscpscError, ParseError, SolverError, ValidationError
from ..fuzzy import solve_fuzzy
from ..instance import load_instance, save_instance, validate
from ..model import BuildOptions, build_model
from ..solver import SolverBackend, write_mps
from . import reports
from .sensitivity import GROUPS, LEVELS, METRICS, run_sensitivity

EX_OK, EX_INVALID, EX_SOLVER, EX_USAGE = 0, 1, 2, 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(EX_USAGE, f"\n{self.prog}: error: {message}\n")


def _backend(args):
    kw = {}
    if getattr(args, "time_limit", None) is not None:
        kw["time_limit"] = args.time_limit
    if getattr(args, "rational", False):
        kw["rational"] = True
    if getattr(args, "max_discrete", None) is not None:
        kw["max_discrete"] = args.max_discrete
    return SolverBackend.from_name(args.backend, **kw)


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _csv_list(cast):
    def parse(value):
        try:
            return [cast(v) for v in value.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad list {value!r}") from None
    return parse


def _add_solver_flags(p):
    p.add_argument("--backend", choices=("embedded", "external"), default="embedded")
    p.add_argument("--objective-mode", choices=("chain", "per-stakeholder"), default="chain")
    p.add_argument("--time-limit", type=float, help="seconds, external backend only")
    p.add_argument("--rational", action="store_true", help="embedded backend in exact rational arithmetic")
    p.add_argument("--max-discrete", type=int, help="embedded backend discrete-variable budget")
    p.add_argument("--labor-weight-uniform", action="store_true")


def make_parser():
    ap = _Parser(prog="dscpsc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("validate", help="check an instance file")
    p.add_argument("instance")

    p = sub.add_parser("build", help="build the MILP, optionally writing MPS and the build report")
    p.add_argument("instance")
    p.add_argument("--emit-mps", metavar="PATH")
    p.add_argument("--report", metavar="PATH", help="build report JSON ('-' for stdout)")
    p.add_argument("--labor-weight-uniform", action="store_true")

    p = sub.add_parser("solve", help="fuzzy solve and print lambda plus the stakeholder table")
    p.add_argument("instance")
    _add_solver_flags(p)
    p.add_argument("--output", metavar="PATH", help="write the full report as JSON")

    p = sub.add_parser("sensitivity", help="cost-group perturbation grid")
    p.add_argument("instance")
    _add_solver_flags(p)
    p.add_argument("--groups", type=_csv_list(str), default=list(GROUPS))
    p.add_argument("--levels", type=_csv_list(float), default=list(LEVELS))
    p.add_argument("--metric", choices=METRICS, default="profit")
    p.add_argument("--freeze-bounds", action="store_true", help="reuse base fuzzy bounds (approximate)")
    p.add_argument("--jobs", type=int, help="worker processes (default DSCPSC_JOBS or 1)")
    p.add_argument("--format", choices=("csv", "json", "table"), default="csv")
    p.add_argument("--output", metavar="PATH")

    p = sub.add_parser("report", help="render results for an instance or a saved solve report")
    p.add_argument("source", help="instance file, or JSON written by 'solve --output'")
    _add_solver_flags(p)
    p.add_argument("--format", choices=("csv", "json", "table"), default="table")
    p.add_argument("--output", metavar="PATH")

    p = sub.add_parser("example", help="write a synthetic instance")
    p.add_argument("kind", choices=("reference-tiny", "reference-full", "tiny", "anti-loop"))
    p.add_argument("path")
    p.add_argument("--seed", type=int, default=0)
    return ap


def _cmd_validate(args):
    inst = load_instance(args.instance)
    bad = validate(inst)
    if bad:
        for v in bad:
            print(v.describe())
        return EX_INVALID
    print("OK")
    return EX_OK


def _cmd_build(args):
    inst = load_instance(args.instance)
    built = build_model(inst, BuildOptions(labor_weight_uniform=args.labor_weight_uniform))
    m = built.model
    print(f"{len(m.vars)} variables ({len(m.discrete_vars())} discrete), {len(m.constraints)} constraints, "
          f"{len(built.report.emitted)} families emitted, {len(built.report.vacuous)} vacuous")
    if args.emit_mps:
        write_mps(m, args.emit_mps)
    if args.report:
        _emit(built.report.to_json(), None if args.report == "-" else args.report)
    return EX_OK


def _solve(inst, args):
    return solve_fuzzy(inst, _backend(args), mode=args.objective_mode,
                       options=BuildOptions(labor_weight_uniform=args.labor_weight_uniform))


def _cmd_solve(args):
    rep = _solve(load_instance(args.instance), args)
    if args.output:
        _emit(rep.to_json(), args.output)
    if rep.solution is None:
        print(f"no solution: {rep.status.value} {rep.detail}", file=sys.stderr)
        return EX_SOLVER
    print(f"lambda = {rep.lambda_:.6f}")
    print(rep.render_table())
    for msg in rep.warnings:
        print(f"warning: {msg}", file=sys.stderr)
    return EX_OK


def _cmd_sensitivity(args):
    inst = load_instance(args.instance)
    rep = run_sensitivity(inst, args.groups, args.levels, _backend(args), args.metric, args.objective_mode,
                          args.freeze_bounds, args.jobs)
    text = {"csv": rep.to_csv, "json": rep.to_json, "table": rep.render_table}[args.format]()
    _emit(text, args.output)
    return EX_OK


def _cmd_report(args):
    with open(args.source, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    if "schema" not in doc and "lambda" in doc:
        _emit(reports.render_saved(doc, args.format), args.output)
        return EX_OK
    rep = _solve(load_instance(args.source), args)
    if rep.solution is None:
        print(f"no solution: {rep.status.value} {rep.detail}", file=sys.stderr)
        return EX_SOLVER
    _emit(reports.render(rep, args.format), args.output)
    return EX_OK


def _cmd_example(args):
    from .. import synthetic

    make = {
        "reference-tiny": synthetic.reference_tiny,
        "reference-full": synthetic.reference_full,
        "tiny": lambda: synthetic.tiny_instance(args.seed),
        "anti-loop": synthetic.anti_loop_instance,
    }[args.kind]
    save_instance(make(), args.path)
    return EX_OK


COMMANDS = {
    "validate": _cmd_validate,
    "build": _cmd_build,
    "solve": _cmd_solve,
    "sensitivity": _cmd_sensitivity,
    "report": _cmd_report,
    "example": _cmd_example,
}


def _glue_values(argv):
    """``--levels -10,10`` would read as an option; glue such values to their flag."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in ("--levels", "--groups"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    ap = make_parser()
    argv = _glue_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EX_USAGE
    if not args.command:
        ap.print_help(sys.stderr)
        return EX_USAGE
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](args)
    except (ParseError, ValidationError) as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return EX_INVALID
    except (SolverError, BudgetExceeded) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EX_SOLVER
    except DscpscError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_SOLVER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_INVALID


if __name__ == "__main__":
    sys.exit(main())
