"""External MILP solver driven through MPS files and a subprocess."""

from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
import time
import warnings

from ..errors import NumericalFailure, SolutionParseError, SolverCrashed, TimeLimit
from ..milp import INTEGRALITY_TOL, MilpModel, ObjSense, Solution, Status, VarId, check_feasible, evaluate
from .backend import SolveLog, SolverBackend
from .mps import mps_names, write_mps

NO_LIMIT = "100000000"


def find_cbc():
    """Path of a CBC executable: the one bundled with ``pulp`` if installed, else ``cbc`` on PATH."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            import pulp

            path = os.path.realpath(pulp.PULP_CBC_CMD().path)
        if os.path.isfile(path) and os.access(path, os.X_OK):
            return path
    except Exception:
        pass
    return shutil.which("cbc") or "cbc"


def parse_cbc_solution(text: str, columns: list[str]):
    """Parse a CBC ``-solu`` file.

    Returns ``(status, objective, values)`` where ``values`` is indexed like
    ``columns`` and absent columns are zero. ``status`` is one of optimal,
    infeasible, unbounded, stopped.
    """
    lines = text.splitlines()
    if not lines:
        raise SolutionParseError("empty solution file")
    head = lines[0].strip()
    low = head.lower()
    if low.startswith("optimal"):
        status = "optimal"
    elif "infeasible" in low:
        status = "infeasible"
    elif low.startswith("unbounded"):
        status = "unbounded"
    elif low.startswith("stopped"):
        status = "stopped"
    else:
        raise SolutionParseError(f"unrecognized status line {head!r}")
    objective = None
    if "objective value" in low:
        try:
            objective = float(head.rsplit("objective value", 1)[1].split()[0])
        except (IndexError, ValueError):
            raise SolutionParseError(f"bad objective in {head!r}") from None
    index = {name: j for j, name in enumerate(columns)}
    values = [0.0] * len(columns)
    for lineno, line in enumerate(lines[1:], start=2):
        tok = line.split()
        if not tok:
            continue
        if tok[0] == "**":
            tok = tok[1:]
        if len(tok) < 3:
            raise SolutionParseError(f"line {lineno}: expected 'index name value'")
        name = tok[1]
        if name not in index:
            raise SolutionParseError(f"line {lineno}: unknown column {name!r}")
        try:
            values[index[name]] = float(tok[2])
        except ValueError:
            raise SolutionParseError(f"line {lineno}: bad value {tok[2]!r}") from None
    return status, objective, values


def _argv(backend: SolverBackend, model_path, sol_path):
    subs = {
        "model": model_path,
        "solution": sol_path,
        "time_limit": NO_LIMIT if backend.time_limit is None else repr(float(backend.time_limit)),
        "mip_gap": repr(float(backend.mip_gap)),
    }
    return [backend.resolve_executable()] + [a.format(**subs) for a in backend.args]


def solve_external(model: MilpModel, backend: SolverBackend | None = None):
    backend = backend or SolverBackend.external()
    if backend.dialect != "cbc":
        raise ValueError(f"unsupported solution-file dialect {backend.dialect!r}")
    start = time.perf_counter()
    columns, _ = mps_names(model)
    with tempfile.TemporaryDirectory(dir=backend.workdir) as tmp:
        model_path = os.path.join(tmp, "model.mps")
        sol_path = os.path.join(tmp, "model.sol")
        write_mps(model, model_path)
        argv = _argv(backend, model_path, sol_path)
        timeout = None if backend.time_limit is None else backend.time_limit + 60
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except FileNotFoundError as exc:
            raise SolverCrashed(f"could not launch {argv[0]!r}: {exc}; set DSCPSC_SOLVER or install cbc") from None
        except PermissionError as exc:
            raise SolverCrashed(f"could not launch {argv[0]!r}: {exc}") from None
        except subprocess.TimeoutExpired:
            raise TimeLimit(f"solver did not exit within {timeout}s") from None
        if proc.returncode != 0:
            tail = (proc.stdout + proc.stderr)[-2000:]
            raise SolverCrashed(f"{argv[0]} exited with status {proc.returncode}:\n{tail}")
        if not os.path.exists(sol_path):
            tail = proc.stdout[-2000:]
            raise SolutionParseError(f"solver wrote no solution file:\n{tail}")
        with open(sol_path, encoding="utf-8", errors="replace") as fh:
            text = fh.read()
    status, reported, raw = parse_cbc_solution(text, columns)
    elapsed = time.perf_counter() - start

    if status in ("infeasible", "unbounded"):
        st = Status.INFEASIBLE if status == "infeasible" else Status.UNBOUNDED
        return Solution({}, st), SolveLog("external", elapsed, 0, status, None, detail=text.splitlines()[0])

    values = {}
    for j, vdef in enumerate(model.vars):
        v = raw[j]
        if vdef.is_discrete and abs(v - round(v)) <= INTEGRALITY_TOL:
            v = float(round(v))
        values[VarId(j)] = v
    sol = Solution(values, Status.OPTIMAL if status == "optimal" else Status.FEASIBLE)
    sol.objective_values = {name: evaluate(o.expr, sol) for name, o in model.objectives.items()}
    objective = None
    if reported is not None and model.active_objective is not None:
        objective = -reported if model.objective.sense is ObjSense.MAX else reported
    log = SolveLog("external", elapsed, 0, status, objective if status == "optimal" else None,
                   objective=objective, detail=text.splitlines()[0])
    if status == "stopped":
        err = TimeLimit(f"solver stopped early: {text.splitlines()[0]}")
        err.solution, err.log = sol, log
        raise err
    bad = check_feasible(model, sol)
    if bad:
        raise NumericalFailure(f"external solution violates {len(bad)} rows, first {bad[0]}")
    return sol, log
