"""Zimmermann max-min scalarization of the profit / pollution / jobs objectives.

Each objective is solved alone in both directions to get its range
``[f_minus, f_star]`` over the feasible set. The scalarized model maximizes a
common satisfaction level ``lambda`` subject to one linkage row per objective:

* max-sense: ``f(x) >= f_minus + lambda * (f_star - f_minus)``
* min-sense: ``g(x) <= g_star - lambda * (g_star - g_minus)``
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

from .errors import DegenerateBounds, InfeasibleModel, UnboundedObjective
from .milp import LinExpr, ObjSense, Sense, Status, VarKind, evaluate
from .model import BuildOptions, build_model
from .solver import SolverBackend, solve

LAMBDA = "lambda"
LAMBDA_OBJECTIVE = "fuzzy_lambda"
LINK_PREFIX = "fuzzy"
CHAIN_OBJECTIVES = ("profit_total", "pollution_total", "jobs_total")
DEGENERATE_RTOL = 1e-9


@dataclass(frozen=True)
class Bound:
    """Range of one objective: ``f_star`` is its maximum and ``f_minus`` its minimum."""

    name: str
    sense: ObjSense
    f_star: float
    f_minus: float

    @property
    def ideal(self):
        return self.f_star if self.sense is ObjSense.MAX else self.f_minus

    @property
    def anti_ideal(self):
        return self.f_minus if self.sense is ObjSense.MAX else self.f_star

    @property
    def width(self):
        return self.f_star - self.f_minus

    @property
    def degenerate(self):
        return abs(self.width) <= DEGENERATE_RTOL * max(1.0, abs(self.f_star), abs(self.f_minus))

    def to_dict(self):
        return {"sense": self.sense.value, "f_star": self.f_star, "f_minus": self.f_minus,
                "ideal": self.ideal, "anti_ideal": self.anti_ideal, "degenerate": self.degenerate}


@dataclass
class ObjectiveBounds:
    bounds: dict = field(default_factory=dict)
    solves: int = 0

    def __getitem__(self, name) -> Bound:
        return self.bounds[name]

    def __iter__(self):
        return iter(self.bounds.values())

    def names(self):
        return list(self.bounds)

    def to_dict(self):
        return {name: b.to_dict() for name, b in self.bounds.items()}


def membership(value: float, bound: Bound) -> float:
    """Piecewise-linear satisfaction degree in [0, 1]."""
    if bound.degenerate:
        raise DegenerateBounds(bound.name)
    if bound.sense is ObjSense.MAX:
        mu = (value - bound.f_minus) / bound.width
    else:
        mu = (bound.f_star - value) / bound.width
    return min(max(mu, 0), 1)


def _extreme(model, name, sense, backend):
    sol, log = solve(model.with_objective(name, sense), backend)
    if sol.status is Status.INFEASIBLE:
        raise InfeasibleModel(f"model is infeasible (while bounding {name!r})")
    if sol.status is Status.UNBOUNDED:
        raise UnboundedObjective(name)
    return sol.objective_values[name], log


def compute_bounds(model, objectives, backend=None, logs=None) -> ObjectiveBounds:
    """Two single-objective solves (max and min) per objective."""
    out = ObjectiveBounds()
    for name in objectives:
        sense = model.objectives[name].sense
        hi, log_hi = _extreme(model, name, ObjSense.MAX, backend)
        lo, log_lo = _extreme(model, name, ObjSense.MIN, backend)
        out.solves += 2
        if logs is not None:
            logs += [log_hi, log_lo]
        # guard against solver round-off making the range inverted
        out.bounds[name] = Bound(name, sense, max(hi, lo), min(hi, lo))
    return out


def scalarize(model, bounds: ObjectiveBounds, strict=False):
    """Copy of ``model`` with variable ``lambda``, one linkage row per objective and objective max lambda.

    Degenerate objectives are left out (membership 1) with a warning, or raise
    ``DegenerateBounds`` when ``strict``. Returns ``(model, warnings)``.
    """
    out = model.copy()
    notes = []
    lam = out.add_var(LAMBDA, VarKind.BOUNDED, 0.0, 1.0)
    for b in bounds:
        if b.degenerate:
            if strict:
                raise DegenerateBounds(b.name)
            notes.append(f"objective {b.name} is constant ({b.f_star:g}); membership fixed at 1, no linkage row")
            continue
        expr = out.objectives[b.name].expr.copy()
        if b.sense is ObjSense.MAX:
            expr.add_term(lam, -b.width)
            out.add_constraint(f"{LINK_PREFIX}[{b.name}]", expr, Sense.GE, b.f_minus)
        else:
            expr.add_term(lam, b.width)
            out.add_constraint(f"{LINK_PREFIX}[{b.name}]", expr, Sense.LE, b.f_star)
    out.add_objective(LAMBDA_OBJECTIVE, LinExpr({lam.index: 1.0}), ObjSense.MAX, activate=True)
    out.meta["scalarized_from"] = model.active_objective
    out.meta["scalarized_rows"] = len(out.constraints) - len(model.constraints)
    for msg in notes:
        warnings.warn(msg, stacklevel=2)
    return out.finalize(), notes


def strip_scalarization(model):
    """Inverse of :func:`scalarize`."""
    if LAMBDA_OBJECTIVE not in model.objectives:
        raise ValueError("model is not scalarized")
    out = model.copy()
    k = out.meta.pop("scalarized_rows")
    base = out.meta.pop("scalarized_from")
    for con in out.constraints[len(out.constraints) - k:]:
        out._con_names.discard(con.name)
    del out.constraints[len(out.constraints) - k:]
    out.vars.pop()
    del out._var_index[LAMBDA]
    del out.objectives[LAMBDA_OBJECTIVE]
    out.active_objective = base
    return out.finalize()


def objective_names(model, mode="chain", stakeholders=()):
    if mode == "chain":
        return list(CHAIN_OBJECTIVES)
    if mode == "per-stakeholder":
        return [f"{kind}[{e}]" for e in stakeholders for kind in ("profit", "pollution", "jobs")]
    raise ValueError(f"unknown objective mode {mode!r}")


@dataclass
class FuzzyReport:
    status: Status
    mode: str
    bounds: ObjectiveBounds | None = None
    lambda_: float | None = None
    memberships: dict = field(default_factory=dict)
    stakeholders: dict = field(default_factory=dict)  # e -> {"profit", "pollution", "jobs"}
    totals: dict = field(default_factory=dict)
    costs: object = None
    solution: object = None
    model: object = None
    built: object = None
    logs: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    detail: str = ""

    @property
    def solver_calls(self):
        return len(self.logs)

    def to_dict(self):
        return {
            "status": self.status.value,
            "mode": self.mode,
            "lambda": self.lambda_,
            "bounds": self.bounds.to_dict() if self.bounds else None,
            "memberships": self.memberships,
            "stakeholders": {str(e): v for e, v in self.stakeholders.items()},
            "totals": self.totals,
            "costs": self.costs.to_dict() if self.costs is not None else None,
            "solver_calls": self.solver_calls,
            "warnings": self.warnings,
            "detail": self.detail,
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)

    def render_table(self):
        """Stakeholder rows with profit, pollution and jobs, then lambda."""
        head = f"{'Stakeholder':<14}{'Profit P_e':>16}{'Pollution Pul_e':>18}{'Jobs S_e':>14}"
        lines = [head, "-" * len(head)]
        for e, v in self.stakeholders.items():
            lines.append(f"{str(e):<14}{v['profit']:>16.6g}{v['pollution']:>18.6g}{v['jobs']:>14.6g}")
        lam = "n/a" if self.lambda_ is None else f"{self.lambda_:.5f}"
        lines.append("-" * len(head))
        lines.append(f"lambda = {lam}   status = {self.status.value}")
        return "\n".join(lines)


def solve_fuzzy(instance, backend: SolverBackend | None = None, mode="chain", strict=False,
                bounds: ObjectiveBounds | None = None, options: BuildOptions | None = None, built=None):
    """Build, bound, scalarize and solve; ``bounds`` skips the bounding solves."""
    built = built or build_model(instance, options)
    model = built.model
    E = built.scope.sets.E
    names = objective_names(model, mode, E)
    report = FuzzyReport(Status.ERROR, mode, built=built)
    if bounds is None:
        try:
            bounds = compute_bounds(model, names, backend, report.logs)
        except InfeasibleModel as exc:
            report.status, report.detail = Status.INFEASIBLE, str(exc)
            return report
        except UnboundedObjective as exc:
            report.status, report.detail = Status.UNBOUNDED, str(exc)
            return report
    report.bounds = bounds
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        scal, report.warnings = scalarize(model, bounds, strict)
    sol, log = solve(scal, backend)
    report.logs.append(log)
    report.model, report.status = scal, sol.status
    if not sol.status.has_solution:
        report.detail = f"scalarized model {sol.status.value}"
        return report
    report.solution = sol
    report.lambda_ = sol.value(scal.var(LAMBDA))
    for b in bounds:
        value = evaluate(model.objectives[b.name].expr, sol)
        report.memberships[b.name] = 1.0 if b.degenerate else membership(value, b)
    for e in E:
        report.stakeholders[e] = {
            kind: evaluate(model.objectives[f"{kind}[{e}]"].expr, sol) for kind in ("profit", "pollution", "jobs")
        }
    report.totals = {name: evaluate(model.objectives[name].expr, sol) for name in CHAIN_OBJECTIVES}
    report.costs = built.objectives.breakdown(sol)
    return report
