"""Solver-independent mixed-integer linear program representation.

Variables are referenced through :class:`VarId` handles. Arithmetic on handles
builds :class:`LinExpr` objects, so constraint generators can write
``2 * x + y - 3`` and get a sparse expression back.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import DuplicateName, MissingValue, UnknownVariable

INTEGRALITY_TOL = 1e-6
FEASIBILITY_TOL = 1e-6


class VarKind(str, enum.Enum):
    BINARY = "binary"
    INTEGER = "integer"
    CONTINUOUS = "continuous"
    BOUNDED = "continuous-bounded"

    @property
    def is_discrete(self):
        return self in (VarKind.BINARY, VarKind.INTEGER)


class Sense(str, enum.Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class ObjSense(str, enum.Enum):
    MAX = "max"
    MIN = "min"

    def flipped(self):
        return ObjSense.MIN if self is ObjSense.MAX else ObjSense.MAX


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ERROR = "error"

    @property
    def has_solution(self):
        return self in (Status.OPTIMAL, Status.FEASIBLE)


@dataclass(frozen=True, slots=True)
class VarId:
    """Opaque handle for a declared variable (its declaration index)."""

    index: int

    def _expr(self):
        return LinExpr({self.index: 1.0})

    def __add__(self, other):
        return self._expr() + other

    __radd__ = __add__

    def __sub__(self, other):
        return self._expr() - other

    def __rsub__(self, other):
        return other - self._expr()

    def __mul__(self, k):
        return self._expr() * k

    __rmul__ = __mul__

    def __neg__(self):
        return self._expr() * -1.0


@dataclass(frozen=True)
class VarDef:
    name: str
    kind: VarKind = VarKind.CONTINUOUS
    lower: float = 0.0
    upper: float | None = None

    def __post_init__(self):
        kind = VarKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is VarKind.BINARY:
            if self.lower != 0.0 or self.upper not in (None, 1, 1.0):
                raise ValueError(f"binary variable {self.name} must have bounds [0, 1]")
            object.__setattr__(self, "upper", 1.0)
        if kind in (VarKind.INTEGER, VarKind.CONTINUOUS) and self.lower < 0:
            raise ValueError(f"{kind.value} variable {self.name} must have lower bound >= 0")
        if self.upper is not None and self.upper < self.lower:
            raise ValueError(f"variable {self.name}: lower {self.lower} > upper {self.upper}")
        if math.isnan(self.lower) or (self.upper is not None and math.isnan(self.upper)):
            raise ValueError(f"variable {self.name}: NaN bound")

    @property
    def is_discrete(self):
        return self.kind.is_discrete


class LinExpr:
    """Sparse linear expression ``sum(coef * var) + constant``.

    Terms are keyed by variable index. Repeated variables merge additively and
    zero coefficients are dropped.
    """

    __slots__ = ("terms", "constant")

    def __init__(self, terms: Mapping[int, float] | None = None, constant: float = 0.0):
        self.terms: dict[int, float] = {}
        self.constant = float(constant)
        if terms:
            for j, c in terms.items():
                self.add_term(j, c)

    @classmethod
    def sum(cls, items: Iterable) -> "LinExpr":
        out = cls()
        for item in items:
            out += item
        return out

    def add_term(self, var, coef):
        j = var.index if isinstance(var, VarId) else int(var)
        coef = float(coef)
        if not math.isfinite(coef):
            raise ValueError(f"non-finite coefficient {coef} for variable index {j}")
        if coef == 0.0:
            return self
        new = self.terms.get(j, 0.0) + coef
        if new == 0.0:
            self.terms.pop(j, None)
        else:
            self.terms[j] = new
        return self

    def copy(self):
        out = LinExpr()
        out.terms = dict(self.terms)
        out.constant = self.constant
        return out

    def __iadd__(self, other):
        if isinstance(other, LinExpr):
            for j, c in other.terms.items():
                self.add_term(j, c)
            self.constant += other.constant
        elif isinstance(other, VarId):
            self.add_term(other, 1.0)
        else:
            self.constant += float(other)
        return self

    def __add__(self, other):
        return self.copy().__iadd__(other)

    __radd__ = __add__

    def __isub__(self, other):
        if isinstance(other, LinExpr):
            return self.__iadd__(other * -1.0)
        if isinstance(other, VarId):
            return self.add_term(other, -1.0)
        self.constant -= float(other)
        return self

    def __sub__(self, other):
        return self.copy().__isub__(other)

    def __rsub__(self, other):
        return (self * -1.0).__iadd__(other)

    def __mul__(self, k):
        k = float(k)
        out = LinExpr(constant=self.constant * k)
        if k != 0.0:
            out.terms = {j: c * k for j, c in self.terms.items()}
        return out

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, LinExpr):
            return NotImplemented
        return self.terms == other.terms and self.constant == other.constant

    def __repr__(self):
        body = " + ".join(f"{c:g}*v{j}" for j, c in self.terms.items()) or "0"
        return f"LinExpr({body} + {self.constant:g})"


@dataclass(frozen=True)
class Constraint:
    name: str
    expr: LinExpr
    sense: Sense
    rhs: float


@dataclass
class Objective:
    name: str
    expr: LinExpr
    sense: ObjSense


@dataclass
class Solution:
    values: dict[VarId, float]
    status: Status = Status.OPTIMAL
    objective_values: dict[str, float] = field(default_factory=dict)

    def value(self, var: VarId) -> float:
        try:
            return self.values[var]
        except KeyError:
            raise MissingValue(f"no value for variable index {var.index}") from None

    @classmethod
    def from_vector(cls, model: "MilpModel", x, status=Status.OPTIMAL):
        values = {VarId(j): float(x[j]) for j in range(model.var_count)}
        sol = cls(values, status)
        sol.objective_values = {name: evaluate(o.expr, sol) for name, o in model.objectives.items()}
        return sol

    def by_name(self, model: "MilpModel") -> dict[str, float]:
        return {model.vars[v.index].name: x for v, x in self.values.items()}


@dataclass(frozen=True)
class ViolatedConstraint:
    name: str
    residual: float
    kind: str = "row"  # "row", "bound" or "integrality"


class MilpModel:
    """Ordered variables, ordered constraints and named objectives."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.vars: list[VarDef] = []
        self.constraints: list[Constraint] = []
        self.objectives: dict[str, Objective] = {}
        self.active_objective: str | None = None
        self._var_index: dict[str, int] = {}
        self._con_names: set[str] = set()
        self.frozen = False
        self.meta: dict = {}

    # -- construction -------------------------------------------------
    def _check_open(self):
        if self.frozen:
            raise RuntimeError("model is finalized; copy() it to modify")

    def add_var(self, definition: VarDef | str, kind=VarKind.CONTINUOUS, lower=0.0, upper=None) -> VarId:
        self._check_open()
        if isinstance(definition, str):
            definition = VarDef(definition, kind, lower, upper)
        if definition.name in self._var_index:
            raise DuplicateName(f"variable {definition.name!r} already declared")
        self._var_index[definition.name] = len(self.vars)
        self.vars.append(definition)
        return VarId(len(self.vars) - 1)

    def add_constraint(self, name: str, expr, sense, rhs: float = 0.0) -> Constraint:
        self._check_open()
        if name in self._con_names:
            raise DuplicateName(f"constraint {name!r} already declared")
        expr = _as_expr(expr)
        self._check_refs(expr)
        rhs = float(rhs) - expr.constant
        if not math.isfinite(rhs):
            raise ValueError(f"constraint {name}: non-finite rhs")
        body = expr.copy()
        body.constant = 0.0
        con = Constraint(name, body, Sense(sense), rhs)
        self.constraints.append(con)
        self._con_names.add(name)
        return con

    def add_objective(self, name: str, expr, sense, activate: bool = False):
        self._check_open()
        expr = _as_expr(expr)
        self._check_refs(expr)
        self.objectives[name] = Objective(name, expr, ObjSense(sense))
        if activate or self.active_objective is None:
            self.active_objective = name

    def set_active(self, name: str, sense=None):
        if name not in self.objectives:
            raise KeyError(f"unknown objective {name!r}")
        self.active_objective = name
        if sense is not None:
            self.objectives[name].sense = ObjSense(sense)

    def finalize(self):
        self.frozen = True
        return self

    def copy(self) -> "MilpModel":
        out = MilpModel(self.name)
        out.vars = list(self.vars)
        out.constraints = list(self.constraints)
        out.objectives = {
            k: Objective(o.name, o.expr.copy(), o.sense) for k, o in self.objectives.items()
        }
        out.active_objective = self.active_objective
        out._var_index = dict(self._var_index)
        out._con_names = set(self._con_names)
        out.meta = dict(self.meta)
        return out

    def with_objective(self, name: str, sense=None) -> "MilpModel":
        """Copy with ``name`` active, optionally overriding its sense."""
        out = self.copy()
        out.set_active(name, sense)
        return out

    def _check_refs(self, expr: LinExpr):
        n = len(self.vars)
        for j in expr.terms:
            if not 0 <= j < n:
                raise UnknownVariable(f"expression references undeclared variable index {j}")

    # -- queries -------------------------------------------------------
    @property
    def var_count(self):
        return len(self.vars)

    def var(self, name: str) -> VarId:
        try:
            return VarId(self._var_index[name])
        except KeyError:
            raise UnknownVariable(name) from None

    def has_var(self, name: str) -> bool:
        return name in self._var_index

    def var_def(self, var: VarId) -> VarDef:
        return self.vars[var.index]

    def constraint(self, name: str) -> Constraint:
        for con in self.constraints:
            if con.name == name:
                return con
        raise KeyError(name)

    @property
    def objective(self) -> Objective:
        if self.active_objective is None:
            raise ValueError("model has no objective")
        return self.objectives[self.active_objective]

    def discrete_vars(self) -> list[VarId]:
        return [VarId(j) for j, v in enumerate(self.vars) if v.is_discrete]

    def __repr__(self):
        return (
            f"MilpModel({self.name!r}, vars={len(self.vars)}, "
            f"constraints={len(self.constraints)}, objectives={list(self.objectives)})"
        )


def _as_expr(expr) -> LinExpr:
    if isinstance(expr, LinExpr):
        return expr
    if isinstance(expr, VarId):
        return expr._expr()
    return LinExpr(constant=float(expr))


def evaluate(expr, sol: Solution) -> float:
    """Exactly rounded value of ``expr`` at ``sol`` (order independent)."""
    expr = _as_expr(expr)
    parts = [expr.constant]
    values = sol.values
    for j, c in expr.terms.items():
        try:
            parts.append(c * values[VarId(j)])
        except KeyError:
            raise MissingValue(f"no value for variable index {j}") from None
    return math.fsum(parts)


def row_residual(con: Constraint, sol: Solution) -> tuple[float, float]:
    """Return ``(residual, scale)`` for one row; residual is >= 0."""
    values = sol.values
    parts = []
    for j, c in con.expr.terms.items():
        try:
            parts.append(c * values[VarId(j)])
        except KeyError:
            raise MissingValue(f"constraint {con.name}: no value for variable index {j}") from None
    act = math.fsum(parts)
    diff = act - con.rhs
    if con.sense is Sense.LE:
        res = max(0.0, diff)
    elif con.sense is Sense.GE:
        res = max(0.0, -diff)
    else:
        res = abs(diff)
    scale = max([1.0, abs(con.rhs)] + [abs(p) for p in parts])
    return res, scale


def check_feasible(
    model: MilpModel, sol: Solution, tol: float = FEASIBILITY_TOL, int_tol: float = INTEGRALITY_TOL
) -> list[ViolatedConstraint]:
    """Every row, bound or integrality requirement ``sol`` violates beyond ``tol``.

    Row tolerance is relative to the largest of 1, ``|rhs|`` and the biggest
    term magnitude in the row; the reported residual is absolute.
    """
    out: list[ViolatedConstraint] = []
    for j, vdef in enumerate(model.vars):
        try:
            x = sol.values[VarId(j)]
        except KeyError:
            raise MissingValue(f"no value for variable {vdef.name!r}") from None
        scale = max(1.0, abs(x))
        if x < vdef.lower - tol * scale:
            out.append(ViolatedConstraint(vdef.name, vdef.lower - x, "bound"))
        elif vdef.upper is not None and x > vdef.upper + tol * scale:
            out.append(ViolatedConstraint(vdef.name, x - vdef.upper, "bound"))
        if vdef.is_discrete:
            gap = abs(x - round(x))
            if gap > int_tol:
                out.append(ViolatedConstraint(vdef.name, gap, "integrality"))
    for con in model.constraints:
        res, scale = row_residual(con, sol)
        if res > tol * scale:
            out.append(ViolatedConstraint(con.name, res))
    return out
