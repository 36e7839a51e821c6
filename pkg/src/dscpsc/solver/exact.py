"""Embedded oracle: implicit enumeration of discrete assignments over an exact LP.

Discrete assignments are explored depth-first in lexicographic order of the
discrete variables (declaration order), each node splitting the first unfixed
variable's domain into a lower and an upper half. The optimal value is found
first by a best-first search branching on the most fractional variable; the
depth-first pass then returns the first assignment reaching it, so ties go to
the lexicographically smallest assignment.
"""

from __future__ import annotations

import heapq
import math
import time
from fractions import Fraction

import numpy as np

from ..errors import BudgetExceeded, NumericalFailure
from ..milp import INTEGRALITY_TOL, MilpModel, ObjSense, Sense, Solution, Status, VarId, evaluate
from . import simplex
from .backend import SolveLog, SolverBackend

SENSE_CODE = {Sense.LE: -1, Sense.EQ: 0, Sense.GE: 1}


class _Compiled:
    """Dense arrays for one model; restrictions to variable boxes are built from it."""

    def __init__(self, model: MilpModel, exact: bool):
        self.exact = exact
        n, m = model.var_count, len(model.constraints)
        self.n, self.m = n, m
        A = np.zeros((m, n))
        b = np.zeros(m)
        senses = np.zeros(m, dtype=int)
        for i, con in enumerate(model.constraints):
            for j, a in con.expr.terms.items():
                A[i, j] = a
            b[i] = con.rhs
            senses[i] = SENSE_CODE[con.sense]
        obj = model.objective
        sign = 1 if obj.sense is ObjSense.MAX else -1
        c = np.zeros(n)
        for j, a in obj.expr.terms.items():
            c[j] = sign * a
        self.sign = sign
        self.A, self.b, self.senses, self.c = A, b, senses, c
        self.const = sign * obj.expr.constant
        lo = np.array([v.lower for v in model.vars], dtype=float)
        hi = np.array([math.inf if v.upper is None else v.upper for v in model.vars], dtype=float)
        self.discrete = np.array([j for j, v in enumerate(model.vars) if v.is_discrete], dtype=int)
        lo[self.discrete] = np.ceil(lo[self.discrete] - INTEGRALITY_TOL)
        hi[self.discrete] = np.floor(hi[self.discrete] + INTEGRALITY_TOL)
        self.lo, self.hi = lo, hi
        if exact:
            self.fA = [[Fraction(v) for v in row] for row in A]
        self.lp_count = 0

    def value(self, x):
        if self.exact:
            return sum((Fraction(self.c[j]) * x[j] for j in range(self.n) if self.c[j]), Fraction(self.const))
        return math.fsum(self.c * x) + self.const

    def solve_box(self, lo, hi):
        """Optimal ``(x, value)`` of the LP restricted to ``lo <= x <= hi``, or a status string."""
        self.lp_count += 1
        if np.any(lo > hi):
            return simplex.INFEASIBLE
        A, b, senses, c = self.A, self.b, self.senses, self.c
        free = lo < hi
        if self.exact:
            return self._solve_box_exact(lo, hi, free)
        width = np.where(free, hi - lo, 0.0)
        rhs = b - A @ lo
        Af = A[:, free]
        w = width[free]
        wf = np.where(np.isfinite(w), w, 0.0)
        pos = np.where(Af > 0, Af, 0.0)
        neg = np.where(Af < 0, Af, 0.0)
        inf_cols = ~np.isfinite(w)
        max_act = pos @ wf
        min_act = neg @ wf
        if inf_cols.any():
            max_act = np.where((pos[:, inf_cols] > 0).any(axis=1), math.inf, max_act)
            min_act = np.where((neg[:, inf_cols] < 0).any(axis=1), -math.inf, min_act)
        scale = np.maximum(1.0, np.abs(rhs)) * 1e-9
        le, ge = senses <= 0, senses >= 0
        if np.any(le & (min_act > rhs + scale)) or np.any(ge & (max_act < rhs - scale)):
            return simplex.INFEASIBLE
        redundant = np.where(senses < 0, max_act <= rhs + scale, False)
        redundant |= np.where(senses > 0, min_act >= rhs - scale, False)
        redundant |= (max_act == 0) & (min_act == 0)
        keep = ~redundant
        Ar = Af[keep]
        cf = c[free]
        used = np.any(Ar != 0, axis=0)
        x = lo.copy()
        free_idx = np.flatnonzero(free)
        # columns that no remaining row touches go straight to their best bound
        for jj in np.flatnonzero(~used):
            if cf[jj] > 0:
                if not np.isfinite(w[jj]):
                    return simplex.UNBOUNDED
                x[free_idx[jj]] = hi[free_idx[jj]]
        cols = np.flatnonzero(used)
        if cols.size == 0:
            return x, self.value(x)
        Au = Ar[:, cols]
        wu = w[cols]
        ub_cols = np.flatnonzero(np.isfinite(wu))
        ub_rows = np.zeros((ub_cols.size, cols.size))
        ub_rows[np.arange(ub_cols.size), ub_cols] = 1.0
        A_lp = np.vstack([Au, ub_rows])
        b_lp = np.concatenate([rhs[keep], wu[ub_cols]])
        s_lp = np.concatenate([senses[keep], -np.ones(ub_cols.size, dtype=int)])
        res = simplex.solve_lp(cf[cols], A_lp, s_lp, b_lp)
        if res.status != simplex.OPTIMAL:
            return res.status
        x[free_idx[cols]] += res.x
        return x, self.value(x)

    def _solve_box_exact(self, lo, hi, free):
        n = self.n
        flo = [Fraction(v) for v in lo]
        free_idx = [j for j in range(n) if free[j]]
        rows, rhs, senses = [], [], []
        for i in range(self.m):
            row = self.fA[i]
            r = Fraction(self.b[i]) - sum((row[j] * flo[j] for j in range(n) if row[j]), Fraction(0))
            coefs = [row[j] for j in free_idx]
            if not any(coefs):
                s = self.senses[i]
                if (s <= 0 and r < 0) or (s >= 0 and r > 0):
                    return simplex.INFEASIBLE
                continue
            rows.append(coefs)
            rhs.append(r)
            senses.append(self.senses[i])
        for k, j in enumerate(free_idx):
            if math.isfinite(hi[j]):
                unit = [Fraction(0)] * len(free_idx)
                unit[k] = Fraction(1)
                rows.append(unit)
                rhs.append(Fraction(hi[j]) - flo[j])
                senses.append(-1)
        x = np.array(flo, dtype=object)
        if not free_idx:
            return x, self.value(x)
        A_lp = np.array(rows, dtype=object).reshape(len(rows), len(free_idx))
        res = simplex.solve_lp([self.c[j] for j in free_idx], A_lp, senses, rhs, exact=True)
        if res.status != simplex.OPTIMAL:
            return res.status
        for k, j in enumerate(free_idx):
            x[j] = flo[j] + res.x[k]
        return x, self.value(x)


class _Search:
    def __init__(self, comp: _Compiled):
        self.comp = comp
        self.nodes = 0
        self.best = None  # (x, value)

    def _tol(self, v):
        return 0 if self.comp.exact else 1e-9 * max(1.0, abs(float(v)))

    def _contains(self, lo, hi, x):
        d = self.comp.discrete
        if self.comp.exact:
            return all(lo[j] <= x[j] <= hi[j] for j in d)
        xd = x[d]
        return bool(np.all((xd >= lo[d] - INTEGRALITY_TOL) & (xd <= hi[d] + INTEGRALITY_TOL)))

    def _eval(self, lo, hi, parent):
        self.nodes += 1
        if parent is not None and self._contains(lo, hi, parent[0]):
            return parent
        return self.comp.solve_box(lo, hi)

    def _children(self, lo, hi, x):
        d = self.comp.discrete
        for j in d:
            if lo[j] < hi[j]:
                break
        else:
            return None
        if math.isfinite(hi[j]):
            mid = math.floor((lo[j] + hi[j]) / 2)
        else:
            mid = max(lo[j], math.floor(float(x[j])))
        left_hi = hi.copy()
        left_hi[j] = mid
        right_lo = lo.copy()
        right_lo[j] = mid + 1
        return (lo, left_hi), (right_lo, hi)

    def _fractional(self, lo, hi, x):
        """Unfixed discrete variable farthest from an integer, or None when all are integral."""
        best, gap = None, INTEGRALITY_TOL
        for j in self.comp.discrete:
            if lo[j] < hi[j]:
                f = float(x[j] - math.floor(x[j]))
                f = min(f, 1.0 - f)
                if f > gap:
                    best, gap = j, f
        return best

    def _optimal_value(self, root):
        """Best-first search for the optimal objective value only."""
        comp = self.comp
        best = None
        heap = [(-float(root[1]), 0, comp.lo, comp.hi, root)]
        tick = 1
        while heap:
            _, _, lo, hi, res = heapq.heappop(heap)
            x, val = res
            if best is not None and val <= best + self._tol(best):
                continue
            j = self._fractional(lo, hi, x)
            if j is None:
                best = val
                continue
            split = math.floor(x[j])
            down_hi, up_lo = hi.copy(), lo.copy()
            down_hi[j], up_lo[j] = split, split + 1
            for blo, bhi in ((lo, down_hi), (up_lo, hi)):
                self.nodes += 1
                kid = comp.solve_box(blo, bhi)
                if isinstance(kid, str):
                    if kid == simplex.UNBOUNDED:
                        raise NumericalFailure("restricted LP unbounded under a bounded root relaxation")
                    continue
                if best is None or kid[1] > best + self._tol(best):
                    heapq.heappush(heap, (-float(kid[1]), tick, blo, bhi, kid))
                    tick += 1
        return best

    def run(self):
        comp = self.comp
        root = self._eval(comp.lo, comp.hi, None)
        if root == simplex.UNBOUNDED:
            return Status.UNBOUNDED
        if isinstance(root, str):
            return Status.INFEASIBLE
        # the value first, then the lexicographically first assignment reaching it
        value = self._optimal_value(root)
        if value is None:
            return Status.INFEASIBLE
        self.best = self._dive(comp.lo, comp.hi, root, value - self._tol(value))
        return Status.OPTIMAL

    def _dive(self, lo, hi, res, target):
        """First leaf in lexicographic order below this node reaching ``target``."""
        stack = [(lo, hi, None, res)]
        while stack:
            lo, hi, parent, res = stack.pop()
            if res is None:
                res = self._eval(lo, hi, parent)
            if isinstance(res, str):
                continue
            x, val = res
            if val < target:
                continue
            kids = self._children(lo, hi, x)
            if kids is None:
                return res
            (llo, lhi), (rlo, rhi) = kids
            stack.append((rlo, rhi, res, None))
            stack.append((llo, lhi, res, None))
        raise NumericalFailure("integral relaxation has no matching completion")


def solve_exact_tiny(model: MilpModel, backend: SolverBackend | None = None):
    """Globally optimal solution of a small model by implicit enumeration."""
    backend = backend or SolverBackend.embedded()
    start = time.perf_counter()
    n_disc = len(model.discrete_vars())
    if n_disc > backend.max_discrete:
        raise BudgetExceeded(
            f"model has {n_disc} discrete variables; embedded budget is {backend.max_discrete}"
        )
    comp = _Compiled(model, backend.rational)
    search = _Search(comp)
    status = search.run()
    if status is not Status.OPTIMAL:
        log = SolveLog("embedded-exact", time.perf_counter() - start, search.nodes, status.value, None, comp.lp_count)
        return Solution({}, status), log
    x, val = search.best
    values = {}
    disc = set(comp.discrete.tolist())
    for j in range(comp.n):
        v = x[j]
        if j in disc:
            v = round(v)
        values[VarId(j)] = float(v)
    sol = Solution(values, Status.OPTIMAL)
    sol.objective_values = {name: evaluate(o.expr, sol) for name, o in model.objectives.items()}
    obj = sol.objective_values[model.active_objective]
    log = SolveLog("embedded-exact", time.perf_counter() - start, search.nodes, "optimal", obj, comp.lp_count)
    log.objective = obj
    if comp.exact:
        log.exact_objective = comp.sign * val
    return sol, log
