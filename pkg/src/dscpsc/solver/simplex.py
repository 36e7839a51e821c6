"""Dense two-phase tableau simplex.

The same code runs on float64 arrays and on object arrays of
:class:`fractions.Fraction`; with fractions every pivot is exact and the
zero tolerance is 0.

Problem form: maximize ``c @ x`` subject to ``A @ x (sense) b`` and ``x >= 0``
where ``sense`` is -1 for <=, 0 for = and +1 for >=.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import NumericalFailure

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

FLOAT_EPS = 1e-9


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None
    value: object = None
    pivots: int = 0


def _to_fraction_array(a):
    a = np.asarray(a, dtype=object)
    out = np.empty(a.shape, dtype=object)
    flat_in, flat_out = a.reshape(-1), out.reshape(-1)
    for i, v in enumerate(flat_in):
        flat_out[i] = v if isinstance(v, Fraction) else Fraction(v)
    return out


class _Tableau:
    def __init__(self, T, basis, exact, bland_after, limit):
        self.T = T
        self.basis = basis
        self.exact = exact
        self.eps = 0 if exact else FLOAT_EPS
        self.bland_after = bland_after
        self.limit = limit
        self.pivots = 0

    def pivot(self, r, j):
        T = self.T
        T[r] = T[r] / T[r, j]
        col = T[:, j].copy()
        col[r] = 0
        T -= np.outer(col, T[r])
        if not self.exact:
            T[:, j] = 0.0
            T[r, j] = 1.0
        self.basis[r] = j
        self.pivots += 1
        if self.pivots > self.limit:
            raise NumericalFailure(f"simplex exceeded {self.limit} pivots (cycling guard)")

    def run(self, ncols):
        """Pivot to optimality over the first ``ncols`` columns."""
        T, eps = self.T, self.eps
        local = 0
        while True:
            obj = T[-1, :ncols]
            neg = np.flatnonzero((obj < -eps).astype(bool))
            if neg.size == 0:
                return OPTIMAL
            if local >= self.bland_after:
                j = int(neg[0])
            else:
                j = int(neg[np.argmin(obj[neg])])
            col = T[:-1, j]
            rows = np.flatnonzero((col > eps).astype(bool))
            if rows.size == 0:
                return UNBOUNDED
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            if self.exact:
                ties = rows[(ratios == best).astype(bool)]
            else:
                ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, j)
            local += 1


def solve_lp(c, A, senses, b, exact=False, max_pivots=None) -> LPResult:
    """Maximize ``c @ x`` over ``{x >= 0 : A x (senses) b}``."""
    if exact:
        c, A, b = _to_fraction_array(c), _to_fraction_array(A), _to_fraction_array(b)
        zero, one, dtype = Fraction(0), Fraction(1), object
    else:
        c, A, b = (np.asarray(v, dtype=float) for v in (c, A, b))
        zero, one, dtype = 0.0, 1.0, float
    senses = np.asarray(senses, dtype=int).copy()
    m, n = A.shape if A.ndim == 2 else (0, len(c))
    A = A.reshape(m, n).copy()
    b = b.reshape(m).copy()

    flip = (b < 0).astype(bool)
    A[flip] = -A[flip]
    b[flip] = -b[flip]
    senses[flip] = -senses[flip]

    n_slack = int(np.count_nonzero(senses != 0))
    needs_art = senses >= 0
    n_art = int(np.count_nonzero(needs_art))
    ncols = n + n_slack + n_art
    T = np.empty((m + 1, ncols + 1), dtype=dtype)
    T[...] = zero
    T[:m, :n] = A
    T[:m, -1] = b
    basis = [0] * m
    s = n
    a = n + n_slack
    for i in range(m):
        if senses[i] == -1:
            T[i, s] = one
            basis[i] = s
            s += 1
        elif senses[i] == 1:
            T[i, s] = -one
            s += 1
        if needs_art[i]:
            T[i, a] = one
            basis[i] = a
            a += 1

    limit = max_pivots or (50 * (m + ncols) + 1000)
    tab = _Tableau(T, basis, exact, 3 * max(m, 1), limit)
    n_real = n + n_slack

    if n_art:
        T[-1, n_real:ncols] = one
        for i in range(m):
            if basis[i] >= n_real:
                T[-1] -= T[i]
        tab.run(ncols)
        scale = max([1.0] + [abs(float(v)) for v in b])
        infeas = T[-1, -1]
        if (infeas < -FLOAT_EPS * scale) if not exact else (infeas < 0):
            return LPResult(INFEASIBLE, None, pivots=tab.pivots)
        redundant = []
        for i in range(m):
            if basis[i] >= n_real:
                row = T[i, :n_real]
                cand = np.flatnonzero((abs(row) > tab.eps).astype(bool))
                if cand.size:
                    tab.pivot(i, int(cand[0]))
                else:
                    redundant.append(i)
        keep = [i for i in range(m) if i not in redundant] + [m]
        T = np.concatenate([T[keep][:, :n_real], T[keep][:, -1:]], axis=1)
        basis = [basis[i] for i in keep[:-1]]
        tab.T, tab.basis = T, basis

    T = tab.T
    T[-1] = zero
    T[-1, :n] = -c
    for i, j in enumerate(tab.basis):
        coef = T[-1, j]
        if coef != 0:
            T[-1] -= coef * T[i]
    status = tab.run(n_real)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, pivots=tab.pivots)
    x = np.empty(n, dtype=dtype)
    x[...] = zero
    for i, j in enumerate(tab.basis):
        if j < n:
            x[j] = T[i, -1]
    if not exact:
        np.maximum(x, 0.0, out=x)
    return LPResult(OPTIMAL, x, T[-1, -1], tab.pivots)
