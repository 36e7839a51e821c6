from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dscpsc.solver.simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_lp


def _solve_square(A, b):
    """Gauss-Jordan over Fractions; None when singular."""
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def vertex_oracle(c, A, senses, b):
    """Best objective over all basic feasible points, or None if there are none."""
    n = len(c)
    rows = [(list(A[i]), senses[i], b[i]) for i in range(len(A))]
    rows += [([int(i == j) for i in range(n)], 1, 0) for j in range(n)]
    best = None
    for pick in combinations(range(len(rows)), n):
        x = _solve_square([rows[i][0] for i in pick], [rows[i][2] for i in pick])
        if x is None:
            continue
        ok = True
        for a, s, bi in rows:
            act = sum(Fraction(ai) * xi for ai, xi in zip(a, x))
            if (s < 0 and act > bi) or (s > 0 and act < bi) or (s == 0 and act != bi):
                ok = False
                break
        if ok:
            val = sum(Fraction(ci) * xi for ci, xi in zip(c, x))
            best = val if best is None or val > best else best
    return best


def test_hand_lp():
    # max 3x + 2y : x + y <= 4, x <= 2
    res = solve_lp([3, 2], [[1, 1], [1, 0]], [-1, -1], [4, 2])
    assert res.status == OPTIMAL
    assert np.allclose(res.x, [2, 2])
    assert res.value == pytest.approx(10)


def test_hand_lp_exact():
    res = solve_lp([3, 2], [[1, 1], [1, 0]], [-1, -1], [4, 2], exact=True)
    assert res.value == Fraction(10)
    assert list(res.x) == [2, 2]


def test_infeasible():
    res = solve_lp([1], [[1], [1]], [1, -1], [2, 1])
    assert res.status == INFEASIBLE


def test_unbounded():
    res = solve_lp([1, 1], [[1, -1]], [-1], [1])
    assert res.status == UNBOUNDED


def test_equality_and_negative_rhs():
    # max -x - y : x - y = -1, x + y >= 3  -> x=1, y=2
    res = solve_lp([-1, -1], [[1, -1], [1, 1]], [0, 1], [-1, 3], exact=True)
    assert res.status == OPTIMAL
    assert res.value == Fraction(-3)


def test_degenerate_cycling_example():
    # Beale's example cycles under pure Dantzig pricing
    c = [Fraction(3, 4), -150, Fraction(1, 50), -6]
    A = [[Fraction(1, 4), -60, Fraction(-1, 25), 9], [Fraction(1, 2), -90, Fraction(-1, 50), 3], [0, 0, 1, 0]]
    res = solve_lp(c, A, [-1, -1, -1], [0, 0, 1], exact=True)
    assert res.status == OPTIMAL
    assert res.value == Fraction(1, 20)


small = st.integers(-4, 4)


@st.composite
def bounded_lp(draw):
    n = draw(st.integers(1, 4))
    m = draw(st.integers(0, 3))
    c = draw(st.lists(small, min_size=n, max_size=n))
    A = [draw(st.lists(small, min_size=n, max_size=n)) for _ in range(m)]
    senses = draw(st.lists(st.sampled_from([-1, 0, 1]), min_size=m, max_size=m))
    b = draw(st.lists(st.integers(-6, 6), min_size=m, max_size=m))
    # box keeps every instance bounded
    for j in range(n):
        A.append([int(i == j) for i in range(n)])
        senses.append(-1)
        b.append(draw(st.integers(1, 5)))
    return c, A, senses, b


@settings(max_examples=150, deadline=None)
@given(bounded_lp())
def test_random_lp_matches_vertex_oracle(lp):
    c, A, senses, b = lp
    want = vertex_oracle(c, A, senses, b)
    exact = solve_lp(c, A, senses, b, exact=True)
    flt = solve_lp(c, A, senses, b)
    if want is None:
        assert exact.status == INFEASIBLE
        assert flt.status == INFEASIBLE
    else:
        assert exact.status == OPTIMAL and exact.value == want
        assert flt.status == OPTIMAL and abs(flt.value - float(want)) <= 1e-9 * max(1.0, abs(float(want)))
