import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dscpsc.errors import DegenerateBounds, UnboundedObjective
from dscpsc.fuzzy import (
    LAMBDA, Bound, ObjectiveBounds, compute_bounds, membership, scalarize, solve_fuzzy, strip_scalarization,
)
from dscpsc.milp import LinExpr, MilpModel, ObjSense, Sense, Status, VarKind, check_feasible, evaluate
from dscpsc.solver import mps_string, solve
from dscpsc.synthetic import reference_tiny, tiny_instance

MAX, MIN = ObjSense.MAX, ObjSense.MIN


def toy(upper=10.0):
    m = MilpModel("toy")
    x = m.add_var("x", VarKind.BOUNDED, 0.0, upper)
    m.add_objective("f", x._expr(), MAX)
    m.add_objective("g", x._expr(), MIN)
    return m.finalize(), x


def test_membership_examples():
    assert membership(6, Bound("f", MAX, 10, 2)) == 0.5
    assert membership(10, Bound("f", MAX, 10, 2)) == 1
    assert membership(2, Bound("f", MAX, 10, 2)) == 0
    assert membership(2, Bound("g", MIN, 8, 0)) == 0.75


def test_membership_clamped_and_degenerate():
    assert membership(20, Bound("f", MAX, 10, 2)) == 1
    assert membership(-1, Bound("g", MIN, 8, 0)) == 1
    with pytest.raises(DegenerateBounds):
        membership(3, Bound("f", MAX, 3, 3))


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(0.01, 20))
def test_membership_monotone(a, b, width):
    lo, hi = sorted((a, b))
    fb, gb = Bound("f", MAX, 5 + width, 5.0), Bound("g", MIN, 5 + width, 5.0)
    assert membership(lo, fb) <= membership(hi, fb)
    assert membership(lo, gb) >= membership(hi, gb)


@given(st.fractions(-20, 20), st.fractions(Fraction(1, 10), 10), st.fractions(-30, 30),
       st.fractions(-5, 5), st.fractions(Fraction(1, 7), 9), st.sampled_from([MAX, MIN]))
def test_affine_reanchoring(lo, width, value, a, b, sense):
    hi = lo + width
    before = membership(value, Bound("f", sense, hi, lo))
    after = membership(a + b * value, Bound("f", sense, a + b * hi, a + b * lo))
    assert after == before
    assert isinstance(after, (Fraction, int))


def test_bounds_single_objective():
    m = MilpModel()
    x = m.add_var("x", VarKind.BOUNDED, 0, 4)
    m.add_objective("f", x._expr(), MAX)
    b = compute_bounds(m.finalize(), ["f"])
    assert (b["f"].f_star, b["f"].f_minus) == (4, 0)
    assert b.solves == 2


def test_constant_objective_is_degenerate():
    m = MilpModel()
    x = m.add_var("x", VarKind.BOUNDED, 0, 4)
    m.add_objective("f", x._expr(), MAX)
    m.add_objective("c", LinExpr(constant=3.0), MAX)
    b = compute_bounds(m.finalize(), ["f", "c"])
    assert b["c"].degenerate and not b["f"].degenerate
    with pytest.warns(UserWarning, match="constant"):
        out, notes = scalarize(m, b)
    assert len(notes) == 1
    assert [c.name for c in out.constraints] == ["fuzzy[f]"]
    with pytest.raises(DegenerateBounds):
        scalarize(m, b, strict=True)


def test_unbounded_objective_named():
    m = MilpModel()
    x = m.add_var("x")
    m.add_objective("f", x._expr(), MAX)
    with pytest.raises(UnboundedObjective, match="f"):
        compute_bounds(m.finalize(), ["f"])


def test_scalarize_row_form():
    m, x = toy()
    b = ObjectiveBounds({"f": Bound("f", MAX, 10.0, 0.0)})
    out, _ = scalarize(m, b)
    row = out.constraint("fuzzy[f]")
    lam = out.var(LAMBDA)
    assert row.sense is Sense.GE and row.rhs == 0
    assert row.expr.terms == {x.index: 1.0, lam.index: -10.0}
    assert out.var_def(lam).lower == 0 and out.var_def(lam).upper == 1


def test_min_sense_linkage_uses_minus_sign():
    m, x = toy()
    b = ObjectiveBounds({"g": Bound("g", MIN, 10.0, 0.0)})
    out, _ = scalarize(m, b)
    row = out.constraint("fuzzy[g]")
    # g(x) <= g_star - lambda (g_star - g_minus)
    assert row.sense is Sense.LE and row.rhs == 10
    assert row.expr.terms[out.var(LAMBDA).index] == 10.0


def test_toy_bi_objective():
    m, x = toy()
    b = compute_bounds(m, ["f", "g"])
    out, _ = scalarize(m, b)
    assert len(out.constraints) == 2 and out.var_count == 2
    sol, _ = solve(out)
    assert abs(sol.value(out.var(LAMBDA)) - 0.5) <= 1e-9
    assert abs(sol.value(x) - 5) <= 1e-9


def test_toy_bi_objective_external(cbc_available):
    if not cbc_available:
        pytest.skip("cbc not installed")
    from dscpsc.solver import SolverBackend

    m, x = toy()
    ext = SolverBackend.external()
    out, _ = scalarize(m, compute_bounds(m, ["f", "g"], ext))
    sol, _ = solve(out, ext)
    assert abs(sol.value(out.var(LAMBDA)) - 0.5) <= 1e-9 and abs(sol.value(x) - 5) <= 1e-9


def test_strip_recovers_model_exactly():
    built_model = solve_fuzzy(reference_tiny())
    base = built_model.built.model
    stripped = strip_scalarization(built_model.model)
    assert mps_string(stripped) == mps_string(base)
    linked = [b for b in built_model.bounds if not b.degenerate]
    assert len(built_model.model.constraints) - len(base.constraints) == len(linked)
    assert built_model.model.var_count == base.var_count + 1


@pytest.fixture(scope="module")
def tiny_report():
    return solve_fuzzy(reference_tiny())


def test_report_shape(tiny_report):
    rep = tiny_report
    assert rep.status is Status.OPTIMAL
    assert rep.bounds.solves == 6
    assert rep.solver_calls == 7
    assert set(rep.stakeholders["e1"]) == {"profit", "pollution", "jobs"}
    assert 0 <= rep.lambda_ <= 1
    assert "lambda" in rep.render_table()
    doc = rep.to_dict()
    assert doc["lambda"] == rep.lambda_ and doc["solver_calls"] == 7


def _recomputed_memberships(rep):
    model = rep.built.model
    out = {}
    for b in rep.bounds:
        if b.degenerate:
            continue
        value = evaluate(model.objectives[b.name].expr, rep.solution)
        width = b.f_star - b.f_minus
        mu = (value - b.f_minus) / width if b.sense is MAX else (b.f_star - value) / width
        out[b.name] = min(1.0, max(0.0, mu))
    return out


def test_lambda_tightness(tiny_report):
    mus = _recomputed_memberships(tiny_report)
    assert mus
    assert abs(tiny_report.lambda_ - min(mus.values())) <= 1e-6
    assert check_feasible(tiny_report.model, tiny_report.solution) == []


@pytest.mark.parametrize("seed", [1, 3])
def test_lambda_tightness_tiny(seed):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = solve_fuzzy(tiny_instance(seed))
    assert rep.status is Status.OPTIMAL
    mus = _recomputed_memberships(rep)
    if mus:
        assert abs(rep.lambda_ - min(mus.values())) <= 1e-6


def test_per_stakeholder_mode():
    rep = solve_fuzzy(reference_tiny(), mode="per-stakeholder")
    assert set(rep.bounds.names()) == {"profit[e1]", "pollution[e1]", "jobs[e1]"}
    assert rep.status is Status.OPTIMAL


def test_infeasible_instance_has_no_lambda():
    inst = reference_tiny()
    inst = inst.with_params(d=inst.params.d * 1000)
    rep = solve_fuzzy(inst)
    assert rep.status is Status.INFEASIBLE
    assert rep.lambda_ is None and rep.solution is None
    assert "n/a" in rep.render_table()
