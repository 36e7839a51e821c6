"""Profit, pollution and job objectives per stakeholder, plus the cost decomposition."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from ..milp import LinExpr, ObjSense, evaluate

COST_CATEGORIES = (
    "pipeline_install",
    "pipeline_expand",
    "facility_install",
    "facility_expand",
    "closedown",
    "tank_install",
    "fixed",
    "variable",
    "inventory",
    "transport",
    "import",
    "labor",
)
HIRE_FAMILIES = (("HENK", "Kp_e", "Nk"), ("HEEK", "K_e", "Nek"), ("HENL", "Lp_e", "Nl"), ("HEEL", "L_e", "Nel"))


def revenue_expr(ctx, e):
    sc, s = ctx.sc, ctx.sc.sets
    expr = LinExpr()
    for t, p, l in product(s.T, s.P, sc.LA_e[e]):
        price = sc.par("pr", e, p, t)
        for m, v in product(s.M, sc.NV):
            ctx.add(expr, "qlm", (p, l, m, v, t, e), price)
        ctx.add(expr, "Ep", (p, l, t, e), sc.par("ERPP", p, t, e))
    return expr


def cost_exprs(ctx, e) -> dict[str, LinExpr]:
    """One expression per cost category; their sum is the stakeholder's total cost."""
    sc, s = ctx.sc, ctx.sc.sets
    pipe = sc.pipe
    out = {c: LinExpr() for c in COST_CATEGORIES}
    add = ctx.add

    x = out["pipeline_install"]
    for (k, l), lv, rv, t in product(sc.ref_arcs(e), s.LV, s.RV, s.T):
        add(x, "rkl", (k, l, pipe, lv, rv, t, e), sc.par("rcostkl", k, l, lv, rv, t))
    for (lp, l), lv, rv, t in product(sc.dc_pairs(e), s.LV, s.RV, s.T):
        add(x, "rlpl", (lp, l, pipe, lv, rv, t, e), sc.par("rcostlpl", lp, l, lv, rv, t))

    x = out["pipeline_expand"]
    for (k, l), ev, t in product(sc.ref_arcs(e, "existing"), s.EV, s.T):
        add(x, "ykl", (k, l, ev, t, e), sc.par("ycostkl", k, l, ev, t))
    for (lp, l), ev, t in product(sc.dc_pairs(e, "existing"), s.EV, s.T):
        add(x, "ylpl", (lp, l, ev, t, e), sc.par("ycostlpl", lp, l, ev, t))

    x = out["facility_install"]
    for k, ek, t in product(sc.Kp_e[e], s.EK, s.T):
        add(x, "xk", (k, ek, t, e), sc.par("xcostk", k, ek, t))
    for l, el, t in product(sc.Lp_e[e], s.EL, s.T):
        add(x, "xl", (l, el, t, e), sc.par("xcostl", l, el, t))

    x = out["facility_expand"]
    for k, uk, t in product(sc.K_e[e], s.UK, s.T):
        add(x, "tauk", (k, uk, t, e), sc.par("ucostk", k, uk, t))
    for p, l, ul, t in product(s.P, sc.L_e[e], s.UL, s.T):
        add(x, "taul", (p, l, ul, t, e), sc.par("ucostl", l, ul, p, t))

    x = out["closedown"]
    for k, t in product(sc.K_e[e], s.T):
        add(x, "psik", (k, t, e), sc.par("clcostk", k, t))

    x = out["tank_install"]
    for p, l, ez, t in product(s.P, sc.Lp_e[e], s.EZ, s.T):
        add(x, "n", (p, l, ez, t, e), sc.par("ncostl", l, ez, t))

    x = out["fixed"]
    for l, t in product(sc.L_e[e], s.T):
        f = sc.par("Fcostl", l, t)
        for p in s.P:
            add(x, "xi", (l, t, e), f * sc.par("icl", p, l))
            for ul in s.UL:
                add(x, "taul", (p, l, ul, t, e), f * sc.par("capl", l, ul))
    for k, t in product(sc.K_e[e], s.T):
        f = sc.par("Fcostk", k, t)
        x.constant += f * sc.par("ick", k)
        for tt in sc.upto(t):
            add(x, "psik", (k, tt, e), -f * sc.par("ick", k))
        for uk in s.UK:
            add(x, "tauk", (k, uk, t, e), f * sc.par("capk", k, uk))
    for k, ek, t in product(sc.Kp_e[e], s.EK, s.T):
        add(x, "xk", (k, ek, t, e), sc.par("Fcostk", k, t) * sc.par("Nck", k, ek))
    for l, ez, p, t in product(sc.Lp_e[e], s.EZ, s.P, s.T):
        add(x, "n", (p, l, ez, t, e), sc.par("Fcostl", l, t) * sc.par("Nct", l, ez))

    x = out["variable"]
    for l, p, t in product(sc.LA_e[e], s.P, s.T):
        ctx.dc_inflow(x, p, l, t, e, sc.par("pcostl", p, l, t))
    for (k, l), p, v, t in product(sc.ref_arcs(e), s.P, s.V, s.T):
        add(x, "qkl", (p, k, l, v, t, e), sc.par("pcostk", k, t))

    x = out["inventory"]
    for k, t in product(sc.KA_e[e], s.T):
        add(x, "vk", (k, t, e), sc.par("OP", t) * sc.par("hcostk", k))
    for p, l, t in product(s.P, sc.LA_e[e], s.T):
        add(x, "vl", (p, l, t, e), sc.par("pr", e, p, t) * sc.par("hcostl", p, l))

    x = out["transport"]
    for (k, l), p, v, t in product(sc.ref_arcs(e), s.P, s.V, s.T):
        add(x, "qkl", (p, k, l, v, t, e), sc.par("qcostkl", k, l, t))
        for lcv in s.LCV:
            add(x, "nkl", (p, k, l, v, lcv, t, e), sc.par("ncostkl", k, l, v, lcv, t))
    for (lp, l), p, v, t in product(sc.dc_pairs(e), s.P, s.V, s.T):
        add(x, "qlpl", (p, lp, l, v, t, e), sc.par("qcostlpl", lp, l, t))
        for lcv in s.LCV:
            add(x, "nlpl", (p, lp, l, v, lcv, t, e), sc.par("ncostlpl", lp, l, v, lcv, t))
    for p, l, m, v, lcv, t in product(s.P, sc.LA_e[e], s.M, sc.NV, s.LCV, s.T):
        add(x, "nlm", (p, l, m, v, lcv, t, e), sc.par("ncostlm", l, m, v, lcv, t))

    x = out["import"]
    for p, l, t in product(s.P, sc.LA_e[e], s.T):
        add(x, "imp", (p, l, t, e), sc.par("icost", p, t))

    x = out["labor"]
    for fam, dom, _ in HIRE_FAMILIES:
        for site, en, en2, lev, t in product(getattr(sc, dom)[e], s.EN, s.EN, s.LEV, s.T):
            add(x, fam, (en, site, en2, lev, t, e), sc.par("WCost", lev, t))
    return out


def pollution_expr(ctx, e):
    sc, s = ctx.sc, ctx.sc.sets
    expr = LinExpr()
    pulk, pull, per = sc.par("Pulk"), sc.par("Pull"), sc.par("Per")
    for en in s.EN:
        lam = sc.par("lambdaE", en)
        for k, ek, t in product(sc.Kp_e[e], s.EK, s.T):
            ctx.add(expr, "xk", (k, ek, t, e), lam * sc.par("Nk", en, k) * sc.par("Nck", k, ek) * pulk)
        for l, ez, p, t in product(sc.Lp_e[e], s.EZ, s.P, s.T):
            ctx.add(expr, "n", (p, l, ez, t, e), lam * sc.par("Nl", en, l) * sc.par("Nct", l, ez) * pull)
        for k, uk, t in product(sc.K_e[e], s.UK, s.T):
            ctx.add(expr, "tauk", (k, uk, t, e), per * lam * sc.par("Nek", en, k) * sc.par("capk", k, uk) * pulk)
        for p, l, ul, t in product(s.P, sc.L_e[e], s.UL, s.T):
            ctx.add(expr, "taul", (p, l, ul, t, e), per * lam * sc.par("Nel", en, l) * sc.par("capl", l, ul) * pull)
    for p, l, m, v, lcv, t in product(s.P, sc.LA_e[e], s.M, sc.NV, s.LCV, s.T):
        ctx.add(expr, "nlm", (p, l, m, v, lcv, t, e), sc.par("Pulv", v, lcv) * sc.par("dis", l, m))
    return expr


def jobs_expr(ctx, e):
    sc, s = ctx.sc, ctx.sc.sets
    expr = LinExpr()
    for fam, dom, region in HIRE_FAMILIES:
        for site, en, en2, lev, t in product(getattr(sc, dom)[e], s.EN, s.EN, s.LEV, s.T):
            w = sc.par(region, en, site) * sc.par("W", en, en2)
            ctx.add(expr, fam, (en, site, en2, lev, t, e), w)
    return expr


@dataclass
class CostBreakdown:
    """Per-stakeholder cost categories evaluated at a solution."""

    categories: dict = field(default_factory=dict)  # e -> {category: value}
    totals: dict = field(default_factory=dict)      # e -> evaluated total cost

    def total(self, e):
        return sum(self.categories[e].values())

    def rows(self):
        for e, cats in self.categories.items():
            for c in COST_CATEGORIES:
                yield e, c, cats[c]

    def to_dict(self):
        return {str(e): {"categories": dict(c), "total": self.totals[e]} for e, c in self.categories.items()}


class ObjectiveSet:
    """Expressions behind the registered objectives, kept for reporting."""

    def __init__(self):
        self.revenue: dict = {}
        self.costs: dict = {}
        self.cost_total: dict = {}

    def breakdown(self, sol) -> CostBreakdown:
        out = CostBreakdown()
        for e, cats in self.costs.items():
            out.categories[e] = {c: evaluate(x, sol) for c, x in cats.items()}
            out.totals[e] = evaluate(self.cost_total[e], sol)
        return out


def build_objectives(ctx) -> ObjectiveSet:
    model, s = ctx.model, ctx.sc.sets
    objs = ObjectiveSet()
    totals = {"profit": LinExpr(), "pollution": LinExpr(), "jobs": LinExpr()}
    for e in s.E:
        rf = revenue_expr(ctx, e)
        cats = cost_exprs(ctx, e)
        cf = LinExpr.sum(cats.values())
        objs.revenue[e], objs.costs[e], objs.cost_total[e] = rf, cats, cf
        profit = rf - cf
        pol = pollution_expr(ctx, e)
        jobs = jobs_expr(ctx, e)
        model.add_objective(f"profit[{e}]", profit, ObjSense.MAX)
        model.add_objective(f"pollution[{e}]", pol, ObjSense.MIN)
        model.add_objective(f"jobs[{e}]", jobs, ObjSense.MAX)
        totals["profit"] += profit
        totals["pollution"] += pol
        totals["jobs"] += jobs
    model.add_objective("profit_total", totals["profit"], ObjSense.MAX, activate=True)
    model.add_objective("pollution_total", totals["pollution"], ObjSense.MIN)
    model.add_objective("jobs_total", totals["jobs"], ObjSense.MAX)
    return objs
