"""Constraint families eq6..eq88.

Each generator emits rows named ``eqN[...]`` (or ``eqN_lo`` / ``eqN_hi`` for
two-sided ranges) through :class:`BuildContext.emit`, which also keeps the
per-family bookkeeping used by the build report.
"""

from __future__ import annotations

from itertools import combinations, permutations, product

from ..milp import LinExpr, Sense
from .catalog import Scope, VariableCatalog

LE, EQ, GE = Sense.LE, Sense.EQ, Sense.GE
FAMILY_TAGS = tuple(f"eq{i}" for i in range(6, 89))


class BuildContext:
    def __init__(self, model, cat: VariableCatalog, sc: Scope, options):
        self.model = model
        self.cat = cat
        self.sc = sc
        self.options = options
        self.big_m = sc.par("big_m")
        self.families: dict[str, dict] = {}

    # -- bookkeeping -----------------------------------------------------
    def family(self, tag, domain, symbols):
        self.families[tag] = {"rows": 0, "skipped": 0, "domain": domain, "symbols": tuple(symbols)}

    def emit(self, tag, idx, expr: LinExpr, sense, rhs=0.0, suffix=""):
        fam = self.families[tag]
        if not expr.terms:
            slack = rhs - expr.constant
            ok = (sense is LE and slack >= 0) or (sense is GE and slack <= 0) or (sense is EQ and slack == 0)
            if ok:
                fam["skipped"] += 1
                return
        name = f"{tag}{suffix}[{','.join(str(i) for i in idx)}]"
        self.model.add_constraint(name, expr, sense, rhs)
        fam["rows"] += 1

    # -- expression helpers ------------------------------------------------
    def add(self, expr: LinExpr, family, idx, coef=1.0):
        if coef:
            vid = self.cat.get(family, *idx)
            if vid is not None:
                expr.add_term(vid, coef)
        return expr

    def bigm(self, bound):
        return min(self.big_m, bound)

    def fleet_cap(self, v):
        sc = self.sc
        tpp = sc.par("TPP")
        return sum(sc.par("trc", v, lcv) * sc.par("nmax", lcv) * tpp for lcv in sc.sets.LCV)

    def new_pipe_cap(self):
        s = self.sc.sets
        if not s.LV or not s.RV:
            return 0.0
        return max(self.sc.par("clv", lv) for lv in s.LV)

    def qkl_cap(self, k, l, v):
        sc = self.sc
        if v != sc.pipe:
            return self.fleet_cap(v)
        cap = self.new_pipe_cap()
        if sc.is_existing_ref(k) and sc.is_existing_dc(l) and sc.par("Rkl", k, l):
            best = max((sc.par("capkl", k, l, ev) for ev in sc.sets.EV), default=0.0)
            cap += sc.par("icapkl", k, l) + best
        return cap

    def qlpl_cap(self, lp, l, v):
        sc = self.sc
        if v != sc.pipe:
            return self.fleet_cap(v)
        cap = self.new_pipe_cap()
        if sc.is_existing_dc(lp) and sc.is_existing_dc(l) and sc.par("Rlpl", lp, l):
            best = max((sc.par("caplpl", lp, l, ev) for ev in sc.sets.EV), default=0.0)
            cap += sc.par("icaplpl", lp, l) + best
        return cap

    # sums that recur across families
    def built_k(self, expr, k, e, periods, coef=1.0, weight=None):
        for tt in periods:
            for ek in self.sc.sets.EK:
                w = weight(ek) if weight else 1.0
                self.add(expr, "xk", (k, ek, tt, e), coef * w)
        return expr

    def built_l(self, expr, l, e, periods, coef=1.0, weight=None):
        for tt in periods:
            for el in self.sc.sets.EL:
                w = weight(el) if weight else 1.0
                self.add(expr, "xl", (l, el, tt, e), coef * w)
        return expr

    def new_route_k(self, expr, k, l, e, periods, modes, coef=1.0, cap=False):
        sc = self.sc
        for tt in periods:
            for v, lv, rv in product(modes, sc.sets.LV, sc.sets.RV):
                w = sc.par("clv", lv) if cap else 1.0
                self.add(expr, "rkl", (k, l, v, lv, rv, tt, e), coef * w)
        return expr

    def new_route_l(self, expr, lp, l, e, periods, modes, coef=1.0, cap=False):
        sc = self.sc
        for tt in periods:
            for v, lv, rv in product(modes, sc.sets.LV, sc.sets.RV):
                w = sc.par("clv", lv) if cap else 1.0
                self.add(expr, "rlpl", (lp, l, v, lv, rv, tt, e), coef * w)
        return expr

    def refinery_capacity(self, expr, k, t, e, coef=1.0):
        """``ick (1 - sum psik) + sum capk tauk`` over t' <= t, added with factor ``coef``.

        Returns the constant part (``coef * ick``) which the caller moves to the RHS.
        """
        sc = self.sc
        ick = sc.par("ick", k)
        for tt in sc.upto(t):
            self.add(expr, "psik", (k, tt, e), -coef * ick)
            for uk in sc.sets.UK:
                self.add(expr, "tauk", (k, uk, tt, e), coef * sc.par("capk", k, uk))
        return coef * ick

    def shared_dc_capacity(self, expr, p, l, t, coef=1.0):
        sc = self.sc
        for e in sc.E_l[l]:
            self.add(expr, "xi", (l, t, e), coef * sc.par("icl", p, l))
            for tt in sc.upto(t):
                for ul in sc.sets.UL:
                    self.add(expr, "taul", (p, l, ul, tt, e), coef * sc.par("capl", l, ul))
        return expr

    def dc_inflow(self, expr, p, l, t, e, coef=1.0):
        """Products entering DC ``l`` minus those sent on to other DCs (all modes)."""
        sc = self.sc
        for v in sc.sets.V:
            for k in sc.KA_e[e]:
                self.add(expr, "qkl", (p, k, l, v, t, e), coef)
            for lp in sc.LA_e[e]:
                if lp != l:
                    self.add(expr, "qlpl", (p, lp, l, v, t, e), coef)
                    self.add(expr, "qlpl", (p, l, lp, v, t, e), -coef)
        return expr


# -- eq6-9 ------------------------------------------------------------------
def gen_siting_and_tanks(ctx: BuildContext):
    sc, s = ctx.sc, ctx.sc.sets
    ctx.family("eq6", "e in E, l in L'_e", ("E", "Lp_e"))
    for e in s.E:
        for l in sc.Lp_e[e]:
            ctx.emit("eq6", (e, l), ctx.built_l(LinExpr(), l, e, s.T), LE, 1)
    ctx.family("eq7", "e in E, k in K'_e", ("E", "Kp_e"))
    for e in s.E:
        for k in sc.Kp_e[e]:
            ctx.emit("eq7", (e, k), ctx.built_k(LinExpr(), k, e, s.T), LE, 1)
    ctx.family("eq8", "e in E, l in L'_e, ez in EZ", ("E", "Lp_e", "EZ"))
    for e in s.E:
        for l, ez in product(sc.Lp_e[e], s.EZ):
            expr = LinExpr()
            for t in s.T:
                ctx.add(expr, "z", (l, ez, t, e))
            ctx.emit("eq8", (e, l, ez), expr, LE, 1)
    ctx.family("eq9", "p in P, l in L'_e, ez in EZ, t in T, e in E", ("P", "Lp_e", "EZ", "T"))
    for e in s.E:
        for p, l, ez, t in product(s.P, sc.Lp_e[e], s.EZ, s.T):
            vid = ctx.cat.get("n", p, l, ez, t, e)
            ub = ctx.model.vars[vid.index].upper
            expr = LinExpr({vid.index: 1.0})
            ctx.add(expr, "z", (l, ez, t, e), -ctx.bigm(ub))
            ctx.emit("eq9", (p, l, ez, t, e), expr, LE, 0)


# -- eq10-17 ----------------------------------------------------------------
def gen_expansion_and_closedown(ctx: BuildContext):
    sc, s = ctx.sc, ctx.sc.sets
    ctx.family("eq10", "e in E, k in K_e", ("E", "K_e", "UK"))
    for e in s.E:
        for k in sc.K_e[e]:
            expr = LinExpr()
            for t, uk in product(s.T, s.UK):
                ctx.add(expr, "tauk", (k, uk, t, e))
            ctx.emit("eq10", (e, k), expr, LE, 1)
    ctx.family("eq11", "l in L, p in P (summed over E_l)", ("L", "P", "UL"))
    for l in s.L:
        for p in s.P:
            expr = LinExpr()
            for t, ul, e in product(s.T, s.UL, sc.E_l[l]):
                ctx.add(expr, "taul", (p, l, ul, t, e))
            ctx.emit("eq11", (l, p), expr, LE, 1)
    ctx.family("eq12", "e in E, k in K_e, l in L_e", ("E", "K_e", "L_e", "EV"))
    for e in s.E:
        for k, l in sc.ref_arcs(e, "existing"):
            expr = LinExpr()
            for t, ev in product(s.T, s.EV):
                ctx.add(expr, "ykl", (k, l, ev, t, e))
            ctx.emit("eq12", (e, k, l), expr, LE, 1)
    ctx.family("eq13", "e in E, ordered pairs lp != l in L_e", ("E", "L_e", "EV"))
    for e in s.E:
        for lp, l in sc.dc_pairs(e, "existing"):
            expr = LinExpr()
            for t, ev in product(s.T, s.EV):
                ctx.add(expr, "ylpl", (lp, l, ev, t, e))
            ctx.emit("eq13", (e, lp, l), expr, LE, 1)
    ctx.family("eq14", "e in E, k in K_e", ("E", "K_e"))
    for e in s.E:
        for k in sc.K_e[e]:
            expr = LinExpr()
            for t in s.T:
                ctx.add(expr, "psik", (k, t, e))
            ctx.emit("eq14", (e, k), expr, LE, 1)
    ctx.family("eq15", "l in L, t in T, e in E_l", ("L", "T"))
    for l in s.L:
        for t in s.T:
            for e in sc.E_l[l]:
                ctx.emit("eq15", (l, t, e), ctx.add(LinExpr(), "xi", (l, t, e)), LE, 1)
    ctx.family("eq16", "l in L, t in T", ("L", "T"))
    for l in s.L:
        for t in s.T:
            expr = LinExpr()
            for e in sc.E_l[l]:
                ctx.add(expr, "xi", (l, t, e))
            ctx.emit("eq16", (l, t), expr, LE, 1)
    ctx.family("eq17", "e in E, k in K_e", ("E", "K_e"))
    for e in s.E:
        for k in sc.K_e[e]:
            m = ctx.bigm(len(s.T) * len(s.UK))
            expr = LinExpr()
            for t in s.T:
                for uk in s.UK:
                    ctx.add(expr, "tauk", (k, uk, t, e))
                ctx.add(expr, "psik", (k, t, e), m)
            ctx.emit("eq17", (e, k), expr, LE, m)


# -- eq18-22, eq56 --------------------------------------------------------------
def gen_capacity_limits(ctx: BuildContext):
    sc, s = ctx.sc, ctx.sc.sets
    ctx.family("eq18", "k in K_e, e in E, t in T", ("K_e", "T"))
    for e in s.E:
        for k in sc.K_e[e]:
            for t in s.T:
                expr = LinExpr()
                for p, v, l in product(s.P, s.V, sc.LA_e[e]):
                    ctx.add(expr, "qkl", (p, k, l, v, t, e), 1.0 - sc.par("mu", p))
                rhs = ctx.refinery_capacity(expr, k, t, e, -1.0) * -1.0
                tp = sc.prev(t)
                if tp is None:
                    rhs -= sc.par("ivk0", k)
                else:
                    ctx.add(expr, "vk", (k, tp, e))
                ctx.emit("eq18", (k, t, e), expr, LE, rhs)
    ctx.family("eq19", "p in P, l in L, t in T (summed over E_l)", ("P", "L", "T"))
    for l in s.L:
        for p, t in product(s.P, s.T):
            expr = LinExpr()
            rhs = 0.0
            tp = sc.prev(t)
            for e in sc.E_l[l]:
                ctx.dc_inflow(expr, p, l, t, e)
                ctx.add(expr, "imp", (p, l, t, e))
                if tp is None:
                    rhs -= sc.par("ivl0", p, l, e)
                else:
                    ctx.add(expr, "vl", (p, l, tp, e))
            ctx.shared_dc_capacity(expr, p, l, t, -1.0)
            ctx.emit("eq19", (p, l, t), expr, LE, rhs)
    ctx.family("eq20", "k in K'_e, t in T, e in E", ("Kp_e", "T"))
    for e in s.E:
        for k in sc.Kp_e[e]:
            for t in s.T:
                flow = LinExpr()
                for v, p, l in product(s.V, s.P, sc.LA_e[e]):
                    ctx.add(flow, "qkl", (p, k, l, v, t, e), 1.0 / sc.par("mu", p))
                lo = flow.copy()
                ctx.built_k(lo, k, e, sc.upto(t), -1.0, lambda ek: sc.par("Mk", k, ek) * sc.par("Nck", k, ek))
                ctx.emit("eq20", (k, t, e), lo, GE, 0, "_lo")
                hi = flow
                ctx.built_k(hi, k, e, sc.upto(t), -1.0, lambda ek: sc.par("Nck", k, ek))
                ctx.emit("eq20", (k, t, e), hi, LE, 0, "_hi")
    ctx.family("eq21", "l in L'_e, e in E, t in T, p in P", ("Lp_e", "T", "P"))
    for e in s.E:
        for l in sc.Lp_e[e]:
            for t, p in product(s.T, s.P):
                flow = ctx.dc_inflow(LinExpr(), p, l, t, e)
                ctx.add(flow, "imp", (p, l, t, e))
                lo, hi = flow.copy(), flow
                for tt, ez in product(sc.upto(t), s.EZ):
                    nct = sc.par("Nct", l, ez)
                    ctx.add(lo, "n", (p, l, ez, tt, e), -sc.par("Ml", p, l, ez) * nct)
                    ctx.add(hi, "n", (p, l, ez, tt, e), -nct)
                ctx.emit("eq21", (l, t, p, e), lo, GE, 0, "_lo")
                ctx.emit("eq21", (l, t, p, e), hi, LE, 0, "_hi")
    ctx.family("eq22", "l in L'_e, e in E, t in T, p in P", ("Lp_e", "T", "P", "EZ"))
    for e in s.E:
        for l in sc.Lp_e[e]:
            for t, p in product(s.T, s.P):
                expr = LinExpr()
                total_ub = 0.0
                for ez in s.EZ:
                    vid = ctx.cat.get("n", p, l, ez, t, e)
                    expr.add_term(vid, 1.0)
                    total_ub += ctx.model.vars[vid.index].upper
                ctx.built_l(expr, l, e, (t,), -ctx.bigm(total_ub))
                ctx.emit("eq22", (l, t, p, e), expr, LE, 0)


def gen_tank_capacity(ctx: BuildContext):
    sc, s = ctx.sc, ctx.sc.sets
    ctx.family("eq56", "l in L'_e, e in E", ("Lp_e", "EZ"))
    for e in s.E:
        for l in sc.Lp_e[e]:
            expr = LinExpr()
            for t, ez, p in product(s.T, s.EZ, s.P):
                ctx.add(expr, "n", (p, l, ez, t, e), sc.par("Nct", l, ez))
            ctx.built_l(expr, l, e, s.T, -1.0, lambda el: sc.par("Ncl", l, el))
            ctx.emit("eq56", (l, e), expr, LE, 0)


# -- eq23-55, eq57-60 -------------------------------------------------------
def _fleet_terms(ctx, expr, fam, idx_prefix, v, t, e, coef=-1.0):
    sc = ctx.sc
    if v == sc.pipe:
        return expr
    tpp = sc.par("TPP")
    for lcv in sc.sets.LCV:
        ctx.add(expr, fam, idx_prefix + (v, lcv, t, e), coef * sc.par("trc", v, lcv) * tpp)
    return expr


def _existing_pipe_k(ctx, expr, k, l, t, e, coef=-1.0):
    """``Rkl (icapkl + sum capkl ykl)``; returns the constant part times ``coef``."""
    sc = ctx.sc
    r = sc.par("Rkl", k, l)
    if not r:
        return 0.0
    for tt, ev in product(sc.upto(t), sc.sets.EV):
        ctx.add(expr, "ykl", (k, l, ev, tt, e), coef * r * sc.par("capkl", k, l, ev))
    return coef * r * sc.par("icapkl", k, l)


def _existing_pipe_l(ctx, expr, lp, l, t, e, coef=-1.0):
    sc = ctx.sc
    r = sc.par("Rlpl", lp, l)
    if not r:
        return 0.0
    for tt, ev in product(sc.upto(t), sc.sets.EV):
        ctx.add(expr, "ylpl", (lp, l, ev, tt, e), coef * r * sc.par("caplpl", lp, l, ev))
    return coef * r * sc.par("icaplpl", lp, l)


def _route_exclusive(ctx, tag, idx, fam_new, fam_aux, make_new, arc, e, t, with_aux=True, rhs=1.0):
    expr = LinExpr()
    make_new(expr, *arc, e, ctx.sc.upto(t), ctx.sc.sets.V)
    if with_aux:
        for v in ctx.sc.sets.V:
            ctx.add(expr, fam_aux, arc + (v, t, e))
    ctx.emit(tag, idx, expr, LE, rhs)


def gen_transport_linking(ctx: BuildContext):
    sc, s = ctx.sc, ctx.sc.sets
    pipe, NV = sc.pipe, sc.NV

    # existing refinery -> existing DC
    ctx.family("eq23", "p in P, k in K_e, l in L_e, v in V, t in T, e in E", ("P", "K_e", "L_e", "V", "T"))
    for e in s.E:
        for (k, l), p, v, t in product(sc.ref_arcs(e, "existing"), s.P, s.V, s.T):
            expr = ctx.add(LinExpr(), "qkl", (p, k, l, v, t, e))
            _fleet_terms(ctx, expr, "nkl", (p, k, l), v, t, e)
            ctx.new_route_k(expr, k, l, e, sc.upto(t), (v,), -1.0, cap=True)
            const = _existing_pipe_k(ctx, expr, k, l, t, e) if v == pipe else 0.0
            ctx.emit("eq23", (p, k, l, v, t, e), expr, LE, -const)
    ctx.family("eq24", "k in K_e, l in L_e, t in T, e in E", ("K_e", "L_e", "T"))
    for e in s.E:
        for (k, l), t in product(sc.ref_arcs(e, "existing"), s.T):
            _route_exclusive(ctx, "eq24", (k, l, t, e), "rkl", "rklr", ctx.new_route_k, (k, l), e, t)
    ctx.family("eq25", "k in K_e, l in L_e, t in T, e in E", ("K_e", "L_e", "T", "LV", "RV"))
    for e in s.E:
        for (k, l), t in product(sc.ref_arcs(e, "existing"), s.T):
            _route_exclusive(ctx, "eq25", (k, l, t, e), "rkl", "rklr", ctx.new_route_k, (k, l), e, t,
                             with_aux=False, rhs=1.0 - sc.par("Rkl", k, l))
    ctx.family("eq26", "p in P, k in K_e, l in L_e, v in V\\{pipeline}, lcv in LCV, t in T, e in E",
               ("P", "K_e", "L_e", "NV", "LCV", "T"))
    ctx.family("eq32", "arcs touching a candidate facility, p, v in V\\{pipeline}, lcv, t, e",
               ("P", "Kp_e|Lp_e", "NV", "LCV", "T"))
    for e in s.E:
        for which, tag in (("existing", "eq26"), ("new", "eq32")):
            for (k, l), p, v, lcv, t in product(sc.ref_arcs(e, which), s.P, NV, s.LCV, s.T):
                expr = ctx.add(LinExpr(), "nkl", (p, k, l, v, lcv, t, e))
                m = ctx.bigm(sc.par("nmax", lcv))
                for vv in s.V:
                    ctx.add(expr, "rklr", (k, l, vv, t, e), -m)
                ctx.emit(tag, (p, k, l, v, lcv, t, e), expr, LE, 0)
    ctx.family("eq27", "k in K_e, l in L_e, t in T, e in E", ("K_e", "L_e", "T", "EV"))
    for e in s.E:
        for (k, l), t in product(sc.ref_arcs(e, "existing"), s.T):
            expr = LinExpr()
            for tt, ev in product(sc.upto(t), s.EV):
                ctx.add(expr, "ykl", (k, l, ev, tt, e))
            ctx.emit("eq27", (k, l, t, e), expr, LE, sc.par("Rkl", k, l))
    ctx.family("eq28", "k in K_e, l in L_e, v in V\\{pipeline}, lv, rv, t, e", ("K_e", "L_e", "NV", "LV", "RV", "T"))
    ctx.family("eq34", "arcs touching a candidate facility, v in V\\{pipeline}, lv, rv, t, e",
               ("Kp_e|Lp_e", "NV", "LV", "RV", "T"))
    for e in s.E:
        for which, tag in (("existing", "eq28"), ("new", "eq34")):
            for (k, l), v, lv, rv, t in product(sc.ref_arcs(e, which), NV, s.LV, s.RV, s.T):
                ctx.emit(tag, (k, l, v, lv, rv, t, e), ctx.add(LinExpr(), "rkl", (k, l, v, lv, rv, t, e)), EQ, 0)
    ctx.family("eq29", "k in K_e, l in L_e, t in T, e in E (pipeline mode)", ("K_e", "L_e", "T"))
    ctx.family("eq35", "arcs touching a candidate facility, t, e (pipeline mode)", ("Kp_e|Lp_e", "T"))
    for e in s.E:
        for which, tag in (("existing", "eq29"), ("new", "eq35")):
            for (k, l), t in product(sc.ref_arcs(e, which), s.T):
                ctx.emit(tag, (k, l, t, e), ctx.add(LinExpr(), "rklr", (k, l, pipe, t, e)), EQ, 0)

    # arcs touching a candidate refinery or DC
    ctx.family("eq30", "arcs (K'_e x LA_e) or (K_e x L'_e), p, v, t, e", ("Kp_e|Lp_e", "P", "V", "T"))
    for e in s.E:
        for (k, l), p, v, t in product(sc.ref_arcs(e, "new"), s.P, s.V, s.T):
            expr = ctx.add(LinExpr(), "qkl", (p, k, l, v, t, e))
            _fleet_terms(ctx, expr, "nkl", (p, k, l), v, t, e)
            ctx.new_route_k(expr, k, l, e, sc.upto(t), (v,), -1.0, cap=True)
            ctx.emit("eq30", (p, k, l, v, t, e), expr, LE, 0)
    ctx.family("eq31", "arcs touching a candidate facility, t, e", ("Kp_e|Lp_e", "T"))
    ctx.family("eq33", "arcs touching a candidate facility, t, e", ("Kp_e|Lp_e", "T", "LV", "RV"))
    for e in s.E:
        for (k, l), t in product(sc.ref_arcs(e, "new"), s.T):
            _route_exclusive(ctx, "eq31", (k, l, t, e), "rkl", "rklr", ctx.new_route_k, (k, l), e, t)
            _route_exclusive(ctx, "eq33", (k, l, t, e), "rkl", "rklr", ctx.new_route_k, (k, l), e, t, with_aux=False)
    ctx.family("eq36", "k in KA_e, l in LA_e, t in T, e in E (pipeline mode, summed over P)", ("KA_e", "LA_e", "T"))
    for e in s.E:
        for (k, l), t in product(sc.ref_arcs(e), s.T):
            expr = LinExpr()
            for p in s.P:
                ctx.add(expr, "qkl", (p, k, l, pipe, t, e))
            ctx.new_route_k(expr, k, l, e, sc.upto(t), (pipe,), -1.0, cap=True)
            const = 0.0
            if sc.is_existing_ref(k) and sc.is_existing_dc(l):
                const = _existing_pipe_k(ctx, expr, k, l, t, e)
            ctx.emit("eq36", (k, l, t, e), expr, LE, -const)

    # DC -> DC, both existing
    ctx.family("eq37", "p in P, lp != l in L_e, v in V, t in T, e in E", ("P", "L_e", "V", "T"))
    for e in s.E:
        for (lp, l), p, v, t in product(sc.dc_pairs(e, "existing"), s.P, s.V, s.T):
            expr = ctx.add(LinExpr(), "qlpl", (p, lp, l, v, t, e))
            _fleet_terms(ctx, expr, "nlpl", (p, lp, l), v, t, e)
            ctx.new_route_l(expr, lp, l, e, sc.upto(t), (v,), -1.0, cap=True)
            const = _existing_pipe_l(ctx, expr, lp, l, t, e) if v == pipe else 0.0
            ctx.emit("eq37", (p, lp, l, v, t, e), expr, LE, -const)
    ctx.family("eq38", "lp != l in L_e, t in T, e in E", ("L_e", "T"))
    ctx.family("eq39", "lp != l in L_e, t in T, e in E", ("L_e", "T", "LV", "RV"))
    ctx.family("eq41", "lp != l in L_e, t in T, e in E", ("L_e", "T", "EV"))
    for e in s.E:
        for (lp, l), t in product(sc.dc_pairs(e, "existing"), s.T):
            _route_exclusive(ctx, "eq38", (lp, l, t, e), "rlpl", "rlplr", ctx.new_route_l, (lp, l), e, t)
            _route_exclusive(ctx, "eq39", (lp, l, t, e), "rlpl", "rlplr", ctx.new_route_l, (lp, l), e, t,
                             with_aux=False, rhs=1.0 - sc.par("Rlpl", lp, l))
    for e in s.E:
        for (lp, l), t in product(sc.dc_pairs(e, "existing"), s.T):
            expr = LinExpr()
            for tt, ev in product(sc.upto(t), s.EV):
                ctx.add(expr, "ylpl", (lp, l, ev, tt, e))
            ctx.emit("eq41", (lp, l, t, e), expr, LE, sc.par("Rlpl", lp, l))
    ctx.family("eq40", "p, lp != l in L_e, v in V\\{pipeline}, lcv, t, e", ("P", "L_e", "NV", "LCV", "T"))
    ctx.family("eq45", "p, DC pairs with a candidate end, v in V\\{pipeline}, lcv, t, e", ("P", "Lp_e", "NV", "LCV", "T"))
    for e in s.E:
        for which, tag in (("existing", "eq40"), ("mixed", "eq45")):
            for (lp, l), p, v, lcv, t in product(sc.dc_pairs(e, which), s.P, NV, s.LCV, s.T):
                expr = ctx.add(LinExpr(), "nlpl", (p, lp, l, v, lcv, t, e))
                m = ctx.bigm(sc.par("nmax", lcv))
                for vv in s.V:
                    ctx.add(expr, "rlplr", (lp, l, vv, t, e), -m)
                ctx.emit(tag, (p, lp, l, v, lcv, t, e), expr, LE, 0)

    # DC -> DC with a candidate end
    ctx.family("eq42", "p, DC pairs with a candidate end in LA_e, v, t, e", ("P", "Lp_e", "V", "T"))
    for e in s.E:
        for (lp, l), p, v, t in product(sc.dc_pairs(e, "mixed"), s.P, s.V, s.T):
            expr = ctx.add(LinExpr(), "qlpl", (p, lp, l, v, t, e))
            _fleet_terms(ctx, expr, "nlpl", (p, lp, l), v, t, e)
            ctx.new_route_l(expr, lp, l, e, sc.upto(t), (v,), -1.0, cap=True)
            ctx.emit("eq42", (p, lp, l, v, t, e), expr, LE, 0)
    ctx.family("eq43", "DC pairs with a candidate end, t, e", ("Lp_e", "T"))
    ctx.family("eq44", "DC pairs with a candidate end, t, e", ("Lp_e", "T", "LV", "RV"))
    for e in s.E:
        for (lp, l), t in product(sc.dc_pairs(e, "mixed"), s.T):
            _route_exclusive(ctx, "eq43", (lp, l, t, e), "rlpl", "rlplr", ctx.new_route_l, (lp, l), e, t)
            _route_exclusive(ctx, "eq44", (lp, l, t, e), "rlpl", "rlplr", ctx.new_route_l, (lp, l), e, t, with_aux=False)
    ctx.family("eq46", "lp != l in LA_e, v in V\\{pipeline}, lv, rv, t, e", ("LA_e", "NV", "LV", "RV", "T"))
    for e in s.E:
        for (lp, l), v, lv, rv, t in product(sc.dc_pairs(e), NV, s.LV, s.RV, s.T):
            ctx.emit("eq46", (lp, l, v, lv, rv, t, e), ctx.add(LinExpr(), "rlpl", (lp, l, v, lv, rv, t, e)), EQ, 0)
    ctx.family("eq47", "lp != l in LA_e, t, e (pipeline mode)", ("LA_e", "T"))
    for e in s.E:
        for (lp, l), t in product(sc.dc_pairs(e), s.T):
            ctx.emit("eq47", (lp, l, t, e), ctx.add(LinExpr(), "rlplr", (lp, l, pipe, t, e)), EQ, 0)
    ctx.family("eq48", "lp != l in LA_e, t, e (pipeline mode, summed over P)", ("LA_e", "T"))
    for e in s.E:
        for (lp, l), t in product(sc.dc_pairs(e), s.T):
            expr = LinExpr()
            for p in s.P:
                ctx.add(expr, "qlpl", (p, lp, l, pipe, t, e))
            ctx.new_route_l(expr, lp, l, e, sc.upto(t), (pipe,), -1.0, cap=True)
            const = 0.0
            if sc.is_existing_dc(lp) and sc.is_existing_dc(l):
                const = _existing_pipe_l(ctx, expr, lp, l, t, e)
            ctx.emit("eq48", (lp, l, t, e), expr, LE, -const)

    # DC -> customer and fleet pool
    ctx.family("eq49", "p, l in LA_e, m, v in V\\{pipeline}, t, e", ("P", "LA_e", "M", "NV", "T"))
    for e in s.E:
        for p, l, m, v, t in product(s.P, sc.LA_e[e], s.M, NV, s.T):
            expr = ctx.add(LinExpr(), "qlm", (p, l, m, v, t, e))
            _fleet_terms(ctx, expr, "nlm", (p, l, m), v, t, e)
            ctx.emit("eq49", (p, l, m, v, t, e), expr, LE, 0)
    ctx.family("eq50", "v in V\\{pipeline}, lcv in LCV, t in T, e in E", ("NV", "LCV", "T"))
    for e in s.E:
        for v, lcv, t in product(NV, s.LCV, s.T):
            expr = LinExpr()
            for p in s.P:
                for k, l in sc.ref_arcs(e):
                    ctx.add(expr, "nkl", (p, k, l, v, lcv, t, e))
                for lp, l in sc.dc_pairs(e):
                    ctx.add(expr, "nlpl", (p, lp, l, v, lcv, t, e))
                for l, m in product(sc.LA_e[e], s.M):
                    ctx.add(expr, "nlm", (p, l, m, v, lcv, t, e))
            ctx.emit("eq50", (v, lcv, t, e), expr, LE, sc.par("nmax", lcv))

    # flows only through built facilities
    ctx.family("eq51", "p, k in KA_e, l in L'_e, v, t, e", ("P", "KA_e", "Lp_e", "V", "T"))
    for e in s.E:
        for p, k, l, v, t in product(s.P, sc.KA_e[e], sc.Lp_e[e], s.V, s.T):
            expr = ctx.add(LinExpr(), "qkl", (p, k, l, v, t, e))
            ctx.built_l(expr, l, e, sc.upto(t), -ctx.bigm(ctx.qkl_cap(k, l, v)))
            ctx.emit("eq51", (p, k, l, v, t, e), expr, LE, 0)
    ctx.family("eq52", "p, k in K'_e, l in LA_e, v, t, e", ("P", "Kp_e", "LA_e", "V", "T"))
    for e in s.E:
        for p, k, l, v, t in product(s.P, sc.Kp_e[e], sc.LA_e[e], s.V, s.T):
            expr = ctx.add(LinExpr(), "qkl", (p, k, l, v, t, e))
            ctx.built_k(expr, k, e, sc.upto(t), -ctx.bigm(ctx.qkl_cap(k, l, v)))
            ctx.emit("eq52", (p, k, l, v, t, e), expr, LE, 0)
    ctx.family("eq53", "p, l in L'_e, m, v in V\\{pipeline}, t, e", ("P", "Lp_e", "M", "NV", "T"))
    for e in s.E:
        for p, l, m, v, t in product(s.P, sc.Lp_e[e], s.M, NV, s.T):
            expr = ctx.add(LinExpr(), "qlm", (p, l, m, v, t, e))
            ctx.built_l(expr, l, e, sc.upto(t), -ctx.bigm(ctx.fleet_cap(v)))
            ctx.emit("eq53", (p, l, m, v, t, e), expr, LE, 0)
    ctx.family("eq54", "p, lp != l both in L'_e, v, t, e", ("P", "Lp_e", "V", "T"))
    ctx.family("eq55", "p, lp in L_e, l in L'_e, v, t, e", ("P", "L_e", "Lp_e", "V", "T"))
    for e in s.E:
        for (lp, l), p, v, t in product(sc.dc_pairs(e), s.P, s.V, s.T):
            if sc.is_existing_dc(l):
                continue
            tag = "eq55" if sc.is_existing_dc(lp) else "eq54"
            expr = ctx.add(LinExpr(), "qlpl", (p, lp, l, v, t, e))
            ctx.built_l(expr, l, e, sc.upto(t), -ctx.bigm(ctx.qlpl_cap(lp, l, v)))
            ctx.emit(tag, (p, lp, l, v, t, e), expr, LE, 0)

    # new pipelines need their new endpoints
    ctx.family("eq57", "k in K'_e, l in LA_e, t, e (pipeline mode)", ("Kp_e", "LA_e", "T", "LV", "RV"))
    for e in s.E:
        for k, l, t in product(sc.Kp_e[e], sc.LA_e[e], s.T):
            expr = ctx.new_route_k(LinExpr(), k, l, e, sc.upto(t), (pipe,))
            ctx.built_k(expr, k, e, sc.upto(t), -1.0)
            ctx.emit("eq57", (k, l, t, e), expr, LE, 0)
    ctx.family("eq58", "k in KA_e, l in L'_e, t, e (pipeline mode)", ("KA_e", "Lp_e", "T", "LV", "RV"))
    for e in s.E:
        for k, l, t in product(sc.KA_e[e], sc.Lp_e[e], s.T):
            expr = ctx.new_route_k(LinExpr(), k, l, e, sc.upto(t), (pipe,))
            ctx.built_l(expr, l, e, s.T, -1.0)
            ctx.emit("eq58", (k, l, t, e), expr, LE, 0)
    ctx.family("eq59", "lp in L_e, l in L'_e, t, e (pipeline mode)", ("L_e", "Lp_e", "T", "LV", "RV"))
    ctx.family("eq60", "lp != l both in L'_e, t, e (pipeline mode)", ("Lp_e", "T", "LV", "RV"))
    for e in s.E:
        for (lp, l), t in product(sc.dc_pairs(e), s.T):
            if sc.is_existing_dc(l):
                continue
            tag = "eq59" if sc.is_existing_dc(lp) else "eq60"
            expr = ctx.new_route_l(LinExpr(), lp, l, e, sc.upto(t), (pipe,))
            ctx.built_l(expr, l, e, s.T, -1.0)
            ctx.emit(tag, (lp, l, t, e), expr, LE, 0)


# -- eq61, eq69-72 -----------------------------------------------------------
def gen_flow_balance_demand_supply(ctx: BuildContext):
    sc, s = ctx.sc, ctx.sc.sets
    ctx.family("eq61", "i in I, t in T", ("I", "T"))
    for i, t in product(s.I, s.T):
        expr = LinExpr()
        for e in s.E:
            for (k, l), p, v in product(sc.ref_arcs(e), s.P, s.V):
                ctx.add(expr, "qkl", (p, k, l, v, t, e), 1.0 / sc.par("mu", p))
        ctx.emit("eq61", (i, t), expr, LE, sc.par("w", i))
    ctx.family("eq69", "p in P, t in T, m in M", ("P", "T", "M"))
    for p, t, m in product(s.P, s.T, s.M):
        expr = LinExpr()
        for e in s.E:
            for l, v in product(sc.LA_e[e], sc.NV):
                ctx.add(expr, "qlm", (p, l, m, v, t, e))
        ctx.emit("eq69", (p, t, m), expr, GE, sc.par("d", p, m, t))
    ctx.family("eq70", "p in P, t in T, e in E", ("P", "T", "E"))
    for p, t, e in product(s.P, s.T, s.E):
        expr = LinExpr()
        for l, v, m in product(sc.LA_e[e], sc.NV, s.M):
            ctx.add(expr, "qlm", (p, l, m, v, t, e))
        ctx.emit("eq70", (p, t, e), expr, GE, sc.par("D", p, t, e))
    ctx.family("eq71", "p, t, e, l in L'_e", ("P", "T", "Lp_e"))
    ctx.family("eq72", "p, t, e, l in L_e", ("P", "T", "L_e"))
    for e in s.E:
        for l, p, t in product(sc.LA_e[e], s.P, s.T):
            expr = ctx.dc_inflow(LinExpr(), p, l, t, e)
            ctx.add(expr, "imp", (p, l, t, e))
            for v, m in product(sc.NV, s.M):
                ctx.add(expr, "qlm", (p, l, m, v, t, e), -1.0)
            ctx.add(expr, "Ep", (p, l, t, e), -1.0)
            ctx.add(expr, "vl", (p, l, t, e), -1.0)
            tp = sc.prev(t)
            rhs = 0.0
            if tp is None:
                rhs = -sc.par("ivl0", p, l, e)
            else:
                ctx.add(expr, "vl", (p, l, tp, e))
            tag = "eq72" if sc.is_existing_dc(l) else "eq71"
            ctx.emit(tag, (p, l, t, e), expr, EQ, rhs)


# -- eq62-68 ------------------------------------------------------------------
def gen_anti_loop(ctx: BuildContext):
    sc, s = ctx.sc, ctx.sc.sets
    ctx.family("eq62", "p, lp before l in L_e, v, t, e", ("P", "L_e", "V", "T"))
    ctx.family("eq63", "p, lp before l in L_e, v, t, e (reverse arc)", ("P", "L_e", "V", "T"))
    ctx.family("eq64", "unordered pairs in L_e, t, e", ("L_e", "T"))
    ctx.family("eq65", "oriented triples in L_e, p, v, t, e", ("P", "L_e", "V", "T"))
    ctx.family("eq66", "oriented triples in L_e, p, v, t, e", ("P", "L_e", "V", "T"))
    ctx.family("eq67", "oriented triples in L_e, p, v, t, e", ("P", "L_e", "V", "T"))
    ctx.family("eq68", "oriented triples in L_e (both orientations), t, e", ("L_e", "T"))

    def link(tag, a, b, p, v, t, e, idx):
        expr = ctx.add(LinExpr(), "qlpl", (p, a, b, v, t, e))
        ctx.add(expr, "s", (a, b, t, e), -ctx.bigm(ctx.qlpl_cap(a, b, v)))
        ctx.emit(tag, idx, expr, LE, 0)

    for e in s.E:
        dcs = sc.L_e[e]
        pairs = list(combinations(dcs, 2))
        for (lp, l), p, v, t in product(pairs, s.P, s.V, s.T):
            link("eq62", lp, l, p, v, t, e, (p, lp, l, v, t, e))
            link("eq63", l, lp, p, v, t, e, (p, l, lp, v, t, e))
        for (lp, l), t in product(pairs, s.T):
            expr = LinExpr()
            ctx.add(expr, "s", (l, lp, t, e))
            ctx.add(expr, "s", (lp, l, t, e))
            ctx.emit("eq64", (l, lp, t, e), expr, LE, 1)
        triples = [tri for tri in permutations(dcs, 3) if tri[0] == min(tri, key=dcs.index)]
        for (l, lp, lk), p, v, t in product(triples, s.P, s.V, s.T):
            idx = (p, l, lp, lk, v, t, e)
            link("eq65", l, lp, p, v, t, e, idx)
            link("eq66", lp, lk, p, v, t, e, idx)
            link("eq67", lk, l, p, v, t, e, idx)
        for (l, lp, lk), t in product(triples, s.T):
            expr = LinExpr()
            ctx.add(expr, "s", (l, lp, t, e))
            ctx.add(expr, "s", (lp, lk, t, e))
            ctx.add(expr, "s", (lk, l, t, e))
            ctx.emit("eq68", (l, lp, lk, t, e), expr, LE, 1)


# -- eq73-80 ---------------------------------------------------------------------
def gen_inventory_bounds(ctx: BuildContext):
    sc, s = ctx.sc, ctx.sc.sets
    ctx.family("eq73", "t, e, k in K_e", ("T", "K_e"))
    ctx.family("eq77", "t, e, k in K_e", ("T", "K_e"))
    for e in s.E:
        for k, t in product(sc.K_e[e], s.T):
            up = ctx.add(LinExpr(), "vk", (k, t, e))
            const = ctx.refinery_capacity(up, k, t, e, -1.0)
            ctx.emit("eq73", (k, t, e), up, LE, -const)
            lk = sc.par("lk", k)
            lo = ctx.add(LinExpr(), "vk", (k, t, e))
            const = ctx.refinery_capacity(lo, k, t, e, -lk)
            ctx.emit("eq77", (k, t, e), lo, GE, -const)
    ctx.family("eq74", "t, p, l in L (summed over E_l)", ("T", "P", "L"))
    ctx.family("eq78", "t, p, l in L (summed over E_l)", ("T", "P", "L"))
    for l in s.L:
        for p, t in product(s.P, s.T):
            up = LinExpr()
            for e in sc.E_l[l]:
                ctx.add(up, "vl", (p, l, t, e))
            lo = up.copy()
            ctx.shared_dc_capacity(up, p, l, t, -1.0)
            ctx.emit("eq74", (t, p, l), up, LE, 0)
            ctx.shared_dc_capacity(lo, p, l, t, -sc.par("ll", l))
            ctx.emit("eq78", (t, p, l), lo, GE, 0)
    ctx.family("eq75", "t, e, k in K'_e", ("T", "Kp_e"))
    ctx.family("eq79", "t, e, k in K'_e", ("T", "Kp_e"))
    for e in s.E:
        for k, t in product(sc.Kp_e[e], s.T):
            up = ctx.add(LinExpr(), "vk", (k, t, e))
            ctx.built_k(up, k, e, sc.upto(t), -1.0, lambda ek: sc.par("Nck", k, ek))
            ctx.emit("eq75", (k, t, e), up, LE, 0)
            lo = ctx.add(LinExpr(), "vk", (k, t, e))
            ctx.built_k(lo, k, e, sc.upto(t), -sc.par("lk", k), lambda ek: sc.par("Nck", k, ek))
            ctx.emit("eq79", (k, t, e), lo, GE, 0)
    ctx.family("eq76", "t, p, e, l in L'_e", ("T", "P", "Lp_e"))
    ctx.family("eq80", "t, p, e, l in L'_e", ("T", "P", "Lp_e"))
    for e in s.E:
        for l, p, t in product(sc.Lp_e[e], s.P, s.T):
            up = ctx.add(LinExpr(), "vl", (p, l, t, e))
            lo = up.copy()
            ll = sc.par("ll", l)
            for tt, ez in product(sc.upto(t), s.EZ):
                nct = sc.par("Nct", l, ez)
                ctx.add(up, "n", (p, l, ez, tt, e), -nct)
                ctx.add(lo, "n", (p, l, ez, tt, e), -ll * nct)
            ctx.emit("eq76", (t, p, e, l), up, LE, 0)
            ctx.emit("eq80", (t, p, e, l), lo, GE, 0)


# -- eq81-88 ---------------------------------------------------------------------
def gen_labor_and_coverage(ctx: BuildContext):
    sc, s = ctx.sc, ctx.sc.sets
    uniform = ctx.options.get("labor_weight_uniform", False)
    ctx.family("eq81", "t, en, lev", ("T", "EN", "LEV"))
    ctx.family("eq82", "t, en, lev", ("T", "EN", "LEV"))
    ctx.family("eq83", "t, en, lev (summed over E)", ("T", "EN", "LEV"))
    for en, lev, t in product(s.EN, s.LEV, s.T):
        expr = ctx.add(LinExpr(), "RLab", (en, lev, t))
        ctx.add(expr, "ALab", (en, lev, t), -1.0)
        ctx.emit("eq81", (t, en, lev), expr, LE, 0)
    for en, lev, t in product(s.EN, s.LEV, s.T):
        expr = ctx.add(LinExpr(), "ALab", (en, lev, t))
        tp = sc.prev(t)
        if tp is not None:
            ctx.add(expr, "ALab", (en, lev, tp), -1.0)
            ctx.add(expr, "RLab", (en, lev, tp), 1.0)
        ctx.emit("eq82", (t, en, lev), expr, EQ, sc.par("NLab", en, lev, t))
    for en, lev, t in product(s.EN, s.LEV, s.T):
        expr = LinExpr()
        for e in s.E:
            for fam, sites in (("HENK", sc.Kp_e[e]), ("HEEK", sc.K_e[e]), ("HENL", sc.Lp_e[e]), ("HEEL", sc.L_e[e])):
                for site, en2 in product(sites, s.EN):
                    ctx.add(expr, fam, (en, site, en2, lev, t, e))
        ctx.add(expr, "RLab", (en, lev, t), -1.0)
        ctx.emit("eq83", (t, en, lev), expr, EQ, 0)

    def hires(expr, fam, site, region, lev, t, e, weighted):
        for en2, en in product(s.EN, s.EN):
            w = sc.par(region, en, site) * (sc.par("W", en, en2) if weighted else 1.0)
            ctx.add(expr, fam, (en, site, en2, lev, t, e), -w)
        return expr

    ctx.family("eq84", "t, e, lev, k in K'_e", ("T", "LEV", "Kp_e"))
    ctx.family("eq85", "t, e, lev, k in K_e", ("T", "LEV", "K_e"))
    ctx.family("eq86", "t, e, lev, l in L'_e", ("T", "LEV", "Lp_e"))
    ctx.family("eq87", "t, e, lev, l in L_e", ("T", "LEV", "L_e"))
    for e in s.E:
        for k, lev, t in product(sc.Kp_e[e], s.LEV, s.T):
            expr = ctx.built_k(LinExpr(), k, e, (t,), sc.par("WNK", lev), lambda ek: sc.par("Nck", k, ek))
            ctx.emit("eq84", (t, e, lev, k), hires(expr, "HENK", k, "Nk", lev, t, e, uniform), EQ, 0)
        for k, lev, t in product(sc.K_e[e], s.LEV, s.T):
            expr = LinExpr()
            for uk in s.UK:
                ctx.add(expr, "tauk", (k, uk, t, e), sc.par("capk", k, uk) * sc.par("WEK", lev))
            ctx.emit("eq85", (t, e, lev, k), hires(expr, "HEEK", k, "Nek", lev, t, e, uniform), EQ, 0)
        for l, lev, t in product(sc.Lp_e[e], s.LEV, s.T):
            expr = ctx.built_l(LinExpr(), l, e, (t,), sc.par("WNL", lev), lambda el: sc.par("Ncl", l, el))
            ctx.emit("eq86", (t, e, lev, l), hires(expr, "HENL", l, "Nl", lev, t, e, True), EQ, 0)
        for l, lev, t in product(sc.L_e[e], s.LEV, s.T):
            expr = LinExpr()
            for ul, p in product(s.UL, s.P):
                ctx.add(expr, "taul", (p, l, ul, t, e), sc.par("capl", l, ul) * sc.par("WEL", lev))
            ctx.emit("eq87", (t, e, lev, l), hires(expr, "HEEL", l, "Nel", lev, t, e, uniform), EQ, 0)

    ctx.family("eq88", "en in EN", ("EN",))
    for en in s.EN:
        expr = LinExpr()
        for e, t in product(s.E, s.T):
            for k in sc.Kp_e[e]:
                for ek in s.EK:
                    ctx.add(expr, "xk", (k, ek, t, e), sc.par("Nk", en, k))
            for k in sc.K_e[e]:
                for uk in s.UK:
                    ctx.add(expr, "tauk", (k, uk, t, e), sc.par("Nek", en, k))
            for l in sc.Lp_e[e]:
                for el in s.EL:
                    ctx.add(expr, "xl", (l, el, t, e), sc.par("Nl", en, l))
            for l in sc.L_e[e]:
                for ul, p in product(s.UL, s.P):
                    ctx.add(expr, "taul", (p, l, ul, t, e), sc.par("Nel", en, l) * sc.par("NR", en))
        ctx.emit("eq88", (en,), expr, LE, sc.par("Maxnum", en) - sc.par("ND", en))


GENERATORS = (
    gen_siting_and_tanks,
    gen_expansion_and_closedown,
    gen_capacity_limits,
    gen_transport_linking,
    gen_tank_capacity,
    gen_flow_balance_demand_supply,
    gen_anti_loop,
    gen_inventory_bounds,
    gen_labor_and_coverage,
)
