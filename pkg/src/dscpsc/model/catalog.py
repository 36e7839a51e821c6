"""Decision-variable catalog: declares every variable family over its ownership-restricted domain."""

from __future__ import annotations

import math
from itertools import product

from ..instance import PARAM_SPECS, ModelInstance
from ..milp import MilpModel, VarId, VarKind

BINARY_FAMILIES = (
    "xk", "xl", "tauk", "taul", "ykl", "ylpl", "z", "rkl", "rklr", "rlpl", "rlplr", "psik", "s",
)
INTEGER_FAMILIES = ("n", "nkl", "nlpl", "nlm", "HENK", "HEEK", "HENL", "HEEL")
CONTINUOUS_FAMILIES = ("qkl", "qlpl", "qlm", "imp", "Ep", "vl", "vk", "xi", "RLab", "ALab")
FAMILIES = BINARY_FAMILIES + INTEGER_FAMILIES + CONTINUOUS_FAMILIES


def var_name(family, idx):
    return f"{family}[{','.join(str(i) for i in idx)}]"


class Scope:
    """Instance view with ownership-restricted sets and positional parameter lookup."""

    def __init__(self, inst: ModelInstance):
        self.inst = inst
        s = inst.sets
        self.sets = s
        self.pipe = s.pipeline_mode
        self.NV = tuple(v for v in s.V if v != self.pipe)
        self.K_e = {e: inst.K_e(e) for e in s.E}
        self.Kp_e = {e: inst.Kp_e(e) for e in s.E}
        self.KA_e = {e: self.K_e[e] + self.Kp_e[e] for e in s.E}
        self.L_e = {e: inst.L_e(e) for e in s.E}
        self.Lp_e = {e: inst.Lp_e(e) for e in s.E}
        self.LA_e = {e: self.L_e[e] + self.Lp_e[e] for e in s.E}
        self.E_l = {l: inst.E_l(l) for l in s.LA}
        self.tpos = {t: i for i, t in enumerate(s.T)}
        self._dims = {name: spec.dims for name, spec in PARAM_SPECS.items()}
        self._arr = {name: inst.params[name] for name in inst.params.names()}
        self._pos = {name: {x: i for i, x in enumerate(s.get(name))} for name in
                     ("K", "Kp", "L", "Lp", "M", "V", "LCV", "P", "EK", "EL", "UK", "UL", "EV",
                      "EZ", "LV", "RV", "E", "EN", "LEV", "T", "I", "KA", "LA")}

    def par(self, name, *ids):
        arr = self._arr[name]
        if not ids:
            return float(arr)
        return float(arr[tuple(self._pos[d][i] for d, i in zip(self._dims[name], ids))])

    def upto(self, t):
        """Periods t' <= t."""
        return self.sets.T[: self.tpos[t] + 1]

    def prev(self, t):
        i = self.tpos[t]
        return self.sets.T[i - 1] if i > 0 else None

    def is_existing_dc(self, l):
        return l in self._pos["L"]

    def is_existing_ref(self, k):
        return k in self._pos["K"]

    def dc_pairs(self, e, which="all"):
        """Ordered pairs (lp, l), lp != l, of DCs usable by ``e``.

        ``which``: all (LA_e x LA_e), existing (L_e x L_e) or mixed (at least one candidate).
        """
        pool = self.L_e[e] if which == "existing" else self.LA_e[e]
        out = []
        for lp in pool:
            for l in pool:
                if lp == l:
                    continue
                if which == "mixed" and self.is_existing_dc(lp) and self.is_existing_dc(l):
                    continue
                out.append((lp, l))
        return out

    def ref_arcs(self, e, which="all"):
        """Refinery-to-DC arcs (k, l): all, existing (K_e x L_e) or new (touching a candidate)."""
        if which == "existing":
            return [(k, l) for k in self.K_e[e] for l in self.L_e[e]]
        if which == "new":
            return [(k, l) for k in self.Kp_e[e] for l in self.LA_e[e]] + [
                (k, l) for k in self.K_e[e] for l in self.Lp_e[e]
            ]
        return [(k, l) for k in self.KA_e[e] for l in self.LA_e[e]]


class VariableCatalog:
    """Family name -> {index tuple: VarId}."""

    def __init__(self):
        self.families: dict[str, dict[tuple, VarId]] = {f: {} for f in FAMILIES}

    def add(self, model: MilpModel, family, idx, kind, lower=0.0, upper=None):
        vid = model.add_var(var_name(family, idx), kind, lower, upper)
        self.families[family][tuple(idx)] = vid
        return vid

    def get(self, family, *idx):
        return self.families[family].get(tuple(idx))

    def __getitem__(self, family):
        return self.families[family]

    def count(self, family):
        return len(self.families[family])

    def items(self, family):
        return self.families[family].items()


def declare_variables(model: MilpModel, sc: Scope) -> VariableCatalog:
    cat = VariableCatalog()
    s = sc.sets
    B, I, C = VarKind.BINARY, VarKind.INTEGER, VarKind.CONTINUOUS
    T, P = s.T, s.P
    for e in s.E:
        for k, ek, t in product(sc.Kp_e[e], s.EK, T):
            cat.add(model, "xk", (k, ek, t, e), B)
        for l, el, t in product(sc.Lp_e[e], s.EL, T):
            cat.add(model, "xl", (l, el, t, e), B)
        for k, uk, t in product(sc.K_e[e], s.UK, T):
            cat.add(model, "tauk", (k, uk, t, e), B)
        for p, l, ul, t in product(P, sc.L_e[e], s.UL, T):
            cat.add(model, "taul", (p, l, ul, t, e), B)
        for (k, l), ev, t in product(sc.ref_arcs(e, "existing"), s.EV, T):
            cat.add(model, "ykl", (k, l, ev, t, e), B)
        for (lp, l), ev, t in product(sc.dc_pairs(e, "existing"), s.EV, T):
            cat.add(model, "ylpl", (lp, l, ev, t, e), B)
        for l, ez, t in product(sc.Lp_e[e], s.EZ, T):
            cat.add(model, "z", (l, ez, t, e), B)
        for (k, l), v, lv, rv, t in product(sc.ref_arcs(e), s.V, s.LV, s.RV, T):
            cat.add(model, "rkl", (k, l, v, lv, rv, t, e), B)
        for (k, l), v, t in product(sc.ref_arcs(e), s.V, T):
            cat.add(model, "rklr", (k, l, v, t, e), B)
        for (lp, l), v, lv, rv, t in product(sc.dc_pairs(e), s.V, s.LV, s.RV, T):
            cat.add(model, "rlpl", (lp, l, v, lv, rv, t, e), B)
        for (lp, l), v, t in product(sc.dc_pairs(e), s.V, T):
            cat.add(model, "rlplr", (lp, l, v, t, e), B)
        for k, t in product(sc.K_e[e], T):
            cat.add(model, "psik", (k, t, e), B)
        for (lp, l), t in product(sc.dc_pairs(e, "existing"), T):
            cat.add(model, "s", (lp, l, t, e), B)

    for e in s.E:
        for p, l, ez, t in product(P, sc.Lp_e[e], s.EZ, T):
            cat.add(model, "n", (p, l, ez, t, e), I, 0.0, tank_count_ub(sc, l, ez))
        for p, (k, l), v, lcv, t in product(P, sc.ref_arcs(e), sc.NV, s.LCV, T):
            cat.add(model, "nkl", (p, k, l, v, lcv, t, e), I, 0.0, math.floor(sc.par("nmax", lcv)))
        for p, (lp, l), v, lcv, t in product(P, sc.dc_pairs(e), sc.NV, s.LCV, T):
            cat.add(model, "nlpl", (p, lp, l, v, lcv, t, e), I, 0.0, math.floor(sc.par("nmax", lcv)))
        for p, l, m, v, lcv, t in product(P, sc.LA_e[e], s.M, sc.NV, s.LCV, T):
            cat.add(model, "nlm", (p, l, m, v, lcv, t, e), I, 0.0, math.floor(sc.par("nmax", lcv)))
        for fam, sites in (("HENK", sc.Kp_e[e]), ("HEEK", sc.K_e[e]), ("HENL", sc.Lp_e[e]), ("HEEL", sc.L_e[e])):
            for en, site, en2, lev, t in product(s.EN, sites, s.EN, s.LEV, T):
                cat.add(model, fam, (en, site, en2, lev, t, e), I, 0.0, labor_ub(sc, en, lev, t))

    for e in s.E:
        for p, (k, l), v, t in product(P, sc.ref_arcs(e), s.V, T):
            cat.add(model, "qkl", (p, k, l, v, t, e), C)
        for p, (lp, l), v, t in product(P, sc.dc_pairs(e), s.V, T):
            cat.add(model, "qlpl", (p, lp, l, v, t, e), C)
        for p, l, m, v, t in product(P, sc.LA_e[e], s.M, sc.NV, T):
            cat.add(model, "qlm", (p, l, m, v, t, e), C)
        for fam in ("imp", "Ep", "vl"):
            for p, l, t in product(P, sc.LA_e[e], T):
                cat.add(model, fam, (p, l, t, e), C)
        for k, t in product(sc.KA_e[e], T):
            cat.add(model, "vk", (k, t, e), C)
    for l in s.L:
        for t in T:
            for e in sc.E_l[l]:
                cat.add(model, "xi", (l, t, e), VarKind.BOUNDED, 0.0, 1.0)
    for en, lev, t in product(s.EN, s.LEV, T):
        cat.add(model, "RLab", (en, lev, t), C)
        cat.add(model, "ALab", (en, lev, t), C)
    return cat


def tank_count_ub(sc: Scope, l, ez):
    """Most tanks of level ``ez`` that fit the largest DC level at ``l``; 0 for zero-size tanks."""
    nct = sc.par("Nct", l, ez)
    if nct <= 0 or not sc.sets.EL:
        return 0.0
    biggest = max(sc.par("Ncl", l, el) for el in sc.sets.EL)
    return float(math.floor(biggest / nct + 1e-9))


def labor_ub(sc: Scope, en, lev, t):
    return float(math.floor(sum(sc.par("NLab", en, lev, tt) for tt in sc.upto(t)) + 1e-9))
