"""Synthetic instances: randomized tiny scenarios and fixed reference scenarios.

Real case-study data is not available, so every test and demo runs on
instances generated here.
"""

from __future__ import annotations

import numpy as np

from .instance import PARAM_SPECS, InstanceSets, ModelInstance, ParameterTables

# (low, high) for uniformly drawn tables; rounded to 2 decimals
RANGES = {
    "TPP": (5, 5), "big_m": (1e4, 1e4), "Pulk": (0.5, 1.5), "Pull": (0.5, 1.5), "Per": (0.2, 0.8),
    "d": (1, 5), "D": (0, 0),
    "ick": (20, 40), "icl": (15, 30), "capk": (5, 15), "capl": (5, 15),
    "Nck": (20, 40), "Ncl": (20, 40), "Nct": (5, 10),
    "icapkl": (5, 15), "icaplpl": (5, 15), "capkl": (2, 6), "caplpl": (2, 6), "clv": (5, 15),
    "trc": (1, 3), "nmax": (2, 4), "w": (500, 1000),
    "Mk": (0.1, 0.3), "Ml": (0.1, 0.3), "mu": (0.5, 0.9), "lk": (0, 0.1), "ll": (0, 0.1),
    "dis": (10, 50),
    "xcostk": (30, 60), "xcostl": (20, 40), "ucostk": (10, 20), "ucostl": (5, 15),
    "ycostkl": (5, 10), "ycostlpl": (5, 10), "rcostkl": (10, 30), "rcostlpl": (10, 30),
    "ncostl": (2, 5), "ncostkl": (1, 3), "ncostlm": (1, 3), "ncostlpl": (1, 3),
    "hcostk": (0.05, 0.2), "hcostl": (0.01, 0.05), "qcostkl": (0.1, 0.5), "qcostlpl": (0.1, 0.5),
    "pcostk": (0.1, 0.5), "pcostl": (0.1, 0.5), "Fcostk": (0.01, 0.05), "Fcostl": (0.01, 0.05),
    "icost": (4, 8), "clcostk": (5, 15), "WCost": (0.5, 1.5),
    "OP": (1, 2), "pr": (10, 20), "ERPP": (2, 5),
    "Pulv": (0.05, 0.2), "lambdaE": (0.5, 1.5),
    "WNK": (0, 0), "WEK": (0, 0), "WNL": (0, 0), "WEL": (0, 0), "NLab": (10, 20), "W": (0.5, 1),
    "Maxnum": (10, 10), "NR": (1, 1), "ND": (0, 0), "ivk0": (0, 0), "ivl0": (0, 0),
}


def fill_params(sets: InstanceSets, rng: np.random.Generator, **overrides) -> dict:
    """Every table of the data model, drawn from ``RANGES`` unless overridden.

    Overrides may be scalars (broadcast) or full arrays.
    """
    out = {}
    for name, spec in PARAM_SPECS.items():
        shape = sets.shape(spec.dims)
        if name in overrides:
            out[name] = np.broadcast_to(np.asarray(overrides[name], dtype=float), shape).copy()
        elif spec.rule == "binary-matrix":
            out[name] = rng.integers(0, 2, size=shape).astype(float)
        else:
            lo, hi = RANGES[name]
            out[name] = np.round(rng.uniform(lo, hi, size=shape), 2)
    # a vehicle moves no product by pipeline
    pipe = [i for i, v in enumerate(sets.V) if v == sets.pipeline_mode]
    if "trc" not in overrides and pipe:
        out["trc"][pipe, :] = 0.0
    return out


def _ids(prefix, n, start=1):
    return [f"{prefix}{i}" for i in range(start, start + n)]


def make_instance(sets: dict, refinery_owner: dict, dc_owners: dict, seed=0, name="synthetic", **overrides):
    """Assemble an instance from plain set lists; ``pipeline_mode`` defaults to ``pipe``."""
    sets = dict(sets)
    mode = sets.pop("pipeline_mode", "pipe")
    s = InstanceSets(mode, **sets)
    rng = np.random.default_rng(seed)
    params = fill_params(s, rng, **overrides)
    return ModelInstance(s, ParameterTables(params), refinery_owner, dc_owners, name, f"seed {seed}")


def _tiny_draw(rng: np.random.Generator, seed):
    nE = int(rng.integers(1, 3))
    E = _ids("e", nE)
    nK = int(rng.integers(0, 3))
    nKp = int(rng.integers(0, 3 - nK))
    nL = nE if nE == 2 else int(rng.integers(1, 3))
    nLp = int(rng.integers(0, 3 - nL)) if nL < 2 else 0
    K, Kp = _ids("k", nK), _ids("k", nKp, nK + 1)
    L, Lp = _ids("l", nL), _ids("l", nLp, nL + 1)
    flag = lambda p: int(rng.random() < p)
    sets = {
        "K": K, "Kp": Kp, "L": L, "Lp": Lp,
        "M": _ids("m", int(rng.integers(1, 3))),
        "V": ["road", "pipe"],
        "LCV": ["c1"],
        "P": _ids("p", int(rng.integers(1, 3))),
        "EK": _ids("ek", flag(0.7)), "EL": _ids("el", flag(0.7)),
        "UK": _ids("uk", flag(0.5)), "UL": _ids("ul", flag(0.3)),
        "EV": _ids("ev", flag(0.3)), "EZ": _ids("ez", flag(0.7)),
        "LV": _ids("lv", flag(0.3)), "RV": ["r1"],
        "E": E, "EN": ["n1"], "LEV": [],
        "T": _ids("t", int(rng.integers(1, 3))),
        "I": ["i1"],
    }
    ref_owner = {k: E[int(rng.integers(0, nE))] for k in K + Kp}
    dc_owner = {}
    for i, l in enumerate(L):
        if nE == 2 and nL == 2:
            dc_owner[l] = [E[i]] if rng.random() < 0.7 else list(E)
        else:
            dc_owner[l] = list(E)
    for l in Lp:
        dc_owner[l] = [E[int(rng.integers(0, nE))]]
    sub = int(rng.integers(0, 2**31))
    return make_instance(sets, ref_owner, dc_owner, seed=sub, name=f"tiny-{seed}")


def count_discrete(inst) -> int:
    from .model import build_model

    return len(build_model(inst, check=False).model.discrete_vars())


def tiny_instance(seed: int, max_discrete: int = 24, attempts: int = 500) -> ModelInstance:
    """Random small scenario whose built model has at most ``max_discrete`` integer variables.

    At most 2 refineries, 2 DCs, 2 customers, 2 products, 2 periods and 2 stakeholders.
    """
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        inst = _tiny_draw(rng, seed)
        if count_discrete(inst) <= max_discrete:
            return inst
    raise RuntimeError(f"no tiny instance within {max_discrete} discrete variables for seed {seed}")


def reference_tiny() -> ModelInstance:
    """Fixed small scenario used for sensitivity runs and demos.

    One stakeholder with an existing refinery, a candidate refinery, one
    existing DC, two customers, one product and one period. Fleets are the
    shared bottleneck, so profit and transport pollution pull apart.
    """
    sets = {
        "K": ["k1"], "Kp": ["k2"], "L": ["l1"], "Lp": [],
        "M": ["m1", "m2"], "V": ["road", "pipe"], "LCV": ["c1"], "P": ["p1"],
        "EK": ["ek1"], "EL": [], "UK": ["uk1"], "UL": [], "EV": [], "EZ": [],
        "LV": [], "RV": [], "E": ["e1"], "EN": ["n1"], "LEV": [],
        "T": ["t1"], "I": ["i1"],
    }
    return make_instance(
        sets, {"k1": "e1", "k2": "e1"}, {"l1": ["e1"]}, seed=7, name="reference-tiny",
        nmax=6, icl=40, Rkl=1, Nk=1, Nek=1,
    )


def reference_full() -> ModelInstance:
    """Non-degenerate scenario in which every constraint family has a non-empty domain.

    Built for structure checks only; it is far too large for the embedded solver.
    """
    sets = {
        "K": ["k1", "k2"], "Kp": ["k3"], "L": ["l1", "l2", "l3"], "Lp": ["l4", "l5"],
        "M": ["m1", "m2"], "V": ["road", "rail", "pipe"], "LCV": ["c1", "c2"], "P": ["p1", "p2"],
        "EK": ["ek1", "ek2"], "EL": ["el1", "el2"], "UK": ["uk1", "uk2"], "UL": ["ul1"],
        "EV": ["ev1"], "EZ": ["ez1", "ez2"], "LV": ["lv1"], "RV": ["r1"],
        "E": ["e1", "e2"], "EN": ["n1", "n2"], "LEV": ["lev1", "lev2"],
        "T": ["t1", "t2"], "I": ["i1"],
    }
    owners = {"k1": "e1", "k2": "e2", "k3": "e1"}
    dcs = {"l1": ["e1", "e2"], "l2": ["e1", "e2"], "l3": ["e1", "e2"], "l4": ["e1"], "l5": ["e1"]}
    return make_instance(
        sets, owners, dcs, seed=11, name="reference-full",
        Rkl=1, Rlpl=1, Nk=1, Nek=1, Nl=1, Nel=1,
        WNK=0.1, WEK=0.1, WNL=0.1, WEL=0.1, ND=1, NR=1, ivk0=1, ivl0=1,
    )


def anti_loop_instance(n_dcs: int = 3, seed: int = 3) -> ModelInstance:
    """Existing DCs joined by existing pipelines, no demand and no fleets.

    Flows between DCs are bounded by pipeline capacity only, so random
    objectives on those flows push toward cyclic routings.
    """
    L = _ids("l", n_dcs)
    sets = {
        "K": [], "Kp": [], "L": L, "Lp": [], "M": ["m1"], "V": ["pipe"], "LCV": [],
        "P": ["p1"], "EK": [], "EL": [], "UK": [], "UL": [], "EV": [], "EZ": [], "LV": [], "RV": [],
        "E": ["e1"], "EN": ["n1"], "LEV": [], "T": ["t1"], "I": ["i1"],
    }
    return make_instance(
        sets, {}, {l: ["e1"] for l in L}, seed=seed, name="anti-loop",
        d=0, Rlpl=1, lk=0, ll=0, Nel=0,
    )
