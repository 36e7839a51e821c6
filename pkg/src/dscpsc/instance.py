"""Scenario data model: index sets, parameter tables and facility ownership.

Instances are stored as one JSON document::

    {"schema": "dscpsc/1",
     "sets": {"K": [...], "Kp": [...], ..., "pipeline_mode": "pipe"},
     "params": {"d": [[[...]]], ...},
     "ownership": {"refineries": [[k, e], ...], "dcs": [[l, [e, ...]], ...]},
     "meta": {"name": ..., "description": ...}}

Tables are dense nested arrays in the index order given by ``PARAM_SPECS``.
``KA`` stands for existing plus candidate refineries (``K`` then ``Kp``) and
``LA`` for existing plus candidate DCs. See ``docs/instance_schema.md``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .errors import ParseError, ValidationError

SCHEMA = "dscpsc/1"

SET_NAMES = (
    "K", "Kp", "L", "Lp", "M", "V", "LCV", "P", "EK", "EL", "UK", "UL",
    "EV", "EZ", "LV", "RV", "E", "EN", "LEV", "T", "I",
)
REQUIRED_NONEMPTY = ("M", "P", "E", "T", "V")


@dataclass(frozen=True)
class ParamSpec:
    dims: tuple
    rule: str = "non-negative"
    label: str | None = None


PARAM_SPECS: dict[str, ParamSpec] = {
    # scalars
    "TPP": ParamSpec(()),
    "big_m": ParamSpec((), "positive"),
    "Pulk": ParamSpec(()),
    "Pull": ParamSpec(()),
    "Per": ParamSpec(()),
    # demand and capacities
    "d": ParamSpec(("P", "M", "T"), label="demand"),
    "D": ParamSpec(("P", "T", "E"), label="stakeholder demand"),
    "ick": ParamSpec(("K",)),
    "icl": ParamSpec(("P", "L")),
    "capk": ParamSpec(("K", "UK")),
    "capl": ParamSpec(("L", "UL")),
    "Nck": ParamSpec(("Kp", "EK")),
    "Ncl": ParamSpec(("Lp", "EL")),
    "Nct": ParamSpec(("Lp", "EZ")),
    "icapkl": ParamSpec(("K", "L")),
    "icaplpl": ParamSpec(("L", "L")),
    "capkl": ParamSpec(("K", "L", "EV")),
    "caplpl": ParamSpec(("L", "L", "EV")),
    "clv": ParamSpec(("LV",)),
    "trc": ParamSpec(("V", "LCV")),
    "nmax": ParamSpec(("LCV",)),
    "w": ParamSpec(("I",)),
    # coefficients
    "Mk": ParamSpec(("Kp", "EK"), "fraction-range"),
    "Ml": ParamSpec(("P", "Lp", "EZ"), "fraction-range"),
    "mu": ParamSpec(("P",), "positive"),
    "lk": ParamSpec(("KA",), "fraction-range"),
    "ll": ParamSpec(("LA",), "fraction-range"),
    "Rkl": ParamSpec(("K", "L"), "binary-matrix"),
    "Rlpl": ParamSpec(("L", "L"), "binary-matrix"),
    "Nk": ParamSpec(("EN", "Kp"), "binary-matrix"),
    "Nek": ParamSpec(("EN", "K"), "binary-matrix"),
    "Nl": ParamSpec(("EN", "Lp"), "binary-matrix"),
    "Nel": ParamSpec(("EN", "L"), "binary-matrix"),
    "dis": ParamSpec(("LA", "M")),
    # costs
    "xcostk": ParamSpec(("Kp", "EK", "T")),
    "xcostl": ParamSpec(("Lp", "EL", "T")),
    "ucostk": ParamSpec(("K", "UK", "T")),
    "ucostl": ParamSpec(("L", "UL", "P", "T")),
    "ycostkl": ParamSpec(("K", "L", "EV", "T")),
    "ycostlpl": ParamSpec(("L", "L", "EV", "T")),
    "rcostkl": ParamSpec(("KA", "LA", "LV", "RV", "T")),
    "rcostlpl": ParamSpec(("LA", "LA", "LV", "RV", "T")),
    "ncostl": ParamSpec(("Lp", "EZ", "T")),
    "ncostkl": ParamSpec(("KA", "LA", "V", "LCV", "T")),
    "ncostlm": ParamSpec(("LA", "M", "V", "LCV", "T")),
    "ncostlpl": ParamSpec(("LA", "LA", "V", "LCV", "T")),
    "hcostk": ParamSpec(("KA",)),
    "hcostl": ParamSpec(("P", "LA")),
    "qcostkl": ParamSpec(("KA", "LA", "T")),
    "qcostlpl": ParamSpec(("LA", "LA", "T")),
    "pcostk": ParamSpec(("KA", "T")),
    "pcostl": ParamSpec(("P", "LA", "T")),
    "Fcostk": ParamSpec(("KA", "T")),
    "Fcostl": ParamSpec(("LA", "T")),
    "icost": ParamSpec(("P", "T")),
    "clcostk": ParamSpec(("K", "T")),
    "WCost": ParamSpec(("LEV", "T")),
    # prices
    "OP": ParamSpec(("T",)),
    "pr": ParamSpec(("E", "P", "T")),
    "ERPP": ParamSpec(("P", "T", "E")),
    # pollution
    "Pulv": ParamSpec(("V", "LCV")),
    "lambdaE": ParamSpec(("EN",)),
    # labor
    "WNK": ParamSpec(("LEV",)),
    "WEK": ParamSpec(("LEV",)),
    "WNL": ParamSpec(("LEV",)),
    "WEL": ParamSpec(("LEV",)),
    "NLab": ParamSpec(("EN", "LEV", "T")),
    "W": ParamSpec(("EN", "EN")),
    # coverage
    "Maxnum": ParamSpec(("EN",)),
    "NR": ParamSpec(("EN",)),
    "ND": ParamSpec(("EN",)),
    # inventory entering the first period
    "ivk0": ParamSpec(("KA",)),
    "ivl0": ParamSpec(("P", "LA", "E")),
}


@dataclass(frozen=True)
class Violation:
    table: str
    index: tuple
    rule: str
    detail: str = ""

    def describe(self):
        spec = PARAM_SPECS.get(self.table)
        label = spec.label if spec and spec.label else self.table
        if self.rule == "not-total":
            text = f"{label} table not total"
        else:
            text = f"{label}: rule {self.rule}"
        if self.index:
            text += f" at {self.table}[{','.join(str(i) for i in self.index)}]"
        if self.detail:
            text += f" ({self.detail})"
        return text


class InstanceSets:
    """Ordered identifier collections plus the designated pipeline mode."""

    def __init__(self, pipeline_mode, **sets):
        unknown = set(sets) - set(SET_NAMES)
        if unknown:
            raise TypeError(f"unknown sets {sorted(unknown)}")
        self._sets = {name: tuple(sets.get(name, ())) for name in SET_NAMES}
        self.pipeline_mode = pipeline_mode
        self._pos = {name: {x: i for i, x in enumerate(v)} for name, v in self._sets.items()}
        self._pos["KA"] = {x: i for i, x in enumerate(self.KA)}
        self._pos["LA"] = {x: i for i, x in enumerate(self.LA)}

    def __getattr__(self, name):
        sets = self.__dict__.get("_sets")
        if sets is not None and name in sets:
            return sets[name]
        raise AttributeError(name)

    @property
    def KA(self):
        return self._sets["K"] + self._sets["Kp"]

    @property
    def LA(self):
        return self._sets["L"] + self._sets["Lp"]

    def get(self, name):
        if name == "KA":
            return self.KA
        if name == "LA":
            return self.LA
        return self._sets[name]

    def pos(self, set_name, ident):
        """Position of ``ident`` in ``set_name`` (used to index parameter arrays)."""
        return self._pos[set_name][ident]

    def size(self, set_name):
        return len(self.get(set_name))

    def shape(self, dims):
        return tuple(self.size(d) for d in dims)

    def as_dict(self):
        out = {name: list(v) for name, v in self._sets.items()}
        out["pipeline_mode"] = self.pipeline_mode
        return out

    def __eq__(self, other):
        return isinstance(other, InstanceSets) and self.as_dict() == other.as_dict()

    def __repr__(self):
        sizes = ", ".join(f"{k}={len(v)}" for k, v in self._sets.items() if v)
        return f"InstanceSets({sizes}, pipeline_mode={self.pipeline_mode!r})"


class ParameterTables:
    """Read-only parameter arrays keyed by table name; scalars read back as floats."""

    def __init__(self, tables: dict):
        store = {}
        for name, value in tables.items():
            arr = np.array(value, dtype=float)
            arr.setflags(write=False)
            store[name] = arr
        self._tables = MappingProxyType(store)

    def __getattr__(self, name):
        tables = self.__dict__.get("_tables")
        if tables is not None and name in tables:
            arr = tables[name]
            return float(arr) if arr.ndim == 0 else arr
        raise AttributeError(name)

    def __getitem__(self, name):
        return self._tables[name]

    def __contains__(self, name):
        return name in self._tables

    def names(self):
        return list(self._tables)

    def __reduce__(self):
        return ParameterTables, (dict(self._tables),)

    def replace(self, **updates) -> "ParameterTables":
        merged = dict(self._tables)
        merged.update(updates)
        return ParameterTables(merged)

    def __eq__(self, other):
        if not isinstance(other, ParameterTables) or set(self._tables) != set(other._tables):
            return False
        return all(
            self._tables[k].shape == other._tables[k].shape
            and np.array_equal(self._tables[k], other._tables[k], equal_nan=True)
            for k in self._tables
        )


@dataclass(frozen=True)
class ModelInstance:
    sets: InstanceSets
    params: ParameterTables
    refinery_owner: dict
    dc_owners: dict
    name: str = "instance"
    description: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "refinery_owner", MappingProxyType(dict(self.refinery_owner)))
        object.__setattr__(
            self, "dc_owners", MappingProxyType({l: tuple(es) for l, es in self.dc_owners.items()})
        )

    # ownership-restricted domains
    def K_e(self, e):
        return tuple(k for k in self.sets.K if self.refinery_owner.get(k) == e)

    def Kp_e(self, e):
        return tuple(k for k in self.sets.Kp if self.refinery_owner.get(k) == e)

    def KA_e(self, e):
        return self.K_e(e) + self.Kp_e(e)

    def L_e(self, e):
        return tuple(l for l in self.sets.L if e in self.dc_owners.get(l, ()))

    def Lp_e(self, e):
        return tuple(l for l in self.sets.Lp if e in self.dc_owners.get(l, ()))

    def LA_e(self, e):
        return self.L_e(e) + self.Lp_e(e)

    def E_l(self, l):
        return self.dc_owners.get(l, ())

    def __reduce__(self):
        return ModelInstance, (self.sets, self.params, dict(self.refinery_owner), dict(self.dc_owners),
                               self.name, self.description)

    def with_params(self, **updates) -> "ModelInstance":
        return ModelInstance(
            self.sets, self.params.replace(**updates), dict(self.refinery_owner),
            dict(self.dc_owners), self.name, self.description,
        )

    def scaled(self, factors: dict) -> "ModelInstance":
        """Copy with each named table multiplied by its factor."""
        return self.with_params(**{name: self.params[name] * f for name, f in factors.items()})

    def __eq__(self, other):
        return (
            isinstance(other, ModelInstance)
            and self.sets == other.sets
            and self.params == other.params
            and dict(self.refinery_owner) == dict(other.refinery_owner)
            and dict(self.dc_owners) == dict(other.dc_owners)
            and self.name == other.name
            and self.description == other.description
        )

    __hash__ = object.__hash__


# -- validation ---------------------------------------------------------


def _check_sets(sets: InstanceSets):
    out = []
    for name in SET_NAMES:
        ids = sets.get(name)
        if len(set(ids)) != len(ids):
            seen = set()
            for x in ids:
                if x in seen:
                    out.append(Violation(name, (x,), "duplicate-id"))
                seen.add(x)
    for name in REQUIRED_NONEMPTY:
        if not sets.get(name):
            out.append(Violation(name, (), "empty-set"))
    for a, b in (("K", "Kp"), ("L", "Lp")):
        for x in sorted(set(sets.get(a)) & set(sets.get(b)), key=str):
            out.append(Violation(b, (x,), "overlap", f"also in {a}"))
    if sets.pipeline_mode not in sets.V:
        out.append(Violation("V", (sets.pipeline_mode,), "pipeline-mode", "pipeline mode not in V"))
    return out


def _check_table(name, spec, arr, sets):
    out = []
    shape = sets.shape(spec.dims)
    if arr.shape != shape:
        return [Violation(name, (), "not-total", f"shape {arr.shape}, expected {shape}")]

    def ids(flat_index):
        pos = np.unravel_index(flat_index, shape) if shape else ()
        return tuple(sets.get(d)[p] for d, p in zip(spec.dims, pos))

    flat = arr.reshape(-1)
    nan = np.isnan(flat)
    for i in np.flatnonzero(nan):
        out.append(Violation(name, ids(i), "not-total"))
    inf = np.isinf(flat)
    for i in np.flatnonzero(inf):
        out.append(Violation(name, ids(i), "finite"))
    ok = ~(nan | inf)
    if spec.rule == "positive":
        bad = ok & (flat <= 0)
    elif spec.rule == "fraction-range":
        bad = ok & ((flat < 0) | (flat > 1))
    elif spec.rule == "binary-matrix":
        bad = ok & (flat != 0) & (flat != 1)
    else:
        bad = ok & (flat < 0)
    for i in np.flatnonzero(bad):
        out.append(Violation(name, ids(i), spec.rule))
    return out


def _check_ownership(inst: ModelInstance):
    out = []
    sets = inst.sets
    stake = set(sets.E)
    ka, la = set(sets.KA), set(sets.LA)
    for k, e in inst.refinery_owner.items():
        if k not in ka:
            out.append(Violation("ownership.refineries", (k,), "ownership-unknown", "unknown refinery"))
        if e not in stake:
            out.append(Violation("ownership.refineries", (k,), "ownership-unknown", f"unknown stakeholder {e!r}"))
    for k in sets.KA:
        if k not in inst.refinery_owner:
            out.append(Violation("ownership.refineries", (k,), "ownership-missing"))
    for l, es in inst.dc_owners.items():
        if l not in la:
            out.append(Violation("ownership.dcs", (l,), "ownership-unknown", "unknown DC"))
        if not es:
            out.append(Violation("ownership.dcs", (l,), "ownership-empty"))
        for e in es:
            if e not in stake:
                out.append(Violation("ownership.dcs", (l,), "ownership-unknown", f"unknown stakeholder {e!r}"))
        if len(set(es)) != len(es):
            out.append(Violation("ownership.dcs", (l,), "duplicate-id"))
    for l in sets.LA:
        if l not in inst.dc_owners:
            out.append(Violation("ownership.dcs", (l,), "ownership-missing"))
    return out


def validate(instance: ModelInstance) -> list[Violation]:
    """Every invariant violation in ``instance``; empty when it is well formed."""
    out = _check_sets(instance.sets)
    for name, spec in PARAM_SPECS.items():
        if name not in instance.params:
            out.append(Violation(name, (), "missing-table"))
            continue
        out.extend(_check_table(name, spec, instance.params[name], instance.sets))
    out.extend(_check_ownership(instance))
    return out


def demand_split_warnings(instance: ModelInstance) -> list[str]:
    """Periods where planned stakeholder demand exceeds total customer demand."""
    p = instance.params
    sets = instance.sets
    out = []
    total = p.d.sum(axis=1)  # [P, T]
    planned = p.D.sum(axis=2)  # [P, T]
    for pi, prod in enumerate(sets.P):
        for ti, t in enumerate(sets.T):
            if planned[pi, ti] > total[pi, ti] * (1 + 1e-12) + 1e-12:
                out.append(
                    f"sum over stakeholders of D[{prod},{t},*] = {planned[pi, ti]:g} exceeds "
                    f"sum over zones of d[{prod},*,{t}] = {total[pi, ti]:g}"
                )
    return out


# -- JSON ingestion -----------------------------------------------------


def _parse_dense(value, dims, sets, locus):
    """Nested list to float array; missing entries (short lists or null) become NaN."""
    shape = sets.shape(dims)
    arr = np.full(shape, np.nan)

    def walk(node, depth, prefix, where):
        if depth == len(shape):
            if node is None:
                return
            if isinstance(node, bool) or not isinstance(node, (int, float)):
                raise ParseError(f"expected a number, got {type(node).__name__}", where)
            arr[prefix] = float(node)
            return
        if node is None:
            return
        if not isinstance(node, list):
            raise ParseError(f"expected a list over {dims[depth]}", where)
        if len(node) > shape[depth]:
            raise ParseError(f"{len(node)} entries but |{dims[depth]}| = {shape[depth]}", where)
        for i, child in enumerate(node):
            walk(child, depth + 1, prefix + (i,), f"{where}[{i}]")

    walk(value, 0, (), locus)
    return arr


def instance_from_dict(doc: dict, check: bool = True) -> ModelInstance:
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    if doc.get("schema") != SCHEMA:
        raise ParseError(f"unsupported schema {doc.get('schema')!r}, expected {SCHEMA!r}", "schema")
    for key in ("sets", "params", "ownership"):
        if not isinstance(doc.get(key), dict):
            raise ParseError(f"missing or non-object {key!r}", key)
    raw_sets = dict(doc["sets"])
    if "pipeline_mode" not in raw_sets:
        raise ParseError("sets.pipeline_mode is required", "sets.pipeline_mode")
    mode = raw_sets.pop("pipeline_mode")
    for name, ids in raw_sets.items():
        if name not in SET_NAMES:
            raise ParseError(f"unknown set {name!r}", f"sets.{name}")
        if not isinstance(ids, list) or not all(isinstance(x, (str, int)) and not isinstance(x, bool) for x in ids):
            raise ParseError("set must be a list of string or integer identifiers", f"sets.{name}")
    sets = InstanceSets(mode, **raw_sets)

    tables = {}
    for name, value in doc["params"].items():
        spec = PARAM_SPECS.get(name)
        if spec is None:
            raise ParseError(f"unknown parameter table {name!r}", f"params.{name}")
        tables[name] = _parse_dense(value, spec.dims, sets, f"params.{name}")
    params = ParameterTables(tables)

    own = doc["ownership"]
    try:
        refineries = {k: e for k, e in own.get("refineries", [])}
        dcs = {l: list(es) for l, es in own.get("dcs", [])}
    except (TypeError, ValueError):
        raise ParseError("ownership entries must be [facility, owner(s)] pairs", "ownership") from None
    meta = doc.get("meta") or {}
    inst = ModelInstance(sets, params, refineries, dcs, meta.get("name", "instance"), meta.get("description", ""))
    if check:
        bad = validate(inst)
        if bad:
            raise ValidationError(bad)
        for msg in demand_split_warnings(inst):
            warnings.warn(msg, stacklevel=2)
    return inst


def load_instance(path) -> ModelInstance:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return instance_from_dict(doc)


def _tolist(arr):
    out = arr.tolist()

    def clean(x):
        if isinstance(x, list):
            return [clean(v) for v in x]
        if isinstance(x, float) and math.isnan(x):
            return None
        if isinstance(x, float) and x.is_integer() and abs(x) < 2**53:
            return int(x)
        return x

    return clean(out)


def instance_to_dict(inst: ModelInstance) -> dict:
    return {
        "schema": SCHEMA,
        "sets": inst.sets.as_dict(),
        "params": {name: _tolist(inst.params[name]) for name in inst.params.names()},
        "ownership": {
            "refineries": [[k, e] for k, e in inst.refinery_owner.items()],
            "dcs": [[l, list(es)] for l, es in inst.dc_owners.items()],
        },
        "meta": {"name": inst.name, "description": inst.description},
    }


def save_instance(inst: ModelInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst), fh, indent=1)
        fh.write("\n")
