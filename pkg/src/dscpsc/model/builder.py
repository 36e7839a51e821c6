"""Instance -> MILP translation and the build report."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import ValidationError
from ..instance import ModelInstance, validate
from ..milp import MilpModel
from .catalog import FAMILIES, Scope, VariableCatalog, declare_variables
from .constraints import FAMILY_TAGS, GENERATORS, BuildContext
from .objectives import ObjectiveSet, build_objectives

NORMALIZATIONS = (
    "tank-count link and single-tank-level rows drop the product index the variable z does not carry",
    "inventory and flow symbols use the variable catalog index order (p, l, t, e)",
    "refinery-inventory prior period at the first period is the initial stock ivk0; DC inventory uses ivl0",
    "DC storage-only-if-built row compares tank counts with DC builds in the same period",
    "pipeline-needs-endpoint rows for candidate DCs run over every refinery of the stakeholder",
    "labor stock at the first period equals the first-period newcomers",
    "coverage row reads sum(builds and expansions) + ND <= Maxnum with NR weighting DC expansions",
    "triangle anti-loop rows cover both orientations of each DC triple",
    "fuzzy min-sense linkage uses g <= g* - lambda (g* - g-)",
)


@dataclass
class BuildOptions:
    labor_weight_uniform: bool = False

    def get(self, key, default=None):
        return getattr(self, key, default)


@dataclass
class BuildReport:
    families: dict = field(default_factory=dict)
    variables: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    normalizations: tuple = NORMALIZATIONS

    @property
    def emitted(self):
        return sorted((t for t, f in self.families.items() if f["rows"] > 0), key=_tag_key)

    @property
    def vacuous(self):
        return {t: f["reason"] for t, f in self.families.items() if f["rows"] == 0}

    @property
    def unaccounted(self):
        return [t for t in FAMILY_TAGS if t not in self.families]

    def row_count(self, tag):
        return self.families[tag]["rows"]

    def to_dict(self):
        return {
            "families": self.families,
            "variables": self.variables,
            "emitted": self.emitted,
            "vacuous": self.vacuous,
            "unaccounted": self.unaccounted,
            "options": self.options,
            "normalizations": list(self.normalizations),
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)


def _tag_key(tag):
    return int(tag[2:])


def _cardinality(sc: Scope, symbol):
    if "|" in symbol:
        return max(_cardinality(sc, part) for part in symbol.split("|"))
    if symbol.endswith("_e"):
        table = getattr(sc, symbol)
        return max((len(v) for v in table.values()), default=0)
    if symbol == "NV":
        return len(sc.NV)
    return sc.sets.size(symbol)


def _vacuous_reason(sc, fam):
    if fam["skipped"]:
        return f"{fam['skipped']} rows over {fam['domain']} have no variables and hold trivially"
    cards = ", ".join(f"|{sym}|={_cardinality(sc, sym)}" for sym in fam["symbols"])
    return f"empty domain {fam['domain']} ({cards})"


class BuiltModel:
    """Model plus the handles needed for reporting."""

    def __init__(self, instance, model, catalog, objectives, report, scope):
        self.instance = instance
        self.model = model
        self.catalog: VariableCatalog = catalog
        self.objectives: ObjectiveSet = objectives
        self.report: BuildReport = report
        self.scope: Scope = scope

    def __iter__(self):
        # allows ``model, catalog = build_model(inst)``
        return iter((self.model, self.catalog))


def build_model(instance: ModelInstance, options: BuildOptions | None = None, check=True) -> BuiltModel:
    """Declare every variable family, emit eq6..eq88 and register the objectives."""
    options = options or BuildOptions()
    if check:
        bad = validate(instance)
        if bad:
            raise ValidationError(bad)
    sc = Scope(instance)
    model = MilpModel(instance.name or "dscpsc")
    catalog = declare_variables(model, sc)
    ctx = BuildContext(model, catalog, sc, options)
    for gen in GENERATORS:
        gen(ctx)
    objectives = build_objectives(ctx)
    report = BuildReport(options={"labor_weight_uniform": options.labor_weight_uniform})
    for tag in sorted(ctx.families, key=_tag_key):
        fam = dict(ctx.families[tag])
        fam["symbols"] = list(fam["symbols"])
        if fam["rows"] == 0:
            fam["reason"] = _vacuous_reason(sc, fam)
        report.families[tag] = fam
    report.variables = {f: catalog.count(f) for f in FAMILIES}
    model.finalize()
    return BuiltModel(instance, model, catalog, objectives, report, sc)
