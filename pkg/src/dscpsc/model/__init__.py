"""DSCPSC model construction."""

from .builder import BuildOptions, BuildReport, BuiltModel, build_model
from .catalog import FAMILIES, Scope, VariableCatalog, var_name
from .constraints import FAMILY_TAGS
from .objectives import COST_CATEGORIES, CostBreakdown

__all__ = [
    "BuildOptions",
    "BuildReport",
    "BuiltModel",
    "COST_CATEGORIES",
    "CostBreakdown",
    "FAMILIES",
    "FAMILY_TAGS",
    "Scope",
    "VariableCatalog",
    "build_model",
    "var_name",
]
