"""Sensitivity experiments, reports and the command-line interface."""

from .reports import cost_breakdown_report
from .sensitivity import GROUPS, LEVELS, SensitivityReport, perturb, run_sensitivity, scaling_diff

__all__ = ["GROUPS", "LEVELS", "SensitivityReport", "cost_breakdown_report", "perturb", "run_sensitivity",
           "scaling_diff"]
