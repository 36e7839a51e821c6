"""Re-solve sensitivity grid: scale one group of cost tables, re-run the fuzzy solve, compare."""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import DscpscError, InfeasibleModel
from ..fuzzy import FuzzyReport, solve_fuzzy

GROUPS = {
    "pipeline-transport-costs": ("qcostkl", "qcostlpl"),
    "non-pipeline-transport-costs": ("ncostkl", "ncostlm", "ncostlpl"),
    "facility-expansion-costs": ("ucostk", "ucostl"),
    "inventory-costs": ("hcostk", "hcostl"),
    "variable-costs": ("pcostk", "pcostl"),
    "route-install-and-expansion-costs": ("rcostkl", "rcostlpl", "ycostkl", "ycostlpl"),
    "facility-installation-costs": ("xcostk", "xcostl", "ncostl"),
    "fixed-costs": ("Fcostk", "Fcostl"),
}
LEVELS = (-30, -20, -10, 10, 20, 30)
METRICS = ("profit", "lambda", "cost")
CSV_HEADER = ("group", "level_pct", "stakeholder", "metric", "pct_change", "status")


def perturb(instance, group, level_pct):
    """Copy of ``instance`` with every member table of ``group`` scaled by ``1 + level_pct/100``."""
    factor = 1.0 + level_pct / 100.0
    return instance.scaled({name: factor for name in GROUPS[group]})


def scaling_diff(a, b):
    """Names of parameter tables whose contents differ between two instances."""
    return sorted(n for n in a.params.names() if not np.array_equal(a.params[n], b.params[n]))


def metric_values(report: FuzzyReport, metric):
    if metric == "profit":
        return {e: v["profit"] for e, v in report.stakeholders.items()}
    if metric == "lambda":
        return {e: report.lambda_ for e in report.stakeholders}
    if metric == "cost":
        return dict(report.costs.totals)
    raise ValueError(f"unknown metric {metric!r}")


def pct_change(base, value):
    """Signed percent change; None when the base is zero."""
    if base == 0:
        return None
    return 100.0 * (value - base) / abs(base)


@dataclass
class Cell:
    group: str
    level_pct: float
    stakeholder: str
    metric: str
    pct_change: float | None
    status: str
    value: float | None = None
    detail: str = ""

    def csv_row(self):
        if self.pct_change is None:
            change = "undefined" if self.status == "optimal" else ""
        else:
            change = repr(round(self.pct_change, 10))
        return [self.group, _level_str(self.level_pct), self.stakeholder, self.metric, change, self.status]


def _level_str(level):
    return str(int(level)) if float(level).is_integer() else repr(level)


@dataclass
class SensitivityReport:
    metric: str
    groups: list
    levels: list
    stakeholders: list
    base_values: dict
    cells: list = field(default_factory=list)
    sanity: dict = field(default_factory=dict)
    base: FuzzyReport | None = None
    freeze_bounds: bool = False

    def cell(self, group, level, stakeholder):
        for c in self.cells:
            if c.group == group and c.level_pct == level and c.stakeholder == stakeholder:
                return c
        raise KeyError((group, level, stakeholder))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for c in self.cells:
            w.writerow(c.csv_row())
        return buf.getvalue()

    def to_dict(self):
        return {
            "metric": self.metric,
            "approximate_bounds": self.freeze_bounds,
            "base_values": {str(e): v for e, v in self.base_values.items()},
            "sanity": {str(e): v for e, v in self.sanity.items()},
            "cells": [asdict(c) for c in self.cells],
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)

    def render_table(self):
        """One row per (group, level); one change column per stakeholder."""
        cols = [f"Stakeholder {e} %" for e in self.stakeholders]
        head = f"{'Parameter group':<36}{'Change %':>9}" + "".join(f"{c:>18}" for c in cols)
        lines = [head, "-" * len(head)]
        for g in self.groups:
            for lv in self.levels:
                row = f"{g:<36}{_level_str(lv):>9}"
                for e in self.stakeholders:
                    c = self.cell(g, lv, e)
                    if c.pct_change is not None:
                        txt = f"{c.pct_change:.2f}"
                    else:
                        txt = "undefined" if c.status == "optimal" else c.status
                    row += f"{txt:>18}"
                lines.append(row)
        if self.freeze_bounds:
            lines.append("(approximate: fuzzy bounds frozen at the base solve)")
        return "\n".join(lines)


def _solve_cell(args):
    instance, group, level, backend, mode, bounds, metric = args
    try:
        rep = solve_fuzzy(perturb(instance, group, level), backend, mode=mode, bounds=bounds)
    except DscpscError as exc:
        return group, level, "error", None, f"{type(exc).__name__}: {exc}"
    if rep.solution is None:
        return group, level, rep.status.value, None, rep.detail
    return group, level, rep.status.value, metric_values(rep, metric), ""


def default_jobs():
    try:
        return max(1, int(os.environ.get("DSCPSC_JOBS", "1")))
    except ValueError:
        return 1


def run_sensitivity(instance, groups=None, levels=LEVELS, backend=None, metric="profit", mode="chain",
                    freeze_bounds=False, jobs=None) -> SensitivityReport:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    groups = list(groups or GROUPS)
    for g in groups:
        if g not in GROUPS:
            raise ValueError(f"unknown parameter group {g!r}")
    levels = list(levels)
    base = solve_fuzzy(instance, backend, mode=mode)
    if base.solution is None:
        raise InfeasibleModel(f"base solve failed: {base.status.value} {base.detail}")
    base_vals = metric_values(base, metric)
    E = list(base.stakeholders)
    bounds = base.bounds if freeze_bounds else None
    report = SensitivityReport(metric, groups, levels, [str(e) for e in E], base_vals,
                               base=base, freeze_bounds=freeze_bounds)

    tasks = [(instance, g, lv, backend, mode, bounds, metric) for g in groups for lv in levels]
    jobs = jobs or default_jobs()
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_solve_cell, tasks))
    else:
        results = [_solve_cell(t) for t in tasks]

    for group, level, status, values, detail in results:
        for e in E:
            if values is None:
                report.cells.append(Cell(group, level, str(e), metric, None, status, None, detail))
            else:
                report.cells.append(Cell(group, level, str(e), metric, pct_change(base_vals[e], values[e]),
                                         status, values[e]))
    names = report.stakeholders
    report.cells.sort(key=lambda c: (groups.index(c.group), c.level_pct, names.index(c.stakeholder)))

    # unperturbed re-solve: must reproduce the base exactly
    _, _, status, values, _ = _solve_cell((instance, groups[0], 0.0, backend, mode, bounds, metric))
    report.sanity = {str(e): (pct_change(base_vals[e], values[e]) if values else None) for e in E}
    return report
