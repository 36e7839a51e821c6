"""Cost breakdown and fuzzy-result renderers (CSV, JSON, terminal table)."""

from __future__ import annotations

import csv
import io
import json

from ..model import COST_CATEGORIES, CostBreakdown


def cost_breakdown_report(fuzzy_report) -> CostBreakdown:
    if fuzzy_report.costs is None:
        raise ValueError(f"no solution to decompose (status {fuzzy_report.status.value})")
    return fuzzy_report.costs


def costs_to_csv(costs: CostBreakdown):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("stakeholder", "category", "value"))
    for e, cat, value in costs.rows():
        w.writerow((e, cat, repr(value)))
    for e, total in costs.totals.items():
        w.writerow((e, "total", repr(total)))
    return buf.getvalue()


def costs_to_table(costs: CostBreakdown):
    es = list(costs.categories)
    head = f"{'Cost category':<20}" + "".join(f"{str(e):>16}" for e in es)
    lines = [head, "-" * len(head)]
    for cat in COST_CATEGORIES:
        lines.append(f"{cat:<20}" + "".join(f"{costs.categories[e][cat]:>16.6g}" for e in es))
    lines.append("-" * len(head))
    lines.append(f"{'total':<20}" + "".join(f"{costs.totals[e]:>16.6g}" for e in es))
    return "\n".join(lines)


def render(fuzzy_report, fmt="table"):
    """Fuzzy result plus cost breakdown in one of csv, json or table."""
    if fmt == "json":
        return fuzzy_report.to_json()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("stakeholder", "profit", "pollution", "jobs", "lambda"))
        for e, v in fuzzy_report.stakeholders.items():
            w.writerow((e, repr(v["profit"]), repr(v["pollution"]), repr(v["jobs"]), repr(fuzzy_report.lambda_)))
        out = buf.getvalue()
        if fuzzy_report.costs is not None:
            out += "\n" + costs_to_csv(fuzzy_report.costs)
        return out
    if fmt == "table":
        out = fuzzy_report.render_table()
        if fuzzy_report.costs is not None:
            out += "\n\n" + costs_to_table(fuzzy_report.costs)
        return out
    raise ValueError(f"unknown format {fmt!r}")


def render_saved(doc: dict, fmt="table"):
    """Render a JSON document previously written by ``solve --output``."""
    if fmt == "json":
        return json.dumps(doc, indent=2)
    rows = doc.get("stakeholders") or {}
    lam = doc.get("lambda")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("stakeholder", "profit", "pollution", "jobs", "lambda"))
        for e, v in rows.items():
            w.writerow((e, repr(v["profit"]), repr(v["pollution"]), repr(v["jobs"]), repr(lam)))
        return buf.getvalue()
    if fmt == "table":
        head = f"{'Stakeholder':<14}{'Profit P_e':>16}{'Pollution Pul_e':>18}{'Jobs S_e':>14}"
        lines = [head, "-" * len(head)]
        for e, v in rows.items():
            lines.append(f"{e:<14}{v['profit']:>16.6g}{v['pollution']:>18.6g}{v['jobs']:>14.6g}")
        lines.append("-" * len(head))
        lines.append(f"lambda = {'n/a' if lam is None else format(lam, '.5f')}   status = {doc.get('status')}")
        return "\n".join(lines)
    raise ValueError(f"unknown format {fmt!r}")
