"""MPS writer.

Output uses the classic section layout with fields padded to the fixed-format
columns; names longer than a fixed field simply widen the line, so the file is
also valid free-format MPS. A name is mangled as follows: every character
outside ``[A-Za-z0-9_.,:()\\[\\]+-]`` becomes ``_``; a result longer than 255
characters keeps its first 246 characters followed by ``~`` and the first 8 hex
digits of the SHA-1 of the original name. Two distinct names that mangle to the
same string raise :class:`NameMangleCollision`.

Minimizing solvers are the target, so a ``max`` objective is written negated;
a comment line records the original sense. The objective constant is written
as minus the RHS entry of the objective row.
"""

from __future__ import annotations

import hashlib
import re

from ..errors import NameMangleCollision
from ..milp import MilpModel, ObjSense, Sense, VarKind

MAX_NAME = 255
_BAD = re.compile(r"[^A-Za-z0-9_.,:()\[\]+\-]")
_ROW_TYPE = {Sense.LE: "L", Sense.GE: "G", Sense.EQ: "E"}
OBJ_ROW = "OBJ"


def mangle(name: str) -> str:
    out = _BAD.sub("_", name) or "_"
    if len(out) > MAX_NAME:
        digest = hashlib.sha1(name.encode("utf-8")).hexdigest()[:8]
        out = out[: MAX_NAME - 9] + "~" + digest
    return out


def _mangle_all(names, kind, taken=None):
    seen = dict(taken or {})
    out = []
    for name in names:
        m = mangle(name)
        prev = seen.get(m)
        if prev is not None and prev != name:
            raise NameMangleCollision(f"{kind} names {prev!r} and {name!r} both mangle to {m!r}")
        seen[m] = name
        out.append(m)
    return out


def mps_names(model: MilpModel):
    """Mangled ``(column_names, row_names)``; the objective row is ``OBJ``."""
    cols = _mangle_all([v.name for v in model.vars], "variable")
    rows = _mangle_all([c.name for c in model.constraints], "constraint", {OBJ_ROW: "<objective>"})
    return cols, rows


def _num(v: float) -> str:
    v = float(v)
    if v == 0:
        return "0"
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _line(f1, f2, f3="", f4="", f5="", f6=""):
    # fixed-format columns 2-3, 5-12, 15-22, 25-36, 40-47, 50-61
    s = f" {f1:<2} {f2:<8}"
    if f3:
        s += f"  {f3:<8}  {f4:>12}"
        if f5:
            s += f"   {f5:<8}  {f6:>12}"
    return s.rstrip()


def mps_string(model: MilpModel) -> str:
    cols, rows = mps_names(model)
    out = [f"NAME          {mangle(model.name)}"]
    if model.active_objective is not None:
        obj = model.objective
        negate = obj.sense is ObjSense.MAX
        out.append(f"* objective {mangle(obj.name)} sense {obj.sense.value.upper()}"
                   + (" written negated" if negate else ""))
        obj_terms = {j: (-a if negate else a) for j, a in obj.expr.terms.items()}
        obj_const = -obj.expr.constant if negate else obj.expr.constant
    else:
        obj_terms, obj_const = {}, 0.0
    out.append("ROWS")
    out.append(_line("N", OBJ_ROW))
    for con, name in zip(model.constraints, rows):
        out.append(_line(_ROW_TYPE[con.sense], name))

    by_col: list[list[tuple[str, float]]] = [[] for _ in model.vars]
    for j, a in obj_terms.items():
        by_col[j].append((OBJ_ROW, a))
    for con, name in zip(model.constraints, rows):
        for j, a in con.expr.terms.items():
            by_col[j].append((name, a))

    out.append("COLUMNS")
    in_int = False
    marker = 0
    for j, vdef in enumerate(model.vars):
        if vdef.is_discrete != in_int:
            tag = "'INTORG'" if not in_int else "'INTEND'"
            out.append(f"    MARKER{marker:04d}  'MARKER'                 {tag}")
            marker += 1
            in_int = not in_int
        entries = by_col[j] or [(OBJ_ROW, 0.0)]
        for k in range(0, len(entries), 2):
            pair = entries[k : k + 2]
            fields = [cols[j], pair[0][0], _num(pair[0][1])]
            if len(pair) == 2:
                fields += [pair[1][0], _num(pair[1][1])]
            out.append(_line("", *fields))
    if in_int:
        out.append(f"    MARKER{marker:04d}  'MARKER'                 'INTEND'")

    out.append("RHS")
    rhs = []
    if obj_const != 0:
        rhs.append((OBJ_ROW, -obj_const))
    rhs += [(name, con.rhs) for con, name in zip(model.constraints, rows) if con.rhs != 0]
    for k in range(0, len(rhs), 2):
        pair = rhs[k : k + 2]
        fields = ["RHS", pair[0][0], _num(pair[0][1])]
        if len(pair) == 2:
            fields += [pair[1][0], _num(pair[1][1])]
        out.append(_line("", *fields))
    out.append("RANGES")

    out.append("BOUNDS")
    for vdef, name in zip(model.vars, cols):
        lo, up = vdef.lower, vdef.upper
        if vdef.kind is VarKind.BINARY:
            out.append(_line("BV", "BND", name))
        elif up is not None and lo == up:
            out.append(_line("FX", "BND", name, _num(lo)))
        else:
            if lo != 0:
                out.append(_line("LO", "BND", name, _num(lo)))
            if up is None:
                out.append(_line("PL", "BND", name))
            else:
                out.append(_line("UP", "BND", name, _num(up)))
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def write_mps(model: MilpModel, path) -> None:
    text = mps_string(model)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)
