"""Backend configuration and solve logs."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

DEFAULT_CBC_ARGS = (
    "{model}",
    "-ratio",
    "{mip_gap}",
    "-sec",
    "{time_limit}",
    "-solve",
    "-solu",
    "{solution}",
)

EMBEDDED = "embedded-exact"
EXTERNAL = "external"


@dataclass(frozen=True)
class SolverBackend:
    """How to solve a model.

    ``args`` is the argv template handed to an external solver after the
    executable; ``{model}``, ``{solution}``, ``{time_limit}`` and ``{mip_gap}``
    are substituted. ``max_discrete`` bounds the embedded oracle.
    """

    kind: str = EMBEDDED
    executable: str | None = None
    args: tuple = DEFAULT_CBC_ARGS
    dialect: str = "cbc"
    time_limit: float | None = None
    mip_gap: float = 0.0
    max_discrete: int = 24
    rational: bool = False
    workdir: str | None = None

    @classmethod
    def embedded(cls, **kw):
        return cls(kind=EMBEDDED, **kw)

    @classmethod
    def external(cls, **kw):
        return cls(kind=EXTERNAL, **kw)

    @classmethod
    def from_name(cls, name: str, **kw):
        if name in ("embedded", EMBEDDED):
            return cls.embedded(**kw)
        if name == EXTERNAL:
            return cls.external(**kw)
        raise ValueError(f"unknown backend {name!r}")

    def with_options(self, **kw):
        return replace(self, **kw)

    def resolve_executable(self):
        """Executable path: DSCPSC_SOLVER, then the configured path, then a bundled or PATH cbc."""
        env = os.environ.get("DSCPSC_SOLVER")
        if env:
            return env
        if self.executable:
            return self.executable
        from .external import find_cbc

        return find_cbc()


@dataclass
class SolveLog:
    backend: str
    wall_time: float
    nodes: int
    termination: str
    bound: float | None
    lp_solves: int = 0
    objective: float | None = None
    detail: str = ""
    exact_objective: object = field(default=None, repr=False)

    def to_dict(self):
        return {
            "backend": self.backend,
            "wall_time": self.wall_time,
            "nodes": self.nodes,
            "termination": self.termination,
            "bound": self.bound,
            "lp_solves": self.lp_solves,
            "objective": self.objective,
            "detail": self.detail,
        }
