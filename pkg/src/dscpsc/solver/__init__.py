"""Solver backends: an embedded exact oracle and an external MPS-driven solver."""

from .backend import EMBEDDED, EXTERNAL, SolveLog, SolverBackend
from .exact import solve_exact_tiny
from .external import find_cbc, solve_external
from .mps import mangle, mps_string, write_mps


def solve(model, backend: SolverBackend | None = None):
    """Solve ``model`` with ``backend`` (embedded oracle by default)."""
    backend = backend or SolverBackend.embedded()
    if backend.kind == EMBEDDED:
        return solve_exact_tiny(model, backend)
    if backend.kind == EXTERNAL:
        return solve_external(model, backend)
    raise ValueError(f"unknown backend kind {backend.kind!r}")


__all__ = [
    "EMBEDDED",
    "EXTERNAL",
    "SolveLog",
    "SolverBackend",
    "find_cbc",
    "mangle",
    "mps_string",
    "solve",
    "solve_exact_tiny",
    "solve_external",
    "write_mps",
]
