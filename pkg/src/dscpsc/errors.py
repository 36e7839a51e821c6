"""Exception hierarchy shared across the package."""


class DscpscError(Exception):
    """Base class for every error raised by this package."""


class ParseError(DscpscError):
    """Malformed instance file. ``locus`` names the line or field path."""

    def __init__(self, message, locus=None):
        self.locus = locus
        if locus is not None:
            message = f"{message} (at {locus})"
        super().__init__(message)


class ValidationError(DscpscError):
    """Instance violates a data-model invariant."""

    def __init__(self, violations):
        self.violations = list(violations)
        first = self.violations[0]
        extra = len(self.violations) - 1
        message = first.describe()
        if extra:
            message += f" (+{extra} more violation{'s' if extra > 1 else ''})"
        super().__init__(message)


class DuplicateName(DscpscError):
    pass


class MissingValue(DscpscError):
    pass


class UnknownVariable(DscpscError):
    pass


class InfeasibleModel(DscpscError):
    pass


class UnboundedObjective(DscpscError):
    def __init__(self, objective):
        self.objective = objective
        super().__init__(f"objective {objective!r} is unbounded over the feasible set")


class DegenerateBounds(DscpscError):
    def __init__(self, objective):
        self.objective = objective
        super().__init__(f"objective {objective!r} has ideal == anti-ideal; membership undefined")


class SolverError(DscpscError):
    pass


class BudgetExceeded(SolverError):
    pass


class NumericalFailure(SolverError):
    pass


class SolverCrashed(SolverError):
    pass


class SolutionParseError(SolverError):
    pass


class TimeLimit(SolverError):
    pass


class NameMangleCollision(SolverError):
    pass
