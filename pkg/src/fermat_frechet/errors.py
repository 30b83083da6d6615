"""Exception types shared across the package.

The CLI maps these onto exit codes: InfeasibleError -> 3, NumericalError -> 4,
plain ValueError (bad input) -> 2.
"""


class InfeasibleError(ValueError):
    """A geometrically infeasible request: non-realizable lengths, domain
    violations, absorbed configuration where a floating one is required."""


class HemisphereError(InfeasibleError):
    """A spherical configuration leaves the open hemisphere model."""


class NumericalError(RuntimeError):
    """Iteration cap exceeded, stalled line search, or missing root bracket."""
