"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation (e.g. a
    non-positive metric coordinate)."""


class SpecError(ValueError):
    """A homogeneous-space description violates one of its invariants.

    ``code`` names the violated invariant (``"sc-symmetry"``, ``"torus"``,
    ``"partition"``, ...) so callers can report it without parsing text.
    """

    def __init__(self, code, message=""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)


class UsageError(ValueError):
    """An operation was called on an object it does not apply to."""


class NoConvergence(RuntimeError):
    """An iterative solver stopped without meeting its tolerance."""


class IndefiniteDrift(NoConvergence):
    """Newton iterates left the cone of positive-definite metrics."""


class NoSolution(RuntimeError):
    """A closed system has no admissible solution for the given data."""
