"""Exception types raised at the Python boundary of the solvers."""


class ConeProjectionError(RuntimeError):
    """Base class for failures of the projection machinery."""


class BracketExpansionExceeded(ConeProjectionError):
    """No sign change was found while growing the upper bracket."""


class InnerSolveFailed(ConeProjectionError):
    """The inner scalar equation had no sign change on its certified bracket.

    This points at a broken function implementation (e.g. a conjugate or
    prox that is inconsistent with the function itself).
    """


class NonFiniteInput(ValueError):
    """A coordinate of the point to project is NaN or infinite."""
