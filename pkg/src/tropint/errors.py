"""Exception types shared across the package."""


class TropintError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(TropintError):
    """Vectors or objects with incompatible ambient dimensions."""


class FanInvalid(TropintError):
    """A set of cones fails the fan axioms.

    Carries the first offending pair of cones in ``args[1]`` when available.
    """


class SupportMismatch(TropintError):
    """Two fans or complexes were expected to have equal support."""


class ContinuityViolation(TropintError):
    """Piecewise data disagrees on a shared face; the face is in ``args[1]``."""


class NonIntegral(TropintError):
    """A function value or covector required to be integral is not."""


class NotBalanced(TropintError):
    """A weight expected to satisfy the balancing condition does not."""


class CoarseningError(TropintError):
    """A weight on a refinement is not constant on the cells of the coarse fan."""
