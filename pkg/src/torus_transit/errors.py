"""Exception hierarchy shared by every module of the package."""


class TorusTransitError(Exception):
    """Base class for all package errors."""


class DimensionError(TorusTransitError, ValueError):
    """Shapes of matrices, vectors or points do not fit together."""


class InvalidInputError(TorusTransitError, ValueError):
    """An argument violates a documented precondition."""


class SingularMatrixError(InvalidInputError):
    pass


class InvarianceError(InvalidInputError):
    """A subspace handed in as invariant is not mapped into itself."""


class RankError(InvalidInputError):
    """A basis handed in is linearly dependent."""


class InvalidParameterError(InvalidInputError):
    pass


class DegeneratePointError(InvalidInputError):
    """The point lies on the measure-zero set where preimage slopes are ambiguous."""


class UnsupportedOrientationError(InvalidInputError):
    """The fiber eigenvalue is not an orientation preserving expansion (>= 2).

    Orientation reversing fibers are handled in theory by passing to the
    square of the map, which leaves the additively coupled family.
    """
