"""Exception types shared across the package."""


class PlsPathError(Exception):
    """Base class for every error raised by this package."""


class ConstantVector(PlsPathError):
    """A vector with numerically identical entries cannot be standardized."""


class NotSymmetric(PlsPathError):
    """The matrix handed to a symmetric eigensolver is not symmetric."""


class NegativeAlpha(PlsPathError):
    """Matrix powers are only defined here for non-negative exponents."""


class OverlappingSubspaces(PlsPathError):
    """Two column blocks span subspaces with a non-trivial intersection.

    When this happens the oblique split of a projection is not unique, so
    the partial effects of the blocks cannot be separated.
    """


class DimensionMismatch(PlsPathError):
    """Operands have incompatible shapes."""


class BadPartition(PlsPathError):
    """A sub-group partition does not disjointly cover the column block."""


class EmptySubgroup(PlsPathError):
    """A sub-group in a partition contains no columns."""


class NonOrthogonalFactors(PlsPathError):
    """Factor scores expected to be mutually orthogonal are not."""


class ParseError(PlsPathError):
    """Malformed input document (CSV or JSON)."""


class ValidationError(PlsPathError):
    """A structurally invalid model description.

    ``path`` locates the offending element, e.g. ``equations[1].predictors``.
    """

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        super().__init__(message if path is None else f"{path}: {message}")


class DegenerateGroup(PlsPathError):
    """A variable group carries no usable variance."""


class ZeroResultant(PlsPathError):
    """An estimation step produced a numerically zero vector."""


class IsolatedLV(PlsPathError):
    """No equation touches the requested latent variable."""


class UnknownDataset(PlsPathError):
    """The requested bundled dataset name is not recognized."""


class MissingValue(PlsPathError):
    """A CSV cell is empty; missing data is not supported."""


class DuplicateHeader(PlsPathError):
    """Two CSV columns carry the same name."""


class EmptyData(PlsPathError):
    """A data source contains headers but no observations."""
