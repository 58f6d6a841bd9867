"""Exception taxonomy for vdmkit.

Each failure class maps to one kind of contract violation so callers (and the
CLI exit-code logic) can distinguish malformed files from bad math from bad
arguments without string matching.
"""


class VdmkitError(Exception):
    """Base class for all vdmkit errors."""


class FormatError(VdmkitError):
    """Malformed container: bad NPY magic/header, bad manifest, bad model file."""


class UnsupportedLayoutError(VdmkitError):
    """Well-formed file with a layout this toolkit does not accept.

    Fortran-ordered arrays, non-2-D shapes, and non-float dtypes land here.
    """


class DataError(VdmkitError):
    """Input values violate a data contract (NaN/Inf, empty, wrong range)."""


class DimensionMismatchError(VdmkitError):
    """Operands disagree on feature dimension or declared shape."""


class NotPsdError(VdmkitError):
    """A matrix required to be positive semi-definite is not, beyond tolerance."""


class SingularCovarianceError(VdmkitError):
    """Covariance cannot be inverted even after the ridge fallback."""


class DegenerateFitError(VdmkitError):
    """Iterative fitting collapsed (empty GMM cluster, NaN training loss)."""


class TransportError(VdmkitError):
    """Optimal-transport marginals are infeasible or the solver failed."""


class RangeError(VdmkitError):
    """A parameterized range evaluated to an empty or invalid interval."""
