"""Exception types shared across the package."""


class RgsfError(ValueError):
    """Base class for all rgsfcs errors."""


class IndexDomainError(RgsfError):
    """Wigner index outside its admissible range (|m| > n, |mu| > n, ...)."""


class ParameterError(RgsfError):
    """Scalar parameter outside its admissible range."""


class ShapeError(RgsfError):
    """Array arguments with inconsistent shapes."""


class DomainError(RgsfError):
    """Function argument outside the function's domain."""


class DegenerateBasisError(RgsfError):
    """A kept concentration is nonpositive; the basis data is corrupt."""


class UndefinedReferenceError(RgsfError):
    """A metric's reference quantity is identically zero."""


class ConsistencyError(RgsfError):
    """Input files do not match the run configuration."""


class SolverError(RgsfError):
    """The QCBP solver could not produce a usable iterate."""
