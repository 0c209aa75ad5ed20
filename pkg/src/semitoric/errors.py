"""Exception types shared across the package."""


class SemitoricError(Exception):
    """Base class for all package-specific errors."""


class ConstraintError(SemitoricError):
    """A phase point violates a manifold constraint beyond tolerance."""


class ManifoldMismatchError(SemitoricError):
    """A point does not belong to the manifold a system lives on."""


class IntegrationError(SemitoricError):
    """Numerical flow failed (step underflow, no return detected, ...)."""


class RankError(SemitoricError):
    """A point fails a rank-0 precondition."""


class SpectrumTypeError(SemitoricError):
    """Eigenvalue structure is not of the type required by an operation."""


class DegeneracyError(SemitoricError):
    """A small divisor or persistent eigenvalue collision was hit."""


class NearDegenerateError(SemitoricError):
    """Parameters lie within tolerance of a degeneracy transition."""


class FiberRangeError(SemitoricError):
    """Requested value has an empty or boundary fiber."""


class AccuracyError(SemitoricError):
    """A fit or quadrature did not reach its accuracy contract."""


class TwistingError(SemitoricError):
    """No integer shear matches the computed momentum maps."""


class CLIConfigError(SemitoricError):
    """Invalid command-line configuration."""
