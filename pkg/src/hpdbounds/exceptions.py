"""Exception types raised across the package."""


class NotPositiveDefinite(ValueError):
    """Matrix is not Hermitian positive definite."""


class NotHermitian(ValueError):
    """Matrix asymmetry exceeds the Hermitian tolerance."""


class ConvergenceFailure(RuntimeError):
    """An iterative LAPACK routine did not converge."""


class InvalidDegreesOfFreedom(ValueError):
    """Degrees of freedom incompatible with the dimension."""


class DimMismatch(ValueError):
    """Operand dimensions do not agree."""


class BasePointMismatch(ValueError):
    """Tangent vectors are attached to different base points."""


class IndexOutOfRange(IndexError):
    """Basis index outside ``[1, p**2]``."""


class NonOrthonormalBasis(ValueError):
    """Supplied basis is not orthonormal for the requested metric."""


class EmptySampleSet(ValueError):
    """An estimator was given zero samples."""


class ConfigError(ValueError):
    """Invalid experiment or CLI configuration; ``key`` names the offending field."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
        self.message = message
