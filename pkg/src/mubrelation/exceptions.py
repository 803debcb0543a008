"""Exception and warning classes raised across the package."""


class MubRelationError(ValueError):
    """Base class for invalid-input errors raised by this package."""


class DimMismatch(MubRelationError):
    pass


class InvalidDim(MubRelationError):
    pass


class NotHermitian(MubRelationError):
    pass


class InvalidState(MubRelationError):
    """Input is not a valid density matrix or probability vector."""


class IndexOutOfRange(MubRelationError, IndexError):
    pass


class NotOrthonormal(MubRelationError):
    pass


class NotPrime(MubRelationError):
    pass


class UnsupportedDim(MubRelationError):
    pass


class NotMub(MubRelationError):
    pass


class WrongBasisCount(MubRelationError):
    pass


class InvalidWeights(MubRelationError):
    pass


class WeightCountMismatch(MubRelationError):
    pass


class NotInRelationImage(MubRelationError):
    """``(N + 1) rho - I`` is not positive semidefinite."""


class DegenerateLeadingEigenvalue(MubRelationError):
    pass


class SpectrumMismatch(MubRelationError):
    pass


class CoplanarDirections(MubRelationError):
    pass


class DegenerateTrialSet(MubRelationError):
    pass


class NoConvergence(RuntimeError):
    pass


class NotPositiveWarning(UserWarning):
    """A reconstructed operator has negative eigenvalues (usually shot noise)."""
