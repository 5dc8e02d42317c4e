"""
Exception hierarchy for braidform.

UsageError subclasses describe bad input (CLI exit status 2);
VerificationError subclasses describe a computation whose numerical
certificate failed (CLI exit status 1).
"""


class BraidformError(Exception):
    """Base class for all braidform errors"""


class UsageError(BraidformError):
    """Input that cannot be processed as given"""


class VerificationError(BraidformError):
    """A numerical check did not pass"""


class ConfigurationError(UsageError):
    pass


class StrandMismatchError(UsageError):
    pass


class IndexRangeError(UsageError):
    pass


class SizeGuardError(UsageError):
    pass


class DegenerateParameterError(UsageError):
    pass


class MatrixSpecError(UsageError):
    pass


class WordSpecError(UsageError):
    pass


class NotGeneralizedPermutationError(UsageError):
    pass


class ClosedFormUnavailable(UsageError):
    pass


class ResidualCheckError(VerificationError):
    pass


class CompressionError(VerificationError):
    """Raised when pi(b_i) does not preserve a computed invariant subspace"""


class DimensionMismatchError(VerificationError):
    """Solver dimension disagrees with a proven or expected value"""


class CoefficientBoundError(VerificationError):
    """C_N^pi above 1/N!, i.e. an invariant subspace larger than A_N"""
