"""Exception hierarchy shared by all genet modules."""


class GenetError(Exception):
    """Base class for all errors raised by this package."""


class NonFiniteError(GenetError):
    """Input contains NaN or Inf entries."""


class NonSquareError(GenetError):
    """A square matrix was required."""


class NonSymmetricError(GenetError):
    """Matrix is asymmetric beyond tolerance."""


class SingularConstraintError(GenetError):
    """Constraint matrix is not invertible, even after ridge regularization."""


class TooFewSamplesError(GenetError):
    """Operation needs more samples than were provided."""


class SingleClassError(GenetError):
    """A supervised operation needs at least two classes."""


class EmptyClassError(GenetError):
    """A class id occurs with no samples."""


class LabelRequiredError(GenetError):
    """A supervised layer was fitted without labels."""


class DimensionTooLargeError(GenetError):
    """Requested output dimension is infeasible even after clamping."""


class DimensionMismatchError(GenetError):
    """Operand shapes are incompatible."""


class ParseError(GenetError):
    """Pipeline text could not be parsed."""


class FormatError(GenetError):
    """A serialized file is malformed (bad magic, version, or truncation)."""


class ClassTooSmallError(GenetError):
    """A class has too few samples for the requested split size."""
