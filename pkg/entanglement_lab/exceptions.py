"""
Error hierarchy of the entanglement lab.

Two families are distinguished because the command line reports them with
different exit codes: configuration problems (exit 2) and numerical failures
(exit 3).
"""


class LabError(Exception):
    """Root of every error raised by the lab."""


class NumericalError(LabError):
    """A computation could not be carried out on the given inputs."""


class ConfigurationError(LabError):
    """An experiment was configured in a way that cannot be run."""


# ----------------------------
# Numerical failures
# ----------------------------
class ZeroVector(NumericalError):
    pass


class NotNormalized(NumericalError):
    pass


class DimMismatch(NumericalError):
    pass


class NonHermitian(NumericalError):
    pass


class NotDichotomous(NumericalError):
    """An observable has eigenvalues outside {-1, +1}."""


class MissingStructure(NumericalError):
    pass


class IndexOutOfRange(NumericalError, IndexError):
    pass


class ZeroField(NumericalError):
    pass


class InvalidWeights(NumericalError):
    pass


class UndefinedRatio(NumericalError):
    pass


class EmptySetting(NumericalError):
    pass


class ChannelCountMismatch(NumericalError):
    pass


class EmptyRecordStream(NumericalError):
    pass


# ----------------------------
# Configuration problems
# ----------------------------
class IncompatibleSourceDetector(ConfigurationError):
    pass


class IntensityTableError(ConfigurationError):
    """A custom intensity table is malformed; carries the offending line."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
