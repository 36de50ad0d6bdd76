"""Exception hierarchy shared across the package."""


class FracDimError(Exception):
    """Base class for all errors raised by fracdim."""


class ContractViolation(FracDimError, ValueError):
    """A caller passed arguments outside an operation's precondition."""


class NetpbmError(FracDimError, ValueError):
    """Malformed or unsupported netpbm data.

    The ``offset`` attribute holds the byte offset where parsing failed.
    """

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class DegenerateError(FracDimError):
    """A computation has no meaningful result for the given input."""


class EmptyObjectError(DegenerateError):
    """The image contains no object pixels."""


class InsufficientDataError(DegenerateError):
    """Fewer than two usable scales are available for regression."""


class AllScalesFilteredError(InsufficientDataError):
    """The MHFD filters removed (almost) every box at every scale."""


class DegenerateDesignError(DegenerateError):
    """The regression design matrix is singular."""


class CalibrationError(DegenerateError):
    """Calibration produced a non-positive raw slope."""


class ManifestError(FracDimError, ValueError):
    """Invalid evaluation manifest."""
