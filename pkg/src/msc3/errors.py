"""Exception types shared across the package."""


class Msc3Error(Exception):
    """Base class for all msc3-specific errors."""


class FormatError(Msc3Error):
    """A file does not match its declared binary or text layout.

    offset is the byte position where decoding failed, when known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ValidationError(Msc3Error):
    """Input data is structurally well-formed but violates a value constraint."""


class DegenerateInputError(Msc3Error):
    """The input carries no usable signal (e.g. every slice is zero)."""


class ConvergenceError(Msc3Error):
    """An iterative solver exhausted its iteration budget.

    residual is the last observed residual norm.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NoGapError(Msc3Error):
    """The marginal vector has no detectable gap, so no cluster can be seeded.

    Carries the marginal vector d so callers can still report diagnostics.
    """

    def __init__(self, message, d=None):
        super().__init__(message)
        self.d = d
