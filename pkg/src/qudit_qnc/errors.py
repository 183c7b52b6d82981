"""Exception types raised across the package."""


class QuditError(Exception):
    """Base class for all errors raised by qudit_qnc."""


class DimensionMismatchError(QuditError, ValueError):
    pass


class DegenerateInputError(QuditError, ValueError):
    pass


class InvalidGateError(QuditError, ValueError):
    pass


class InvalidArgumentError(QuditError, ValueError):
    pass


class UnsupportedDimensionError(QuditError, ValueError):
    pass


class MissingGadgetError(QuditError, ValueError):
    pass


class EntangledStateError(QuditError, ValueError):
    """A state expected to factor into a product did not."""


class ProtocolViolationError(QuditError, RuntimeError):
    pass


class IncompleteTraceError(QuditError, ValueError):
    pass
