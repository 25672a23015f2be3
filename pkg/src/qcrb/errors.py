"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class QCRBError(Exception):
    exit_code = 1


class InvalidInputError(QCRBError, ValueError):
    """Malformed or out-of-domain input (shapes, non-Hermitian matrices, bad parameters)."""

    exit_code = 1


class InvalidModelError(QCRBError, ValueError):
    """A statistical model violates one of its invariants."""

    exit_code = 3

    def __init__(self, invariant, message):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class NotPSDError(InvalidModelError):
    def __init__(self, message):
        super().__init__("psd", message)


class ModelDegenerateError(InvalidModelError):
    """A derivative leaves the support of the state."""

    def __init__(self, message):
        super().__init__("support", message)


class DegenerateWeightError(QCRBError, ValueError):
    exit_code = 3


class NumericalFailure(QCRBError, RuntimeError):
    exit_code = 2
