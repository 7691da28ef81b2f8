"""Exception hierarchy shared by all modules."""


class DGFormalError(Exception):
    pass


class MalformedInputError(DGFormalError, ValueError):
    pass


class InvalidComplexError(DGFormalError):
    """d∘d ≠ 0 somewhere; carries the offending degree and basis element."""

    def __init__(self, degree, element, message=None):
        self.degree = degree
        self.element = element
        super().__init__(message or f"d∘d != 0 in degree {degree} on basis element {element!r}")


class InvalidAlgebraError(DGFormalError):
    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class DisconnectedError(DGFormalError):
    pass


class IncompleteStructureError(DGFormalError):
    pass


class NotAMorphismError(DGFormalError):
    pass


class TransferFault(DGFormalError):
    """Raised when transferred data fails its own verifiers.  Never swallowed."""


class NotApplicableError(DGFormalError):
    pass


class DefiningSystemError(DGFormalError):
    def __init__(self, position, message):
        self.position = position
        super().__init__(f"defining system violated at {position}: {message}")


class UndefinedProductError(DGFormalError):
    pass


class InvalidSpanError(DGFormalError):
    pass


class InternalConsistencyError(DGFormalError):
    """Two independent computations that must agree did not."""
