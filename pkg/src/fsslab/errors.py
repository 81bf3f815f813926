"""Exception hierarchy shared by every module."""


class FSSError(Exception):
    """Base class for all library errors."""


class InvalidInput(FSSError, ValueError):
    pass


class UnsupportedOperation(FSSError):
    pass


class DomainError(InvalidInput):
    pass


class DegenerateInput(InvalidInput):
    pass


class DegeneratePair(InvalidInput):
    pass


class InvalidConfiguration(InvalidInput):
    pass


class InvalidComposition(InvalidInput):
    pass


class SearchFailure(FSSError):
    pass


class NumericalFailure(FSSError):
    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction
