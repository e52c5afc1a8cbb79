"""Exception hierarchy.

Each class carries the CLI exit code it maps to, so the front end never has
to guess how to report a failure.
"""


class HankelSSFError(Exception):
    exit_code = 1

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self), **self.details}


class ParseError(HankelSSFError):
    exit_code = 2


class ModelError(HankelSSFError):
    """Input is not a valid member of the model class (e.g. positivity fails)."""

    exit_code = 3


class LengthError(ModelError):
    pass


class InvalidMeasureError(ModelError):
    pass


class InterlacingError(ModelError):
    pass


class DomainError(ModelError):
    pass


class NumericError(HankelSSFError):
    exit_code = 4


class ConditioningError(NumericError):
    pass
