"""Exception hierarchy shared by every module."""


class PhyloPuboError(Exception):
    """Base class for all package errors."""


# input / alignment
class InputError(PhyloPuboError, ValueError):
    """Malformed user input; also a ValueError for callers that expect one."""


class EmptyInputError(InputError):
    pass


class AlignmentRaggedError(InputError):
    pass


class TooFewTaxaError(InputError):
    pass


class StepMatrixInvalidError(InputError):
    pass


class FragmentTooLongError(InputError):
    pass


class ParseError(InputError):
    pass


class ArityError(PhyloPuboError):
    pass


# size guards
class SizeBoundError(PhyloPuboError):
    pass


class EnumerationTooLargeError(SizeBoundError):
    pass


class TooManyVariablesError(SizeBoundError):
    pass


class TooManyQubitsError(SizeBoundError):
    pass


class BigCountError(SizeBoundError):
    def __init__(self, message, saturated=True):
        super().__init__(message)
        self.saturated = saturated


# models / solvers
class UnsupportedModelError(PhyloPuboError):
    pass


class ScheduleInvalidError(PhyloPuboError):
    pass
