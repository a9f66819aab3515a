"""Exception hierarchy shared across the package."""


class ExcoError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ExcoError, ValueError):
    """Data violates an operation's contract (shape, finiteness, range)."""


class ParameterError(ExcoError, ValueError):
    """A configuration parameter is outside its admissible domain."""


class DegenerateDataError(ExcoError):
    """The data cannot support the requested estimate (e.g. no exceedances)."""


class InfeasibleError(ExcoError):
    """The requested cluster count exceeds the number of available directions."""


class BandError(ExcoError, ValueError):
    """A frequency band is invalid for the signal's sample rate."""


class PlanError(ExcoError, ValueError):
    """A window plan does not fit the signal."""


class ParseError(ExcoError):
    """A file could not be parsed; carries the offending location."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}: "
        if line is not None:
            where += f"line {line}: "
        super().__init__(where + message)
