"""Exception hierarchy shared by every module."""


class MHSICError(Exception):
    """Base class for all library errors."""


class InvalidInputError(MHSICError, ValueError):
    """Arguments violate an operation's preconditions."""


class UnsupportedSizeError(InvalidInputError):
    """Requested problem size exceeds what an enumeration supports."""


class DegenerateSampleError(MHSICError, ValueError):
    """Sample carries no usable spread, e.g. every point identical."""


class DataError(MHSICError):
    """Input data could not be read or parsed."""


class CsvParseError(DataError):
    """Malformed CSV cell or row; ``row`` and ``column`` are 1-based."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
