"""Exceptions raised by the energy-model library."""


class EnergyModelError(Exception):
    """Base class for all library errors"""


class InvalidArgumentError(EnergyModelError, ValueError):
    """Raised when an argument has the wrong shape, range or value"""


class SchemaError(InvalidArgumentError):
    """Raised when dataset channels do not match the robot description"""

    def __init__(self, message, channel=None, row=None):
        super().__init__(message)
        self.channel = channel
        self.row = row


class FileFormatError(EnergyModelError):
    """Raised when an input file cannot be parsed"""

    def __init__(self, message, path=None, line=None, field=None):
        details = []
        if path is not None:
            details.append(f"file {path}")
        if line is not None:
            details.append(f"line {line}")
        if field is not None:
            details.append(f"field '{field}'")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
        self.path = path
        self.line = line
        self.field = field


class NumericalError(EnergyModelError):
    """Raised when a quantity is numerically undefined"""
