class DiracFlowError(Exception):
    """
    Base class of all errors raised by diracflow

    :param message: Human readable description
    :type message: str
    """

    exit_code = 3

    def __init__(self, message: str = ""):
        super(DiracFlowError, self).__init__(message)
        self.message = message


class ParseError(DiracFlowError):
    """
    Malformed line in an edge-list document

    :param message: What went wrong
    :param line: 1-based line number of the offending line
    :type message: str
    :type line: int
    """

    exit_code = 2

    def __init__(self, message: str, line: int = None):
        if line is not None:
            message = "line {}: {}".format(line, message)
        super(ParseError, self).__init__(message)
        self.line = line


class ValidationError(DiracFlowError):
    exit_code = 2


class ConfigError(DiracFlowError):
    exit_code = 2


class UsageError(DiracFlowError):
    exit_code = 2


class StructureError(DiracFlowError):
    """Graded matrix has weight outside the raising/diagonal/lowering blocks"""

    exit_code = 3


class AmbiguityError(DiracFlowError):
    """Numerical rank or kernel dimension is not separated by a spectral gap"""

    exit_code = 3


class DivergenceError(DiracFlowError):
    exit_code = 3


class DiagnosticError(DiracFlowError):
    exit_code = 1
