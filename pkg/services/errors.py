class ClaimsCheckerError(Exception):
    """Base class for every error raised by the engines"""


class IllegalMoveError(ClaimsCheckerError):
    def __init__(self, cell, reason):
        self.cell = cell
        self.reason = reason
        super().__init__(f"Illegal move at cell {cell}: {reason}")


class InvalidParameterError(ClaimsCheckerError):
    pass


class PolygonValidationError(ClaimsCheckerError):
    pass


class NotClosedError(PolygonValidationError):
    pass


class SelfIntersectionError(PolygonValidationError):
    def __init__(self, index, vertex):
        self.index = index
        self.vertex = vertex
        super().__init__(f"Walk revisits vertex {vertex} at index {index}")


class DegenerateError(PolygonValidationError):
    pass


class InvalidCertificateError(ClaimsCheckerError):
    pass


class ClaimParseError(ClaimsCheckerError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class UnknownCheckerError(ClaimsCheckerError):
    pass


class ParameterTypeError(ClaimsCheckerError):
    pass


class DuplicateClaimError(ClaimsCheckerError):
    pass
