"""Exceptions raised across ivp2Tube, each one knows its command line exit code"""


class EnclosureError(Exception):
    exit_code = 1


class ExprSyntaxError(EnclosureError):
    exit_code = 3

    def __init__(self, position, message):
        self.position = position
        self.message = message
        super().__init__(f"position {position}: {message}")


class DimensionError(EnclosureError):
    exit_code = 3


class SchemaError(EnclosureError):
    exit_code = 3


class UsageError(EnclosureError):
    exit_code = 3


class ParameterError(EnclosureError):
    exit_code = 3


class DomainViolation(EnclosureError):
    exit_code = 3


class NotInDomain(EnclosureError):
    """No ball of the open set verifiably contains the requested point."""
    exit_code = 2


class OutOfRange(EnclosureError):
    pass


class DegenerateSplit(EnclosureError):
    pass


class NotProvenUnique(EnclosureError):
    def __init__(self, message, result=None):
        self.result = result
        super().__init__(message)


class CellUnavailable(EnclosureError):
    exit_code = 4

    def __init__(self, index):
        self.index = index
        super().__init__(f"no decodable cell for stream {index} inside the solved interval")


class StepBoundViolation(EnclosureError):
    def __init__(self, rounds):
        self.rounds = rounds
        super().__init__(f"step lower bound violated in rounds {rounds}")
