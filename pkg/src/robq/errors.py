"""Exception types raised by robq."""


class RobqError(Exception):
    """Base class for all robq errors."""


class NotHermitian(RobqError, ValueError):
    pass


class NotUnitary(RobqError, ValueError):
    pass


class NoConvergence(RobqError, ArithmeticError):
    pass


class DimensionMismatch(RobqError, ValueError):
    pass


class UnknownGate(RobqError, KeyError):
    pass


class BadParamCount(RobqError, ValueError):
    pass


class SchemaError(RobqError, ValueError):
    """Circuit document does not match the schema.

    ``path`` is the JSON path of the offending element, e.g. ``$.gates[3].qubits``.
    """

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class QubitOutOfRange(SchemaError):
    pass


class TooLarge(RobqError, ValueError):
    pass


class BadPartition(RobqError, ValueError):
    pass


class OutOfRegime(RobqError, ValueError):
    pass


class LengthMismatch(RobqError, ValueError):
    pass


class NotSingleQubit(RobqError, ValueError):
    pass
