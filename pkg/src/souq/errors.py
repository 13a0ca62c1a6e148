"""Exception hierarchy. Every error a caller may want to handle is a SouqError."""


class SouqError(Exception):
    """Base class for all library errors."""


class ValidationError(SouqError, ValueError):
    pass


class NegativeEntry(ValidationError):
    pass


class BadSum(ValidationError):
    pass


class TooFewClasses(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class EmptySubset(ValidationError):
    pass


class BadWeights(ValidationError):
    pass


class BadAlpha(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class NotProper(SouqError):
    pass


class NumericalError(SouqError, ArithmeticError):
    """A quantity that is nonnegative analytically came out clearly negative."""


# transforms
class NoRoom(SouqError):
    pass


class LeavesSimplex(SouqError):
    pass


class ZeroShift(ValidationError):
    pass


class NotZeroSum(ValidationError):
    pass


class AlreadyCentered(SouqError):
    pass


# evaluation
class MissingTruth(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


class BadGrid(ValidationError):
    pass


class OneCohortOnly(ValidationError):
    pass


# io
class ParseError(SouqError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)
        self.line = line
        self.column = column


class InconsistentMembers(SouqError):
    pass


class BadProbabilityRow(SouqError):
    def __init__(self, message, row_id=None, line=None):
        super().__init__(message)
        self.row_id = row_id
        self.line = line


class MissingLabel(SouqError):
    def __init__(self, instance_id):
        super().__init__(f"no label for instance {instance_id!r}")
        self.instance_id = instance_id


class UnknownFamily(ValidationError):
    pass


class ConfigError(ValidationError):
    pass
