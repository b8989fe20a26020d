"""Exception types raised across the package."""


class PluriError(Exception):
    pass


class InvalidCell(PluriError, ValueError):
    pass


class NotAVertex(PluriError, ValueError):
    pass


class DimensionMismatch(PluriError, ValueError):
    pass


class InvalidDirection(PluriError, ValueError):
    pass


class SingularEvaluation(PluriError, ArithmeticError):
    pass


class MissingParameter(PluriError, KeyError):
    pass


class ConvergenceFailure(PluriError, RuntimeError):
    pass


class PreconditionViolated(PluriError, ValueError):
    pass


class DegenerateCoefficient(PluriError, ArithmeticError):
    def __init__(self, message, face=None):
        super().__init__(message)
        self.face = face


class InvalidManifold(PluriError, ValueError):
    pass


class NotInterior(PluriError, ValueError):
    pass


class InvalidFlower(PluriError, ValueError):
    pass
