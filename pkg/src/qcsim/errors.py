"""Exception hierarchy shared by all engines, with CLI exit codes attached.

Exit code convention: 2 for script/config validation errors, 3 for resource
limits, 4 for numeric/internal failures.
"""

from __future__ import annotations


class SimulatorError(Exception):
    exit_code = 4

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line

    def render(self) -> str:
        suffix = f" (line {self.line})" if self.line is not None else ""
        return f"{type(self).__name__}: {self.message}{suffix}"


class ParseError(SimulatorError):
    exit_code = 2


class MissingQinit(ParseError):
    pass


class UnknownMnemonic(ParseError):
    pass


class QubitOutOfRange(ParseError):
    pass


class CregOutOfRange(ParseError):
    pass


class DuplicateQubitArg(ParseError):
    pass


class UnbalancedBlock(ParseError):
    pass


class MalformedAngle(ParseError):
    pass


class MeasureInsideDagger(ParseError):
    pass


class MeasureInsideControl(ParseError):
    pass


class ControlQubitCollision(ParseError):
    pass


class NonUnitaryU4(ParseError):
    pass


class MalformedTarget(ParseError):
    pass


class UnsupportedGate(ParseError):
    pass


class UncuttableGate(ParseError):
    pass


class InvalidProbability(ParseError):
    pass


class ResourceError(SimulatorError):
    exit_code = 3


class TooManyQubits(ResourceError):
    pass


class BranchExplosion(ResourceError):
    pass


class TensorTooLarge(ResourceError):
    pass


class NumericError(SimulatorError):
    exit_code = 4


class DegenerateState(NumericError):
    pass


class DegenerateBranch(NumericError):
    pass


class SharedVertexNotMerged(NumericError):
    pass


class DomainEscape(NumericError):
    pass


class BranchUndefined(NumericError):
    pass


class DomainError(NumericError):
    pass
