"""Exception hierarchy.

`InputError` subclasses describe bad user input (CLI exit code 1). `InvariantViolation`
subclasses mean the simulator or the oracle protocol broke a guarantee (CLI exit code 2).
"""

from __future__ import annotations


class QdbSearchError(Exception):
    """Base class for every error raised by qdbsearch."""


class InputError(QdbSearchError):
    pass


class InvariantViolation(QdbSearchError):
    pass


# statevector


class IndexOutOfRange(InputError):
    pass


class QubitCapExceeded(InputError):
    pass


class QubitOutOfRange(InputError):
    pass


class OverlappingControlTarget(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class ValueOutOfRange(InputError):
    pass


class OverlappingRegisters(InputError):
    pass


class NormDrift(InvariantViolation):
    pass


# circuits


class MatrixCapExceeded(InputError):
    pass


class ParseError(InputError):
    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnsupportedGate(ParseError):
    pass


class NotClassicallyFoldable(InputError):
    pass


# database


class BadEncoding(InputError):
    pass


class BadHeader(InputError):
    pass


class BadBitChar(InputError):
    pass


class WrongRecordCount(InputError):
    pass


class RecordWidthMismatch(InputError):
    pass


class LayoutMismatch(InputError):
    pass


# search / verification


class ZeroMultiplicity(InputError):
    pass


class RestoreViolation(InvariantViolation):
    pass


class VerificationFailed(InvariantViolation):
    pass
