"""Errors raised for malformed or out-of-range input.

Every error is a ``ValueError`` so callers outside Django can handle
them uniformly; the ``autbound`` command turns them into exit code 2.
"""

from __future__ import annotations

from fractions import Fraction


class AutBoundError(ValueError):
    """Base class for input errors."""


class ZeroDivisorError(AutBoundError):
    pass


class NotCoprimeError(AutBoundError):
    def __init__(self, q: int, p: int):
        super().__init__(f"{q} and {p} are not coprime.")
        self.q = q
        self.p = p


class PreconditionError(AutBoundError):
    pass


class CongruenceError(AutBoundError):
    """A divisibility requirement on integer invariants failed."""

    def __init__(self, message: str, *, modulus: int, value: int):
        super().__init__(message)
        self.modulus = modulus
        self.value = value


class IndivisibleError(AutBoundError):
    pass


class BettiBoundError(AutBoundError):
    pass


class NonIntegralIndex(AutBoundError):
    """The index formula evaluated to a non-integer."""

    def __init__(self, value: Fraction):
        super().__init__(
            f"The index evaluates to {value}, which is not an integer."
            " The orbifold data is inconsistent."
        )
        self.value = value


class SL2Violation(AutBoundError):
    def __init__(self, point):
        super().__init__(
            f"Marked point {point} has rotation numbers"
            f" {point.m1} + {point.m2} != {point.m}."
        )
        self.point = point


class GroupSpecSyntaxError(AutBoundError):
    """A group spec could not be parsed."""

    def __init__(self, text: str, position: int, expected: str):
        super().__init__(
            f"Invalid group spec {text!r} at position {position}:"
            f" expected {expected}."
        )
        self.text = text
        self.position = position


class InvalidSettingError(AutBoundError):
    """An ``AUTBOUND_*`` Django setting has an invalid value."""
