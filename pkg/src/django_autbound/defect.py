"""Signature defects of isolated fixed points.

A fixed point whose isotropy has order ``p`` and acts on the tangent
space by ``(z1, z2) -> (mu^k z1, mu^(kq) z2)`` contributes the defect

    I_{p,q} = sum over 0 < k < p of
              (1 + mu^k)(1 + mu^kq) / ((1 - mu^k)(1 - mu^kq))

to the G-signature balance, where ``mu = exp(2 pi i / p)``. The k = p
term of the sum has a vanishing denominator and is excluded. Downstream
code only uses the exact value ``-4p * s(q, p)``; the floating point
evaluation exists to check it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from django_autbound.dedekind import DedekindInput, dedekind_sum_closed
from django_autbound.exceptions import NotCoprimeError, PreconditionError

DEFAULT_ORACLE_BITS = 128
MIN_ORACLE_BITS = 64
ORACLE_TOLERANCE = Fraction(1, 2**40)


@dataclass(frozen=True)
class DefectValue:
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))
        if (3 * self.value).denominator != 1:
            raise PreconditionError(
                f"A signature defect times 3 is an integer; {self.value} is not."
            )

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class LocalRep:
    """The tangent representation at an isolated fixed point."""

    p: int
    k: int
    q: int

    def __post_init__(self):
        if self.p < 2:
            raise PreconditionError(f"Isotropy order must be at least 2, not {self.p}.")
        if math.gcd(self.k, self.p) != 1:
            raise NotCoprimeError(self.k, self.p)
        if math.gcd(self.q, self.p) != 1:
            raise NotCoprimeError(self.q, self.p)

    @classmethod
    def of_automorphism(cls, p: int, k: int) -> LocalRep:
        """The form taken by an automorphism fixing a holomorphic 2-form.

        The determinant of the tangent action is 1, so the second weight
        is the inverse of the first.
        """
        return cls(p=p, k=k, q=-1)

    def rotation_numbers(self) -> tuple[int, int]:
        return self.k % self.p, (self.k * self.q) % self.p

    def is_sl2(self) -> bool:
        return (self.k + self.k * self.q) % self.p == 0

    def defect(self) -> DefectValue:
        return defect_closed(self.p, self.q)


@dataclass(frozen=True)
class OracleValue:
    """A floating point defect with the precision it was computed at."""

    value: mpmath.mpf
    bits: int
    error_bound: mpmath.mpf

    def agrees_with(self, exact: Fraction, tolerance: Fraction = ORACLE_TOLERANCE):
        with mpmath.workprec(self.bits):
            exact = mpmath.mpf(exact.numerator) / exact.denominator
            bound = mpmath.mpf(tolerance.numerator) / tolerance.denominator
            return abs(self.value - exact) < bound


def _check_order(p: int, q: int):
    if p < 2:
        raise PreconditionError(f"Isotropy order must be at least 2, not {p}.")
    if math.gcd(q, p) != 1:
        raise NotCoprimeError(q, p)


def defect_closed(p: int, q: int) -> DefectValue:
    _check_order(p, q)
    return DefectValue(-4 * p * dedekind_sum_closed(DedekindInput(q=q, p=p)))


def defect_sl2(p: int) -> DefectValue:
    """The defect of an ``SL2`` fixed point, ``(p - 1)(p - 2) / 3``."""
    if p < 2:
        raise PreconditionError(f"Isotropy order must be at least 2, not {p}.")
    return DefectValue(Fraction((p - 1) * (p - 2), 3))


def defect_direct(p: int, q: int, precision: int = DEFAULT_ORACLE_BITS) -> OracleValue:
    """Evaluate the root-of-unity sum in binary floating point.

    Each term equals ``-cot(pi k / p) * cot(pi kq / p)``; ``kq`` is
    reduced mod ``p`` first since the cotangent has period pi.
    """
    _check_order(p, q)
    if precision < MIN_ORACLE_BITS:
        raise PreconditionError(
            f"Oracle precision must be at least {MIN_ORACLE_BITS} bits,"
            f" not {precision}."
        )
    with mpmath.workprec(precision):
        terms = [
            -mpmath.cot(mpmath.pi * k / p) * mpmath.cot(mpmath.pi * ((k * q) % p) / p)
            for k in range(1, p)
        ]
        value = mpmath.fsum(terms)
        magnitude = mpmath.fsum(abs(t) for t in terms)
        error_bound = mpmath.ldexp(magnitude + 1, 8 - precision)
    return OracleValue(value=value, bits=precision, error_bound=error_bound)
