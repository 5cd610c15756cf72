"""Exact Dedekind sums.

``s(q, p)`` is evaluated two ways: directly from its defining sum of
sawtooth products, and from the lattice-point identity

    6p * s(q, p) = (p - 1)(2pq - q - 3p/2) - 6 f_p(q)

with ``f_p(q) = sum(k * floor(kq / p) for k in 1..p-1)``. The direct sum
is the reference; the identity is checked against it for every ``q``,
negative representatives included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from django_autbound.exceptions import (
    NotCoprimeError,
    PreconditionError,
    ZeroDivisorError,
)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class DedekindInput:
    q: int
    p: int

    def __post_init__(self):
        if self.p < 1:
            raise PreconditionError(f"The modulus must be positive, not {self.p}.")
        if math.gcd(self.q, self.p) != 1:
            raise NotCoprimeError(self.q, self.p)


def sawtooth(x: Fraction) -> Fraction:
    """The sawtooth function ((x)), zero on the integers."""
    x = Fraction(x)
    if x.denominator == 1:
        return Fraction(0)
    return x - math.floor(x) - HALF


def floor_div(a: int, b: int) -> int:
    """Floor of ``a / b``, rounding toward negative infinity."""
    if b == 0:
        raise ZeroDivisorError(f"Cannot divide {a} by zero.")
    return a // b


def _scaled_sawtooth(n: int, p: int) -> int:
    # 2p * ((n / p)) is an integer.
    r = n % p
    return 0 if r == 0 else 2 * r - p


def dedekind_sum_direct(d: DedekindInput) -> Fraction:
    """Evaluate the defining sum over k = 1..p.

    Each sawtooth value ((n/p)) is carried as the integer 2p * ((n/p)),
    so the whole sum is accumulated over the integers and divided once.
    """
    p, q = d.p, d.q
    total = sum(
        _scaled_sawtooth(k, p) * _scaled_sawtooth(k * q, p) for k in range(1, p + 1)
    )
    return Fraction(total, 4 * p * p)


def f_p(q: int, p: int) -> int:
    if p < 2:
        raise PreconditionError(f"f_p needs a modulus of at least 2, not {p}.")
    if math.gcd(q, p) != 1:
        raise NotCoprimeError(q, p)
    return sum(k * floor_div(k * q, p) for k in range(1, p))


def dedekind_sum_closed(d: DedekindInput) -> Fraction:
    """Solve the lattice-point identity for s(q, p)."""
    p, q = d.p, d.q
    if p < 2:
        raise PreconditionError(f"The closed form needs p >= 2, not {p}.")
    six_p_s = (p - 1) * (2 * p * q - q - Fraction(3 * p, 2)) - 6 * f_p(q, p)
    return six_p_s / (6 * p)
