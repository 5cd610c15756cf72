"""Topological bookkeeping on closed 4-manifolds."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from django_autbound.defect import DefectValue, defect_sl2
from django_autbound.exceptions import (
    BettiBoundError,
    CongruenceError,
    PreconditionError,
)
from django_autbound.rules import CITATIONS, MIYAOKA_YAU_RATIO, RuleId


@dataclass(frozen=True)
class SurfaceInvariants:
    """Chern numbers of a surface of general type."""

    c1sq: int
    c2: int

    def __post_init__(self):
        if self.c1sq <= 0 or self.c2 <= 0:
            raise PreconditionError(
                "A surface of general type has c1^2 > 0 and c2 > 0,"
                f" not c1^2 = {self.c1sq}, c2 = {self.c2}."
            )

    @property
    def euler(self) -> int:
        return self.c2

    @property
    def signature(self) -> int:
        value = self.c1sq - 2 * self.c2
        if value % 3:
            raise CongruenceError(
                f"3 does not divide c1^2 - 2 c2 = {value}, so the signature"
                " is not an integer.",
                modulus=3,
                value=value,
            )
        return value // 3

    @property
    def chi(self) -> int:
        value = self.c1sq + self.c2
        if value % 12:
            raise CongruenceError(
                f"12 does not divide c1^2 + c2 = {value}, so chi(O) is not"
                " an integer.",
                modulus=12,
                value=value,
            )
        return value // 12


class Topology(NamedTuple):
    euler: int
    signature: int
    chi_O: int


def chern_to_topology(s: SurfaceInvariants) -> Topology:
    return Topology(euler=s.euler, signature=s.signature, chi_O=s.chi)


@dataclass(frozen=True)
class BettiData:
    """Odd Betti numbers, b2, and optionally traces on H^1 and H^3."""

    b1: int
    b2: int
    b3: int
    trace1: Fraction | None = None
    trace3: Fraction | None = None

    def __post_init__(self):
        if min(self.b1, self.b2, self.b3) < 0:
            raise PreconditionError("Betti numbers are nonnegative.")
        traces = ((1, self.trace1, self.b1), (3, self.trace3, self.b3))
        for degree, trace, betti in traces:
            if trace is not None and abs(Fraction(trace)) > betti:
                raise BettiBoundError(
                    f"The trace {trace} on H^{degree} exceeds b{degree} = {betti}."
                )

    @classmethod
    def trivial_action(cls, b1: int, b2: int) -> BettiData:
        """An action that is the identity on all rational cohomology."""
        return cls(b1=b1, b2=b2, b3=b1, trace1=Fraction(b1), trace3=Fraction(b1))

    @property
    def euler(self) -> int:
        return 2 - self.b1 + self.b2 - self.b3


def lefschetz_lower_bound(b: BettiData) -> int:
    """Count the fixed points of a periodic map that is the identity on H^2.

    With both traces given this is the exact Lefschetz number; without
    them it is the Euler characteristic, which bounds the count below.
    """
    if (b.trace1 is None) != (b.trace3 is None):
        raise PreconditionError("Give both traces, or neither.")
    if b.trace1 is None:
        if b.b1 != b.b3:
            raise PreconditionError(
                f"Poincare duality requires b1 = b3, not {b.b1} and {b.b3}."
            )
        return b.euler
    count = 2 + b.b2 - Fraction(b.trace1) - Fraction(b.trace3)
    if count.denominator != 1:
        raise PreconditionError(f"The Lefschetz number {count} is not an integer.")
    return int(count)


def g_signature_balance(
    group_order: int,
    sign_quotient: int,
    sign_total: int,
    defects: Iterable[DefectValue],
) -> Fraction:
    """The residual ``|G| sign(M/G) - sign(M) - sum(defects)``.

    A zero residual certifies the data is consistent.
    """
    if group_order < 1:
        raise PreconditionError(f"Group order must be positive, not {group_order}.")
    return group_order * sign_quotient - sign_total - sum(
        (d.value for d in defects), Fraction(0)
    )


@dataclass(frozen=True)
class Part1Report:
    """Why no automorphism acting trivially on H^2 has order 4 or 9.

    For ``|g| = p^2`` the G-signature balance reads

        (p^2 - 1) sign(X) = sum over X^g + sum over X^(g^p) of defects.

    Fixed points of ``g^p`` have nonnegative defect, each of the at
    least ``c2`` fixed points of ``g`` has defect ``(p^2-1)(p^2-2)/3``,
    and substituting ``sign(X) = (c1^2 - 2 c2) / 3`` leaves
    ``c1^2 >= p^2 c2``.
    """

    p_small: int
    c2: int

    def __post_init__(self):
        if self.p_small not in (2, 3):
            raise PreconditionError(f"p must be 2 or 3, not {self.p_small}.")
        if self.c2 < 1:
            raise PreconditionError(f"c2 must be at least 1, not {self.c2}.")

    @property
    def order(self) -> int:
        return self.p_small**2

    @property
    def fixed_points_lower_bound(self) -> int:
        return self.c2

    @property
    def fixed_point_defect(self) -> DefectValue:
        return defect_sl2(self.order)

    @property
    def subgroup_defect(self) -> DefectValue:
        return defect_sl2(self.p_small)

    @property
    def subgroup_defects_nonnegative(self) -> bool:
        return self.subgroup_defect.value >= 0

    @property
    def defect_sum_lower_bound(self) -> Fraction:
        return self.fixed_points_lower_bound * self.fixed_point_defect.value

    @property
    def signature_lower_bound(self) -> Fraction:
        return self.defect_sum_lower_bound / (self.order - 1)

    @property
    def required_c1sq(self) -> int:
        return self.order * self.c2

    @property
    def miyaoka_yau_cap(self) -> int:
        return MIYAOKA_YAU_RATIO * self.c2

    @property
    def miyaoka_yau(self) -> str:
        return CITATIONS[RuleId.MIYAOKA_YAU]

    @property
    def contradiction(self) -> bool:
        return self.subgroup_defects_nonnegative and (
            self.required_c1sq > self.miyaoka_yau_cap
        )


def part1_contradiction(p_small: int, c2: int) -> Part1Report:
    return Part1Report(p_small=p_small, c2=c2)
