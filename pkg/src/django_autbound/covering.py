"""Free actions of finite groups on closed Riemann surfaces.

Groups are described by a ``GroupProfile``: the order and the minimal
number of generators, plus the structure when it is known. Abelian
groups are written as products of cyclic groups, for example
``C2^6`` or ``C3xC9``, and normalized to invariant factors
``d1 | d2 | ... | dt``.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from itertools import groupby, zip_longest
from math import prod
from typing import NamedTuple, Union

from sympy import factorint, isprime

from django_autbound.exceptions import (
    GroupSpecSyntaxError,
    IndivisibleError,
    PreconditionError,
)

FACTOR_PATTERN = re.compile(r"C(?P<order>[0-9]+)(?:\^(?P<power>[0-9]+))?")


@dataclass(frozen=True)
class ElementaryAbelian:
    prime: int
    rank: int


@dataclass(frozen=True)
class Abelian:
    factors: tuple[int, ...]


@dataclass(frozen=True)
class Opaque:
    """A group known only by its order and generator count."""


Structure = Union[ElementaryAbelian, Abelian, Opaque]


@dataclass(frozen=True)
class GroupProfile:
    order: int
    min_generators: int
    structure: Structure

    def __post_init__(self):
        if self.order < 1:
            raise PreconditionError(f"Group order must be positive, not {self.order}.")
        if self.min_generators < 0:
            raise PreconditionError("The generator count must be nonnegative.")
        if (self.min_generators == 0) != (self.order == 1):
            raise PreconditionError(
                "Only the trivial group is generated by zero elements."
            )
        structure = self.structure
        if isinstance(structure, ElementaryAbelian):
            if (
                self.order != structure.prime**structure.rank
                or self.min_generators != structure.rank
            ):
                raise PreconditionError(
                    f"{self.order} is not the order of"
                    f" C{structure.prime}^{structure.rank}"
                    f" with {self.min_generators} generators."
                )
        elif isinstance(structure, Abelian):
            if self.order != prod(structure.factors) or self.min_generators != len(
                structure.factors
            ):
                raise PreconditionError(
                    f"The invariant factors {list(structure.factors)} do not give"
                    f" order {self.order} with {self.min_generators} generators."
                )

    @classmethod
    def elementary_abelian(cls, prime: int, rank: int) -> GroupProfile:
        return cls(
            order=prime**rank,
            min_generators=rank,
            structure=ElementaryAbelian(prime=prime, rank=rank),
        )

    @classmethod
    def abelian(cls, factors: list[int]) -> GroupProfile:
        """Build a profile from invariant factors, tagging elementary groups."""
        factors = tuple(factors)
        if factors and isprime(factors[0]) and all(d == factors[0] for d in factors):
            return cls.elementary_abelian(factors[0], len(factors))
        return cls(
            order=prod(factors), min_generators=len(factors), structure=Abelian(factors)
        )

    @classmethod
    def opaque(cls, order: int, min_generators: int) -> GroupProfile:
        return cls(order=order, min_generators=min_generators, structure=Opaque())

    @property
    def invariant_factors(self) -> tuple[int, ...] | None:
        if isinstance(self.structure, ElementaryAbelian):
            return (self.structure.prime,) * self.structure.rank
        if isinstance(self.structure, Abelian):
            return self.structure.factors
        return None

    @property
    def exponent(self) -> int | None:
        """The largest element order, when the structure is known."""
        factors = self.invariant_factors
        if factors is None:
            return None
        return max(factors, default=1)

    def is_p_group(self, p: int) -> bool:
        return set(factorint(self.order)) <= {p}

    @property
    def spec(self) -> str | None:
        """The canonical group spec, or None for opaque groups."""
        factors = self.invariant_factors
        if factors is None:
            return None
        parts = []
        for d, run in groupby(factors):
            count = len(list(run))
            parts.append(f"C{d}^{count}" if count > 1 else f"C{d}")
        return "x".join(parts)

    def __str__(self):
        return self.spec or f"<order {self.order}, r = {self.min_generators}>"


def _invariant_factors(orders: list[int]) -> list[int]:
    """Invariant factors of a product of cyclic groups, smallest first."""
    elementary = defaultdict(list)
    for n in orders:
        for p, e in factorint(n).items():
            elementary[int(p)].append(int(e))
    columns = zip_longest(
        *[
            [p**e for e in sorted(exponents, reverse=True)]
            for p, exponents in sorted(elementary.items())
        ],
        fillvalue=1,
    )
    return sorted(prod(column) for column in columns)


def parse_group_spec(text: str) -> GroupProfile:
    """Parse ``factor ("x" factor)*`` where ``factor := "C" n ("^" k)?``."""
    orders = []
    position = 0
    while True:
        match = FACTOR_PATTERN.match(text, position)
        if not match:
            raise GroupSpecSyntaxError(text, position, "a factor like C2 or C2^3")
        order, power = int(match["order"]), int(match["power"] or 1)
        if order < 1:
            raise GroupSpecSyntaxError(text, match.start("order"), "a positive order")
        if power < 1:
            raise GroupSpecSyntaxError(text, match.start("power"), "a positive power")
        orders.extend([order] * power)
        position = match.end()
        if position == len(text):
            break
        if text[position] != "x":
            raise GroupSpecSyntaxError(text, position, "'x' or the end of the spec")
        position += 1
    factors = _invariant_factors(orders)
    if not factors:
        raise PreconditionError(f"{text!r} is the trivial group.")
    return GroupProfile.abelian(factors)


@dataclass(frozen=True)
class CoveringData:
    """A free quotient of a genus ``m`` surface onto a genus ``n`` surface."""

    total_genus: int
    quotient_genus: int
    group_order: int

    def __post_init__(self):
        if self.total_genus - 1 != self.group_order * (self.quotient_genus - 1):
            raise PreconditionError(
                f"m - 1 = {self.total_genus - 1} is not |G| (n - 1) ="
                f" {self.group_order * (self.quotient_genus - 1)}."
            )


def riemann_hurwitz_free(
    *,
    group_order: int,
    total_genus: int | None = None,
    quotient_genus: int | None = None,
) -> CoveringData:
    """Complete the covering data from one of the two genera."""
    if group_order < 1:
        raise PreconditionError(f"Group order must be positive, not {group_order}.")
    if (total_genus is None) == (quotient_genus is None):
        raise PreconditionError("Give exactly one of the two genera.")
    if quotient_genus is not None:
        if quotient_genus < 0:
            raise PreconditionError("Genus must be nonnegative.")
        total_genus = group_order * (quotient_genus - 1) + 1
        if total_genus < 0:
            raise PreconditionError(
                f"No free action of order {group_order} on a sphere quotient."
            )
    else:
        if total_genus < 0:
            raise PreconditionError("Genus must be nonnegative.")
        if (total_genus - 1) % group_order:
            raise IndivisibleError(
                f"{group_order} does not divide m - 1 = {total_genus - 1}."
            )
        quotient_genus = (total_genus - 1) // group_order + 1
    return CoveringData(
        total_genus=total_genus,
        quotient_genus=quotient_genus,
        group_order=group_order,
    )


class FreeGenusBounds(NamedTuple):
    lower: int
    upper: int


def free_genus_bounds(g: GroupProfile) -> FreeGenusBounds:
    """Bounds on the least genus with a free action of the group.

    The lower bound follows from Riemann-Hurwitz, since the quotient
    genus must be at least ``ceil(r / 2)``; the upper bound from the
    covering of the genus ``r`` surface that kills the ``y_i``.
    """
    if g.order < 2:
        raise PreconditionError("The trivial group has no meaningful free genus.")
    r = g.min_generators
    return FreeGenusBounds(
        lower=((r + 1) // 2 - 1) * g.order + 1,
        upper=(r - 1) * g.order + 1,
    )
