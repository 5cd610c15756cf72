"""Necessary conditions on a surface and its group of numerically trivial
automorphisms, and a census of which group sizes survive them.

A ``feasible`` verdict means the candidate passes every known
obstruction. It never asserts that such a surface exists.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import comb, gcd

from django_autbound.covering import (
    ElementaryAbelian,
    GroupProfile,
    Opaque,
    free_genus_bounds,
)
from django_autbound.exceptions import PreconditionError
from django_autbound.gsignature import SurfaceInvariants
from django_autbound.rules import (
    CAI_CHI_THRESHOLD,
    CAI_MAX_ORDER,
    CAI_STRUCTURE_CHI,
    MIYAOKA_YAU_RATIO,
    RuleId,
    RuleTable,
)

logger = logging.getLogger(__name__)


class Status(Enum):
    PASS = "pass"
    FAIL = "fail"
    VACUOUS = "vacuous"
    DISABLED = "disabled"


class Verdict(Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class RuleCheck:
    rule: RuleId
    status: Status
    witness: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ConstraintReport:
    surface: SurfaceInvariants
    group: GroupProfile
    checks: tuple[RuleCheck, ...]

    @property
    def verdict(self) -> Verdict:
        if any(check.status == Status.FAIL for check in self.checks):
            return Verdict.INFEASIBLE
        return Verdict.FEASIBLE

    @property
    def failing(self) -> list[RuleId]:
        return [check.rule for check in self.checks if check.status == Status.FAIL]


class PetersCase(Enum):
    TWO_C2 = "2c2"
    THREE_C2 = "3c2"

    @classmethod
    def of(cls, s: SurfaceInvariants) -> PetersCase | None:
        if s.c1sq == 2 * s.c2:
            return cls.TWO_C2
        if s.c1sq == 3 * s.c2:
            return cls.THREE_C2
        return None

    @property
    def prime(self) -> int:
        return 2 if self == PetersCase.TWO_C2 else 3

    def surface(self, chi: int) -> SurfaceInvariants:
        """The surface of this case with the given chi(O)."""
        if self == PetersCase.TWO_C2:
            return SurfaceInvariants(c1sq=8 * chi, c2=4 * chi)
        return SurfaceInvariants(c1sq=9 * chi, c2=3 * chi)


def _chi(s: SurfaceInvariants) -> Fraction:
    return Fraction(s.c1sq + s.c2, 12)


def _is_cyclic(g: GroupProfile) -> bool:
    return g.min_generators <= 1


def _peters_structure(case: PetersCase, g: GroupProfile) -> bool:
    """Every element has order 2 or 3, so the group is elementary abelian
    in the 2 c2 case and of exponent 3 in the 3 c2 case."""
    if g.order == 1:
        return True
    if not g.is_p_group(case.prime):
        return False
    if isinstance(g.structure, Opaque):
        if case == PetersCase.TWO_C2:
            # A 2-group of order 2^r needing r generators is elementary abelian.
            return g.order == 2**g.min_generators
        return True
    return g.exponent == case.prime


def _miyaoka_yau(s, g):
    cap = MIYAOKA_YAU_RATIO * s.c2
    status = Status.PASS if s.c1sq <= cap else Status.FAIL
    return status, {"c1sq": s.c1sq, "cap": cap}


def _peters_dichotomy(s, g):
    case = PetersCase.of(s)
    witness = {"case": case and case.value, "group": str(g)}
    if case is None or not _peters_structure(case, g):
        return Status.FAIL, witness
    return Status.PASS, witness


def _noether_integrality(s, g):
    total = s.c1sq + s.c2
    status = Status.PASS if total % 12 == 0 else Status.FAIL
    return status, {"c1sq_plus_c2": total, "chi": _chi(s)}


def _cai_threshold(s, g):
    chi = _chi(s)
    witness = {"chi": chi, "order": g.order, "max_order": CAI_MAX_ORDER}
    if chi < CAI_CHI_THRESHOLD:
        return Status.VACUOUS, witness
    return (Status.PASS if g.order <= CAI_MAX_ORDER else Status.FAIL), witness


def _cai_allows(g: GroupProfile) -> bool:
    if _is_cyclic(g):
        return g.order <= CAI_MAX_ORDER
    return g.order == 4 and isinstance(g.structure, (ElementaryAbelian, Opaque))


def _cai_structure(s, g):
    chi = _chi(s)
    witness = {"chi": chi, "group": str(g)}
    if chi <= CAI_STRUCTURE_CHI:
        return Status.VACUOUS, witness
    return (Status.PASS if _cai_allows(g) else Status.FAIL), witness


def _thm_b_divisibility(s, g):
    status = Status.PASS if s.c1sq % g.order == 0 else Status.FAIL
    return status, {"c1sq": s.c1sq, "order": g.order}


def _thm_c_bound(s, g):
    if g.order < 2:
        return Status.VACUOUS, {"order": g.order}
    lower = free_genus_bounds(g).lower
    bound = max(lower - 1, g.order)
    status = Status.PASS if s.c1sq >= bound else Status.FAIL
    return status, {"c1sq": s.c1sq, "free_genus_lower": lower, "bound": bound}


EVALUATORS = {
    RuleId.MIYAOKA_YAU: _miyaoka_yau,
    RuleId.PETERS_DICHOTOMY: _peters_dichotomy,
    RuleId.NOETHER_INTEGRALITY: _noether_integrality,
    RuleId.CAI_THRESHOLD: _cai_threshold,
    RuleId.CAI_STRUCTURE: _cai_structure,
    RuleId.THM_B_DIVISIBILITY: _thm_b_divisibility,
    RuleId.THM_C_BOUND: _thm_c_bound,
}


def check_candidate(
    s: SurfaceInvariants,
    g: GroupProfile,
    rules: RuleTable | None = None,
) -> ConstraintReport:
    """Evaluate every rule of the table against the candidate.

    Rules are independent of each other; a disabled rule is reported
    but never fails.
    """
    rules = rules or RuleTable()
    checks = []
    for rule in rules:
        if not rule.enabled:
            logger.debug("Skipping disabled rule %s", rule.id.value)
            checks.append(RuleCheck(rule.id, Status.DISABLED))
            continue
        status, witness = EVALUATORS[rule.id](s, g)
        checks.append(RuleCheck(rule.id, status, witness))
    return ConstraintReport(surface=s, group=g, checks=tuple(checks))


def burnside_exponent3_generators(rho: int) -> int:
    """The least generator count of a group of exponent 3 and order 3^rho.

    The free group of exponent 3 on r generators has order
    ``3^(r + C(r, 2) + C(r, 3))``, and as a 3-group it has quotients of
    every smaller order with the same number of generators.
    """
    r = 0
    while r + comb(r, 2) + comb(r, 3) < rho:
        r += 1
    return r


class Family(Enum):
    ELEM_ABELIAN_2 = "elem-abelian-2"
    ELEM_ABELIAN_3 = "elem-abelian-3"
    THREE_GROUP = "three-group"

    @classmethod
    def default(cls, case: PetersCase) -> Family:
        if case == PetersCase.TWO_C2:
            return cls.ELEM_ABELIAN_2
        return cls.THREE_GROUP

    def profile(self, rank: int) -> GroupProfile:
        if self == Family.ELEM_ABELIAN_2:
            return GroupProfile.elementary_abelian(2, rank)
        if self == Family.ELEM_ABELIAN_3:
            return GroupProfile.elementary_abelian(3, rank)
        return GroupProfile.opaque(3**rank, burnside_exponent3_generators(rank))


class Feasibility(Enum):
    FEASIBLE = "feasible"
    FEASIBLE_UNBOUNDED = "feasible-unbounded"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class CensusRow:
    rank: int
    group: GroupProfile
    feasibility: Feasibility
    chi_cap: int | None
    survivors: tuple[int, ...] = ()
    witness: SurfaceInvariants | None = None

    @property
    def feasible(self) -> bool:
        return self.feasibility != Feasibility.INFEASIBLE


@dataclass(frozen=True)
class CensusTable:
    case: PetersCase
    family: Family
    rows: tuple[CensusRow, ...]

    @property
    def feasible_ranks(self) -> list[int]:
        return [row.rank for row in self.rows if row.feasible]

    @property
    def max_feasible_order(self) -> int | None:
        orders = [row.group.order for row in self.rows if row.feasible]
        return max(orders, default=None)


def chi_cap(g: GroupProfile, rules: RuleTable) -> int | None:
    """The largest chi(O) that the enabled Cai rules allow for the group."""
    caps = []
    if rules.enabled(RuleId.CAI_THRESHOLD) and g.order > CAI_MAX_ORDER:
        caps.append(CAI_CHI_THRESHOLD - 1)
    if rules.enabled(RuleId.CAI_STRUCTURE) and not _cai_allows(g):
        caps.append(CAI_STRUCTURE_CHI)
    return min(caps, default=None)


def _unbounded_search_limit(case: PetersCase, g: GroupProfile) -> int:
    # The first multiple of order / gcd(order, c1^2 / chi) reaching the
    # free genus bound passes every chi-dependent rule that still applies.
    per_chi = case.surface(1).c1sq
    step = g.order // gcd(g.order, per_chi)
    bound = max(free_genus_bounds(g).lower - 1, g.order) if g.order > 1 else 1
    needed = -(-bound // per_chi)
    return step * -(-needed // step)


def census_row(
    case: PetersCase, family: Family, rank: int, rules: RuleTable
) -> CensusRow:
    g = family.profile(rank)
    cap = chi_cap(g, rules)
    limit = cap if cap is not None else _unbounded_search_limit(case, g)
    passing = [
        s
        for s in (case.surface(chi) for chi in range(1, limit + 1))
        if check_candidate(s, g, rules).verdict == Verdict.FEASIBLE
    ]
    if cap is None:
        feasibility = (
            Feasibility.FEASIBLE_UNBOUNDED if passing else Feasibility.INFEASIBLE
        )
        row = CensusRow(
            rank=rank,
            group=g,
            feasibility=feasibility,
            chi_cap=None,
            witness=passing[0] if passing else None,
        )
    else:
        row = CensusRow(
            rank=rank,
            group=g,
            feasibility=Feasibility.FEASIBLE if passing else Feasibility.INFEASIBLE,
            chi_cap=cap,
            survivors=tuple(s.c1sq for s in passing),
            witness=passing[0] if passing else None,
        )
    logger.debug(
        "Census %s rank %d (order %d): %s",
        case.value,
        rank,
        g.order,
        row.feasibility.value,
    )
    return row


def census(
    case: PetersCase,
    family: Family | None = None,
    max_rank: int = 10,
    rules: RuleTable | None = None,
    workers: int = 1,
) -> CensusTable:
    """Decide for each rank 1..max_rank whether any surface passes the rules.

    Rows may be computed on several threads; the table is always in
    rank order.
    """
    if max_rank < 1:
        raise PreconditionError(f"The census needs max_rank >= 1, not {max_rank}.")
    family = family or Family.default(case)
    rules = rules or RuleTable()
    ranks = range(1, max_rank + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            rows = tuple(
                executor.map(lambda rank: census_row(case, family, rank, rules), ranks)
            )
    else:
        rows = tuple(census_row(case, family, rank, rules) for rank in ranks)
    table = CensusTable(case=case, family=family, rows=rows)
    logger.info(
        "Census %s/%s up to rank %d: feasible ranks %s",
        case.value,
        family.value,
        max_rank,
        table.feasible_ranks,
    )
    return table
