"""Index and dimension counts for equivariant pseudoholomorphic curves.

An equivariant map from a surface with an ``H`` action has a
Cauchy-Riemann operator of index ``2d`` where

    d = c1(TM).f_*[Sigma] / |H| + 2 - 2g - sum((m_i1 + m_i2) / m_i)

summed over the orbifold points of the quotient. When each isotropy
acts through SL2 the rotation numbers add up to ``m_i`` and every
orbifold point costs exactly one. Adding the dimension of the moduli
of the marked quotient gives the inequalities a nonempty moduli space
must satisfy.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from django_autbound.covering import (
    GroupProfile,
    free_genus_bounds,
    riemann_hurwitz_free,
)
from django_autbound.exceptions import (
    IndivisibleError,
    NonIntegralIndex,
    PreconditionError,
    SL2Violation,
)


def _integer(data: dict, key: str) -> int:
    value = data[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise PreconditionError(f"{key} must be an integer, not {value!r}.")
    return value


@dataclass(frozen=True)
class MarkedPoint:
    m: int
    m1: int
    m2: int

    def __post_init__(self):
        if self.m < 2:
            raise PreconditionError(f"Isotropy order must be at least 2, not {self.m}.")
        if not (0 < self.m1 < self.m and 0 < self.m2 < self.m):
            raise PreconditionError(
                f"Rotation numbers must lie strictly between 0 and {self.m},"
                f" not ({self.m1}, {self.m2})."
            )

    @property
    def sl2(self) -> bool:
        return self.m1 + self.m2 == self.m

    def __str__(self):
        return f"(m={self.m}, m1={self.m1}, m2={self.m2})"


@dataclass(frozen=True)
class OrbifoldData:
    h_order: int
    quotient_genus: int
    marked: tuple[MarkedPoint, ...]
    degree: int

    def __post_init__(self):
        if self.h_order < 1:
            raise PreconditionError(f"|H| must be positive, not {self.h_order}.")
        if self.quotient_genus < 0:
            raise PreconditionError("The quotient genus must be nonnegative.")
        object.__setattr__(self, "marked", tuple(self.marked))

    @property
    def k(self) -> int:
        return len(self.marked)

    @classmethod
    def from_dict(cls, data: dict) -> OrbifoldData:
        try:
            return cls(
                h_order=_integer(data, "h_order"),
                quotient_genus=_integer(data, "quotient_genus"),
                marked=tuple(
                    MarkedPoint(
                        m=_integer(p, "m"), m1=_integer(p, "m1"), m2=_integer(p, "m2")
                    )
                    for p in data.get("marked", [])
                ),
                degree=_integer(data, "degree"),
            )
        except (KeyError, TypeError) as e:
            raise PreconditionError(f"Malformed orbifold data: {e!r}.") from e

    def to_dict(self) -> dict:
        return {
            "h_order": self.h_order,
            "quotient_genus": self.quotient_genus,
            "marked": [{"m": p.m, "m1": p.m1, "m2": p.m2} for p in self.marked],
            "degree": self.degree,
        }


def cr_index_value(d: OrbifoldData) -> Fraction:
    """The exact value of the index formula, integral or not."""
    return (
        Fraction(d.degree, d.h_order)
        + 2
        - 2 * d.quotient_genus
        - sum((Fraction(p.m1 + p.m2, p.m) for p in d.marked), Fraction(0))
    )


def cr_index(d: OrbifoldData) -> int:
    value = cr_index_value(d)
    if value.denominator != 1:
        raise NonIntegralIndex(value)
    return int(value)


def moduli_dim(quotient_genus: int, k: int) -> int:
    """Complex dimension of the moduli of a genus g curve with k marks."""
    if quotient_genus < 0 or k < 0:
        raise PreconditionError("Genus and number of marks must be nonnegative.")
    if quotient_genus == 0:
        return 0 if k <= 3 else k - 3
    if quotient_genus == 1:
        return 1 if k == 0 else k - 1
    return 3 * quotient_genus - 3 + k


class Case(Enum):
    I = "i"
    I_PRIME = "i'"
    II = "ii"
    III = "iii"
    III_PRIME = "iii'"
    IV = "iv"
    V = "v"


@dataclass(frozen=True)
class Inequality:
    case: Case
    lhs: Fraction

    @property
    def satisfied(self) -> bool:
        return self.lhs >= 0


@dataclass(frozen=True)
class CaseReport:
    """The governing inequality, and the base one it sharpens if any."""

    governing: Inequality
    base: Inequality | None = None

    @property
    def satisfied(self) -> bool:
        return self.governing.satisfied


def case_classify(d: OrbifoldData) -> CaseReport:
    for point in d.marked:
        if not point.sl2:
            raise SL2Violation(point)
    a = Fraction(d.degree, d.h_order)
    g, k = d.quotient_genus, d.k
    if g == 0 and k <= 3:
        # The marked sphere has a (3 - k)-dimensional automorphism group.
        return CaseReport(
            governing=Inequality(Case.I_PRIME, a - 1),
            base=Inequality(Case.I, a + 2 - k),
        )
    if g == 0:
        return CaseReport(governing=Inequality(Case.II, a - 1))
    if g == 1 and k == 0:
        return CaseReport(
            governing=Inequality(Case.III_PRIME, a),
            base=Inequality(Case.III, a + 1),
        )
    if g == 1:
        return CaseReport(governing=Inequality(Case.IV, a - 1))
    return CaseReport(governing=Inequality(Case.V, a + g - 1))


class Claim2Status(Enum):
    HOLDS = "holds"
    MINIMALITY_CONTRADICTION = "minimality_contradiction"
    EXCEPTIONAL_CURVE = "exceptional_curve"
    VIOLATED = "violated"


@dataclass(frozen=True)
class Claim2Verdict:
    square: int
    k_dot: int
    minimal: bool
    status: Claim2Status

    @property
    def holds(self) -> bool:
        return self.status == Claim2Status.HOLDS

    @property
    def genus(self) -> int | None:
        """The genus adjunction assigns to an embedded curve, if any."""
        total = self.square + self.k_dot
        if total % 2:
            return None
        return total // 2 + 1


def claim2_check(square: int, k_dot: int, minimal: bool = True) -> Claim2Verdict:
    """Check ``c1(TM).C <= 0``, that is ``K.C >= 0``.

    A curve with ``K.C < 0`` has ``C^2 <= K.C < 0``, and adjunction
    makes it an embedded (-1)-sphere, which a minimal surface cannot
    contain.
    """
    if k_dot >= 0:
        status = Claim2Status.HOLDS
    elif square == -1 and k_dot == -1:
        status = (
            Claim2Status.MINIMALITY_CONTRADICTION
            if minimal
            else Claim2Status.EXCEPTIONAL_CURVE
        )
    else:
        status = Claim2Status.VIOLATED
    return Claim2Verdict(square=square, k_dot=k_dot, minimal=minimal, status=status)


@dataclass(frozen=True)
class CurveDatum:
    """A component of the canonical divisor and its multiplicity."""

    genus: int
    square: int
    multiplicity: int
    k_dot: int
    stabilizer_order: int | None = None

    def __post_init__(self):
        if self.genus < 0:
            raise PreconditionError(f"Genus must be nonnegative, not {self.genus}.")
        if self.multiplicity < 1:
            raise PreconditionError(
                f"Multiplicity must be positive, not {self.multiplicity}."
            )
        if self.stabilizer_order is not None and self.stabilizer_order < 1:
            raise PreconditionError(
                f"Stabilizer order must be positive, not {self.stabilizer_order}."
            )

    @classmethod
    def from_dict(cls, data: dict) -> CurveDatum:
        try:
            return cls(
                genus=_integer(data, "genus"),
                square=_integer(data, "square"),
                multiplicity=_integer(data, "multiplicity"),
                k_dot=_integer(data, "k_dot"),
                stabilizer_order=(
                    None
                    if data.get("stabilizer_order") is None
                    else _integer(data, "stabilizer_order")
                ),
            )
        except (KeyError, TypeError) as e:
            raise PreconditionError(f"Malformed curve data: {e!r}.") from e


class CurveKind(Enum):
    TORUS = "torus"
    POSITIVE = "positive"
    EXCLUDED = "excluded"


def classify_curve(curve: CurveDatum) -> CurveKind:
    """Sort a curve into the two shapes that K.C >= 0 and adjunction allow.

    Either an embedded torus with ``C^2 = K.C = 0``, or a curve with
    ``C^2 = K.C > 0`` and genus ``C^2 + 1``.
    """
    if curve.square == 0 and curve.k_dot == 0 and curve.genus == 1:
        return CurveKind.TORUS
    if curve.square > 0 and curve.k_dot == curve.square == curve.genus - 1:
        return CurveKind.POSITIVE
    return CurveKind.EXCLUDED


@dataclass(frozen=True)
class AuditCheck:
    name: str
    passed: bool
    detail: str
    curve: int | None = None


@dataclass(frozen=True)
class AuditReport:
    c1sq: int
    group_order: int
    kinds: tuple[CurveKind, ...]
    checks: tuple[AuditCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> list[AuditCheck]:
        return [check for check in self.checks if not check.passed]


def _curve_checks(
    index: int,
    curve: CurveDatum,
    group_order: int,
    group: GroupProfile | None,
) -> Iterable[AuditCheck]:
    kind = classify_curve(curve)
    yield AuditCheck(
        "classification",
        kind != CurveKind.EXCLUDED,
        f"{kind.value} curve",
        index,
    )
    adjunction = 2 * (curve.genus - 1)
    yield AuditCheck(
        "adjunction",
        adjunction == curve.square + curve.k_dot,
        f"2(g - 1) = {adjunction}, C^2 + K.C = {curve.square + curve.k_dot}",
        index,
    )
    yield AuditCheck(
        "claim2",
        curve.k_dot >= 0,
        f"K.C = {curve.k_dot}",
        index,
    )
    if curve.stabilizer_order is not None:
        yield AuditCheck(
            "stabilizer",
            group_order % curve.stabilizer_order == 0,
            f"stabilizer order {curve.stabilizer_order}, group order {group_order}",
            index,
        )
    if curve.square <= 0:
        return
    yield AuditCheck(
        "multiplicity",
        curve.multiplicity == 1,
        f"n = {curve.multiplicity} on a curve with C^2 = {curve.square}",
        index,
    )
    yield AuditCheck(
        "canonical_degree",
        curve.k_dot == curve.square,
        f"K.C = {curve.k_dot}, C^2 = {curve.square}",
        index,
    )
    if curve.stabilizer_order is not None:
        # The whole group preserves each curve of positive square.
        yield AuditCheck(
            "invariant",
            curve.stabilizer_order == group_order,
            f"stabilizer order {curve.stabilizer_order}, group order {group_order}",
            index,
        )
    try:
        covering = riemann_hurwitz_free(
            total_genus=curve.genus, group_order=group_order
        )
    except IndivisibleError as e:
        yield AuditCheck("divisibility", False, str(e), index)
    else:
        yield AuditCheck(
            "divisibility",
            True,
            f"free quotient of genus {covering.quotient_genus}",
            index,
        )
    if group is not None and group.order >= 2:
        lower = free_genus_bounds(group).lower
        yield AuditCheck(
            "free_genus",
            curve.genus >= lower,
            f"genus {curve.genus}, free genus at least {lower}",
            index,
        )


def decomposition_audit(
    c1sq: int,
    group_order: int,
    curves: Iterable[CurveDatum],
    group: GroupProfile | None = None,
) -> AuditReport:
    """Audit the numerical consequences of ``c1^2 = sum(genus(C_i) - 1)``.

    Disjointness and embeddedness of the curves are not checked; only
    the arithmetic they imply.
    """
    if c1sq < 1:
        raise PreconditionError(f"c1^2 must be positive, not {c1sq}.")
    if group_order < 1:
        raise PreconditionError(f"Group order must be positive, not {group_order}.")
    if group is not None and group.order != group_order:
        raise PreconditionError(
            f"The group has order {group.order}, not {group_order}."
        )
    curves = list(curves)
    checks = [
        check
        for index, curve in enumerate(curves)
        for check in _curve_checks(index, curve, group_order, group)
    ]
    positive = [curve for curve in curves if curve.square > 0]
    self_intersection = sum(curve.multiplicity**2 * curve.square for curve in curves)
    checks.append(
        AuditCheck(
            "self_intersection",
            self_intersection == c1sq,
            f"sum n^2 C^2 = {self_intersection}, c1^2 = {c1sq}",
        )
    )
    if all(curve.square >= 0 for curve in curves):
        square_sum = sum(curve.square for curve in positive)
        checks.append(
            AuditCheck(
                "square_sum",
                square_sum == c1sq,
                f"sum of positive C^2 = {square_sum}, c1^2 = {c1sq}",
            )
        )
    genus_sum = sum(curve.genus - 1 for curve in positive)
    checks.append(
        AuditCheck(
            "genus_sum",
            genus_sum == c1sq,
            f"sum of genus - 1 = {genus_sum}, c1^2 = {c1sq}",
        )
    )
    return AuditReport(
        c1sq=c1sq,
        group_order=group_order,
        kinds=tuple(classify_curve(curve) for curve in curves),
        checks=tuple(checks),
    )
