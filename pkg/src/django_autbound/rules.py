"""The table of imported and proved results that candidates are checked against."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from types import MappingProxyType

from django_autbound.exceptions import PreconditionError


class RuleId(Enum):
    MIYAOKA_YAU = "miyaoka_yau"
    PETERS_DICHOTOMY = "peters_dichotomy"
    NOETHER_INTEGRALITY = "noether_integrality"
    CAI_THRESHOLD = "cai_threshold"
    CAI_STRUCTURE = "cai_structure"
    THM_B_DIVISIBILITY = "thm_b_divisibility"
    THM_C_BOUND = "thm_c_bound"


CITATIONS = MappingProxyType(
    {
        RuleId.MIYAOKA_YAU: (
            "Miyaoka-Yau inequality: c1^2 <= 3 c2 for surfaces of general type."
        ),
        RuleId.PETERS_DICHOTOMY: (
            "Peters: Aut(X)^o is trivial unless c1^2 = 2 c2 with a 2-group"
            " or c1^2 = 3 c2 with a 3-group; every element has order 2 or 3,"
            " so the 2 c2 case is an elementary abelian 2-group."
        ),
        RuleId.NOETHER_INTEGRALITY: (
            "Noether's formula: chi(O) = (c1^2 + c2) / 12 is an integer."
        ),
        RuleId.CAI_THRESHOLD: (
            "Cai, via Beauville's canonical map theorem: if |K| has no base"
            " points or fixed components and chi(O) >= 31, the order of"
            " Aut(X)^o is less than 5."
        ),
        RuleId.CAI_STRUCTURE: (
            "Cai: if chi(O) > 188, Aut(X)^o is cyclic of order less than 5"
            " or Z2 x Z2."
        ),
        RuleId.THM_B_DIVISIBILITY: "c1^2 is divisible by the order of Aut(X)^o.",
        RuleId.THM_C_BOUND: (
            "c1^2 >= max(free genus of Aut(X)^o - 1, |Aut(X)^o|), checked with"
            " the free genus lower bound."
        ),
    }
)

MIYAOKA_YAU_RATIO = 3
CAI_CHI_THRESHOLD = 31
CAI_MAX_ORDER = 4
CAI_STRUCTURE_CHI = 188

# Off unless enabled; disabling cai_threshold alone then leaves no chi cap.
DISABLED_BY_DEFAULT = frozenset({RuleId.CAI_STRUCTURE})


@dataclass(frozen=True)
class Rule:
    id: RuleId
    enabled: bool = True

    @property
    def citation(self) -> str:
        return CITATIONS[self.id]


def _rule_id(value: RuleId | str) -> RuleId:
    try:
        return RuleId(value)
    except ValueError:
        choices = ", ".join(rule_id.value for rule_id in RuleId)
        raise PreconditionError(
            f"Unknown rule {value!r}. It must be one of {choices}."
        ) from None


def _default_rules():
    return tuple(
        Rule(rule_id, enabled=rule_id not in DISABLED_BY_DEFAULT)
        for rule_id in RuleId
    )


@dataclass(frozen=True)
class RuleTable:
    rules: tuple[Rule, ...] = field(default_factory=_default_rules)

    @classmethod
    def without(cls, *disabled: RuleId | str) -> RuleTable:
        return cls().disable(*disabled)

    def _toggle(self, ids, enabled: bool) -> RuleTable:
        ids = {_rule_id(rule_id) for rule_id in ids}
        return replace(
            self,
            rules=tuple(
                replace(rule, enabled=enabled) if rule.id in ids else rule
                for rule in self.rules
            ),
        )

    def disable(self, *disabled: RuleId | str) -> RuleTable:
        return self._toggle(disabled, False)

    def enable(self, *enabled: RuleId | str) -> RuleTable:
        return self._toggle(enabled, True)

    def enabled(self, rule_id: RuleId) -> bool:
        return any(rule.enabled for rule in self.rules if rule.id == rule_id)

    def __iter__(self):
        return iter(self.rules)
