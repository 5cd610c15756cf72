"""Settings for django_autbound, read from the Django settings module."""

from __future__ import annotations

import warnings

from django.conf import settings

from django_autbound.defect import DEFAULT_ORACLE_BITS, MIN_ORACLE_BITS
from django_autbound.exceptions import InvalidSettingError
from django_autbound.rules import RuleId


def disabled_rules() -> tuple[RuleId, ...]:
    """The rules listed in ``AUTBOUND_DISABLED_RULES``."""
    value = getattr(settings, "AUTBOUND_DISABLED_RULES", [])
    if isinstance(value, str):
        warnings.warn(
            "Setting AUTBOUND_DISABLED_RULES to a string is deprecated."
            " Use a list of rule ids instead.",
            DeprecationWarning,
        )
        value = [value]
    if not isinstance(value, (list, tuple)):
        raise InvalidSettingError(
            "The AUTBOUND_DISABLED_RULES setting must be a list."
        )
    try:
        return tuple(RuleId(rule_id) for rule_id in value)
    except ValueError:
        raise InvalidSettingError(
            "The AUTBOUND_DISABLED_RULES setting is invalid."
            " It must only contain "
            + ", ".join(repr(rule_id.value) for rule_id in RuleId)
            + "."
        )


def census_workers() -> int:
    value = getattr(settings, "AUTBOUND_CENSUS_WORKERS", 1)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise InvalidSettingError(
            "The AUTBOUND_CENSUS_WORKERS setting must be a positive int."
        )
    return value


def oracle_bits() -> int:
    value = getattr(settings, "AUTBOUND_ORACLE_BITS", DEFAULT_ORACLE_BITS)
    if not isinstance(value, int) or isinstance(value, bool) or value < MIN_ORACLE_BITS:
        raise InvalidSettingError(
            "The AUTBOUND_ORACLE_BITS setting must be an int"
            f" of at least {MIN_ORACLE_BITS}."
        )
    return value
