"""Output envelopes, JSON encoding and plain-text tables."""

from __future__ import annotations

import json
from enum import Enum
from fractions import Fraction

import mpmath
from django.core.serializers.json import DjangoJSONEncoder

from django_autbound import __version__

TOOL = "django-autbound"


def exact(value: Fraction | int) -> int | str:
    """An integer, or a fraction rendered as ``a/b``."""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def approximate(value: mpmath.mpf, bits: int) -> str:
    digits = max(int(bits * 0.30103), 1)
    return mpmath.nstr(value, digits)


class AutBoundJSONEncoder(DjangoJSONEncoder):
    """Encode exact fractions as ``a/b`` strings and enums by value."""

    def default(self, o):
        if isinstance(o, Fraction):
            return exact(o)
        if isinstance(o, Enum):
            return o.value
        return super().default(o)


def envelope(
    subcommand: str,
    inputs: dict,
    result: dict,
    citations: list[str] | tuple[str, ...] = (),
) -> dict:
    return {
        "tool": TOOL,
        "version": __version__,
        "subcommand": subcommand,
        "inputs": inputs,
        "result": result,
        "citations": list(citations),
    }


def dumps(data: dict) -> str:
    return json.dumps(data, cls=AutBoundJSONEncoder, indent=2)


def echo_argv(subcommand: str, inputs: dict) -> list[str]:
    """Rebuild the argument list that produced an envelope's inputs.

    Values are attached with ``=`` so negative fractions such as ``-2/3``
    are not mistaken for options.
    """
    argv = [subcommand]
    for dest, value in inputs.items():
        flag = "--" + dest.replace("_", "-")
        if value is None or value is False:
            continue
        if value is True:
            argv.append(flag)
        elif isinstance(value, (list, tuple)):
            for item in value:
                argv.append(f"{flag}={item}")
        else:
            argv.append(f"{flag}={value}")
    return argv


def format_table(headers: list[str], rows: list[list[object]]) -> list[str]:
    """Align columns of a plain-text table."""
    cells = [headers] + [[str(cell) for cell in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = [
        "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in cells
    ]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return lines
