"""
Utility functions for rationals, payload loading and report emission.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Union

from .errors import RangeError, ValidationError

Rational = Union[Fraction, int, str]


def parse_rational(value: Rational) -> Fraction:
    """
    Parse an exact rational from the interchange form.

    Accepts ``"p/q"`` and ``"p"`` strings as well as ints and Fractions.
    Floats are rejected: the engine never works with inexact values.

    Parameters
    ----------
    value : str, int or Fraction

    Returns
    -------
    q : Fraction
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise ValidationError(f"Expected an exact rational, got {value!r}")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"Malformed rational {value!r}") from exc
    raise ValidationError(f"Expected an exact rational, got {value!r}")


def format_rational(q: Fraction) -> str:
    """Render ``q`` as ``"p/q"`` (or ``"p"`` for integers)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def midpoint(lo: Fraction, hi: Fraction) -> Fraction:
    return (lo + hi) / 2


def check_unit_interval(values: Iterable[Fraction], what: str = "value") -> None:
    """
    Check that every value lies in [0, 1].

    Raises
    ------
    RangeError if any value is outside the unit interval
    """
    for v in values:
        if not (0 <= v <= 1):
            raise RangeError(f"{what} {format_rational(v)} outside range [0, 1]")


def load_payload(source: Union[str, Path]) -> Any:
    """
    Load a JSON payload from a file path or from inline JSON text.

    Arguments that start with ``{``, ``[`` or ``"`` are parsed inline,
    everything else is read as a path.

    Parameters
    ----------
    source : str or Path

    Returns
    -------
    data : parsed JSON value
    """
    text = str(source).lstrip()
    if text[:1] in ("{", "[", '"'):
        raw = text
    else:
        path = Path(source)
        if not path.exists():
            raise ValidationError(f"Input file not found: {path}")
        raw = path.read_text(encoding="utf-8")
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"Malformed JSON in {str(source)[:60]!r}: {exc}") from exc


def dump_report(report: Any) -> str:
    """Serialise a report deterministically (sorted keys, fixed indentation)."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def require_keys(data: Any, keys: Iterable[str], what: str) -> None:
    """Raise ValidationError unless ``data`` is a dict holding ``keys``."""
    if not isinstance(data, dict):
        raise ValidationError(f"{what} must be a JSON object, got {type(data).__name__}")
    for key in keys:
        if key not in data:
            raise ValidationError(f"Missing required field in {what}: {key}")
