"""
Finitely presented strictly decreasing transfinite sequences in [0, 1].

A sequence is a list of segments. A ``Finite`` segment lists its values; an
``OmegaTail(start, limit)`` denotes the omega-sequence
``limit + (start - limit) * 2**-n``. Lengths are therefore ordinals of the
form ``omega*j + m``. Members of the universal order additionally end with a
``Finite`` segment whose last value is 0.

The alternating lexicographical order compares two members at the first
index where they differ: the usual order of the values when that index is
even, the reverse order when it is odd.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from .errors import (
    EqualSequences,
    IndexOutOfRange,
    NotDecreasingAcrossJoin,
    RangeError,
    SequenceValidationError,
    ValidationError,
)
from .ordinal import (
    OMEGA,
    ZERO,
    Order,
    Ordinal,
    Parity,
    is_even,
    omega_times,
    ord_add,
    ord_parity,
    ord_predecessor,
    ord_split_row,
)
from .utils import Rational, format_rational, parse_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Finite:
    """Explicit strictly decreasing run of values."""
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(parse_rational(v) for v in self.values))

    @classmethod
    def of(cls, *values: Rational) -> "Finite":
        return cls(tuple(values))

    @property
    def first(self) -> Fraction:
        return self.values[0]

    @property
    def order_type(self) -> Ordinal:
        return Ordinal.of(len(self.values))


@dataclass(frozen=True)
class OmegaTail:
    """Geometric omega-sequence ``limit + (start - limit) / 2**n``, n = 0, 1, ..."""
    start: Fraction
    limit: Fraction

    def __post_init__(self):
        object.__setattr__(self, "start", parse_rational(self.start))
        object.__setattr__(self, "limit", parse_rational(self.limit))

    @classmethod
    def of(cls, start: Rational, limit: Rational) -> "OmegaTail":
        return cls(start, limit)

    @property
    def first(self) -> Fraction:
        return self.start

    @property
    def order_type(self) -> Ordinal:
        return OMEGA

    def value(self, n: int) -> Fraction:
        return self.limit + (self.start - self.limit) / (2 ** n)

    def shifted(self, n: int = 1) -> "OmegaTail":
        """The same tail with its first ``n`` values dropped."""
        return OmegaTail(self.value(n), self.limit)


Segment = Union[Finite, OmegaTail]


@dataclass(frozen=True)
class TransfiniteSeq:
    """A list of segments; see the module docstring for the denotation."""
    segments: Tuple[Segment, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    def to_json(self) -> dict:
        out = []
        for seg in self.segments:
            if isinstance(seg, Finite):
                out.append({"finite": [format_rational(v) for v in seg.values]})
            else:
                out.append({"tail": {"start": format_rational(seg.start),
                                     "limit": format_rational(seg.limit)}})
        return {"segments": out}

    @classmethod
    def from_json(cls, data: Any) -> "TransfiniteSeq":
        if isinstance(data, list):
            # bare list of rationals: a single Finite segment
            return cls((Finite(tuple(data)),))
        if not isinstance(data, dict) or "segments" not in data:
            raise ValidationError("Sequence JSON must be an object with 'segments'")
        segs: List[Segment] = []
        for raw in data["segments"]:
            if isinstance(raw, dict) and "finite" in raw:
                segs.append(Finite(tuple(raw["finite"])))
            elif isinstance(raw, dict) and "tail" in raw:
                tail = raw["tail"]
                try:
                    segs.append(OmegaTail(tail["start"], tail["limit"]))
                except (KeyError, TypeError) as exc:
                    raise ValidationError(f"Malformed tail segment {raw!r}") from exc
            else:
                raise ValidationError(f"Unknown segment {raw!r}")
        return cls(tuple(segs))

    def __str__(self) -> str:
        parts = []
        for seg in self.segments:
            if isinstance(seg, Finite):
                parts.append("(" + ", ".join(format_rational(v) for v in seg.values) + ")")
            else:
                parts.append(f"Tail({format_rational(seg.start)}→{format_rational(seg.limit)})")
        return "⌢".join(parts) if parts else "()"


def seq(*parts: Union[Segment, Rational]) -> TransfiniteSeq:
    """
    Build a sequence from segments and loose values.

    Consecutive loose values are grouped into one ``Finite`` segment, so
    ``seq(OmegaTail.of(1, "1/2"), "1/2", 0)`` is the tail followed by (1/2, 0).
    """
    segs: List[Segment] = []
    run: List[Fraction] = []
    for part in parts:
        if isinstance(part, (Finite, OmegaTail)):
            if run:
                segs.append(Finite(tuple(run)))
                run = []
            segs.append(part)
        else:
            run.append(parse_rational(part))
    if run:
        segs.append(Finite(tuple(run)))
    return TransfiniteSeq(tuple(segs))


class Validation(NamedTuple):
    ok: bool
    reason: str = ""


class Comparison(NamedTuple):
    order: Order
    delta: Optional[Ordinal] = None

    @property
    def parity(self) -> Optional[Parity]:
        return None if self.delta is None else ord_parity(self.delta)


# -- validation -------------------------------------------------------------

def _segment_problem(seg: Segment) -> str:
    if isinstance(seg, Finite):
        if not seg.values:
            return "empty Finite segment"
        for v in seg.values:
            if not (0 <= v <= 1):
                return f"value {format_rational(v)} outside [0, 1]"
        for u, v in zip(seg.values, seg.values[1:]):
            if not u > v:
                return f"not decreasing: {format_rational(u)} then {format_rational(v)}"
        return ""
    if not (0 <= seg.limit < seg.start <= 1):
        return (f"tail needs 0 <= limit < start <= 1, got start {format_rational(seg.start)}"
                f" limit {format_rational(seg.limit)}")
    return ""


def _join_problem(prev: Segment, nxt: Segment) -> str:
    if isinstance(prev, Finite):
        if not prev.values[-1] > nxt.first:
            return (f"not decreasing across segments: {format_rational(prev.values[-1])}"
                    f" then {format_rational(nxt.first)}")
    elif nxt.first > prev.limit:
        return (f"boundary: {format_rational(nxt.first)} > {format_rational(prev.limit)}"
                f" (tail limit)")
    return ""


def seq_validate(raw: TransfiniteSeq, require_universal: bool = False) -> Validation:
    """
    Check the presentation invariants.

    Parameters
    ----------
    raw : TransfiniteSeq
    require_universal : bool
        Also require a last element equal to 0.

    Returns
    -------
    Validation
        ``ok`` plus a descriptive ``reason`` on failure.
    """
    if not raw.segments:
        return Validation(False, "no segments")
    for seg in raw.segments:
        problem = _segment_problem(seg)
        if problem:
            return Validation(False, problem)
    for prev, nxt in zip(raw.segments, raw.segments[1:]):
        problem = _join_problem(prev, nxt)
        if problem:
            return Validation(False, problem)
    if require_universal:
        last = raw.segments[-1]
        if not isinstance(last, Finite) or last.values[-1] != 0:
            return Validation(False, "last element is not 0")
    return Validation(True)


def ensure_valid(x: TransfiniteSeq, universal: bool = True) -> TransfiniteSeq:
    """Return ``x`` or raise SequenceValidationError with the failing reason."""
    result = seq_validate(x, universal)
    if not result.ok:
        raise SequenceValidationError(f"Invalid sequence {x}: {result.reason}")
    return x


def is_universal(x: TransfiniteSeq) -> bool:
    return seq_validate(x, True).ok


# -- indexing ----------------------------------------------------------------

def seq_length(x: TransfiniteSeq) -> Ordinal:
    """Ordinal sum of the segment order types (the domain ordinal)."""
    total = ZERO
    for seg in x.segments:
        total = ord_add(total, seg.order_type)
    return total


def seq_index(x: TransfiniteSeq, alpha: Union[Ordinal, int]) -> Fraction:
    """The value at index ``alpha``."""
    alpha = Ordinal.coerce(alpha)
    try:
        row, col = ord_split_row(alpha)
    except ValidationError as exc:
        raise IndexOutOfRange(f"Index {alpha} out of range for {x}") from exc
    pos_row, pos_col = 0, 0
    for seg in x.segments:
        if isinstance(seg, Finite):
            n = len(seg.values)
            if row == pos_row and pos_col <= col < pos_col + n:
                return seg.values[col - pos_col]
            pos_col += n
        else:
            if row == pos_row and col >= pos_col:
                return seg.value(col - pos_col)
            pos_row, pos_col = pos_row + 1, 0
    raise IndexOutOfRange(f"Index {alpha} out of range for {x} of length {seq_length(x)}")


def iter_values(x: TransfiniteSeq, per_tail: int) -> Iterator[Tuple[Ordinal, Fraction]]:
    """
    Yield ``(index, value)`` pairs in index order, cutting every tail after
    ``per_tail`` values.
    """
    row, col = 0, 0
    for seg in x.segments:
        if isinstance(seg, Finite):
            for v in seg.values:
                yield omega_times(row, col), v
                col += 1
        else:
            for n in range(per_tail):
                yield omega_times(row, col + n), seg.value(n)
            row, col = row + 1, 0


def seq_values(x: TransfiniteSeq, count: int, per_tail: Optional[int] = None) -> List[Fraction]:
    """The first ``count`` values met by :func:`iter_values`."""
    out = []
    for _, v in iter_values(x, per_tail if per_tail is not None else count):
        if len(out) >= count:
            break
        out.append(v)
    return out


def seq_prefix(x: TransfiniteSeq, delta: Union[Ordinal, int]) -> TransfiniteSeq:
    """
    The restriction ``x|delta`` (all values with index below ``delta``).

    A tail cut at a finite offset becomes a Finite segment, so the result is
    always presentable. The result may have no segments (``delta = 0``).
    """
    delta = Ordinal.coerce(delta)
    row, col = ord_split_row(delta)
    pos_row, pos_col = 0, 0
    out: List[Segment] = []
    for seg in x.segments:
        if (pos_row, pos_col) >= (row, col):
            break
        if isinstance(seg, Finite):
            n = len(seg.values)
            if pos_row == row and pos_col + n > col:
                out.append(Finite(seg.values[: col - pos_col]))
                break
            out.append(seg)
            pos_col += n
        else:
            if pos_row == row:
                k = col - pos_col
                if k > 0:
                    out.append(Finite(tuple(seg.value(i) for i in range(k))))
                break
            out.append(seg)
            pos_row, pos_col = pos_row + 1, 0
    else:
        if (pos_row, pos_col) < (row, col):
            raise IndexOutOfRange(f"Prefix length {delta} exceeds length of {x}")
    return TransfiniteSeq(tuple(out))


def inf_before(x: TransfiniteSeq, delta: Union[Ordinal, int]) -> Optional[Fraction]:
    """
    Infimum of the values with index below ``delta``.

    ``None`` for ``delta = 0``. For a limit index this is the limit of the
    tail ending there.
    """
    delta = Ordinal.coerce(delta)
    if delta.is_zero:
        return None
    if delta.finite_part:
        return seq_index(x, ord_predecessor(delta))
    target, _ = ord_split_row(delta)
    pos_row = 0
    for seg in x.segments:
        if isinstance(seg, OmegaTail):
            pos_row += 1
            if pos_row == target:
                return seg.limit
    raise IndexOutOfRange(f"Index {delta} out of range for {x}")


# -- canonical form and first difference -------------------------------------

def seq_canonicalize(x: TransfiniteSeq) -> TransfiniteSeq:
    """
    Canonical presentation of the same sequence.

    Adjacent Finite segments are merged and a Finite value ``v`` directly
    before ``OmegaTail(s, b)`` with ``v = 2s - b`` is absorbed into the tail,
    as often as possible. Two presentations denote the same sequence iff
    their canonical forms are equal.
    """
    out: List[Segment] = []
    for seg in x.segments:
        if isinstance(seg, Finite):
            if not seg.values:
                continue
            if out and isinstance(out[-1], Finite):
                out[-1] = Finite(out[-1].values + seg.values)
            else:
                out.append(seg)
            continue
        tail = seg
        while out and isinstance(out[-1], Finite) and out[-1].values[-1] == 2 * tail.start - tail.limit:
            tail = OmegaTail(out[-1].values[-1], tail.limit)
            rest = out[-1].values[:-1]
            if rest:
                out[-1] = Finite(rest)
            else:
                out.pop()
        out.append(tail)
    return TransfiniteSeq(tuple(out))


def _advance(seg: Segment) -> Optional[Segment]:
    if isinstance(seg, Finite):
        return Finite(seg.values[1:]) if len(seg.values) > 1 else None
    return seg.shifted(1)


def _first_difference(x: TransfiniteSeq, y: TransfiniteSeq) -> Tuple[Ordinal, Fraction, Fraction]:
    cx, cy = seq_canonicalize(x), seq_canonicalize(y)
    if cx == cy:
        raise EqualSequences(f"Sequences are equal: {cx}")
    a, b = list(cx.segments), list(cy.segments)
    row, col = 0, 0
    while a and b:
        sa, sb = a[0], b[0]
        if isinstance(sa, OmegaTail) and sa == sb:
            # identical tails agree on the whole rest of the row
            a.pop(0)
            b.pop(0)
            row, col = row + 1, 0
            continue
        if sa.first != sb.first:
            return omega_times(row, col), sa.first, sb.first
        for lst, seg in ((a, sa), (b, sb)):
            nxt = _advance(seg)
            if nxt is None:
                lst.pop(0)
            else:
                lst[0] = nxt
        col += 1
    if not a and not b:
        raise EqualSequences(f"Sequences are equal: {cx}")
    raise SequenceValidationError(
        f"One sequence is a proper prefix of the other: {cx} vs {cy}")


def delta_first_difference(x: TransfiniteSeq, y: TransfiniteSeq) -> Ordinal:
    """
    Least index at which ``x`` and ``y`` differ.

    Both presentations are walked simultaneously; a tail entered part-way is
    re-based so that two tails are compared as wholes whenever both cursors
    sit at the start of one.
    """
    return _first_difference(x, y)[0]


def altlex_compare(x: TransfiniteSeq, y: TransfiniteSeq, validate: bool = True) -> Comparison:
    """
    Alternating lexicographical comparison of two universal-order members.

    Returns
    -------
    Comparison
        ``order`` and the deciding index ``delta`` (None when equal).
    """
    if validate:
        ensure_valid(x)
        ensure_valid(y)
    try:
        delta, xv, yv = _first_difference(x, y)
    except EqualSequences:
        return Comparison(Order.EQUAL)
    smaller = xv < yv
    less = smaller if is_even(delta) else not smaller
    return Comparison(Order.LESS if less else Order.GREATER, delta)


# -- algebra -------------------------------------------------------------------

def seq_affine(a: Rational, x: TransfiniteSeq, b: Rational) -> TransfiniteSeq:
    """
    The sequence ``(a*x_alpha + b)_alpha`` for ``a > 0``.

    Raises
    ------
    RangeError if some image value leaves [0, 1]
    """
    a, b = parse_rational(a), parse_rational(b)
    if a <= 0:
        raise RangeError(f"Affine factor {format_rational(a)} must be positive")
    out: List[Segment] = []
    for seg in x.segments:
        if isinstance(seg, Finite):
            vals = tuple(a * v + b for v in seg.values)
            bad = [v for v in vals if not 0 <= v <= 1]
        else:
            start, limit = a * seg.start + b, a * seg.limit + b
            vals = None
            bad = [v for v in (start, limit) if not 0 <= v <= 1]
        if bad:
            raise RangeError(
                f"Affine image value {format_rational(bad[0])} of {x} outside range [0, 1]")
        out.append(Finite(vals) if vals is not None else OmegaTail(start, limit))
    return TransfiniteSeq(tuple(out))


def seq_concat(x: TransfiniteSeq, y: TransfiniteSeq) -> TransfiniteSeq:
    """
    Concatenation ``x⌢y``; every value of ``x`` must exceed every value of ``y``.

    Raises
    ------
    NotDecreasingAcrossJoin
    """
    if x.segments and y.segments:
        problem = _join_problem(x.segments[-1], y.segments[0])
        if problem:
            raise NotDecreasingAcrossJoin(f"Cannot join {x} and {y}: {problem}")
    return TransfiniteSeq(x.segments + y.segments)


def concat_all(parts: Sequence[TransfiniteSeq]) -> TransfiniteSeq:
    out = TransfiniteSeq(())
    for part in parts:
        out = seq_concat(out, part)
    return out


HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


def evenize(x: TransfiniteSeq) -> TransfiniteSeq:
    """
    Map a member to one of even length, preserving the altlex order.

    ``(x/2 + 1/2)⌢(0)`` for odd length, ``(x/2 + 1/2)⌢(1/4)⌢(0)`` for even
    length.
    """
    ensure_valid(x)
    shifted = seq_affine(HALF, x, HALF)
    if is_even(seq_length(x)):
        return seq_concat(shifted, seq(QUARTER, 0))
    return seq_concat(shifted, seq(0))
