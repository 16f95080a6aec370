"""
Compact figures in [0, 1]^2 attached to members of the universal order,
and the witnesses separating the families they generate.

A member x is drawn as the closure of its points ``(x_alpha, 0)`` together
with a vertical segment ``{x_alpha} x [0, x_alpha - x_(alpha+1)]`` at every
limit position alpha where ``x_alpha`` equals the infimum of the earlier
values. All predicates are exact; only :func:`hausdorff_distance_approx`
works in floating point, and it rounds its answer to a dyadic rational.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist

from .config import DEFAULT_CONFIG
from .errors import (
    IndexOutOfRange,
    PrefixNotPresentable,
    RangeError,
    ValidationError,
    WitnessPreconditionError,
)
from .ordinal import Order, Ordinal, is_even, ord_predecessor
from .seq import (
    Finite,
    OmegaTail,
    TransfiniteSeq,
    altlex_compare,
    ensure_valid,
    inf_before,
    seq,
    seq_canonicalize,
    seq_concat,
    seq_index,
    seq_prefix,
    seq_validate,
)
from .utils import Rational, format_rational, midpoint, parse_rational

logger = logging.getLogger(__name__)


# -- figures ---------------------------------------------------------------------

@dataclass(frozen=True)
class Point:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", parse_rational(self.x))
        object.__setattr__(self, "y", parse_rational(self.y))


@dataclass(frozen=True)
class VSeg:
    """``{x} x [0, h]``."""
    x: Fraction
    h: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", parse_rational(self.x))
        object.__setattr__(self, "h", parse_rational(self.h))


@dataclass(frozen=True)
class GChain:
    """``{(limit + (start - limit) / 2**n, 0) : n >= 0}`` plus its limit point ``(limit, 0)``."""
    start: Fraction
    limit: Fraction

    def __post_init__(self):
        object.__setattr__(self, "start", parse_rational(self.start))
        object.__setattr__(self, "limit", parse_rational(self.limit))

    def value(self, n: int) -> Fraction:
        return self.limit + (self.start - self.limit) / 2 ** n


Piece = Union[Point, VSeg, GChain]


@dataclass(frozen=True)
class CompactFig:
    pieces: Tuple[Piece, ...]

    def __post_init__(self):
        pieces = tuple(self.pieces)
        object.__setattr__(self, "pieces", pieces)
        for piece in pieces:
            coords = {
                Point: lambda p: (p.x, p.y),
                VSeg: lambda p: (p.x, p.h),
                GChain: lambda p: (p.start, p.limit),
            }[type(piece)](piece)
            for c in coords:
                if not 0 <= c <= 1:
                    raise RangeError(f"Figure coordinate {format_rational(c)} outside range [0, 1]")
            if isinstance(piece, GChain) and not piece.limit < piece.start:
                raise ValidationError(f"Chain needs limit < start: {piece}")

    def to_json(self) -> dict:
        out = []
        for p in self.pieces:
            if isinstance(p, Point):
                out.append({"point": [format_rational(p.x), format_rational(p.y)]})
            elif isinstance(p, VSeg):
                out.append({"vseg": {"x": format_rational(p.x), "h": format_rational(p.h)}})
            else:
                out.append({"gchain": {"start": format_rational(p.start), "limit": format_rational(p.limit)}})
        return {"pieces": out}

    @classmethod
    def from_json(cls, data: Any) -> "CompactFig":
        if not isinstance(data, dict) or not isinstance(data.get("pieces"), list):
            raise ValidationError("Figure JSON must be an object with a 'pieces' list")
        pieces: List[Piece] = []
        for raw in data["pieces"]:
            if isinstance(raw, dict) and "point" in raw:
                pieces.append(Point(*raw["point"]))
            elif isinstance(raw, dict) and "vseg" in raw:
                pieces.append(VSeg(raw["vseg"]["x"], raw["vseg"]["h"]))
            elif isinstance(raw, dict) and "gchain" in raw:
                pieces.append(GChain(raw["gchain"]["start"], raw["gchain"]["limit"]))
            else:
                raise ValidationError(f"Unknown figure piece {raw!r}")
        return cls(tuple(pieces))


def _value_after_first(segs: Sequence, i: int) -> Optional[Fraction]:
    seg = segs[i]
    if isinstance(seg, OmegaTail):
        return seg.value(1)
    if len(seg.values) > 1:
        return seg.values[1]
    return segs[i + 1].first if i + 1 < len(segs) else None


def psi_compact(x: TransfiniteSeq) -> CompactFig:
    """
    The compact figure of a universal-order member.

    Finite values become points and tails become chains (their limit point
    included). A segment starting exactly at the limit of the tail before it
    sits at a limit position equal to the infimum of its predecessors and
    contributes a vertical segment instead of a point, unless it is the last
    value.
    """
    ensure_valid(x)
    segs = seq_canonicalize(x).segments
    pieces: List[Piece] = []
    for i, seg in enumerate(segs):
        prev = segs[i - 1] if i else None
        vertical = False
        if isinstance(prev, OmegaTail) and seg.first == prev.limit:
            nxt = _value_after_first(segs, i)
            if nxt is not None:
                pieces.append(VSeg(seg.first, seg.first - nxt))
                vertical = True
        if isinstance(seg, Finite):
            values = seg.values[1:] if vertical else seg.values
            pieces.extend(Point(v, 0) for v in values)
        else:
            pieces.append(GChain(seg.start, seg.limit))
    return CompactFig(tuple(pieces))


def _power_of_two(q: Fraction) -> bool:
    return q.denominator == 1 and q.numerator >= 1 and q.numerator & (q.numerator - 1) == 0


def fig_member(fig: CompactFig, p: Tuple[Rational, Rational]) -> bool:
    """Exact membership of the point ``p`` in the figure."""
    px, py = parse_rational(p[0]), parse_rational(p[1])
    for piece in fig.pieces:
        if isinstance(piece, Point):
            if (piece.x, piece.y) == (px, py):
                return True
        elif isinstance(piece, VSeg):
            if px == piece.x and 0 <= py <= piece.h:
                return True
        elif py == 0:
            if px == piece.limit:
                return True
            if piece.limit < px <= piece.start and _power_of_two((piece.start - piece.limit) / (px - piece.limit)):
                return True
    return False


@dataclass(frozen=True)
class BoxQuery:
    """
    Open x-interval ``(x_lo, x_hi)`` (or ``(x_lo, 1]`` when ``x_hi`` is None, the
    "top" marker) times a y-interval with per-endpoint openness.
    """
    x_lo: Fraction
    x_hi: Optional[Fraction] = None
    y_lo: Fraction = Fraction(0)
    y_hi: Fraction = Fraction(1)
    y_lo_open: bool = False
    y_hi_open: bool = False

    def __post_init__(self):
        object.__setattr__(self, "x_lo", parse_rational(self.x_lo))
        if self.x_hi is not None:
            object.__setattr__(self, "x_hi", parse_rational(self.x_hi))
        object.__setattr__(self, "y_lo", parse_rational(self.y_lo))
        object.__setattr__(self, "y_hi", parse_rational(self.y_hi))

    @property
    def is_empty(self) -> bool:
        x_empty = self.x_lo >= (1 if self.x_hi is None else self.x_hi)
        y_empty = self.y_lo > self.y_hi or (self.y_lo == self.y_hi and (self.y_lo_open or self.y_hi_open))
        return x_empty or y_empty

    def contains_x(self, x: Fraction) -> bool:
        return x > self.x_lo and (x <= 1 if self.x_hi is None else x < self.x_hi)

    def contains_y(self, y: Fraction) -> bool:
        above = y > self.y_lo if self.y_lo_open else y >= self.y_lo
        below = y < self.y_hi if self.y_hi_open else y <= self.y_hi
        return above and below

    def describe(self) -> str:
        right = "1]" if self.x_hi is None else f"{format_rational(self.x_hi)})"
        ylo = "(" if self.y_lo_open else "["
        yhi = ")" if self.y_hi_open else "]"
        return (f"({format_rational(self.x_lo)}, {right} x "
                f"{ylo}{format_rational(self.y_lo)}, {format_rational(self.y_hi)}{yhi}")


def _chain_meets(chain: GChain, box: BoxQuery) -> bool:
    if not box.contains_y(Fraction(0)):
        return False
    if box.contains_x(chain.limit):
        return True
    if box.x_hi is None or chain.start < box.x_hi:
        return chain.start > box.x_lo
    if box.x_hi <= chain.limit:
        return False
    # largest chain point below x_hi
    n = 0
    while chain.value(n) >= box.x_hi:
        n += 1
    return chain.value(n) > box.x_lo


def fig_meets_box(fig: CompactFig, box: BoxQuery) -> bool:
    """Whether the figure meets the box, decided piece by piece."""
    if box.is_empty:
        return False
    for piece in fig.pieces:
        if isinstance(piece, Point):
            if box.contains_x(piece.x) and box.contains_y(piece.y):
                return True
        elif isinstance(piece, VSeg):
            if not box.contains_x(piece.x):
                continue
            lo, lo_open = (box.y_lo, box.y_lo_open) if box.y_lo >= 0 else (Fraction(0), False)
            hi, hi_open = (box.y_hi, box.y_hi_open) if box.y_hi <= piece.h else (piece.h, False)
            if lo < hi or (lo == hi and not lo_open and not hi_open):
                return True
        elif _chain_meets(piece, box):
            return True
    return False


# -- witnesses -------------------------------------------------------------------

def _value_or_zero(x: TransfiniteSeq, alpha: Ordinal) -> Fraction:
    try:
        return seq_index(x, alpha)
    except IndexOutOfRange:
        return Fraction(0)


def _witness_interval(x: TransfiniteSeq, y: TransfiniteSeq, delta: Ordinal) -> Tuple[Fraction, Fraction]:
    nxt = delta + 1
    if is_even(delta):
        return max(seq_index(x, delta), _value_or_zero(y, nxt)), seq_index(y, delta)
    return max(_value_or_zero(x, nxt), seq_index(y, delta)), seq_index(x, delta)


def witness_between(x: TransfiniteSeq, y: TransfiniteSeq) -> TransfiniteSeq:
    """
    A member w whose figure separates the families of ``x <_altlex y``.

    With delta the deciding index, even delta gives
    ``w = x|delta ⌢ (w_delta, 0)`` with w_delta the midpoint of
    ``(max(x_delta, y_(delta+1)), y_delta)``; odd delta gives
    ``w = y|delta ⌢ (w_delta, 0)`` with w_delta the midpoint of
    ``(max(x_(delta+1), y_delta), x_delta)``.

    Raises
    ------
    WitnessPreconditionError unless ``x <_altlex y``
    """
    cmp = altlex_compare(x, y)
    if cmp.order is not Order.LESS:
        raise WitnessPreconditionError(f"Witness needs x < y, got {cmp.order.value}")
    delta = cmp.delta
    lo, hi = _witness_interval(x, y, delta)
    w_delta = midpoint(lo, hi)
    base = x if is_even(delta) else y
    w = seq_concat(seq_prefix(base, delta), seq(w_delta, 0))
    check = seq_validate(w, True)
    if not check.ok:
        raise PrefixNotPresentable(f"Witness {w} is not a member: {check.reason}")
    logger.debug("Witness at delta=%s: w_delta=%s in (%s, %s)", delta, w_delta, lo, hi)
    return w


def l_exclusion_point(y: TransfiniteSeq, delta: Union[Ordinal, int]) -> Tuple[Fraction, Fraction]:
    """
    A point every figure of a member agreeing with ``y`` through ``delta + 1`` contains.

    At a limit delta where ``y_delta`` equals the infimum of the earlier values
    this is the top of the vertical segment, ``(y_delta, y_delta - y_(delta+1))``;
    otherwise it is ``(y_delta, 0)``.
    """
    delta = Ordinal.coerce(delta)
    y_delta = seq_index(y, delta)
    if not delta.is_zero and not delta.finite_part and inf_before(y, delta) == y_delta:
        return y_delta, y_delta - _value_or_zero(y, delta + 1)
    return y_delta, Fraction(0)


class Predicate(NamedTuple):
    name: str
    passed: bool
    detail: str = ""
    flag: str = ""

    def to_json(self) -> dict:
        out = {"predicate": self.name, "status": "pass" if self.passed else "fail", "detail": self.detail}
        if self.flag:
            out["flag"] = self.flag
        return out


class WitnessReport(NamedTuple):
    delta: Optional[Ordinal]
    predicates: Tuple[Predicate, ...]

    @property
    def ok(self) -> bool:
        return all(p.passed for p in self.predicates)

    def to_json(self) -> dict:
        return {
            "delta": None if self.delta is None else str(self.delta),
            "parity": None if self.delta is None else ("even" if is_even(self.delta) else "odd"),
            "ok": self.ok,
            "predicates": [p.to_json() for p in self.predicates],
        }


def _meets(fig: CompactFig, name: str, lo: Fraction, hi: Optional[Fraction], flag: str = "") -> Predicate:
    box = BoxQuery(lo, hi)
    return Predicate(name, fig_meets_box(fig, box), box.describe(), flag)


def check_witness(x: TransfiniteSeq, y: TransfiniteSeq, w: TransfiniteSeq) -> WitnessReport:
    """
    Evaluate every predicate the separation argument needs on ``w``.

    Failures are report entries, never exceptions.
    """
    try:
        cmp = altlex_compare(x, y)
        ensure_valid(w)
    except ValidationError as exc:
        return WitnessReport(None, (Predicate("order", False, str(exc)),))
    if cmp.order is not Order.LESS:
        return WitnessReport(cmp.delta, (Predicate("order", False, f"x is {cmp.order.value} y"),))
    delta = cmp.delta
    preds = [Predicate("order", True, f"x < y at delta {delta}")]

    base = x if is_even(delta) else y
    try:
        agree = seq_canonicalize(seq_prefix(w, delta)) == seq_canonicalize(seq_prefix(base, delta))
        w_delta = seq_index(w, delta)
    except IndexOutOfRange as exc:
        preds.append(Predicate("prefix_agreement", False, str(exc)))
        return WitnessReport(delta, tuple(preds))
    preds.append(Predicate("prefix_agreement", agree, f"w|{delta} against {'x' if is_even(delta) else 'y'}"))

    lo, hi = _witness_interval(x, y, delta)
    preds.append(Predicate("interval_bounds", lo < w_delta < hi,
                           f"{format_rational(lo)} < {format_rational(w_delta)} < {format_rational(hi)}"))

    fig = psi_compact(w)
    nxt = delta + 1
    if is_even(delta):
        preds.append(_meets(fig, "meets_upper_gap", _value_or_zero(y, nxt), seq_index(y, delta)))
        inf_x = inf_before(x, delta)
        flag = "empty prefix infimum read as top" if inf_x is None else ""
        preds.append(_meets(fig, "meets_lower_gap", seq_index(x, delta), inf_x, flag))
        point = l_exclusion_point(y, delta)
        preds.append(Predicate("l_exclusion", not fig_member(fig, point),
                               f"({format_rational(point[0])}, {format_rational(point[1])}) absent"))
    else:
        prev = ord_predecessor(delta)
        preds.append(_meets(fig, "meets_upper_gap", seq_index(y, delta), seq_index(y, prev)))
        preds.append(_meets(fig, "meets_lower_gap", _value_or_zero(x, nxt), seq_index(x, delta)))
    return WitnessReport(delta, tuple(preds))


# -- Hausdorff distance ------------------------------------------------------------

def _chain_points(chain: GChain, resolution: Fraction) -> List[Tuple[Fraction, Fraction]]:
    out = [(chain.limit, Fraction(0))]
    n = 0
    while True:
        out.append((chain.value(n), Fraction(0)))
        if chain.value(n) - chain.limit <= resolution:
            return out
        n += 1


def _cloud(fig: CompactFig, resolution: Fraction) -> np.ndarray:
    pts: List[Tuple[Fraction, Fraction]] = []
    for piece in fig.pieces:
        if isinstance(piece, Point):
            pts.append((piece.x, piece.y))
        elif isinstance(piece, GChain):
            pts.extend(_chain_points(piece, resolution))
    return np.array([[float(a), float(b)] for a, b in pts], dtype=float).reshape(-1, 2)


def _segments(fig: CompactFig) -> np.ndarray:
    return np.array([[float(p.x), float(p.h)] for p in fig.pieces if isinstance(p, VSeg)],
                    dtype=float).reshape(-1, 2)


def _distance_to(query: np.ndarray, cloud: np.ndarray, segs: np.ndarray) -> np.ndarray:
    best = np.full(len(query), np.inf)
    if len(cloud):
        best = np.minimum(best, cdist(query, cloud).min(axis=1))
    for x, h in segs:
        dx = np.abs(query[:, 0] - x)
        dy = np.maximum(0.0, np.maximum(query[:, 1] - h, -query[:, 1]))
        best = np.minimum(best, np.hypot(dx, dy))
    return best


def _directed(fig: CompactFig, cloud: np.ndarray, other_cloud: np.ndarray, other_segs: np.ndarray,
              tol: float) -> float:
    """sup over ``fig`` of the distance to the other figure."""
    best = 0.0
    if len(cloud):
        best = float(_distance_to(cloud, other_cloud, other_segs).max())
    for x, h in _segments(fig):
        # distance along a vertical segment is 1-Lipschitz: branch and bound
        ys = np.linspace(0.0, h, 65)
        vals = _distance_to(np.column_stack([np.full_like(ys, x), ys]), other_cloud, other_segs)
        best = max(best, float(vals.max()))
        lo, hi, vlo, vhi = ys[:-1], ys[1:], vals[:-1], vals[1:]
        while lo.size:
            keep = (vlo + vhi + (hi - lo)) / 2 > best + tol
            lo, hi, vlo, vhi = lo[keep], hi[keep], vlo[keep], vhi[keep]
            if not lo.size:
                break
            mid = (lo + hi) / 2
            vmid = _distance_to(np.column_stack([np.full_like(mid, x), mid]), other_cloud, other_segs)
            best = max(best, float(vmid.max()))
            lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
            vlo, vhi = np.concatenate([vlo, vmid]), np.concatenate([vmid, vhi])
    return best


def hausdorff_distance_approx(f: CompactFig, g: CompactFig,
                              eps: Rational = DEFAULT_CONFIG.hausdorff_eps) -> Fraction:
    """
    Hausdorff distance between two figures, within ``eps``.

    Chains are cut once their remaining points lie within ``eps/4`` of the
    limit; vertical segments are handled by branch and bound. The result is
    rounded to a multiple of ``eps/4``.

    Raises
    ------
    ValidationError if ``eps`` is not positive or a figure is empty
    """
    eps = parse_rational(eps)
    if eps <= 0:
        raise ValidationError(f"Tolerance {format_rational(eps)} must be positive")
    if not f.pieces or not g.pieces:
        raise ValidationError("Hausdorff distance needs nonempty figures")
    quarter = eps / 4
    cf, cg = _cloud(f, quarter), _cloud(g, quarter)
    sf, sg = _segments(f), _segments(g)
    tol = float(quarter)
    d = max(_directed(f, cf, cg, sg, tol), _directed(g, cg, cf, sf, tol))
    return Fraction(round(d / float(quarter))) * quarter
