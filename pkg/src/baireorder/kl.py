"""
Alternating decompositions of finitary functions on X = [0, omega^k].

A :class:`FinitaryFunction` is a level-k :class:`Block` plus the value at the
top point omega^k. A level-L block covers [0, omega^L) as the blocks
``omega^(L-1)*i + [0, omega^(L-1))``, i = 0, 1, ...; block i is ``prefix[i]``
while it exists and ``rep`` from then on. A level-0 block is a single
rational, the value at its only point.

On this grammar sups, limsups, USC envelopes and the pointwise order are all
exactly decidable, which is what :func:`decompose` relies on:

    g_0 = f,  f_a = env(g_a),  g_(a+1) = f_a - g_a

stopping at the first xi with f_xi = f_(xi+1). The stages are then ranked by
the USC index

    r_f = sum of 2**-(n+1) over basic boxes B_n meeting the open subgraph of f

which orders pointwise comparable USC functions strictly.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from .config import DEFAULT_CONFIG
from .errors import (
    BudgetExceeded,
    IndexOutOfRange,
    InvariantViolation,
    NegativeResult,
    NotALimitPoint,
    NotComparable,
    NotStabilized,
    NotUSCError,
    ParityViolation,
    PrecisionError,
    PrefixNotPresentable,
    RangeError,
    ShapeError,
    ValidationError,
)
from .ordinal import (
    OMEGA,
    ZERO,
    Order,
    Ordinal,
    is_even,
    omega_power,
    ord_add,
    ord_block_start,
    ord_predecessor,
    ord_split_block,
)
from .seq import TransfiniteSeq, seq
from .utils import Rational, format_rational, parse_rational

logger = logging.getLogger(__name__)

BlockLike = Union["Block", Fraction]


# -- presentations -------------------------------------------------------------

@dataclass(frozen=True)
class Block:
    """Function on [0, omega^level): ``prefix`` blocks, then ``rep`` forever."""
    level: int
    prefix: Tuple[BlockLike, ...]
    rep: BlockLike

    def __post_init__(self):
        if isinstance(self.level, bool) or not isinstance(self.level, int) or self.level < 1:
            raise ShapeError(f"Block level must be a positive integer, got {self.level!r}")
        children = tuple(_child(c, self.level - 1) for c in self.prefix)
        object.__setattr__(self, "prefix", children)
        object.__setattr__(self, "rep", _child(self.rep, self.level - 1))

    def block(self, i: int) -> BlockLike:
        return self.prefix[i] if i < len(self.prefix) else self.rep


def _child(value: Any, level: int) -> BlockLike:
    if level == 0:
        if isinstance(value, Block):
            raise ShapeError("Level-1 blocks hold rationals, not blocks")
        return parse_rational(value)
    if not isinstance(value, Block) or value.level != level:
        raise ShapeError(f"Expected a level-{level} block, got {value!r}")
    return value


@dataclass(frozen=True)
class FinitaryFunction:
    """Function on [0, omega^k]: ``block`` on [0, omega^k) and ``top`` at omega^k."""
    block: Block
    top: Fraction

    def __post_init__(self):
        if not isinstance(self.block, Block):
            raise ShapeError(f"FinitaryFunction needs a Block, got {self.block!r}")
        object.__setattr__(self, "top", parse_rational(self.top))

    @property
    def k(self) -> int:
        return self.block.level

    @classmethod
    def of(cls, k: int, prefix: Sequence[Any], rep: Any, top: Rational) -> "FinitaryFunction":
        return cls(Block(k, tuple(prefix), rep), top)

    def to_json(self) -> dict:
        out = _block_to_json(self.block)
        out["k"] = self.k
        out["top"] = format_rational(self.top)
        return out

    @classmethod
    def from_json(cls, data: Any) -> "FinitaryFunction":
        if not isinstance(data, dict) or "k" not in data or "top" not in data:
            raise ValidationError("FinitaryFunction JSON needs 'k', 'prefix', 'rep' and 'top'")
        k = data["k"]
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            raise ShapeError(f"k must be a positive integer, got {k!r}")
        return cls(_block_from_json(data, k), data["top"])

    def __str__(self) -> str:
        return f"f(k={self.k}, {_block_str(self.block)}, top={format_rational(self.top)})"


def _block_to_json(b: BlockLike) -> Any:
    if not isinstance(b, Block):
        return format_rational(b)
    return {"prefix": [_block_to_json(c) for c in b.prefix], "rep": _block_to_json(b.rep)}


def _block_from_json(data: Any, level: int) -> BlockLike:
    if level == 0:
        return parse_rational(data)
    if not isinstance(data, dict) or "rep" not in data:
        raise ValidationError(f"Level-{level} block must be an object with 'prefix' and 'rep': {data!r}")
    if "k" in data and data["k"] != level:
        raise ShapeError(f"Nested block declares k={data['k']} at level {level}")
    prefix = data.get("prefix", [])
    if not isinstance(prefix, list):
        raise ValidationError("'prefix' must be a list")
    return Block(level, tuple(_block_from_json(c, level - 1) for c in prefix),
                 _block_from_json(data["rep"], level - 1))


def _block_str(b: BlockLike) -> str:
    if not isinstance(b, Block):
        return format_rational(b)
    return "[" + " ".join(_block_str(c) for c in b.prefix) + " | " + _block_str(b.rep) + "*]"


def _leaves(b: BlockLike) -> Iterator[Fraction]:
    if not isinstance(b, Block):
        yield b
        return
    for c in b.prefix:
        yield from _leaves(c)
    yield from _leaves(b.rep)


def _sup(b: BlockLike) -> Fraction:
    return max(_leaves(b))


def _first(b: BlockLike) -> Fraction:
    while isinstance(b, Block):
        b = b.block(0)
    return b


def _set_first(b: BlockLike, value: Fraction) -> BlockLike:
    if not isinstance(b, Block):
        return value
    return Block(b.level, (_set_first(b.block(0), value),) + b.prefix[1:], b.rep)


def _map(b: BlockLike, fn: Callable[[Fraction], Fraction]) -> BlockLike:
    if not isinstance(b, Block):
        return parse_rational(fn(b))
    return Block(b.level, tuple(_map(c, fn) for c in b.prefix), _map(b.rep, fn))


def _combine(a: BlockLike, b: BlockLike, op: Callable[[Fraction, Fraction], Fraction]) -> BlockLike:
    if not isinstance(a, Block):
        return op(a, b)
    m = max(len(a.prefix), len(b.prefix))
    return Block(a.level, tuple(_combine(a.block(i), b.block(i), op) for i in range(m)),
                 _combine(a.rep, b.rep, op))


def _pairs(a: BlockLike, b: BlockLike) -> Iterator[Tuple[Fraction, Fraction]]:
    if not isinstance(a, Block):
        yield a, b
        return
    for i in range(max(len(a.prefix), len(b.prefix)) + 1):
        yield from _pairs(a.block(i), b.block(i))


def _canon(b: BlockLike) -> BlockLike:
    if not isinstance(b, Block):
        return b
    prefix = [_canon(c) for c in b.prefix]
    rep = _canon(b.rep)
    while prefix and prefix[-1] == rep:
        prefix.pop()
    return Block(b.level, tuple(prefix), rep)


def _const_block(level: int, value: Fraction) -> BlockLike:
    if level == 0:
        return value
    return Block(level, (), _const_block(level - 1, value))


def _check_same_space(f: FinitaryFunction, g: FinitaryFunction) -> None:
    if f.k != g.k:
        raise ShapeError(f"Functions live on different spaces: k={f.k} and k={g.k}")


# -- construction helpers ----------------------------------------------------------

def fn_constant(k: int, value: Rational) -> FinitaryFunction:
    value = parse_rational(value)
    return FinitaryFunction(_const_block(k, value), value)


def _interval_block(level: int, lo: Ordinal, hi: Optional[Ordinal],
                    inside: Fraction, outside: Fraction) -> BlockLike:
    if level == 0:
        return inside if lo.is_zero and (hi is None or not hi.is_zero) else outside
    end = omega_power(level)
    if lo >= end or (hi is not None and hi <= lo):
        return _const_block(level, outside)
    if hi is not None and hi >= end:
        hi = None
    i_lo, r_lo = ord_split_block(lo, level)
    i_hi, r_hi = (None, None) if hi is None else ord_split_block(hi, level)
    last = i_lo if i_hi is None else i_hi
    blocks = []
    for i in range(last + 1):
        if i < i_lo:
            blocks.append(_const_block(level - 1, outside))
        elif i == i_lo:
            sub_hi = r_hi if i == i_hi else None
            blocks.append(_interval_block(level - 1, r_lo, sub_hi, inside, outside))
        elif i_hi is None or i < i_hi:
            blocks.append(_const_block(level - 1, inside))
        else:
            blocks.append(_interval_block(level - 1, ZERO, r_hi, inside, outside))
    rep = _const_block(level - 1, inside if i_hi is None else outside)
    return _canon(Block(level, tuple(blocks), rep))


def fn_indicator(k: int, lo: Union[Ordinal, int], hi: Union[Ordinal, int, None] = None,
                 inside: Rational = 1, outside: Rational = 0) -> FinitaryFunction:
    """
    Indicator of ``{x : lo <= x < hi}``; ``hi=None`` runs through the top omega^k.

    ``fn_indicator(1, OMEGA)`` is the indicator of {omega} and
    ``fn_indicator(1, 0, OMEGA)`` that of [0, omega).
    """
    lo = Ordinal.coerce(lo)
    hi = None if hi is None else Ordinal.coerce(hi)
    inside, outside = parse_rational(inside), parse_rational(outside)
    top_point = omega_power(k)
    top_inside = lo <= top_point and (hi is None or hi > top_point)
    return FinitaryFunction(_interval_block(k, lo, hi, inside, outside),
                            inside if top_inside else outside)


def fn_map(f: FinitaryFunction, fn: Callable[[Fraction], Fraction]) -> FinitaryFunction:
    """Apply ``fn`` to every value of ``f``."""
    return FinitaryFunction(_map(f.block, fn), parse_rational(fn(f.top)))


# -- evaluation --------------------------------------------------------------------

def _block_eval(b: BlockLike, x: Ordinal) -> Fraction:
    if not isinstance(b, Block):
        return b
    i, rho = ord_split_block(x, b.level)
    return _block_eval(b.block(i), rho)


def fn_eval(f: FinitaryFunction, x: Union[Ordinal, int]) -> Fraction:
    """
    Value of ``f`` at ``x <= omega^k``.

    Raises
    ------
    IndexOutOfRange if ``x > omega^k``
    """
    x = Ordinal.coerce(x)
    top_point = omega_power(f.k)
    if x == top_point:
        return f.top
    if x > top_point:
        raise IndexOutOfRange(f"Point {x} outside [0, {top_point}]")
    return _block_eval(f.block, x)


def fn_sup(f: FinitaryFunction) -> Fraction:
    return max(_sup(f.block), f.top)


def fn_min(f: FinitaryFunction) -> Fraction:
    return min(min(_leaves(f.block)), f.top)


def _range_sup(b: BlockLike, lo: Ordinal, hi: Optional[Ordinal]) -> Optional[Fraction]:
    # sup over [lo, hi) inside the block; hi=None is the end of the block
    if not isinstance(b, Block):
        return b if lo.is_zero and (hi is None or not hi.is_zero) else None
    end = omega_power(b.level)
    if lo >= end:
        return None
    if hi is not None and hi >= end:
        hi = None
    if hi is not None and hi <= lo:
        return None
    i_lo, r_lo = ord_split_block(lo, b.level)
    i_hi, r_hi = (None, None) if hi is None else ord_split_block(hi, b.level)
    last = max(i_lo, len(b.prefix)) + 1
    if i_hi is not None:
        last = min(last, i_hi)
    best = None
    for i in range(i_lo, last + 1):
        v = _range_sup(b.block(i), r_lo if i == i_lo else ZERO, r_hi if i == i_hi else None)
        if v is not None and (best is None or v > best):
            best = v
    return best


def fn_sup_on(f: FinitaryFunction, lo: Union[Ordinal, int, None],
              hi: Union[Ordinal, int]) -> Optional[Fraction]:
    """
    Supremum of ``f`` over the interval ``(lo, hi]``, or ``[0, hi]`` when ``lo`` is None.

    Returns None for an empty interval.
    """
    top_point = omega_power(f.k)
    hi = Ordinal.coerce(hi)
    if hi > top_point:
        raise IndexOutOfRange(f"Point {hi} outside [0, {top_point}]")
    start = ZERO if lo is None else Ordinal.coerce(lo) + 1
    best = _range_sup(f.block, start, None if hi == top_point else hi + 1)
    if hi == top_point and start <= top_point:
        best = f.top if best is None else max(best, f.top)
    return best


def _block_limsup(b: Block, lam: Optional[Ordinal]) -> Fraction:
    if lam is None:
        return _sup(b.rep)
    i, rho = ord_split_block(lam, b.level)
    if rho.is_zero:
        return _block_limsup(b.block(i - 1), None)
    return _block_limsup(b.block(i), rho)


def fn_limsup_at(f: FinitaryFunction, lam: Union[Ordinal, int]) -> Fraction:
    """
    Limsup of ``f`` at the limit point ``lam``, approached from below.

    Raises
    ------
    NotALimitPoint if ``lam`` is 0, a successor, or beyond omega^k
    """
    lam = Ordinal.coerce(lam)
    top_point = omega_power(f.k)
    if lam.is_zero or lam.finite_part or lam > top_point:
        raise NotALimitPoint(f"{lam} is not a limit point of [0, {top_point}]")
    return _block_limsup(f.block, None if lam == top_point else lam)


# -- envelope and pointwise algebra -----------------------------------------------

def _block_envelope(b: BlockLike) -> BlockLike:
    if not isinstance(b, Block) or b.level == 1:
        # every point of a level-1 block is isolated
        return b
    out = []
    for i in range(len(b.prefix) + 1):
        env = _block_envelope(b.block(i))
        if i:
            env = _set_first(env, max(_first(env), _sup(b.block(i - 1).rep)))
        out.append(env)
    rep = _block_envelope(b.rep)
    rep = _set_first(rep, max(_first(rep), _sup(b.rep.rep)))
    return Block(b.level, tuple(out), rep)


def usc_envelope(f: FinitaryFunction) -> FinitaryFunction:
    """
    The least upper semicontinuous majorant of ``f``.

    Isolated points keep their value; a limit point takes the max of its
    value and the limsup from below. The first value of every block after the
    first is such a limit point, and its limsup is the sup of the preceding
    block's repeating part.
    """
    top = max(f.top, _block_limsup(f.block, None))
    return fn_canonical(FinitaryFunction(_block_envelope(f.block), top))


def fn_canonical(f: FinitaryFunction) -> FinitaryFunction:
    """Drop trailing prefix blocks equal to ``rep``, recursively."""
    return FinitaryFunction(_canon(f.block), f.top)


def fn_equal(f: FinitaryFunction, g: FinitaryFunction) -> bool:
    """Denotational equality, decided on canonical forms."""
    if f.k != g.k:
        return False
    return f.top == g.top and _canon(f.block) == _canon(g.block)


def is_usc(f: FinitaryFunction) -> bool:
    return fn_equal(usc_envelope(f), f)


_OPS: Dict[str, Callable[[Fraction, Fraction], Fraction]] = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "max": max,
    "min": min,
}


def fn_combine(f: FinitaryFunction, g: FinitaryFunction, op: str,
               check_nonnegative: bool = False) -> FinitaryFunction:
    """
    Pointwise ``f op g`` for op in add, sub, max, min.

    Raises
    ------
    NegativeResult if ``check_nonnegative`` and some value is negative
    """
    _check_same_space(f, g)
    if op not in _OPS:
        raise ValidationError(f"Unknown pointwise operation {op!r}")
    fn = _OPS[op]
    out = fn_canonical(FinitaryFunction(_combine(f.block, g.block, fn), fn(f.top, g.top)))
    if check_nonnegative and fn_min(out) < 0:
        raise NegativeResult(f"{op} of {f} and {g} takes the negative value {format_rational(fn_min(out))}")
    return out


def fn_leq(f: FinitaryFunction, g: FinitaryFunction) -> bool:
    """Pointwise ``f <= g``."""
    _check_same_space(f, g)
    return f.top <= g.top and all(a <= b for a, b in _pairs(f.block, g.block))


def fn_lt(f: FinitaryFunction, g: FinitaryFunction) -> bool:
    """``f <_p g``: pointwise ``f <= g`` and ``f != g``."""
    return fn_leq(f, g) and not fn_equal(f, g)


def _first_below(a: BlockLike, b: BlockLike) -> Optional[Ordinal]:
    if not isinstance(a, Block):
        return ZERO if a < b else None
    for i in range(max(len(a.prefix), len(b.prefix)) + 1):
        pos = _first_below(a.block(i), b.block(i))
        if pos is not None:
            return ord_add(ord_block_start(i, a.level), pos)
    return None


def fn_first_below(f: FinitaryFunction, g: FinitaryFunction) -> Optional[Ordinal]:
    """Least point x with ``f(x) < g(x)``, or None."""
    _check_same_space(f, g)
    pos = _first_below(f.block, g.block)
    if pos is None and f.top < g.top:
        return omega_power(f.k)
    return pos


# -- decomposition -------------------------------------------------------------------

class Check(NamedTuple):
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"check": self.name, "status": "pass" if self.passed else "fail", "detail": self.detail}


@dataclass(frozen=True)
class Decomposition:
    """Stages f_alpha (indices in ``indices``), the companion g_alpha and the rank xi."""
    function: FinitaryFunction
    stages: Tuple[FinitaryFunction, ...]
    trace: Tuple[FinitaryFunction, ...]
    indices: Tuple[Ordinal, ...]
    rank: Ordinal
    report: Tuple[Check, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.report)

    def stage(self, alpha: Union[Ordinal, int]) -> FinitaryFunction:
        """f_alpha; zero past the rank, and 2-periodic past the last computed finite stage."""
        alpha = Ordinal.coerce(alpha)
        if alpha in self.indices:
            return self.stages[self.indices.index(alpha)]
        if alpha > self.rank:
            return fn_constant(self.function.k, 0)
        finite = [i for i, idx in enumerate(self.indices) if idx.is_finite]
        same_parity = [i for i in finite if is_even(self.indices[i]) == is_even(alpha)]
        if not alpha.is_finite or not same_parity:
            raise IndexOutOfRange(f"Stage {alpha} was not computed")
        return self.stages[same_parity[-1]]

    def to_json(self) -> dict:
        return {
            "function": self.function.to_json(),
            "rank": self.rank.to_json(),
            "rank_text": str(self.rank),
            "indices": [i.to_json() for i in self.indices],
            "stages": [s.to_json() for s in self.stages],
            "trace": [g.to_json() for g in self.trace],
            "report": [c.to_json() for c in self.report],
        }


def _sign_add(total: FinitaryFunction, term: FinitaryFunction, alpha: Ordinal) -> FinitaryFunction:
    return fn_combine(total, term, "add" if is_even(alpha) else "sub")


def _partial_sums(stages: Sequence[FinitaryFunction], indices: Sequence[Ordinal],
                  k: int) -> List[Tuple[Ordinal, FinitaryFunction]]:
    """``(alpha, sum*_{beta<alpha})`` for every recorded alpha and the one after the last."""
    total = fn_constant(k, 0)
    out: List[Tuple[Ordinal, FinitaryFunction]] = []
    expected = ZERO
    for alpha, stage in zip(indices, stages):
        if alpha != expected:
            if alpha == OMEGA and expected.is_finite:
                total = _stabilized_even_sum(out, expected, total)
            else:
                raise NotStabilized(f"Stage {alpha} follows {expected}; only omega may be skipped to")
        out.append((alpha, total))
        total = _sign_add(total, stage, alpha)
        expected = alpha + 1
    out.append((expected, total))
    return out


def _stabilized_even_sum(sums: List[Tuple[Ordinal, FinitaryFunction]], expected: Ordinal,
                         total: FinitaryFunction) -> FinitaryFunction:
    evens = [s for a, s in sums if is_even(a)]
    if is_even(expected):
        evens.append(total)
    if len(evens) < 2 or not fn_equal(evens[-1], evens[-2]):
        raise NotStabilized("Even partial sums have not stabilized before omega")
    return evens[-1]


def star_sum(stages: Sequence[FinitaryFunction], upto: Union[Ordinal, int],
             indices: Optional[Sequence[Ordinal]] = None, k: Optional[int] = None) -> FinitaryFunction:
    """
    Generalized alternating sum ``sum*_{beta < upto} (-1)^beta f_beta``.

    Successor steps add or subtract according to the parity of beta. The sum
    up to omega is the stabilized value of the even partial sums.

    Parameters
    ----------
    stages : list of FinitaryFunction
        f_beta in index order.
    upto : Ordinal
    indices : list of Ordinal, optional
        Index of each stage; defaults to 0, 1, 2, ...
    k : int, optional
        Space exponent, needed only when ``stages`` is empty.

    Raises
    ------
    NotStabilized, IndexOutOfRange
    """
    upto = Ordinal.coerce(upto)
    if not stages:
        if k is None:
            raise ShapeError("star_sum of no stages needs k")
        if not upto.is_zero:
            raise IndexOutOfRange(f"Cannot sum {upto} stages of an empty list")
        return fn_constant(k, 0)
    k = stages[0].k
    for s in stages:
        if s.k != k:
            raise ShapeError("All stages must live on the same space")
    indices = tuple(Ordinal.of(i) for i in range(len(stages))) if indices is None else tuple(indices)
    sums = _partial_sums(stages, indices, k)
    for alpha, total in sums:
        if alpha == upto:
            return total
    if upto == OMEGA and all(a.is_finite for a, _ in sums):
        last_alpha, last_total = sums[-1]
        return _stabilized_even_sum(sums[:-1], last_alpha, last_total)
    if upto > sums[-1][0]:
        raise IndexOutOfRange(f"Cannot sum {upto} stages; only {sums[-1][0]} are recorded")
    raise NotStabilized(f"Sum up to {upto} is not supported")


def _verify(f: FinitaryFunction, stages: Sequence[FinitaryFunction], trace: Sequence[FinitaryFunction],
            indices: Sequence[Ordinal]) -> Tuple[Check, ...]:
    checks = []
    bad = [str(a) for a, s in zip(indices, stages) if not is_usc(s)]
    checks.append(Check("stages_usc", not bad, ", ".join(bad)))
    bad = [str(indices[i + 1]) for i in range(len(stages) - 1) if not fn_leq(stages[i + 1], stages[i])]
    checks.append(Check("stages_decreasing", not bad, ", ".join(bad)))
    zero = fn_constant(f.k, 0)
    checks.append(Check("final_stage_zero", fn_equal(stages[-1], zero), str(stages[-1])))
    bad = [str(a) for a, g in zip(indices, trace) if fn_min(g) < 0]
    checks.append(Check("trace_nonnegative", not bad, ", ".join(bad)))
    bound = fn_sup(f)
    bad = [str(a) for a, s in zip(indices, stages) if fn_sup(s) > bound]
    checks.append(Check("stages_bounded", not bad, f"bound {format_rational(bound)}"))
    try:
        sums = _partial_sums(stages, indices, f.k)
    except NotStabilized as exc:
        checks.append(Check("partial_sum_identity", False, str(exc)))
        checks.append(Check("reconstruction", False, str(exc)))
        return tuple(checks)
    bad = []
    for (alpha, total), g in zip(sums, trace):
        if not fn_equal(_sign_add(total, g, alpha), f):
            bad.append(str(alpha))
    checks.append(Check("partial_sum_identity", not bad, ", ".join(bad)))
    rebuilt = sums[-2][1]
    checks.append(Check("reconstruction", fn_equal(rebuilt, f), str(rebuilt)))
    return tuple(checks)


def decompose(f: FinitaryFunction, budget: int = DEFAULT_CONFIG.stage_budget,
              strict: bool = True) -> Decomposition:
    """
    Canonical alternating decomposition of a bounded nonnegative ``f``.

    Runs ``g_0 = f``, ``f_a = env(g_a)``, ``g_(a+1) = f_a - g_a`` until
    ``f_xi = f_(xi+1)``. After ``budget`` successor steps without a fixpoint
    the even-indexed g's must have stabilized; the stable value becomes
    ``g_omega`` and a second round of ``budget`` steps follows.

    Parameters
    ----------
    f : FinitaryFunction
    budget : int
        Successor steps per round.
    strict : bool
        Raise InvariantViolation when a post-condition fails; otherwise the
        failure is only recorded in the report.

    Returns
    -------
    Decomposition

    Raises
    ------
    RangeError if ``f`` takes a negative value
    BudgetExceeded if no fixpoint is reached within omega*2 stages
    """
    if fn_min(f) < 0:
        raise RangeError(f"decompose needs a nonnegative function, {f} takes {format_rational(fn_min(f))}")
    indices: List[Ordinal] = []
    stages: List[FinitaryFunction] = []
    trace: List[FinitaryFunction] = []

    def dump() -> dict:
        return {"indices": [str(i) for i in indices], "stages": [s.to_json() for s in stages],
                "trace": [g.to_json() for g in trace]}

    g, fa, alpha = f, usc_envelope(f), ZERO
    steps, second_round = 0, False
    while True:
        indices.append(alpha)
        stages.append(fa)
        trace.append(g)
        g_next = fn_combine(fa, g, "sub", check_nonnegative=True)
        f_next = usc_envelope(g_next)
        logger.debug("Stage %s: f=%s g=%s", alpha, fa, g)
        if fn_equal(fa, f_next):
            break
        steps += 1
        if steps < budget:
            g, fa, alpha = g_next, f_next, alpha + 1
            continue
        if second_round:
            raise BudgetExceeded(f"No fixpoint within {OMEGA}+{budget} stages", trace=dump())
        evens = [t for i, t in zip(indices, trace) if is_even(i)]
        if is_even(alpha + 1):
            evens.append(g_next)
        if len(evens) < 2 or not fn_equal(evens[-1], evens[-2]):
            raise BudgetExceeded(f"No fixpoint within {budget} stages and even stages not stabilized",
                                 trace=dump())
        logger.debug("Even stages stabilized after %d steps; continuing at stage omega", steps)
        g = evens[-1]
        fa, alpha = usc_envelope(g), OMEGA
        steps, second_round = 0, True

    report = _verify(f, stages, trace, indices)
    result = Decomposition(f, tuple(stages), tuple(trace), tuple(indices), alpha, report)
    if strict and not result.ok:
        failed = [c.name for c in report if not c.passed]
        raise InvariantViolation(f"Decomposition post-conditions failed: {', '.join(failed)}",
                                 dump=result.to_json())
    return result


class StageComparison(NamedTuple):
    delta: Ordinal
    stage0: FinitaryFunction
    stage1: FinitaryFunction
    decomposition0: Decomposition
    decomposition1: Decomposition


def first_differing_stage(d0: Decomposition, d1: Decomposition) -> Optional[Ordinal]:
    """Least alpha with f0_alpha != f1_alpha, or None when every stage agrees."""
    candidates = sorted(set(d0.indices) | set(d1.indices))
    for alpha in candidates:
        if not fn_equal(d0.stage(alpha), d1.stage(alpha)):
            return alpha
    return None


def compare_decompositions(f0: FinitaryFunction, f1: FinitaryFunction,
                           budget: int = DEFAULT_CONFIG.stage_budget) -> StageComparison:
    """
    First differing stage of the decompositions of ``f0 <_p f1``.

    At that stage delta the pair is strictly ordered: ``f0_delta <_p f1_delta``
    for even delta and ``f0_delta >_p f1_delta`` for odd delta.

    Raises
    ------
    NotComparable unless ``f0 <_p f1``
    ParityViolation if the stage pair is not ordered that way
    """
    if not fn_lt(f0, f1):
        raise NotComparable(f"{f0} is not strictly below {f1} pointwise")
    d0, d1 = decompose(f0, budget), decompose(f1, budget)
    delta = first_differing_stage(d0, d1)
    if delta is None:
        raise InvariantViolation("Decompositions of distinct functions agree at every stage",
                                 dump={"f0": f0.to_json(), "f1": f1.to_json()})
    s0, s1 = d0.stage(delta), d1.stage(delta)
    ordered = fn_lt(s0, s1) if is_even(delta) else fn_lt(s1, s0)
    if not ordered:
        raise ParityViolation(
            f"Stage {delta} pair is not ordered by its parity",
            dump={"delta": str(delta), "f0": f0.to_json(), "f1": f1.to_json(),
                  "decomposition0": d0.to_json(), "decomposition1": d1.to_json()})
    return StageComparison(delta, s0, s1, d0, d1)


# -- basis boxes and the USC index -----------------------------------------------

def cantor_pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def cantor_unpair(n: int) -> Tuple[int, int]:
    w = (math.isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


def point_index(x: Ordinal, k: int) -> int:
    """
    Code of a point of [0, omega^k]: 0 for omega^k, otherwise 1 plus the
    iterated Cantor code of the CNF coefficients.
    """
    top_point = omega_power(k)
    if x == top_point:
        return 0
    if x > top_point:
        raise IndexOutOfRange(f"Point {x} outside [0, {top_point}]")
    coeffs = [0] * k
    for exp, c in x.terms:
        coeffs[int(exp)] = c
    code = coeffs[k - 1]
    for j in range(k - 2, -1, -1):
        code = cantor_pair(code, coeffs[j])
    return code + 1


def point_from_index(n: int, k: int) -> Ordinal:
    if n == 0:
        return omega_power(k)
    code = n - 1
    coeffs = [0] * k
    for j in range(k - 1):
        code, coeffs[j] = cantor_unpair(code)
    coeffs[k - 1] = code
    return Ordinal(tuple((Ordinal.of(j), coeffs[j]) for j in range(k - 1, -1, -1) if coeffs[j]))


class BasisBox(NamedTuple):
    """
    Basic open box ``U x (r_lo, r_hi]`` of X x (0, M].

    ``U`` is the singleton {0} when ``lo`` is None and the ordinal interval
    ``(lo, hi]`` otherwise.
    """
    n: int
    lo: Optional[Ordinal]
    hi: Optional[Ordinal]
    r_lo: Fraction
    r_hi: Fraction

    @property
    def is_empty(self) -> bool:
        return self.lo is not None and self.lo >= self.hi

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "x": "{0}" if self.lo is None else f"({self.lo}, {self.hi}]",
            "r": f"({format_rational(self.r_lo)}, {format_rational(self.r_hi)}]",
        }


def basis_box(n: int, k: int, value_bound: Rational = 1) -> BasisBox:
    """
    The n-th basic box.

    ``n`` unpairs into ``(u, v)``. ``u = 0`` is {0}; otherwise ``u - 1``
    unpairs into two point codes giving ``(a, b]``. ``v = 2**L - 1 + i``
    gives the dyadic interval ``(M*i/2**L, M*(i+1)/2**L]``.
    """
    if n < 0:
        raise IndexOutOfRange(f"Box index {n} is negative")
    bound = parse_rational(value_bound)
    u, v = cantor_unpair(n)
    if u == 0:
        lo = hi = None
    else:
        pa, pb = cantor_unpair(u - 1)
        lo, hi = point_from_index(pa, k), point_from_index(pb, k)
    level = (v + 1).bit_length() - 1
    i = v - (2 ** level - 1)
    return BasisBox(n, lo, hi, bound * i / 2 ** level, bound * (i + 1) / 2 ** level)


def box_index(box: BasisBox, k: int, value_bound: Rational = 1) -> int:
    """Inverse of :func:`basis_box`."""
    bound = parse_rational(value_bound)
    u = 0 if box.lo is None else 1 + cantor_pair(point_index(box.lo, k), point_index(box.hi, k))
    ratio = bound / (box.r_hi - box.r_lo)
    level = ratio.numerator.bit_length() - 1
    if ratio.denominator != 1 or 2 ** level != ratio.numerator:
        raise ValidationError(f"Box height {format_rational(box.r_hi - box.r_lo)} is not dyadic in M")
    i = box.r_lo * 2 ** level / bound
    if i.denominator != 1:
        raise ValidationError("Box is not aligned to its dyadic grid")
    return cantor_pair(u, 2 ** level - 1 + int(i))


def box_meets_subgraph(f: FinitaryFunction, box: BasisBox) -> bool:
    """Whether ``box`` meets ``{(x, r) : 0 < r <= f(x)}``."""
    if box.lo is None:
        return fn_eval(f, ZERO) > box.r_lo
    if box.is_empty:
        return False
    s = fn_sup_on(f, box.lo, box.hi)
    return s is not None and s > box.r_lo


def usc_index_approx(f: FinitaryFunction, precision: int = DEFAULT_CONFIG.precision,
                     value_bound: Rational = 1) -> Fraction:
    """
    Truncation of r_f to the first ``precision`` boxes; error at most 2**-precision.

    Written as the sum over boxes meeting the subgraph, so the zero function
    gets exactly 0.
    """
    total = Fraction(0)
    for n in range(precision):
        if box_meets_subgraph(f, basis_box(n, f.k, value_bound)):
            total += Fraction(1, 2 ** (n + 1))
    return total


class UscCertificate(NamedTuple):
    """
    ``kind`` is "certificate", "equal" or "incomparable".

    A certificate box misses the subgraph of the smaller function and meets
    that of the larger one, so ``order`` (of r_f against r_g) is exact. For
    incomparable pairs ``order`` is read off the first box where the miss
    sets differ.
    """
    kind: str
    order: Order
    box: Optional[BasisBox] = None

    @property
    def exact(self) -> bool:
        return self.kind != "incomparable"

    def to_json(self) -> dict:
        return {"kind": self.kind, "order": self.order.value,
                "box": None if self.box is None else self.box.to_json()}


def _neighbourhood(f: FinitaryFunction, x0: Ordinal, below: Fraction,
                   search_limit: int) -> Tuple[Optional[Ordinal], Fraction]:
    """Open set (lo, x0] (or {0}) on which sup f < ``below``; returns (lo, sup)."""
    if x0.is_zero:
        return None, fn_eval(f, ZERO)
    if x0.finite_part:
        lo = ord_predecessor(x0)
        return lo, fn_sup_on(f, lo, x0)
    exp, coeff = x0.terms[-1]
    e = int(exp)
    head = x0.terms[:-1] + (((exp, coeff - 1),) if coeff > 1 else ())
    for n in range(search_limit):
        tail = ((Ordinal.of(e - 1), n),) if n else ()
        lo = Ordinal(head + tail)
        s = fn_sup_on(f, lo, x0)
        if s < below:
            return lo, s
    raise PrecisionError(f"No neighbourhood of {x0} found within {search_limit} steps")


def _ordered_certificate(f: FinitaryFunction, g: FinitaryFunction, bound: Fraction,
                         search_limit: int) -> BasisBox:
    """Box missing sgr(f) and meeting sgr(g), for USC ``f <_p g``."""
    x0 = fn_first_below(f, g)
    gx = fn_eval(g, x0)
    lo, s = _neighbourhood(f, x0, gx, search_limit)
    for level in range(search_limit):
        i = math.ceil(s * 2 ** level / bound)
        c = bound * i / 2 ** level
        if c < gx and i < 2 ** level:
            break
    else:
        raise PrecisionError(f"No dyadic level separates {format_rational(s)} from {format_rational(gx)}")
    u = 0 if lo is None else 1 + cantor_pair(point_index(lo, f.k), point_index(x0, f.k))
    box = basis_box(cantor_pair(u, 2 ** level - 1 + i), f.k, bound)
    if box_meets_subgraph(f, box) or not box_meets_subgraph(g, box):
        raise InvariantViolation("Certificate box does not separate the subgraphs",
                                 dump={"f": f.to_json(), "g": g.to_json(), "box": box.to_json()})
    logger.debug("Certificate for x0=%s: box %s", x0, box.to_json())
    return box


def usc_order_certificate(f: FinitaryFunction, g: FinitaryFunction, value_bound: Rational = 1,
                          search_limit: int = 1 << 12) -> UscCertificate:
    """
    Certify the order of r_f and r_g for USC functions bounded by ``value_bound``.

    Raises
    ------
    NotUSCError, RangeError
    """
    _check_same_space(f, g)
    bound = parse_rational(value_bound)
    for h in (f, g):
        if not is_usc(h):
            raise NotUSCError(f"{h} is not upper semicontinuous")
        if fn_min(h) < 0 or fn_sup(h) > bound:
            raise RangeError(f"{h} takes values outside [0, {format_rational(bound)}]")
    if fn_equal(f, g):
        return UscCertificate("equal", Order.EQUAL)
    if fn_leq(f, g):
        return UscCertificate("certificate", Order.LESS, _ordered_certificate(f, g, bound, search_limit))
    if fn_leq(g, f):
        return UscCertificate("certificate", Order.GREATER, _ordered_certificate(g, f, bound, search_limit))
    for n in range(search_limit * search_limit):
        box = basis_box(n, f.k, bound)
        in_f, in_g = box_meets_subgraph(f, box), box_meets_subgraph(g, box)
        if in_f != in_g:
            return UscCertificate("incomparable", Order.GREATER if in_f else Order.LESS, box)
    raise PrecisionError("No box distinguishes the subgraphs within the search limit")


# -- the composite map ------------------------------------------------------------------

def squash(q: Rational) -> Fraction:
    """Rational order isomorphism ``1/2 + q / (2 (1 + |q|))`` from Q onto (0, 1)."""
    q = parse_rational(q)
    return Fraction(1, 2) + q / (2 * (1 + abs(q)))


def squash_function(f: FinitaryFunction) -> FinitaryFunction:
    return fn_map(f, squash)


class ThetaComparison(NamedTuple):
    order: Order
    delta: Optional[Ordinal] = None
    certificate: Optional[UscCertificate] = None
    stage0: Optional[FinitaryFunction] = None
    stage1: Optional[FinitaryFunction] = None

    @property
    def exact(self) -> bool:
        return self.certificate is None or self.certificate.exact

    def to_json(self) -> dict:
        return {
            "order": self.order.value,
            "delta": None if self.delta is None else str(self.delta),
            "parity": None if self.delta is None else ("even" if is_even(self.delta) else "odd"),
            "exact": self.exact,
            "certificate": None if self.certificate is None else self.certificate.to_json(),
            "stage0": None if self.stage0 is None else self.stage0.to_json(),
            "stage1": None if self.stage1 is None else self.stage1.to_json(),
        }


def theta_compare(f0: FinitaryFunction, f1: FinitaryFunction,
                  budget: int = DEFAULT_CONFIG.stage_budget) -> ThetaComparison:
    """
    Altlex order of the images of two rational-valued functions.

    Each function is squashed into (0, 1), decomposed, and its stages mapped
    to their USC indices. The images first differ at the first differing
    stage delta, where the certificate orders the two indices; the order is
    reversed when delta is odd.
    """
    _check_same_space(f0, f1)
    h0, h1 = squash_function(f0), squash_function(f1)
    if fn_equal(h0, h1):
        return ThetaComparison(Order.EQUAL)
    d0, d1 = decompose(h0, budget), decompose(h1, budget)
    delta = first_differing_stage(d0, d1)
    if delta is None:
        raise InvariantViolation("Decompositions of distinct functions agree at every stage",
                                 dump={"f0": f0.to_json(), "f1": f1.to_json()})
    s0, s1 = d0.stage(delta), d1.stage(delta)
    cert = usc_order_certificate(s0, s1)
    order = cert.order if is_even(delta) else cert.order.flipped()
    return ThetaComparison(order, delta, cert, s0, s1)


def theta_sequence(f: FinitaryFunction, precision: int = DEFAULT_CONFIG.precision,
                   budget: int = DEFAULT_CONFIG.stage_budget) -> TransfiniteSeq:
    """
    Truncated image: the USC indices of the stages at ``precision`` boxes.

    Raises
    ------
    PrefixNotPresentable if the decomposition has infinite rank
    PrecisionError if the truncated indices are not strictly decreasing
    """
    d = decompose(squash_function(f), budget)
    if not d.rank.is_finite:
        raise PrefixNotPresentable(f"Rank {d.rank} image has no finite presentation")
    values = [usc_index_approx(s, precision) for s in d.stages]
    for a, b in zip(values, values[1:]):
        if not a > b:
            raise PrecisionError(f"Indices at precision {precision} are not strictly decreasing: "
                                 f"{format_rational(a)}, {format_rational(b)}")
    return seq(*values)
