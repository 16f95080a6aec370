"""
Seeded generators for the property checks.

Every generator takes a ``numpy.random.Generator`` so a run is fully
determined by its seed. Values are drawn from dyadic grids to keep the exact
arithmetic small.
"""

from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .combinators import (
    Duplicate,
    FiniteChain,
    Glue,
    OrderExpr,
    PartitionTree,
    Product,
    RealBase,
    TreeNode,
    count_points,
    points,
)
from .kl import (
    Block,
    FinitaryFunction,
    fn_combine,
    fn_constant,
    fn_equal,
    fn_indicator,
    fn_leq,
    fn_lt,
    fn_sup,
    is_usc,
    usc_envelope,
)
from .ordinal import ONE, Ordinal, omega_power, ord_add
from .seq import Finite, OmegaTail, TransfiniteSeq, iter_values, seq_concat, seq_prefix

GRID = 64
VALUE_GRID = tuple(Fraction(i, 4) for i in range(5))


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def _pick(rng: np.random.Generator, options):
    return options[int(rng.integers(0, len(options)))]


# -- sequences ---------------------------------------------------------------------

def random_member(
    rng: np.random.Generator,
    max_tails: int = 2,
    max_run: int = 5,
    top: Fraction = Fraction(1),
    top_inclusive: bool = True,
    grid: int = GRID,
) -> TransfiniteSeq:
    """
    Random member of the universal order with values on a grid below ``top``.

    The shape is ``run ⌢ tail ⌢ run ⌢ ... ⌢ run ⌢ (0)`` with up to
    ``max_tails`` tails and runs of at most ``max_run`` values, so lengths
    reach ``omega*max_tails + max_run + 1`` counting the final 0. The value
    after a tail sometimes equals the tail's limit.
    """
    n_tails = int(rng.integers(0, max_tails + 1))
    runs = [int(rng.integers(0, max_run + 1)) for _ in range(n_tails + 1)]
    needed = sum(runs) + 2 * n_tails
    hi = grid + 1 if top_inclusive else grid
    available = np.arange(1, hi)
    if needed > len(available):
        needed = len(available)
    levels = sorted((int(v) for v in rng.choice(available, size=needed, replace=False)), reverse=True)
    level_iter = iter(levels)
    segs = []
    limit: Optional[int] = None

    def next_level() -> Optional[int]:
        return next(level_iter, None)

    for r, run in enumerate(runs):
        values: List[int] = []
        for j in range(run):
            if j == 0 and limit is not None and rng.random() < 0.5:
                values.append(limit)
                continue
            lv = next_level()
            if lv is None:
                break
            values.append(lv)
        if values:
            segs.append(Finite(tuple(top * v / grid for v in values)))
            limit = None
        if r < n_tails:
            start, end = next_level(), next_level()
            if start is None or end is None:
                break
            segs.append(OmegaTail(top * start / grid, top * end / grid))
            limit = end
    segs.append(Finite((Fraction(0),)))
    return TransfiniteSeq(tuple(segs))


def random_finite_member(rng: np.random.Generator, max_len: int = 6, grid: int = GRID) -> TransfiniteSeq:
    """Finite member of length 1..``max_len`` (last value 0)."""
    n = int(rng.integers(0, max_len))
    levels = sorted((int(v) for v in rng.choice(np.arange(1, grid + 1), size=n, replace=False)), reverse=True)
    return TransfiniteSeq((Finite(tuple(Fraction(v, grid) for v in levels) + (Fraction(0),)),))


def _suffix_bound(prefix: TransfiniteSeq) -> Tuple[Fraction, bool]:
    last = prefix.segments[-1]
    if isinstance(last, Finite):
        return last.values[-1], False
    return last.limit, True


def with_shared_prefix(rng: np.random.Generator, x: TransfiniteSeq, horizon: int = 4,
                       finite_only: bool = False) -> TransfiniteSeq:
    """A member agreeing with ``x`` below a random index and continuing at random."""
    indices = [idx for idx, _ in iter_values(x, horizon)][:-1]
    if not indices:
        return random_finite_member(rng) if finite_only else random_member(rng)
    cut: Ordinal = _pick(rng, indices)
    prefix = seq_prefix(x, cut)
    if not prefix.segments:
        return random_finite_member(rng) if finite_only else random_member(rng)
    bound, inclusive = _suffix_bound(prefix)
    if bound == 0:
        return seq_concat(prefix, TransfiniteSeq((Finite((Fraction(0),)),)))
    if finite_only:
        suffix = random_member(rng, max_tails=0, max_run=3, top=bound, top_inclusive=inclusive)
    else:
        suffix = random_member(rng, top=bound, top_inclusive=inclusive)
    return seq_concat(prefix, suffix)


def random_pair(rng: np.random.Generator, finite_only: bool = False,
                max_len: int = 6) -> Tuple[TransfiniteSeq, TransfiniteSeq]:
    """Two members; half of the time the second shares a prefix with the first."""
    x = random_finite_member(rng, max_len) if finite_only else random_member(rng)
    if rng.random() < 0.5:
        y = with_shared_prefix(rng, x, finite_only=finite_only)
    else:
        y = random_finite_member(rng, max_len) if finite_only else random_member(rng)
    return x, y


def random_tail_pair(rng: np.random.Generator) -> Tuple[TransfiniteSeq, TransfiniteSeq]:
    """Pair in which the first member carries at least one tail."""
    while True:
        x = random_member(rng, max_tails=2)
        if any(isinstance(s, OmegaTail) for s in x.segments):
            break
    return x, with_shared_prefix(rng, x)


# -- order expressions ------------------------------------------------------------

def random_tree(rng: np.random.Generator, max_depth: int = 3) -> TreeNode:
    counter = iter(range(1 << 20))

    def grow(label: Fraction, depth: int) -> TreeNode:
        name = f"n{next(counter)}"
        n_kids = 0 if depth >= max_depth else int(rng.integers(0, 3))
        kids = []
        for _ in range(n_kids):
            child_label = label * Fraction(int(rng.integers(1, 8)), 8)
            kids.append(grow(child_label, depth + 1))
        return TreeNode(name, label, tuple(kids))

    return grow(Fraction(int(rng.integers(1, 16)), 16), 0)


def _random_leaf(rng: np.random.Generator, finite: bool) -> OrderExpr:
    choice = int(rng.integers(0, 2 if finite else 3))
    if choice == 0:
        return FiniteChain(int(rng.integers(1, 5)))
    if choice == 1:
        return PartitionTree(random_tree(rng, int(rng.integers(0, 3))))
    return RealBase()


def random_expr(rng: np.random.Generator, depth: int = 3, finite: bool = False) -> OrderExpr:
    """Random order expression with nesting depth at most ``depth``."""
    if depth <= 0 or rng.random() < 0.25:
        return _random_leaf(rng, finite)
    kind = int(rng.integers(0, 3 if finite else 4))
    if kind == 0:
        factors = tuple(random_expr(rng, depth - 1, finite) for _ in range(int(rng.integers(1, 3))))
        return Product(factors)
    if kind == 1:
        base = random_expr(rng, depth - 1, finite=True)
        fibers = tuple((p, random_expr(rng, depth - 1, finite)) for p in points(base))
        return Glue(base, fibers)
    if kind == 2:
        return Duplicate(random_expr(rng, depth - 1, finite))
    factors = tuple(random_expr(rng, depth - 1, finite=True) for _ in range(int(rng.integers(0, 2))))
    return Product(factors, tail=FiniteChain(1, (Fraction(2, 3),)), anchor_ratio=Fraction(1, 4))


def random_small_expr(rng: np.random.Generator, max_points: int = 60, depth: int = 3) -> OrderExpr:
    """Random expression whose enumerated order has at most ``max_points`` points."""
    while True:
        expr = random_expr(rng, depth)
        if count_points(expr) <= max_points:
            return expr


# -- functions on [0, omega^k] ------------------------------------------------------

def _random_block(rng: np.random.Generator, level: int, max_prefix: int):
    if level == 0:
        return _pick(rng, VALUE_GRID)
    prefix = tuple(_random_block(rng, level - 1, max_prefix) for _ in range(int(rng.integers(0, max_prefix + 1))))
    return Block(level, prefix, _random_block(rng, level - 1, max_prefix))


def _random_point(rng: np.random.Generator, k: int) -> Ordinal:
    terms = []
    for j in range(k - 1, -1, -1):
        c = int(rng.integers(0, 4))
        if c:
            terms.append((Ordinal.of(j), c))
    return Ordinal(tuple(terms))


def random_function(rng: np.random.Generator, k: Optional[int] = None, max_prefix: int = 3) -> FinitaryFunction:
    """
    Random nonnegative function on [0, omega^k] with values in [0, 1].

    Half of the draws are raw block presentations; the rest are alternating
    combinations of indicators of nested intervals, the difference-hierarchy
    shape that forces long decompositions.
    """
    if k is None:
        k = int(rng.integers(1, 3))
    if rng.random() < 0.5:
        return FinitaryFunction(_random_block(rng, k, max_prefix), _pick(rng, VALUE_GRID))
    cuts = sorted({_random_point(rng, k) for _ in range(int(rng.integers(1, 5)))})
    f = fn_indicator(k, cuts[0], None, Fraction(1, 4 * len(cuts)))
    for i, lo in enumerate(cuts[1:], start=1):
        part = fn_indicator(k, lo, None, Fraction(1, 4 * len(cuts)))
        f = fn_combine(f, part, "add" if i % 2 == 0 else "max")
    if rng.random() < 0.5:
        hole = fn_indicator(k, cuts[-1], omega_power(k), f.top)
        f = fn_combine(f, fn_combine(f, hole, "min"), "sub")
    return f


def random_comparable_pair(rng: np.random.Generator, k: Optional[int] = None) -> Tuple[FinitaryFunction, FinitaryFunction]:
    """``f0 <_p f1`` built as ``f0 = f1 - h`` with ``0 <= h <= f1`` nonzero."""
    while True:
        f1 = random_function(rng, k)
        h = fn_combine(f1, random_function(rng, f1.k), "min")
        f0 = fn_combine(f1, h, "sub")
        if fn_lt(f0, f1):
            return f0, f1


def _closed_interval_indicator(rng: np.random.Generator, k: int, inside: Fraction,
                               outside: Fraction) -> FinitaryFunction:
    # [lo, hi] is closed for any lo <= hi, so the indicator is USC when inside >= outside
    lo, hi = sorted((_random_point(rng, k), _random_point(rng, k)))
    return fn_indicator(k, lo, ord_add(hi, ONE), inside, outside)


def random_usc_majorant(rng: np.random.Generator, f: FinitaryFunction, tries: int = 4) -> FinitaryFunction:
    """
    A USC function ``g >= f`` built without taking envelopes.

    Candidates are ``max(f, h)`` for ``h`` the indicator of a random closed
    interval at height ``sup f``; the first USC one is returned. Otherwise a
    constant at or above ``sup f``.
    """
    top = fn_sup(f)
    for _ in range(tries):
        floor = _pick(rng, [v for v in VALUE_GRID if v <= top])
        g = fn_combine(f, _closed_interval_indicator(rng, f.k, top, floor), "max")
        if is_usc(g) and fn_leq(f, g):
            return g
    return fn_constant(f.k, max(top, _pick(rng, VALUE_GRID)))


def random_usc_pair(rng: np.random.Generator, k: Optional[int] = None) -> Tuple[FinitaryFunction, FinitaryFunction]:
    """USC ``f <_p g``."""
    while True:
        f = usc_envelope(random_function(rng, k))
        g = random_usc_majorant(rng, f)
        if not fn_equal(f, g):
            return f, g
