"""
Order combinators compiled into order-preserving maps into the universal order.

An :data:`OrderExpr` describes a linear order built from the reals, finite
chains, lexicographic products, gluings, duplications and labelled partition
trees. :func:`compile_expr` turns it into an :class:`Embedding`, a function
from points of the order to members of the universal order, such that
``p < q`` implies ``embedding(p) <_altlex embedding(q)``.

Products and gluings need the images of some of their parts to have even
length. Every compiled embedding records whether it is known to produce only
even lengths; otherwise it is wrapped with :func:`evenize` before use.
"""

import functools
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from .errors import (
    AnchorError,
    EmptyAdmissibleInterval,
    InvariantViolation,
    LabelError,
    ShapeError,
    UnpresentableTail,
    ValidationError,
)
from .ordinal import Order, is_even
from .seq import (
    HALF,
    Comparison,
    Finite,
    OmegaTail,
    TransfiniteSeq,
    altlex_compare,
    concat_all,
    evenize,
    seq,
    seq_affine,
    seq_canonicalize,
    seq_length,
)
from .utils import Rational, check_unit_interval, format_rational, midpoint, parse_rational

logger = logging.getLogger(__name__)

Point = Any

DEFAULT_REAL_SAMPLES = tuple(Fraction(v) for v in ("0", "1/4", "1/3", "1/2", "1"))


# -- expressions -------------------------------------------------------------

@dataclass(frozen=True)
class RealBase:
    """The unit interval [0, 1] with its usual order."""


@dataclass(frozen=True)
class FiniteChain:
    """The chain 0 < 1 < ... < n-1; ``values`` fixes the leading image values."""
    n: int
    values: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise ShapeError(f"Chain length must be a positive integer, got {self.n!r}")
        if self.values is not None:
            vals = tuple(parse_rational(v) for v in self.values)
            if len(vals) != self.n:
                raise ShapeError(f"Chain of length {self.n} needs {self.n} values, got {len(vals)}")
            if any(not 0 < v <= 1 for v in vals) or any(u >= v for u, v in zip(vals, vals[1:])):
                raise ShapeError("Chain values must be strictly increasing in (0, 1]")
            object.__setattr__(self, "values", vals)

    def image_values(self) -> Tuple[Fraction, ...]:
        if self.values is not None:
            return self.values
        return tuple(Fraction(i + 1, 2 * self.n) for i in range(self.n))


@dataclass(frozen=True)
class Product:
    """
    Lexicographic product of ``factors``.

    With ``tail`` set the product continues with omega copies of ``tail``
    after the listed factors; its anchors are then ``1/2 + ratio**beta / 2``.
    """
    factors: Tuple["OrderExpr", ...]
    anchors: Optional[Tuple[Fraction, ...]] = None
    tail: Optional["OrderExpr"] = None
    anchor_ratio: Fraction = HALF

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if self.anchors is not None:
            object.__setattr__(self, "anchors", tuple(parse_rational(a) for a in self.anchors))
        object.__setattr__(self, "anchor_ratio", parse_rational(self.anchor_ratio))


@dataclass(frozen=True)
class Glue:
    """Gluing of the fibers along ``base``: pairs (p, q) ordered lexicographically."""
    base: "OrderExpr"
    fibers: Tuple[Tuple[Point, "OrderExpr"], ...]

    def __post_init__(self):
        object.__setattr__(self, "fibers", tuple((p, e) for p, e in self.fibers))

    def fiber(self, p: Point) -> "OrderExpr":
        for key, expr in self.fibers:
            if key == p:
                return expr
        raise ShapeError(f"No fiber over base point {p!r}")


@dataclass(frozen=True)
class Duplicate:
    """The duplication L x 2, ordered lexicographically."""
    inner: "OrderExpr"


@dataclass(frozen=True)
class TreeNode:
    """Node of a labelled partition tree; children are listed left to right."""
    name: str
    label: Fraction
    children: Tuple["TreeNode", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "label", parse_rational(self.label))
        object.__setattr__(self, "children", tuple(self.children))

    @property
    def is_leaf(self) -> bool:
        return not self.children


LabeledTree = TreeNode


@dataclass(frozen=True)
class PartitionTree:
    tree: TreeNode


OrderExpr = Union[RealBase, FiniteChain, Product, Glue, Duplicate, PartitionTree]


@dataclass(frozen=True)
class OmegaPoint:
    """Eventually constant point of an omega-product: ``prefix`` then ``repeat`` forever."""
    prefix: Tuple[Point, ...]
    repeat: Point

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))

    def component(self, beta: int) -> Point:
        return self.prefix[beta] if beta < len(self.prefix) else self.repeat


@dataclass(frozen=True)
class Embedding:
    """Compiled order-preserving map; ``even`` means every image has even length."""
    expr: OrderExpr
    fn: Callable[[Point], TransfiniteSeq]
    even: bool = False

    def __call__(self, p: Point) -> TransfiniteSeq:
        return self.fn(p)


class ChainAudit(NamedTuple):
    ok: bool
    i: Optional[int] = None
    j: Optional[int] = None
    comparison: Optional[Comparison] = None


# -- base cases ----------------------------------------------------------------

def embed_real(r: Rational) -> TransfiniteSeq:
    """``0 -> (0)`` and ``r -> (r, 0)`` for ``r > 0``."""
    r = parse_rational(r)
    check_unit_interval([r], "real point")
    return seq(0) if r == 0 else seq(r, 0)


def _chain_embed(chain: FiniteChain, i: Point) -> TransfiniteSeq:
    if isinstance(i, bool) or not isinstance(i, int) or not 0 <= i < chain.n:
        raise ShapeError(f"Point {i!r} is not in a chain of length {chain.n}")
    return seq(chain.image_values()[i], 0)


def ensure_even(emb: Embedding) -> Embedding:
    """``emb`` itself if its images have even length, else ``evenize`` after it."""
    if emb.even:
        return emb
    return Embedding(emb.expr, lambda p, inner=emb: evenize(inner(p)), even=True)


def _even_image(emb: Embedding, p: Point) -> TransfiniteSeq:
    image = emb(p)
    if not is_even(seq_length(image)):
        raise InvariantViolation(f"Embedding flagged even produced odd length image {image}",
                                 dump={"point": repr(p), "image": image.to_json()})
    return image


# -- products ------------------------------------------------------------------

def default_anchors(count: int) -> Tuple[Fraction, ...]:
    """``y_beta = 1/2 + 2**-(beta+1)`` for ``beta <= count``."""
    return tuple(HALF + Fraction(1, 2 ** (beta + 1)) for beta in range(count + 1))


def _check_anchors(anchors: Sequence[Fraction], count: int) -> None:
    if len(anchors) != count + 1:
        raise AnchorError(f"{count} factors need {count + 1} anchors, got {len(anchors)}")
    for y in anchors:
        if not HALF <= y <= 1:
            raise AnchorError(f"Anchor {format_rational(y)} outside [1/2, 1]")
    for u, v in zip(anchors, anchors[1:]):
        if not u > v:
            raise AnchorError(f"Anchors not strictly decreasing: {format_rational(u)}, {format_rational(v)}")


def _anchored_piece(image: TransfiniteSeq, upper: Fraction, lower: Fraction) -> TransfiniteSeq:
    return seq_affine((upper - lower) / 2, image, lower)


def product_embed(
    factors: Sequence[Embedding],
    anchors: Optional[Sequence[Rational]],
    p: Sequence[Point],
) -> TransfiniteSeq:
    """
    Image of a point of a finite lexicographic product.

    Parameters
    ----------
    factors : list of Embedding
        Factor embeddings; any not flagged even are evenized first.
    anchors : list of rationals or None
        Strictly decreasing ``y_0 > ... > y_n`` in [1/2, 1]; defaults to
        :func:`default_anchors`.
    p : tuple
        One point per factor.

    Returns
    -------
    image : TransfiniteSeq
        ``(⌢_beta ((y_beta - y_beta+1)/2 * Psi_beta(p_beta) + y_beta+1))⌢(0)``
    """
    ys = default_anchors(len(factors)) if anchors is None else tuple(parse_rational(a) for a in anchors)
    _check_anchors(ys, len(factors))
    if not isinstance(p, (tuple, list)) or len(p) != len(factors):
        raise ShapeError(f"Product point {p!r} does not have {len(factors)} components")
    pieces = []
    for beta, (emb, component) in enumerate(zip(factors, p)):
        image = _even_image(ensure_even(emb), component)
        pieces.append(_anchored_piece(image, ys[beta], ys[beta + 1]))
    pieces.append(seq(0))
    return concat_all(pieces)


def omega_anchor(beta: int, ratio: Fraction) -> Fraction:
    return HALF + HALF * ratio ** beta


def omega_product_embed(
    factors: Sequence[Embedding],
    tail: Embedding,
    ratio: Rational,
    p: OmegaPoint,
) -> TransfiniteSeq:
    """
    Image of an eventually constant point of an omega-product.

    The listed ``factors`` come first, ``tail`` fills every later coordinate
    and the anchors are ``1/2 + ratio**beta / 2``. The repeated coordinate
    contributes affine copies of one fixed image; they are emitted as one
    ``OmegaTail`` towards 1/2, which is possible only when the copies halve
    their distance to 1/2 at every step.

    Raises
    ------
    UnpresentableTail if the repeated copies do not form such a tail
    """
    ratio = parse_rational(ratio)
    if not 0 < ratio < 1:
        raise AnchorError(f"Anchor ratio {format_rational(ratio)} must lie in (0, 1)")
    if not isinstance(p, OmegaPoint):
        raise ShapeError(f"Omega-product point must be an OmegaPoint, got {p!r}")
    if len(p.prefix) < len(factors):
        raise ShapeError(f"Omega-product point needs at least {len(factors)} explicit components")
    tail = ensure_even(tail)
    pieces = []
    for beta, component in enumerate(p.prefix):
        emb = factors[beta] if beta < len(factors) else tail
        image = _even_image(ensure_even(emb), component)
        pieces.append(_anchored_piece(image, omega_anchor(beta, ratio), omega_anchor(beta + 1, ratio)))

    repeated = seq_canonicalize(_even_image(tail, p.repeat))
    if len(repeated.segments) != 1 or not isinstance(repeated.segments[0], Finite):
        raise UnpresentableTail(f"Repeated image {repeated} is not a finite run")
    m = len(p.prefix)
    values: List[Fraction] = []
    for beta in (m, m + 1, m + 2):
        a = (omega_anchor(beta, ratio) - omega_anchor(beta + 1, ratio)) / 2
        b = omega_anchor(beta + 1, ratio)
        values.extend(a * v + b for v in repeated.segments[0].values)
    values = values[: 2 * len(repeated.segments[0].values) + 1]
    for u, v in zip(values, values[1:]):
        if v - HALF != (u - HALF) / 2:
            raise UnpresentableTail(
                f"Copies of {repeated} under anchor ratio {format_rational(ratio)}"
                f" do not form a geometric tail towards 1/2")
    pieces.append(TransfiniteSeq((OmegaTail(values[0], HALF),)))
    pieces.append(seq(0))
    return concat_all(pieces)


# -- gluing and duplication ---------------------------------------------------

EIGHTH = Fraction(1, 8)
QUARTER = Fraction(1, 4)


def glue_embed(
    base_emb: Embedding,
    fiber_embs: Union[Mapping[Point, Embedding], Callable[[Point], Embedding]],
    point: Tuple[Point, Point],
) -> TransfiniteSeq:
    """
    ``(Psi_0(p)/2 + 1/2)⌢(Psi_p(q)/8 + 1/4)⌢(0)`` for a glued point ``(p, q)``.

    The base embedding is evenized if needed; fibers may be any embeddings.
    """
    if not isinstance(point, (tuple, list)) or len(point) != 2:
        raise ShapeError(f"Glued point {point!r} must be a pair (p, q)")
    p, q = point
    fiber = fiber_embs(p) if callable(fiber_embs) else fiber_embs.get(p)
    if fiber is None:
        raise ShapeError(f"No fiber over base point {p!r}")
    head = seq_affine(HALF, _even_image(ensure_even(base_emb), p), HALF)
    body = seq_affine(EIGHTH, fiber(q), QUARTER)
    return concat_all([head, body, seq(0)])


_TWO_CHAIN = FiniteChain(2)


def duplicate_embed(inner_emb: Embedding, point: Tuple[Point, int]) -> TransfiniteSeq:
    """Gluing of the two-element chain along ``inner_emb``."""
    if not isinstance(point, (tuple, list)) or len(point) != 2 or point[1] not in (0, 1):
        raise ShapeError(f"Duplicated point {point!r} must be (p, 0) or (p, 1)")
    two = Embedding(_TWO_CHAIN, lambda i: _chain_embed(_TWO_CHAIN, i), even=True)
    return glue_embed(inner_emb, lambda _p: two, (point[0], point[1]))


# -- partition trees -----------------------------------------------------------

def validate_tree(root: TreeNode) -> None:
    """
    Labels must lie in (0, 1) and strictly decrease along every branch.

    Raises
    ------
    LabelError, ShapeError
    """
    seen = set()

    def visit(node: TreeNode, parent_label: Optional[Fraction]) -> None:
        if node.name in seen:
            raise ShapeError(f"Duplicate tree node name {node.name!r}")
        seen.add(node.name)
        if not 0 < node.label < 1:
            raise LabelError(f"Label {format_rational(node.label)} of {node.name!r} outside (0, 1)")
        if parent_label is not None and not node.label < parent_label:
            raise LabelError(f"Label of {node.name!r} does not decrease below its parent")
        if len(node.children) > 2:
            raise ShapeError(f"Node {node.name!r} splits into {len(node.children)} parts; at most 2 allowed")
        for child in node.children:
            visit(child, node.label)

    visit(root, None)


def tree_leaves(root: TreeNode) -> List[str]:
    """Leaf names from left to right, i.e. the points of the order."""
    if root.is_leaf:
        return [root.name]
    return [leaf for child in root.children for leaf in tree_leaves(child)]


def psi0_table(root: TreeNode) -> Dict[str, Tuple[Fraction, ...]]:
    """
    Node prefixes, level by level.

    The root gets the empty prefix; ``1`` stands for the infimum of an empty
    prefix. A lone child appends the midpoint of ``(label(child), inf)``.
    Two siblings append the two points ``lower < upper`` obtained by halving
    ``(label(parent), inf)`` twice; the left sibling gets the smaller one when
    the append position is even and the larger one when it is odd.
    """
    validate_tree(root)
    table: Dict[str, Tuple[Fraction, ...]] = {root.name: ()}

    def visit(node: TreeNode) -> None:
        values = table[node.name]
        hi = values[-1] if values else Fraction(1)
        kids = node.children
        if len(kids) == 1:
            child = kids[0]
            r = midpoint(child.label, hi)
            if not child.label < r < hi:
                raise EmptyAdmissibleInterval(f"No room below {node.name!r} for {child.name!r}")
            table[child.name] = values + (r,)
        elif len(kids) == 2:
            left, right = kids
            upper = midpoint(node.label, hi)
            lower = midpoint(node.label, upper)
            if not (max(left.label, right.label) < lower and upper < hi):
                raise EmptyAdmissibleInterval(f"No room below {node.name!r} for its children")
            if len(values) % 2 == 0:
                table[left.name], table[right.name] = values + (lower,), values + (upper,)
            else:
                table[left.name], table[right.name] = values + (upper,), values + (lower,)
        for child in kids:
            visit(child)

    visit(root)
    return table


def tree_embed(root: TreeNode, leaf: str) -> TransfiniteSeq:
    """Image ``Psi_0(leaf)⌢(0)`` of a leaf of the partition tree."""
    table = psi0_table(root)
    if root.is_leaf:
        if leaf != root.name:
            raise ShapeError(f"{leaf!r} is not a leaf of the tree")
        return seq(midpoint(root.label, Fraction(1)), 0)
    if leaf not in table or leaf not in tree_leaves(root):
        raise ShapeError(f"{leaf!r} is not a leaf of the tree")
    return seq(*table[leaf], 0)


def _walk(root: TreeNode):
    yield root
    for child in root.children:
        yield from _walk(child)


def check_tree_embedding(root: TreeNode) -> List[str]:
    """
    Check the three node properties of the prefix map.

    (1) a child's prefix extends its parent's, (2) nodes whose intervals are
    ordered get altlex-ordered prefixes, (3) the infimum of a node's prefix is
    at least its label. Returns the list of violations (empty when all hold).
    """
    table = psi0_table(root)
    problems = []
    nodes = list(_walk(root))
    leaf_rank = {name: i for i, name in enumerate(tree_leaves(root))}
    span = {node.name: (min(leaf_rank[l] for l in tree_leaves(node)),
                        max(leaf_rank[l] for l in tree_leaves(node))) for node in nodes}
    for node in nodes:
        values = table[node.name]
        for child in node.children:
            if table[child.name][: len(values)] != values:
                problems.append(f"prefix of {child.name!r} does not extend {node.name!r}")
        inf = min(values) if values else Fraction(1)
        if inf < node.label:
            problems.append(f"inf of {node.name!r} is below its label")
    for s, t in itertools.permutations(nodes, 2):
        if span[s.name][1] < span[t.name][0]:
            cmp = altlex_compare(TransfiniteSeq((Finite(table[s.name]),)),
                                 TransfiniteSeq((Finite(table[t.name]),)), validate=False)
            if cmp.order is not Order.LESS:
                problems.append(f"{s.name!r} precedes {t.name!r} but prefixes are not ordered")
    return problems


# -- compilation ---------------------------------------------------------------

def is_finite_order(expr: OrderExpr) -> bool:
    if isinstance(expr, RealBase):
        return False
    if isinstance(expr, Product):
        return expr.tail is None and all(is_finite_order(f) for f in expr.factors)
    if isinstance(expr, Glue):
        return is_finite_order(expr.base) and all(is_finite_order(e) for _, e in expr.fibers)
    if isinstance(expr, Duplicate):
        return is_finite_order(expr.inner)
    return True


def _check_glue(expr: Glue) -> None:
    if not is_finite_order(expr.base):
        raise ShapeError("Gluing needs a finite base order")
    base_points = points(expr.base)
    keys = [p for p, _ in expr.fibers]
    if sorted(map(repr, keys)) != sorted(map(repr, base_points)) or len(set(map(repr, keys))) != len(keys):
        raise ShapeError("Fiber map must be total on the base points, one fiber each")


def compile_expr(expr: OrderExpr) -> Embedding:
    """
    Compile an order description into an order-preserving embedding.

    Raises
    ------
    ShapeError, AnchorError, LabelError for malformed expressions
    """
    if isinstance(expr, RealBase):
        return Embedding(expr, embed_real, even=False)
    if isinstance(expr, FiniteChain):
        return Embedding(expr, lambda i: _chain_embed(expr, i), even=True)
    if isinstance(expr, Product):
        factors = [compile_expr(f) for f in expr.factors]
        if expr.tail is None:
            anchors = expr.anchors
            _check_anchors(default_anchors(len(factors)) if anchors is None else anchors, len(factors))
            return Embedding(expr, lambda p: product_embed(factors, anchors, p))
        if expr.anchors is not None:
            raise AnchorError("Omega-products take an anchor ratio, not an anchor list")
        tail = compile_expr(expr.tail)
        return Embedding(expr, lambda p: omega_product_embed(factors, tail, expr.anchor_ratio, p))
    if isinstance(expr, Glue):
        _check_glue(expr)
        base = compile_expr(expr.base)
        fibers = {repr(p): compile_expr(e) for p, e in expr.fibers}

        def fiber_of(p: Point) -> Embedding:
            if repr(p) not in fibers:
                raise ShapeError(f"No fiber over base point {p!r}")
            return fibers[repr(p)]

        return Embedding(expr, lambda pq: glue_embed(base, fiber_of, pq))
    if isinstance(expr, Duplicate):
        inner = compile_expr(expr.inner)
        return Embedding(expr, lambda pb: duplicate_embed(inner, pb))
    if isinstance(expr, PartitionTree):
        validate_tree(expr.tree)
        return Embedding(expr, lambda leaf: tree_embed(expr.tree, leaf))
    raise ShapeError(f"Unknown order expression {expr!r}")


# -- the denoted order ---------------------------------------------------------

def points(expr: OrderExpr, real_samples: Sequence[Fraction] = DEFAULT_REAL_SAMPLES,
           omega_length: int = 1) -> List[Point]:
    """
    Points of the denoted order in increasing order.

    ``RealBase`` contributes ``real_samples``. For omega-products the points
    enumerated have one explicit coordinate per listed factor plus
    ``omega_length - 1`` more before the repeated one.
    """
    if isinstance(expr, RealBase):
        return sorted(set(parse_rational(r) for r in real_samples))
    if isinstance(expr, FiniteChain):
        return list(range(expr.n))
    if isinstance(expr, Product):
        lists = [points(f, real_samples, omega_length) for f in expr.factors]
        if expr.tail is None:
            return [tuple(c) for c in itertools.product(*lists)]
        tail_pts = points(expr.tail, real_samples, omega_length)
        out = [OmegaPoint(tuple(c[:-1]), c[-1])
               for c in itertools.product(*lists, *([tail_pts] * omega_length))]
        return sorted_points(expr, out)
    if isinstance(expr, Glue):
        return [(p, q) for p in points(expr.base, real_samples, omega_length)
                for q in points(expr.fiber(p), real_samples, omega_length)]
    if isinstance(expr, Duplicate):
        return [(p, bit) for p in points(expr.inner, real_samples, omega_length) for bit in (0, 1)]
    if isinstance(expr, PartitionTree):
        return tree_leaves(expr.tree)
    raise ShapeError(f"Unknown order expression {expr!r}")


def sorted_points(expr: OrderExpr, pts: Sequence[Point]) -> List[Point]:
    return sorted(pts, key=functools.cmp_to_key(lambda p, q: point_compare(expr, p, q)))


def point_compare(expr: OrderExpr, p: Point, q: Point) -> int:
    """-1, 0 or 1 according to the order denoted by ``expr``."""
    if isinstance(expr, RealBase):
        p, q = parse_rational(p), parse_rational(q)
        return (p > q) - (p < q)
    if isinstance(expr, FiniteChain):
        return (p > q) - (p < q)
    if isinstance(expr, Product):
        if expr.tail is None:
            for f, a, b in zip(expr.factors, p, q):
                c = point_compare(f, a, b)
                if c:
                    return c
            return 0
        for beta in range(max(len(p.prefix), len(q.prefix)) + 1):
            f = expr.factors[beta] if beta < len(expr.factors) else expr.tail
            c = point_compare(f, p.component(beta), q.component(beta))
            if c:
                return c
        return 0
    if isinstance(expr, Glue):
        c = point_compare(expr.base, p[0], q[0])
        return c if c else point_compare(expr.fiber(p[0]), p[1], q[1])
    if isinstance(expr, Duplicate):
        c = point_compare(expr.inner, p[0], q[0])
        return c if c else (p[1] > q[1]) - (p[1] < q[1])
    if isinstance(expr, PartitionTree):
        leaves = tree_leaves(expr.tree)
        i, j = leaves.index(p), leaves.index(q)
        return (i > j) - (i < j)
    raise ShapeError(f"Unknown order expression {expr!r}")


def count_points(expr: OrderExpr, real_samples: int = len(DEFAULT_REAL_SAMPLES)) -> int:
    if isinstance(expr, RealBase):
        return real_samples
    if isinstance(expr, FiniteChain):
        return expr.n
    if isinstance(expr, Product):
        total = 1
        for f in expr.factors:
            total *= count_points(f, real_samples)
        if expr.tail is not None:
            total *= count_points(expr.tail, real_samples)
        return total
    if isinstance(expr, Glue):
        return sum(count_points(e, real_samples) for _, e in expr.fibers)
    if isinstance(expr, Duplicate):
        return 2 * count_points(expr.inner, real_samples)
    if isinstance(expr, PartitionTree):
        return len(tree_leaves(expr.tree))
    raise ShapeError(f"Unknown order expression {expr!r}")


def verify_chain(images: Sequence[TransfiniteSeq]) -> ChainAudit:
    """
    Check that ``images`` is strictly altlex-increasing.

    Returns the first adjacent pair that is not, with its comparison.
    """
    for i, (a, b) in enumerate(zip(images, images[1:])):
        cmp = altlex_compare(a, b)
        if cmp.order is not Order.LESS:
            return ChainAudit(False, i, i + 1, cmp)
    return ChainAudit(True)


def verify_embedding(expr: OrderExpr, real_samples: Sequence[Fraction] = DEFAULT_REAL_SAMPLES,
                     exhaustive: bool = True) -> ChainAudit:
    """
    Compile ``expr`` and check strict order preservation on its points.

    With ``exhaustive`` every pair ``i < j`` is compared, otherwise adjacent
    pairs only.
    """
    emb = compile_expr(expr)
    pts = points(expr, real_samples)
    images = [emb(p) for p in pts]
    if not exhaustive:
        return verify_chain(images)
    for i, j in itertools.combinations(range(len(images)), 2):
        cmp = altlex_compare(images[i], images[j])
        if cmp.order is not Order.LESS:
            logger.debug("Order violation in %r between %r and %r", expr, pts[i], pts[j])
            return ChainAudit(False, i, j, cmp)
    return ChainAudit(True)


# -- JSON ------------------------------------------------------------------------

def tree_from_json(data: Any) -> TreeNode:
    if not isinstance(data, dict) or "name" not in data or "label" not in data:
        raise ValidationError(f"Tree node needs 'name' and 'label': {data!r}")
    return TreeNode(str(data["name"]), data["label"],
                    tuple(tree_from_json(c) for c in data.get("children", [])))


def tree_to_json(node: TreeNode) -> dict:
    out = {"name": node.name, "label": format_rational(node.label)}
    if node.children:
        out["children"] = [tree_to_json(c) for c in node.children]
    return out


def expr_from_json(data: Any) -> OrderExpr:
    """Parse the tagged-variant JSON form of an order expression."""
    if data == "real" or (isinstance(data, dict) and "real" in data):
        return RealBase()
    if not isinstance(data, dict) or len(data) != 1:
        raise ValidationError(f"Order expression must be a single tagged variant: {data!r}")
    tag, body = next(iter(data.items()))
    if tag == "chain":
        if isinstance(body, int):
            return FiniteChain(body)
        return FiniteChain(body["n"], tuple(body["values"]) if "values" in body else None)
    if tag == "product":
        return Product(
            tuple(expr_from_json(f) for f in body.get("factors", [])),
            tuple(body["anchors"]) if "anchors" in body else None,
            expr_from_json(body["tail"]) if "tail" in body else None,
            body.get("anchor_ratio", "1/2"),
        )
    if tag == "glue":
        base = expr_from_json(body["base"])
        fibers = tuple((point_from_json(base, p), expr_from_json(e)) for p, e in body["fibers"])
        return Glue(base, fibers)
    if tag == "duplicate":
        return Duplicate(expr_from_json(body))
    if tag == "tree":
        return PartitionTree(tree_from_json(body))
    raise ValidationError(f"Unknown order expression tag {tag!r}")


def expr_to_json(expr: OrderExpr) -> Any:
    if isinstance(expr, RealBase):
        return {"real": {}}
    if isinstance(expr, FiniteChain):
        body = {"n": expr.n}
        if expr.values is not None:
            body["values"] = [format_rational(v) for v in expr.values]
        return {"chain": body}
    if isinstance(expr, Product):
        body = {"factors": [expr_to_json(f) for f in expr.factors]}
        if expr.anchors is not None:
            body["anchors"] = [format_rational(a) for a in expr.anchors]
        if expr.tail is not None:
            body["tail"] = expr_to_json(expr.tail)
            body["anchor_ratio"] = format_rational(expr.anchor_ratio)
        return {"product": body}
    if isinstance(expr, Glue):
        return {"glue": {"base": expr_to_json(expr.base),
                         "fibers": [[point_to_json(expr.base, p), expr_to_json(e)]
                                    for p, e in expr.fibers]}}
    if isinstance(expr, Duplicate):
        return {"duplicate": expr_to_json(expr.inner)}
    if isinstance(expr, PartitionTree):
        return {"tree": tree_to_json(expr.tree)}
    raise ShapeError(f"Unknown order expression {expr!r}")


def point_from_json(expr: OrderExpr, data: Any) -> Point:
    """Parse a point whose JSON shape mirrors ``expr``."""
    if isinstance(expr, RealBase):
        return parse_rational(data)
    if isinstance(expr, FiniteChain):
        if isinstance(data, bool) or not isinstance(data, int):
            raise ShapeError(f"Chain point must be an integer, got {data!r}")
        return data
    if isinstance(expr, Product):
        if expr.tail is None:
            if not isinstance(data, list) or len(data) != len(expr.factors):
                raise ShapeError(f"Product point must list {len(expr.factors)} components")
            return tuple(point_from_json(f, d) for f, d in zip(expr.factors, data))
        prefix = data.get("prefix", []) if isinstance(data, dict) else None
        if prefix is None or "repeat" not in data:
            raise ShapeError("Omega-product point needs 'prefix' and 'repeat'")
        comps = tuple(point_from_json(expr.factors[b] if b < len(expr.factors) else expr.tail, d)
                      for b, d in enumerate(prefix))
        return OmegaPoint(comps, point_from_json(expr.tail, data["repeat"]))
    if isinstance(expr, Glue):
        p = point_from_json(expr.base, data[0])
        return (p, point_from_json(expr.fiber(p), data[1]))
    if isinstance(expr, Duplicate):
        return (point_from_json(expr.inner, data[0]), int(data[1]))
    if isinstance(expr, PartitionTree):
        return str(data)
    raise ShapeError(f"Unknown order expression {expr!r}")


def point_to_json(expr: OrderExpr, p: Point) -> Any:
    if isinstance(expr, RealBase):
        return format_rational(p)
    if isinstance(expr, (FiniteChain, PartitionTree)):
        return p
    if isinstance(expr, Product):
        if expr.tail is None:
            return [point_to_json(f, c) for f, c in zip(expr.factors, p)]
        return {"prefix": [point_to_json(expr.factors[b] if b < len(expr.factors) else expr.tail, c)
                           for b, c in enumerate(p.prefix)],
                "repeat": point_to_json(expr.tail, p.repeat)}
    if isinstance(expr, Glue):
        return [point_to_json(expr.base, p[0]), point_to_json(expr.fiber(p[0]), p[1])]
    if isinstance(expr, Duplicate):
        return [point_to_json(expr.inner, p[0]), p[1]]
    raise ShapeError(f"Unknown order expression {expr!r}")
