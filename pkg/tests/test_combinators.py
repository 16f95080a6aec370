"""
Order combinators and their compiled embeddings.
"""

from fractions import Fraction

import pytest

from baireorder.combinators import (
    Duplicate,
    Embedding,
    FiniteChain,
    Glue,
    OmegaPoint,
    PartitionTree,
    Product,
    RealBase,
    TreeNode,
    check_tree_embedding,
    compile_expr,
    count_points,
    default_anchors,
    embed_real,
    expr_from_json,
    expr_to_json,
    point_compare,
    points,
    product_embed,
    psi0_table,
    tree_leaves,
    verify_chain,
    verify_embedding,
)
from baireorder.errors import AnchorError, InvariantViolation, LabelError, ShapeError, UnpresentableTail
from baireorder.ordinal import Order
from baireorder.seq import OmegaTail, altlex_compare, seq, seq_canonicalize

CHAIN2 = FiniteChain(2)
REPEAT = FiniteChain(1, ("2/3",))


def _tree() -> TreeNode:
    a = TreeNode("a", "1/4", (TreeNode("c", "1/8"), TreeNode("d", "1/16")))
    return TreeNode("r", "1/2", (a, TreeNode("b", "1/8")))


def test_base_embeddings():
    """Reals map to (r, 0) and chains to evenly spaced values."""
    assert embed_real(0) == seq(0)
    assert embed_real("1/2") == seq("1/2", 0)
    assert FiniteChain(3).image_values() == (Fraction(1, 6), Fraction(1, 3), Fraction(1, 2))
    assert compile_expr(FiniteChain(3))(0) == seq("1/6", 0)


def test_product_image_values():
    """Each factor image is squeezed between consecutive anchors."""
    assert default_anchors(2) == (1, Fraction(3, 4), Fraction(5, 8))
    image = compile_expr(Product((CHAIN2, CHAIN2)))((0, 1))
    assert seq_canonicalize(image) == seq("25/32", "3/4", "21/32", "5/8", 0)


def test_products_preserve_order():
    """Finite products with real factors embed strictly."""
    for expr in (Product((CHAIN2, FiniteChain(3))), Product((RealBase(), CHAIN2)),
                 Product((CHAIN2, RealBase()), ("1", "7/8", "1/2"))):
        audit = verify_embedding(expr)
        assert audit.ok, f"{expr} violates order at {audit.i}, {audit.j}"


def test_bad_anchors_rejected():
    """Anchors must be the right number and strictly decreasing in [1/2, 1]."""
    with pytest.raises(AnchorError):
        compile_expr(Product((CHAIN2,), ("1", "3/4", "1/2")))
    with pytest.raises(AnchorError):
        compile_expr(Product((CHAIN2,), ("3/4", "7/8")))
    with pytest.raises(AnchorError):
        compile_expr(Product((CHAIN2,), ("1", "1/4")))


def test_odd_image_from_even_flagged_embedding():
    """An embedding that lies about even lengths is an invariant violation."""
    liar = Embedding(FiniteChain(1), lambda p: seq(0), even=True)
    with pytest.raises(InvariantViolation):
        product_embed([liar], None, (0,))


def test_omega_product_tail():
    """With ratio 1/4 the repeated copies form one tail towards 1/2."""
    expr = Product((), tail=REPEAT, anchor_ratio="1/4")
    image = compile_expr(expr)(OmegaPoint((), 0))
    assert seq_canonicalize(image) == seq(OmegaTail.of("3/4", "1/2"), 0)
    same = compile_expr(expr)(OmegaPoint((0,), 0))
    assert altlex_compare(image, same).order is Order.EQUAL, "explicit repeat is the same point"


def test_omega_product_unpresentable():
    """Default anchors do not halve the distance to 1/2 for this image."""
    emb = compile_expr(Product((), tail=REPEAT))
    with pytest.raises(UnpresentableTail):
        emb(OmegaPoint((), 0))


def test_omega_product_order():
    """Listed factors decide before the repeated coordinate."""
    expr = Product((CHAIN2,), tail=REPEAT, anchor_ratio="1/4")
    emb = compile_expr(expr)
    lo, hi = emb(OmegaPoint((0,), 0)), emb(OmegaPoint((1,), 0))
    assert altlex_compare(lo, hi).order is Order.LESS
    assert verify_embedding(expr).ok


def test_glue_image_and_order():
    """Glued points carry the base image then the fiber image."""
    expr = Glue(CHAIN2, ((0, FiniteChain(1)), (1, RealBase())))
    image = compile_expr(expr)((0, 0))
    assert seq_canonicalize(image) == seq("5/8", "1/2", "5/16", "1/4", 0)
    assert count_points(expr) == 6
    assert verify_embedding(expr).ok


def test_glue_needs_total_finite_base():
    """Gluing over the reals or with a missing fiber is a shape error."""
    with pytest.raises(ShapeError):
        compile_expr(Glue(RealBase(), ()))
    with pytest.raises(ShapeError):
        compile_expr(Glue(CHAIN2, ((0, CHAIN2),)))


def test_duplicate_order():
    """Each point is split into two consecutive points."""
    expr = Duplicate(RealBase())
    pts = points(expr)
    assert pts[:2] == [(0, 0), (0, 1)]
    assert point_compare(expr, (0, 1), (Fraction(1, 4), 0)) == -1
    assert verify_embedding(expr).ok


def test_partition_tree_prefixes():
    """Sibling prefixes alternate with the parity of the append position."""
    root = _tree()
    table = psi0_table(root)
    assert table["a"] == (Fraction(5, 8),)
    assert table["b"] == (Fraction(3, 4),)
    assert table["c"] == (Fraction(5, 8), Fraction(7, 16))
    assert table["d"] == (Fraction(5, 8), Fraction(11, 32))
    assert tree_leaves(root) == ["c", "d", "b"]
    assert check_tree_embedding(root) == []
    assert verify_embedding(PartitionTree(root)).ok


def test_partition_tree_labels_validated():
    """Labels must decrease and nodes split at most in two."""
    with pytest.raises(LabelError):
        compile_expr(PartitionTree(TreeNode("r", "1/4", (TreeNode("a", "1/2"),))))
    with pytest.raises(ShapeError):
        compile_expr(PartitionTree(TreeNode("r", "1/2", tuple(TreeNode(n, "1/4") for n in "abc"))))


def test_nested_expression():
    """Products of glued and duplicated orders still embed strictly."""
    inner = Glue(CHAIN2, ((0, Duplicate(CHAIN2)), (1, PartitionTree(_tree()))))
    expr = Product((inner, Duplicate(FiniteChain(1))))
    pts = points(expr)
    assert len(pts) == count_points(expr) == 14
    assert verify_chain([compile_expr(expr)(p) for p in pts]).ok


def test_expression_json_round_trip():
    """Tagged variants re-parse to equal expressions."""
    exprs = [
        Product((CHAIN2, RealBase())),
        Product((CHAIN2,), tail=REPEAT, anchor_ratio="1/4"),
        Glue(CHAIN2, ((0, FiniteChain(1)), (1, RealBase()))),
        Duplicate(PartitionTree(_tree())),
    ]
    for expr in exprs:
        assert expr_from_json(expr_to_json(expr)) == expr, f"round trip failed for {expr}"
    parsed = expr_from_json({"product": {"factors": [{"chain": 2}, "real"], "anchors": ["1", "3/4", "1/2"]}})
    assert parsed == Product((CHAIN2, RealBase()), ("1", "3/4", "1/2"))
