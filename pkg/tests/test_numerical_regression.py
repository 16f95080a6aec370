"""
Exact regression values to catch unintended changes.
"""

from fractions import Fraction

from baireorder.combinators import FiniteChain, Glue, Product, RealBase, compile_expr
from baireorder.hyperspace import witness_between
from baireorder.kl import decompose, fn_constant, fn_indicator, theta_compare, usc_index_approx
from baireorder.ordinal import OMEGA, Order
from baireorder.seq import evenize, seq, seq_canonicalize


def test_regression_embedding_images():
    """Stored images of the standard product and glue examples."""
    chain2 = FiniteChain(2)
    product = compile_expr(Product((chain2, chain2)))((0, 1))
    assert seq_canonicalize(product) == seq("25/32", "3/4", "21/32", "5/8", 0)
    glue = compile_expr(Glue(chain2, ((0, FiniteChain(1)), (1, RealBase()))))((0, 0))
    assert seq_canonicalize(glue) == seq("5/8", "1/2", "5/16", "1/4", 0)


def test_regression_evenize_and_witness():
    """Stored outputs of evenize and of the even-index witness."""
    assert evenize(seq("1/2", 0)) == seq("3/4", "1/2", "1/4", 0)
    assert witness_between(seq("1/2", 0), seq("3/4", 0)) == seq("5/8", 0)


def test_regression_worked_decomposition():
    """The indicator of [0, omega) keeps rank 2 and stage values 1, 0."""
    d = decompose(fn_indicator(1, 0, OMEGA))
    assert d.rank == 2
    assert [str(i) for i in d.indices] == ["0", "1", "2"]
    assert d.stages[1].top == 1


def test_usc_index_truncation_error():
    """Raising the precision moves the index by at most 2**-precision."""
    f = fn_indicator(1, OMEGA)
    for precision in (8, 16, 24):
        low = usc_index_approx(f, precision)
        high = usc_index_approx(f, precision + 12)
        assert 0 <= high - low <= Fraction(1, 2 ** precision), f"truncation bound broken at {precision}"


def test_deterministic_output():
    """Same inputs always give the same outputs."""
    f0, f1 = fn_constant(1, "1/4"), fn_constant(1, "1/3")
    first = theta_compare(f0, f1)
    second = theta_compare(f0, f1)
    assert first.order is second.order is Order.LESS
    assert first.to_json() == second.to_json()
    assert usc_index_approx(f1) == usc_index_approx(f1)
