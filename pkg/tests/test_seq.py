"""
Transfinite sequences: presentation, indexing and the altlex order.
"""

from fractions import Fraction

import pytest

from baireorder.errors import (
    EqualSequences,
    IndexOutOfRange,
    NotDecreasingAcrossJoin,
    RangeError,
    SequenceValidationError,
)
from baireorder.ordinal import OMEGA, Order, Parity, omega_times
from baireorder.seq import (
    Finite,
    OmegaTail,
    TransfiniteSeq,
    altlex_compare,
    delta_first_difference,
    ensure_valid,
    evenize,
    inf_before,
    is_universal,
    seq,
    seq_affine,
    seq_canonicalize,
    seq_concat,
    seq_index,
    seq_length,
    seq_prefix,
    seq_values,
)

TAIL = OmegaTail.of(1, "1/2")


def test_compare_at_even_index():
    """Index 0 is even: the smaller value wins."""
    cmp = altlex_compare(seq("1/2", 0), seq("3/4", 0))
    assert cmp.order is Order.LESS
    assert cmp.delta == 0
    assert cmp.parity is Parity.EVEN


def test_compare_at_odd_index_reverses():
    """At an odd index the larger value is the smaller sequence."""
    cmp = altlex_compare(seq(1, "1/2", 0), seq(1, "1/4", 0))
    assert cmp.order is Order.LESS, "(1, 1/2, 0) should precede (1, 1/4, 0)"
    assert cmp.delta == 1
    assert cmp.parity is Parity.ODD


def test_compare_after_tail():
    """Sequences sharing a tail are decided at omega or beyond."""
    x = seq(TAIL, "1/2", 0)
    assert altlex_compare(x, seq(TAIL, "1/4", 0)).order is Order.GREATER
    cmp = altlex_compare(x, seq(TAIL, "1/2", "1/4", 0))
    assert cmp.delta == omega_times(1, 1)
    assert cmp.order is Order.GREATER, "odd index omega+1: 0 < 1/4 reverses"


def test_tail_against_finite_values():
    """A tail is compared value by value against a Finite run."""
    x = seq(TAIL, 0)
    y = seq(1, "3/4", 0)
    assert delta_first_difference(x, y) == 2
    assert altlex_compare(x, y).order is Order.GREATER


def test_comparison_is_antisymmetric():
    """Swapping arguments flips the order and keeps delta."""
    x, y = seq(TAIL, "1/2", 0), seq(1, "3/4", "1/2", 0)
    a, b = altlex_compare(x, y), altlex_compare(y, x)
    assert a.order.flipped() is b.order
    assert a.delta == b.delta


def test_presentations_of_same_sequence_are_equal():
    """A value absorbed into a tail does not change the sequence."""
    x = seq(1, OmegaTail.of("1/2", 0), 0)
    y = seq(OmegaTail.of(1, 0), 0)
    assert seq_canonicalize(x) == seq_canonicalize(y)
    assert altlex_compare(x, y).order is Order.EQUAL
    assert altlex_compare(x, y).delta is None
    with pytest.raises(EqualSequences):
        delta_first_difference(x, y)


def test_canonical_form_merges_finite_runs():
    """Adjacent Finite segments merge."""
    x = TransfiniteSeq((Finite.of("3/4"), Finite.of("1/2", 0)))
    assert seq_canonicalize(x) == seq("3/4", "1/2", 0)


def test_length_and_indexing():
    """Indices run through the tail and on past omega."""
    x = seq(TAIL, "1/2", 0)
    assert seq_length(x) == omega_times(1, 2)
    assert seq_index(x, 0) == 1
    assert seq_index(x, 3) == Fraction(9, 16)
    assert seq_index(x, OMEGA) == Fraction(1, 2)
    assert seq_index(x, omega_times(1, 1)) == 0
    with pytest.raises(IndexOutOfRange):
        seq_index(x, omega_times(1, 2))
    assert seq_values(x, 3) == [1, Fraction(3, 4), Fraction(5, 8)]


def test_prefix_and_infimum():
    """Prefixes cut tails into Finite runs; infima at limits are tail limits."""
    x = seq(TAIL, "1/2", 0)
    assert seq_prefix(x, 2) == seq(1, "3/4")
    assert seq_prefix(x, OMEGA) == seq(TAIL)
    assert seq_prefix(x, 0).segments == ()
    assert inf_before(x, 0) is None
    assert inf_before(x, 2) == Fraction(3, 4)
    assert inf_before(x, OMEGA) == Fraction(1, 2)


def test_validation_failures():
    """Every broken presentation is refused with a reason."""
    bad = [
        seq("1/2", "3/4", 0),  # increasing
        seq("1/2"),  # no final 0
        seq(2, 0),  # out of range
        seq(OmegaTail.of("1/2", "1/2"), 0),  # degenerate tail
        seq(TAIL, "3/4", 0),  # above the tail limit
    ]
    for x in bad:
        assert not is_universal(x), f"{x} should not be a member"
        with pytest.raises(SequenceValidationError):
            ensure_valid(x)
    assert is_universal(seq(TAIL, "1/2", 0)), "value equal to the tail limit is allowed"


def test_affine_and_concat():
    """Affine images stay exact; joins must keep decreasing."""
    x = seq("1/2", 0)
    assert seq_affine("1/2", x, "1/2") == seq("3/4", "1/2")
    with pytest.raises(RangeError):
        seq_affine(2, seq(1, 0), 0)
    with pytest.raises(RangeError):
        seq_affine(-1, x, 1)
    assert seq_concat(seq("3/4"), x) == TransfiniteSeq((Finite.of("3/4"), Finite.of("1/2", 0)))
    with pytest.raises(NotDecreasingAcrossJoin):
        seq_concat(seq("1/4"), x)


def test_evenize_lengths():
    """Outputs always have even length."""
    assert evenize(seq("1/2", 0)) == seq("3/4", "1/2", "1/4", 0)
    assert evenize(seq(0)) == seq("1/2", 0)
    assert seq_length(evenize(seq(TAIL, 0))).finite_part % 2 == 0


def test_evenize_preserves_order():
    """Members and their evenized images are ordered alike."""
    members = [seq("1/2", 0), seq("3/4", 0), seq(1, "1/2", 0), seq(1, "1/4", 0), seq(TAIL, 0), seq(0)]
    for x in members:
        for y in members:
            assert altlex_compare(x, y).order is altlex_compare(evenize(x), evenize(y)).order, \
                f"evenize changed the order of {x} and {y}"


def test_json_round_trip():
    """Sequences survive the interchange format."""
    x = seq(TAIL, "1/2", "1/3", 0)
    data = x.to_json()
    assert data["segments"][0] == {"tail": {"start": "1", "limit": "1/2"}}
    assert TransfiniteSeq.from_json(data) == x
    assert TransfiniteSeq.from_json(["1/2", "0"]) == seq("1/2", 0)
