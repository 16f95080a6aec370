"""
Compact figures, box predicates, separation witnesses and Hausdorff distances.
"""

from fractions import Fraction

import pytest

from baireorder.errors import RangeError, ValidationError, WitnessPreconditionError
from baireorder.hyperspace import (
    BoxQuery,
    CompactFig,
    GChain,
    Point,
    VSeg,
    check_witness,
    fig_meets_box,
    fig_member,
    hausdorff_distance_approx,
    l_exclusion_point,
    psi_compact,
    witness_between,
)
from baireorder.ordinal import OMEGA
from baireorder.seq import OmegaTail, seq

TAIL = OmegaTail.of(1, "1/2")
WITH_SEGMENT = seq(TAIL, "1/2", 0)


def test_figure_pieces():
    """Tails become chains and a value at a tail limit a vertical segment."""
    fig = psi_compact(WITH_SEGMENT)
    assert fig.pieces == (GChain(1, "1/2"), VSeg("1/2", "1/2"), Point(0, 0))
    assert psi_compact(seq("3/4", "1/2", 0)).pieces == (Point("3/4", 0), Point("1/2", 0), Point(0, 0))


def test_membership():
    """Chain points are dyadic steps towards the limit."""
    fig = psi_compact(WITH_SEGMENT)
    assert fig_member(fig, ("3/4", 0))
    assert fig_member(fig, ("5/8", 0))
    assert not fig_member(fig, ("7/10", 0))
    assert fig_member(fig, ("1/2", "1/4"))
    assert not fig_member(fig, ("1/2", "3/4"))
    assert fig_member(fig, (0, 0))


def test_box_meets():
    """Open x-intervals against points, chains and segments."""
    fig = psi_compact(WITH_SEGMENT)
    assert fig_meets_box(fig, BoxQuery("7/8"))
    assert not fig_meets_box(fig, BoxQuery("3/4", "7/8")), "no chain point strictly between 3/4 and 7/8"
    assert fig_meets_box(fig, BoxQuery("1/4", "3/4", y_lo="1/4"))
    assert not fig_meets_box(fig, BoxQuery("1/4", "3/4", y_lo="3/4"))
    assert not fig_meets_box(fig, BoxQuery("1/2", "1/2"))


def test_witness_even_delta():
    """At an even index the witness follows x and lands between the gaps."""
    x, y = seq("1/2", 0), seq("3/4", 0)
    w = witness_between(x, y)
    assert w == seq("5/8", 0)
    report = check_witness(x, y, w)
    assert report.ok, report.to_json()
    names = [p.name for p in report.predicates]
    assert names == ["order", "prefix_agreement", "interval_bounds", "meets_upper_gap", "meets_lower_gap",
                     "l_exclusion"]
    flagged = [p for p in report.predicates if p.flag]
    assert [p.name for p in flagged] == ["meets_lower_gap"], "empty prefix infimum should be flagged"


def test_witness_odd_delta():
    """At an odd index the witness follows y."""
    x, y = seq(1, "1/2", 0), seq(1, "1/4", 0)
    w = witness_between(x, y)
    assert w.segments[0].values == (1,)
    assert w.segments[1].values == (Fraction(3, 8), 0)
    assert check_witness(x, y, w).ok


def test_witness_after_tail():
    """Witnesses for pairs decided past a tail keep the tail."""
    x, y = seq(TAIL, "1/4", 0), seq(TAIL, "3/8", 0)
    w = witness_between(x, y)
    assert w.segments[0] == TAIL
    report = check_witness(x, y, w)
    assert report.ok, report.to_json()
    assert report.delta == OMEGA


def test_witness_precondition():
    """Witnesses need x strictly below y."""
    with pytest.raises(WitnessPreconditionError):
        witness_between(seq("3/4", 0), seq("1/2", 0))
    with pytest.raises(WitnessPreconditionError):
        witness_between(seq("1/2", 0), seq("1/2", 0))


def test_bad_witness_is_reported():
    """A failing candidate yields a report, not an exception."""
    report = check_witness(seq("1/2", 0), seq("3/4", 0), seq("7/8", 0))
    assert not report.ok
    failed = {p.name for p in report.predicates if not p.passed}
    assert "interval_bounds" in failed
    assert report.to_json()["ok"] is False


def test_exclusion_point():
    """The exclusion point is the top of a vertical segment at a limit, else a base point."""
    assert l_exclusion_point(seq("3/4", 0), 0) == (Fraction(3, 4), 0)
    point = l_exclusion_point(WITH_SEGMENT, OMEGA)
    assert point == (Fraction(1, 2), Fraction(1, 2))
    assert fig_member(psi_compact(WITH_SEGMENT), point)


def test_hausdorff_distance():
    """Distances are exact for simple figures and small for sampled chains."""
    a = CompactFig((Point(0, 0),))
    b = CompactFig((Point("3/4", 0),))
    assert hausdorff_distance_approx(a, b) == Fraction(3, 4)
    assert hausdorff_distance_approx(CompactFig((VSeg("1/2", "1/2"),)), CompactFig((Point("1/2", 0),))) \
        == Fraction(1, 2)
    chain = GChain(1, "1/2")
    sampled = CompactFig(tuple(Point(chain.value(n), 0) for n in range(64)))
    assert hausdorff_distance_approx(CompactFig((chain,)), sampled) <= Fraction(1, 2 ** 19)
    with pytest.raises(ValidationError):
        hausdorff_distance_approx(a, CompactFig(()))
    with pytest.raises(ValidationError):
        hausdorff_distance_approx(a, b, 0)


def test_figure_validation_and_json():
    """Coordinates stay in the unit square; the JSON form round-trips."""
    with pytest.raises(RangeError):
        CompactFig((Point(2, 0),))
    with pytest.raises(ValidationError):
        CompactFig((GChain("1/2", 1),))
    fig = psi_compact(WITH_SEGMENT)
    data = fig.to_json()
    assert data["pieces"][0] == {"gchain": {"start": "1", "limit": "1/2"}}
    assert CompactFig.from_json(data) == fig
