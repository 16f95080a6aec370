"""
Cantor normal form arithmetic and parity.
"""

import pytest

from baireorder.config import DEFAULT_CONFIG
from baireorder.errors import OrdinalDepthError, ValidationError
from baireorder.ordinal import (
    DEPTH_CAP,
    OMEGA,
    ONE,
    ZERO,
    Order,
    Ordinal,
    OrdinalKind,
    Parity,
    omega_power,
    omega_times,
    ord_add,
    ord_block_start,
    ord_classify,
    ord_compare,
    ord_parity,
    ord_predecessor,
    ord_split_block,
    ord_split_row,
)


def test_text_form():
    """Ordinals print in the usual CNF notation."""
    assert str(ZERO) == "0"
    assert str(Ordinal.of(5)) == "5"
    assert str(omega_times(2, 3)) == "ω·2+3"
    assert str(omega_power(2)) == "ω^2"
    assert str(Ordinal(((OMEGA, 1),))) == "ω^(ω)"


def test_addition_absorbs_smaller_terms():
    """Finite summands vanish on the left of omega."""
    assert Ordinal.of(3) + OMEGA == OMEGA, "3 + ω should be ω"
    assert OMEGA + 3 == omega_times(1, 3)
    assert ord_add(omega_times(1, 2), omega_times(1, 0)) == omega_times(2, 0), "ω+2+ω should be ω·2"
    assert omega_power(2) + OMEGA > omega_power(2)


def test_order_matches_integers():
    """Finite ordinals compare like their integers."""
    assert Ordinal.of(3) == 3
    assert Ordinal.of(2) < 3
    assert ord_compare(OMEGA, Ordinal.of(1000)) is Order.GREATER
    assert ord_compare(omega_times(1, 5), omega_times(2)) is Order.LESS
    assert sorted([OMEGA, ONE, ZERO, omega_times(1, 1)]) == [ZERO, ONE, OMEGA, omega_times(1, 1)]


def test_parity_of_limits_and_successors():
    """Zero and limits are even; parity follows the finite part."""
    assert ord_parity(ZERO) is Parity.EVEN
    assert ord_parity(OMEGA) is Parity.EVEN
    assert ord_parity(omega_times(1, 1)) is Parity.ODD
    assert ord_parity(omega_times(3, 4)) is Parity.EVEN
    assert ord_parity(omega_power(2) + 7) is Parity.ODD


def test_classify_and_predecessor():
    """Successors have predecessors, limits do not."""
    assert ord_classify(ZERO).kind is OrdinalKind.ZERO
    assert ord_classify(OMEGA).kind is OrdinalKind.LIMIT
    succ = ord_classify(omega_times(1, 2))
    assert succ.kind is OrdinalKind.SUCCESSOR
    assert succ.pred == omega_times(1, 1)
    assert ord_predecessor(omega_times(1, 1)) == OMEGA
    with pytest.raises(ValidationError):
        ord_predecessor(OMEGA)


def test_row_and_block_splits():
    """omega*j + m and omega^(level-1)*i + rho decompositions."""
    assert ord_split_row(omega_times(2, 3)) == (2, 3)
    assert ord_split_row(Ordinal.of(4)) == (0, 4)
    with pytest.raises(ValidationError):
        ord_split_row(omega_power(2))
    assert ord_split_block(omega_times(2, 3), 2) == (2, Ordinal.of(3))
    assert ord_split_block(Ordinal.of(3), 2) == (0, Ordinal.of(3))
    assert ord_split_block(Ordinal.of(3), 1) == (3, ZERO)
    assert ord_block_start(2, 2) == omega_times(2)


def test_json_round_trip():
    """The nested list form re-parses to the same ordinal."""
    for alpha in (ZERO, Ordinal.of(7), omega_times(3, 1), omega_power(3) + OMEGA, Ordinal(((OMEGA, 2),))):
        assert Ordinal.from_json(alpha.to_json()) == alpha, f"round trip failed for {alpha}"
    assert Ordinal.from_json(4) == 4


def test_malformed_terms_rejected():
    """Non-decreasing exponents and bad coefficients are validation errors."""
    with pytest.raises(ValidationError):
        Ordinal(((ZERO, 1), (ONE, 1)))
    with pytest.raises(ValidationError):
        Ordinal(((ONE, 0),))
    with pytest.raises(ValidationError):
        Ordinal.of(-1)


def test_depth_cap():
    """Towers up to the configured cap are accepted; one level more is refused."""
    assert DEPTH_CAP == DEFAULT_CONFIG.ordinal_depth_cap
    alpha = ONE
    while alpha.depth < DEPTH_CAP:
        alpha = Ordinal(((alpha, 1),))
    assert alpha.depth == DEPTH_CAP
    with pytest.raises(OrdinalDepthError):
        Ordinal(((alpha, 1),))
