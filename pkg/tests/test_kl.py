"""
Finitary functions, USC envelopes, decompositions and the USC index.
"""

from fractions import Fraction

import pytest

from baireorder.errors import (
    BudgetExceeded,
    IndexOutOfRange,
    NegativeResult,
    NotALimitPoint,
    NotComparable,
    RangeError,
    ValidationError,
)
from baireorder.kl import (
    Block,
    FinitaryFunction,
    basis_box,
    box_index,
    box_meets_subgraph,
    cantor_pair,
    cantor_unpair,
    compare_decompositions,
    decompose,
    fn_combine,
    fn_constant,
    fn_equal,
    fn_eval,
    fn_indicator,
    fn_leq,
    fn_limsup_at,
    fn_sup,
    fn_sup_on,
    is_usc,
    point_from_index,
    point_index,
    squash,
    star_sum,
    theta_compare,
    theta_sequence,
    usc_envelope,
    usc_index_approx,
    usc_order_certificate,
)
from baireorder.ordinal import OMEGA, Order, omega_power, omega_times
from baireorder.seq import is_universal, seq_index

ZERO_FN = fn_constant(1, 0)
BELOW_OMEGA = fn_indicator(1, 0, OMEGA)  # 1 on [0, omega), 0 at omega
AT_OMEGA = fn_indicator(1, OMEGA)


def test_evaluation():
    """Prefix blocks, then the repeating block, then the top value."""
    f = FinitaryFunction.of(1, ["1/2", "1/4"], 0, 1)
    assert fn_eval(f, 0) == Fraction(1, 2)
    assert fn_eval(f, 1) == Fraction(1, 4)
    assert fn_eval(f, 5) == 0
    assert fn_eval(f, OMEGA) == 1
    assert fn_sup(f) == 1
    assert fn_sup(BELOW_OMEGA) == 1
    with pytest.raises(IndexOutOfRange):
        fn_eval(f, omega_times(1, 1))


def test_indicators():
    """Indicator helpers cover half-open intervals and the top point."""
    assert fn_eval(BELOW_OMEGA, 7) == 1
    assert fn_eval(BELOW_OMEGA, OMEGA) == 0
    assert fn_eval(AT_OMEGA, 3) == 0
    assert fn_eval(AT_OMEGA, OMEGA) == 1
    g = fn_indicator(2, OMEGA, omega_times(2))
    assert fn_eval(g, omega_times(1, 4)) == 1
    assert fn_eval(g, 4) == 0
    assert fn_eval(g, omega_times(2)) == 0
    assert fn_eval(g, omega_power(2)) == 0


def test_limsup_and_interval_sup():
    """Limsups are read off repeating blocks."""
    f = FinitaryFunction.of(2, [Block(1, (), 1)], Block(1, (), 0), 0)
    assert fn_limsup_at(f, OMEGA) == 1
    assert fn_limsup_at(f, omega_power(2)) == 0
    with pytest.raises(NotALimitPoint):
        fn_limsup_at(f, 3)
    assert fn_sup_on(f, None, 3) == 1
    assert fn_sup_on(f, OMEGA, omega_times(2)) == 0


def test_envelope_raises_limit_points():
    """A limit point takes the limsup from below when that is larger."""
    f = FinitaryFunction.of(2, [Block(1, (), 1)], Block(1, (), 0), 0)
    env = usc_envelope(f)
    assert fn_eval(env, OMEGA) == 1
    assert fn_eval(env, omega_times(1, 1)) == 0
    assert fn_eval(env, omega_power(2)) == 0
    assert fn_leq(f, env)
    assert not is_usc(f)
    assert is_usc(env)
    assert fn_equal(usc_envelope(env), env), "envelope should be idempotent"
    assert fn_equal(usc_envelope(BELOW_OMEGA), fn_constant(1, 1))
    assert is_usc(AT_OMEGA)


def test_envelope_below_closed_interval_majorant():
    """A USC majorant equal to 1 on [0, omega] bounds the envelope and touches it at omega."""
    f = FinitaryFunction.of(2, [Block(1, (), 1)], Block(1, (), 0), 0)
    tight = fn_indicator(2, 0, omega_times(1, 1))
    loose = fn_indicator(2, 0, omega_times(1, 2))
    env = usc_envelope(f)
    for g in (tight, loose):
        assert is_usc(g), f"{g} should be USC"
        assert fn_leq(f, g)
        assert fn_leq(env, g), f"envelope exceeds the majorant {g}"
    assert fn_eval(env, OMEGA) == fn_eval(tight, OMEGA) == 1
    assert fn_equal(env, tight)
    assert not fn_equal(env, loose)
    # raising an isolated point or a limit point breaks minimality
    raised_point = fn_combine(env, fn_indicator(2, omega_times(1, 1), omega_times(1, 2)), "max")
    raised_limit = fn_combine(env, fn_indicator(2, omega_times(2), omega_times(2, 1)), "max")
    assert not fn_leq(raised_point, tight)
    assert not fn_leq(raised_limit, tight)


def test_pointwise_algebra():
    """Combinations are exact; negative results can be refused."""
    assert fn_equal(fn_combine(fn_constant(1, 1), AT_OMEGA, "sub"), BELOW_OMEGA)
    assert fn_equal(fn_combine(BELOW_OMEGA, AT_OMEGA, "max"), fn_constant(1, 1))
    assert fn_equal(fn_combine(BELOW_OMEGA, AT_OMEGA, "min"), ZERO_FN)
    with pytest.raises(NegativeResult):
        fn_combine(ZERO_FN, fn_constant(1, 1), "sub", check_nonnegative=True)
    with pytest.raises(ValidationError):
        fn_combine(ZERO_FN, ZERO_FN, "mul")


def test_worked_decomposition():
    """The indicator of [0, omega) has rank 2 with stages (1, indicator of {omega}, 0)."""
    d = decompose(BELOW_OMEGA)
    assert d.rank == 2
    assert len(d.stages) == 3
    assert fn_equal(d.stages[0], fn_constant(1, 1))
    assert fn_equal(d.stages[1], AT_OMEGA)
    assert fn_equal(d.stages[2], ZERO_FN)
    assert fn_equal(fn_combine(d.stages[0], d.stages[1], "sub"), BELOW_OMEGA), "f0 - f1 should rebuild f"
    assert d.ok, f"failed checks: {[c.name for c in d.report if not c.passed]}"
    assert fn_equal(d.stage(9), ZERO_FN), "stages past the rank are zero"


def test_small_decompositions():
    """Constants and zero settle immediately."""
    d = decompose(fn_constant(1, "1/2"))
    assert d.rank == 1
    assert fn_equal(d.stages[0], fn_constant(1, "1/2"))
    d = decompose(ZERO_FN)
    assert d.rank == 0
    assert len(d.stages) == 1
    d = decompose(fn_indicator(2, 0, OMEGA))
    assert d.rank == 2 and d.ok


def test_decompose_rejects_negative_and_budget():
    """Negative inputs are refused; a tiny budget is exceeded with a trace."""
    with pytest.raises(RangeError):
        decompose(fn_constant(1, -1))
    with pytest.raises(BudgetExceeded) as info:
        decompose(BELOW_OMEGA, budget=1)
    assert info.value.trace["stages"], "budget errors should carry the stages computed so far"


def test_star_sum():
    """Alternating sums of the stages rebuild the function."""
    d = decompose(BELOW_OMEGA)
    assert fn_equal(star_sum(d.stages, 0), ZERO_FN)
    assert fn_equal(star_sum(d.stages, 1), fn_constant(1, 1))
    assert fn_equal(star_sum(d.stages, 2), BELOW_OMEGA)
    assert fn_equal(star_sum(d.stages, 3), BELOW_OMEGA)
    assert fn_equal(star_sum([], 0, k=1), ZERO_FN)
    with pytest.raises(IndexOutOfRange):
        star_sum(d.stages, 7)


def test_first_differing_stage_parity():
    """Comparable functions are separated at a stage ordered by its parity."""
    result = compare_decompositions(BELOW_OMEGA, fn_constant(1, 1))
    assert result.delta == 1
    assert fn_leq(result.stage1, result.stage0), "odd stage should reverse the order"
    with pytest.raises(NotComparable):
        compare_decompositions(fn_constant(1, 1), ZERO_FN)


def test_point_and_box_codes():
    """Point and box codes invert each other."""
    assert cantor_unpair(cantor_pair(3, 5)) == (3, 5)
    for x in (omega_times(2, 3), OMEGA, omega_power(2), omega_times(0, 4)):
        assert point_from_index(point_index(x, 2), 2) == x
    for n in range(300):
        assert box_index(basis_box(n, 2), 2) == n, f"box {n} does not re-encode"
    first = basis_box(0, 1)
    assert first.lo is None and (first.r_lo, first.r_hi) == (0, 1)


def test_usc_index():
    """The zero function has index 0; comparable pairs are certified by a box."""
    assert usc_index_approx(ZERO_FN) == 0
    assert usc_index_approx(AT_OMEGA) < usc_index_approx(fn_constant(1, 1))
    cert = usc_order_certificate(AT_OMEGA, fn_constant(1, 1))
    assert cert.kind == "certificate"
    assert cert.order is Order.LESS
    assert not box_meets_subgraph(AT_OMEGA, cert.box)
    assert box_meets_subgraph(fn_constant(1, 1), cert.box)
    assert usc_order_certificate(fn_constant(1, 1), AT_OMEGA).order is Order.GREATER
    assert usc_order_certificate(AT_OMEGA, AT_OMEGA).kind == "equal"


def test_theta_order():
    """Squashed constants compare like the constants."""
    assert squash(0) == Fraction(1, 2)
    assert squash(1) == Fraction(3, 4)
    assert squash(-1) == Fraction(1, 4)
    result = theta_compare(ZERO_FN, fn_constant(1, 1))
    assert result.order is Order.LESS
    assert result.delta == 0
    assert result.exact
    image = theta_sequence(ZERO_FN)
    assert is_universal(image)
    assert seq_index(image, 0) > 0


def test_json_form():
    """The nested prefix/rep form parses and re-emits."""
    f = FinitaryFunction.from_json({"k": 1, "prefix": ["1", "1"], "rep": "1", "top": "0"})
    assert fn_equal(f, BELOW_OMEGA)
    assert FinitaryFunction.from_json(f.to_json()) == f
    g = fn_indicator(2, OMEGA, omega_times(2), "1/2")
    assert FinitaryFunction.from_json(g.to_json()) == g
    d = decompose(BELOW_OMEGA).to_json()
    assert d["rank"] == [[0, 2]]
    assert all(c["status"] == "pass" for c in d["report"])
