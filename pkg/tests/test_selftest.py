"""
Seeded generators and the acceptance suite.
"""

import pytest

from baireorder import ordinal
from baireorder.combinators import count_points
from baireorder.config import SelftestConfig
from baireorder.kl import fn_leq, fn_lt, fn_min, is_usc, usc_envelope
from baireorder.ordinal import Order, Parity, omega_times
from baireorder.sampling import (
    random_comparable_pair,
    random_function,
    random_member,
    random_pair,
    random_small_expr,
    random_usc_majorant,
    random_usc_pair,
    rng_from_seed,
    with_shared_prefix,
)
from baireorder.selftest import brute_force_compare, inject_fault, run_selftest
from baireorder.seq import altlex_compare, is_universal, seq, seq_length


def test_generated_members_are_valid():
    """Every generated sequence is a member of the universal order."""
    rng = rng_from_seed(3)
    for _ in range(200):
        x = random_member(rng)
        assert is_universal(x), f"invalid member {x}"
        assert is_universal(with_shared_prefix(rng, x)), f"invalid continuation of {x}"


def test_generators_are_seeded():
    """The same seed gives the same corpus."""
    a = [random_pair(rng_from_seed(11)) for _ in range(5)]
    b = [random_pair(rng_from_seed(11)) for _ in range(5)]
    assert a == b


def test_generated_expressions_and_functions():
    """Expressions stay small; functions are nonnegative and pairs are ordered."""
    rng = rng_from_seed(5)
    for _ in range(20):
        assert count_points(random_small_expr(rng, 60)) <= 60
        assert fn_min(random_function(rng)) >= 0
        f0, f1 = random_comparable_pair(rng)
        assert fn_lt(f0, f1)
        f, g = random_usc_pair(rng)
        assert is_usc(f) and is_usc(g) and fn_leq(f, g)


def test_generated_members_reach_long_lengths():
    """The member corpus reaches lengths omega*2 + 5 and beyond."""
    rng = rng_from_seed(3)
    lengths = [seq_length(random_member(rng)) for _ in range(300)]
    assert max(lengths) >= omega_times(2, 5), f"longest member has length {max(lengths)}"
    assert max(lengths) <= omega_times(2, 6)


def test_usc_majorants_bound_the_envelope():
    """Sampled majorants are USC, dominate f and lie above its envelope."""
    rng = rng_from_seed(9)
    for _ in range(30):
        f = random_function(rng)
        for _ in range(5):
            g = random_usc_majorant(rng, f)
            assert is_usc(g), f"majorant {g} of {f} is not USC"
            assert fn_leq(f, g)
            assert fn_leq(usc_envelope(f), g), f"envelope of {f} exceeds {g}"


def test_brute_force_oracle():
    """The index walk decides simple pairs like the engine."""
    cases = [
        (seq("1/2", 0), seq("3/4", 0), Order.LESS),
        (seq(1, "1/2", 0), seq(1, "1/4", 0), Order.LESS),
        (seq(1, "1/2", 0), seq(1, "1/2", 0), Order.EQUAL),
    ]
    for x, y, expected in cases:
        order, delta = brute_force_compare(x, y, 50)
        assert order is expected
        assert delta == altlex_compare(x, y).delta


def test_small_selftest_passes():
    """A scaled-down run of every criterion passes."""
    report = run_selftest(SelftestConfig(scale=200))
    assert report.passed, [r.to_json() for r in report.results if not r.passed]
    assert report.exit_code == 0
    names = [r.name for r in report.results]
    assert names[0] == "order_laws" and names[-1] == "determinism"
    assert "seconds" not in report.to_json()["criteria"][0]
    assert list(report.to_frame().columns) == ["criterion", "passed", "cases", "failures", "seconds"]


def test_same_seed_same_report():
    """Reports without timings are reproducible."""
    cfg = SelftestConfig(scale=500)
    only = ["order_laws", "oracle_equivalence", "evenize"]
    assert run_selftest(cfg, only=only).to_json() == run_selftest(cfg, only=only).to_json()


def test_parity_fault_is_detected():
    """Flipping the parity table breaks the oracle and the decompositions."""
    report = run_selftest(SelftestConfig(scale=100, fault="parity"),
                          only=["oracle_equivalence", "monotonicity"])
    assert not report.passed
    assert report.exit_code == 3
    assert ordinal._PARITY == (Parity.EVEN, Parity.ODD), "fault must be undone after the run"


def test_unknown_fault():
    """Only known faults can be injected."""
    with pytest.raises(ValueError):
        with inject_fault("gravity"):
            pass
