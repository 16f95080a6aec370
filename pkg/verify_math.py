from baireorder.kl import (
    decompose,
    fn_combine,
    fn_constant,
    fn_equal,
    fn_eval,
    fn_indicator,
    fn_limsup_at,
    star_sum,
    usc_envelope,
)
from baireorder.ordinal import OMEGA


def verify_worked_decomposition():
    # f = indicator of [0, omega) on [0, omega]: 1 at every n, 0 at omega
    f = fn_indicator(1, 0, OMEGA)

    # 1. The envelope lifts omega to the limsup of the values below it
    print("--- Math Verification ---")
    print(f"f(3) = {fn_eval(f, 3)}, f(omega) = {fn_eval(f, OMEGA)}, limsup at omega = {fn_limsup_at(f, OMEGA)}")
    f0 = usc_envelope(f)
    print(f"f0 = env(f) is constant 1: {fn_equal(f0, fn_constant(1, 1))}")

    # 2. g1 = f0 - f is the indicator of {omega}, already USC
    g1 = fn_combine(f0, f, "sub", check_nonnegative=True)
    f1 = usc_envelope(g1)
    print(f"f1 = env(f0 - f) is the indicator of {{omega}}: {fn_equal(f1, fn_indicator(1, OMEGA))}")

    # 3. g2 = f1 - g1 vanishes, so the stages stop at rank 2
    g2 = fn_combine(f1, g1, "sub", check_nonnegative=True)
    print(f"f2 = env(f1 - g1) is zero: {fn_equal(usc_envelope(g2), fn_constant(1, 0))}")

    # 4. Library run and the alternating sum f0 - f1
    d = decompose(f)
    print(f"decompose: rank {d.rank}, stages:")
    for alpha, stage in zip(d.indices, d.stages):
        print(f"  f_{alpha}: {stage}")
    rebuilt = star_sum(d.stages, d.rank, d.indices)
    ok = fn_equal(rebuilt, f) and d.ok
    for check in d.report:
        print(f"  {check.name:<28} {'pass' if check.passed else 'FAIL'}")

    if ok:
        print("SUCCESS: f = f0 - f1 with stages (1, indicator of {omega}, 0).")
    else:
        print("NOTE: reconstruction or a post-condition failed.")


if __name__ == "__main__":
    verify_worked_decomposition()
