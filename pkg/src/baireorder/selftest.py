"""
Acceptance suite run by ``baireorder selftest``.

Each criterion draws its corpus from a generator seeded with the run seed and
the criterion name, so criteria are independent of each other and of the
order they run in. Results are tabulated with pandas.
"""

import contextlib
import logging
import time
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np
import pandas as pd

from . import __version__, ordinal
from .combinators import compile_expr, point_compare, points
from .config import DEFAULT_CONFIG, EngineConfig, SelftestConfig
from .errors import BaireOrderError, IndexOutOfRange, InvariantViolation, ValidationError
from .hyperspace import (
    CompactFig,
    GChain,
    Point,
    check_witness,
    fig_member,
    hausdorff_distance_approx,
    l_exclusion_point,
    psi_compact,
    witness_between,
)
from .kl import (
    box_meets_subgraph,
    compare_decompositions,
    decompose,
    fn_combine,
    fn_constant,
    fn_equal,
    fn_eval,
    fn_indicator,
    fn_leq,
    fn_limsup_at,
    is_usc,
    usc_envelope,
    usc_index_approx,
    usc_order_certificate,
)
from .ordinal import OMEGA, Order, Ordinal, Parity, omega_power
from .sampling import (
    random_comparable_pair,
    random_function,
    random_member,
    random_pair,
    random_small_expr,
    random_tail_pair,
    random_usc_majorant,
    random_usc_pair,
    rng_from_seed,
)
from .seq import (
    Finite,
    OmegaTail,
    TransfiniteSeq,
    altlex_compare,
    delta_first_difference,
    evenize,
    iter_values,
    seq_index,
    seq_length,
)

logger = logging.getLogger(__name__)

MAX_MESSAGES = 5


@dataclass
class CriterionResult:
    name: str
    cases: int = 0
    failures: List[str] = field(default_factory=list)
    seconds: float = 0.0
    exit_code: int = 1  # exit code when this criterion fails

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, message: str) -> None:
        self.failures.append(message)

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "criterion": self.name,
            "status": "pass" if self.passed else "fail",
            "cases": self.cases,
            "failures": len(self.failures),
            "messages": self.failures[:MAX_MESSAGES],
        }
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


@dataclass
class SelftestReport:
    seed: int
    scale: int
    results: List[CriterionResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def exit_code(self) -> int:
        return max([r.exit_code for r in self.results if not r.passed], default=0)

    def to_json(self, timings: bool = False) -> dict:
        return {
            "version": __version__,
            "seed": self.seed,
            "scale": self.scale,
            "passed": self.passed,
            "criteria": [r.to_json(timings) for r in self.results],
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"criterion": r.name, "passed": r.passed, "cases": r.cases,
              "failures": len(r.failures), "seconds": r.seconds} for r in self.results]
        )


# -- oracles -----------------------------------------------------------------------

def _oracle_parity_even(alpha: Ordinal) -> bool:
    # independent of the engine's parity table
    return alpha.finite_part % 2 == 0


def brute_force_compare(x: TransfiniteSeq, y: TransfiniteSeq,
                        horizon: int) -> Tuple[Order, Optional[Ordinal]]:
    """
    Walk the indices of ``x`` in order (each tail cut at ``horizon`` values)
    and compare values one index at a time.
    """
    for idx, xv in iter_values(x, horizon):
        try:
            yv = seq_index(y, idx)
        except IndexOutOfRange:
            raise ValidationError(f"{y} ends before index {idx} of {x}")
        if xv != yv:
            less = xv < yv if _oracle_parity_even(idx) else xv > yv
            return (Order.LESS if less else Order.GREATER), idx
    return Order.EQUAL, None


def _re_present(x: TransfiniteSeq) -> TransfiniteSeq:
    """Same sequence with the first tail split into a value and a shifted tail."""
    out = []
    done = False
    for seg in x.segments:
        if isinstance(seg, OmegaTail) and not done:
            out.extend([Finite((seg.start,)), seg.shifted(1)])
            done = True
        else:
            out.append(seg)
    return TransfiniteSeq(tuple(out))


# -- criteria ------------------------------------------------------------------------

def _order_laws(rng: np.random.Generator, cfg: SelftestConfig, engine: EngineConfig, res: CriterionResult) -> None:
    n = cfg.size("order_laws_samples")
    members = [random_member(rng) for _ in range(n)]
    for x in members:
        res.cases += 1
        if altlex_compare(x, x).order is not Order.EQUAL:
            res.fail(f"not irreflexive on {x}")
        if altlex_compare(x, _re_present(x)).order is not Order.EQUAL:
            res.fail(f"presentations of {x} compare unequal")
    for _ in range(n):
        x, y = random_pair(rng)
        res.cases += 1
        a, b = altlex_compare(x, y), altlex_compare(y, x)
        if a.order.flipped() is not b.order or a.delta != b.delta:
            res.fail(f"not antisymmetric on {x}, {y}")
    for _ in range(n):
        x, y = random_pair(rng)
        z = random_member(rng) if rng.random() < 0.5 else random_pair(rng)[0]
        trio = sorted([x, y, z], key=lambda s: str(s))
        res.cases += 1
        orders = {(i, j): altlex_compare(trio[i], trio[j]).order for i in range(3) for j in range(3) if i != j}
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    if len({i, j, k}) < 3:
                        continue
                    if orders[i, j] is Order.LESS and orders[j, k] is Order.LESS and orders[i, k] is not Order.LESS:
                        res.fail(f"not transitive on {trio[i]}, {trio[j]}, {trio[k]}")


def _oracle(rng: np.random.Generator, cfg: SelftestConfig, engine: EngineConfig, res: CriterionResult) -> None:
    horizon = cfg.oracle_horizon
    for _ in range(cfg.size("oracle_pairs")):
        x, y = random_pair(rng)
        expected = brute_force_compare(x, y, horizon)
        got = altlex_compare(x, y)
        res.cases += 1
        if (got.order, got.delta) != expected:
            res.fail(f"{x} vs {y}: engine {got.order.value} at {got.delta}, oracle {expected[0].value} at {expected[1]}")
        elif got.delta is not None and delta_first_difference(x, y) != got.delta:
            res.fail(f"first difference of {x} and {y} disagrees with the comparison")


def _combinators(rng: np.random.Generator, cfg: SelftestConfig, engine: EngineConfig, res: CriterionResult) -> None:
    for _ in range(cfg.size("combinator_exprs")):
        expr = random_small_expr(rng, cfg.combinator_max_points)
        emb = compile_expr(expr)
        pts = points(expr)
        images = [emb(p) for p in pts]
        res.cases += 1
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if point_compare(expr, pts[i], pts[j]) >= 0:
                    res.fail(f"points of {expr} not enumerated in increasing order")
                    return
                if altlex_compare(images[i], images[j], validate=False).order is not Order.LESS:
                    res.fail(f"chain audit: {expr} maps {pts[i]!r} >= {pts[j]!r}")
                    break


def _worked_decomposition(rng: np.random.Generator, cfg: SelftestConfig, engine: EngineConfig,
                          res: CriterionResult) -> None:
    f = fn_indicator(1, 0, OMEGA)
    d = decompose(f, engine.stage_budget)
    res.cases = 1
    expected = [fn_constant(1, 1), fn_indicator(1, OMEGA), fn_constant(1, 0)]
    if d.rank != 2:
        res.fail(f"rank {d.rank}, expected 2")
    if len(d.stages) != 3 or not all(fn_equal(a, b) for a, b in zip(d.stages, expected)):
        res.fail("stages differ from (1, indicator of {omega}, 0)")
    if not fn_equal(fn_combine(d.stages[0], d.stages[1], "sub"), f):
        res.fail("f0 - f1 does not rebuild f")
    if not d.ok:
        res.fail("decomposition report has failures")


def _decomposition_suite(rng: np.random.Generator, cfg: SelftestConfig, engine: EngineConfig,
                         res: CriterionResult) -> None:
    for _ in range(cfg.size("decompositions")):
        f = random_function(rng)
        d = decompose(f, engine.stage_budget, strict=False)
        res.cases += 1
        failed = [c.name for c in d.report if not c.passed]
        if failed:
            res.fail(f"{f}: {', '.join(failed)}")


def _monotonicity(rng: np.random.Generator, cfg: SelftestConfig, engine: EngineConfig, res: CriterionResult) -> None:
    for _ in range(cfg.size("monotone_pairs")):
        f0, f1 = random_comparable_pair(rng)
        res.cases += 1
        try:
            compare_decompositions(f0, f1, engine.stage_budget)
        except InvariantViolation as exc:
            res.fail(f"{f0} < {f1}: {exc}")


def _envelope_laws(rng: np.random.Generator, cfg: SelftestConfig, engine: EngineConfig, res: CriterionResult) -> None:
    majorants = cfg.size("envelope_majorants")
    for _ in range(cfg.size("envelope_functions")):
        f = random_function(rng)
        env = usc_envelope(f)
        res.cases += 1
        if not fn_leq(f, env):
            res.fail(f"envelope of {f} is not a majorant")
        if not fn_equal(usc_envelope(env), env):
            res.fail(f"envelope of {f} is not idempotent")
        if is_usc(f) != fn_equal(f, env):
            res.fail(f"USC test of {f} disagrees with the fixpoint")
        lam = omega_power(f.k)
        if fn_eval(env, lam) != max(fn_eval(f, lam), fn_limsup_at(f, lam)):
            res.fail(f"envelope of {f} wrong at the top point")
        for _ in range(majorants):
            g = random_usc_majorant(rng, f)
            if not fn_leq(env, g):
                res.fail(f"envelope of {f} exceeds the USC majorant {g}")
                break


def _usc_index(rng: np.random.Generator, cfg: SelftestConfig, engine: EngineConfig, res: CriterionResult) -> None:
    n_bits = engine.precision
    slack = Fraction(1, 2 ** n_bits)
    zero = fn_constant(1, 0)
    res.cases += 1
    if usc_index_approx(zero, n_bits) != 0:
        res.fail("index of the zero function is not 0")
    for _ in range(cfg.size("usc_pairs")):
        f, g = random_usc_pair(rng)
        res.cases += 1
        cert = usc_order_certificate(f, g, engine.value_bound)
        if cert.kind != "certificate" or cert.order is not Order.LESS:
            res.fail(f"{f} < {g} not certified: {cert.kind}")
            continue
        if box_meets_subgraph(f, cert.box) or not box_meets_subgraph(g, cert.box):
            res.fail(f"box {cert.box.n} does not separate {f} and {g}")
        if usc_index_approx(f, n_bits) > usc_index_approx(g, n_bits) + slack:
            res.fail(f"truncated index of {f} exceeds that of {g}")


def _witnesses(rng: np.random.Generator, cfg: SelftestConfig, engine: EngineConfig, res: CriterionResult) -> None:
    pairs = [random_pair(rng, finite_only=True) for _ in range(cfg.size("witness_pairs"))]
    pairs += [random_tail_pair(rng) for _ in range(cfg.size("witness_tail_pairs"))]
    eps = engine.hausdorff_eps
    for x, y in pairs:
        cmp = altlex_compare(x, y)
        if cmp.order is Order.EQUAL:
            continue
        if cmp.order is Order.GREATER:
            x, y = y, x
        res.cases += 1
        w = witness_between(x, y)
        report = check_witness(x, y, w)
        if not report.ok:
            failed = [p.name for p in report.predicates if not p.passed]
            res.fail(f"witness {w} for {x} < {y} fails {', '.join(failed)}")
        delta = report.delta
        if delta is not None and report.delta.finite_part % 2 == 0 and not fig_member(
                psi_compact(y), l_exclusion_point(y, delta)):
            res.fail(f"figure of {y} lacks its own exclusion point at {delta}")
        fig = psi_compact(x)
        for _, v in iter_values(x, 100):
            if not fig_member(fig, (v, 0)):
                res.fail(f"figure of {x} misses ({v}, 0)")
                break
        for piece in fig.pieces:
            if isinstance(piece, GChain):
                sampled = CompactFig(tuple(Point(piece.value(n), 0) for n in range(64)))
                if hausdorff_distance_approx(CompactFig((piece,)), sampled, eps) > 2 * eps:
                    res.fail(f"chain {piece} not approximated by its first values")


def _evenize(rng: np.random.Generator, cfg: SelftestConfig, engine: EngineConfig, res: CriterionResult) -> None:
    members = [random_member(rng) for _ in range(cfg.size("evenize_members"))]
    images = [evenize(x) for x in members]
    for x, e in zip(members, images):
        res.cases += 1
        if seq_length(e).finite_part % 2:
            res.fail(f"evenize({x}) has odd length {seq_length(e)}")
    for i in range(len(members) - 1):
        a = altlex_compare(members[i], members[i + 1]).order
        b = altlex_compare(images[i], images[i + 1]).order
        if a is not b:
            res.fail(f"evenize reverses {members[i]} and {members[i + 1]}")


Criterion = Callable[[np.random.Generator, SelftestConfig, EngineConfig, CriterionResult], None]

CRITERIA: Tuple[Tuple[str, Criterion, int], ...] = (
    ("order_laws", _order_laws, 1),
    ("oracle_equivalence", _oracle, 1),
    ("combinator_soundness", _combinators, 3),
    ("worked_decomposition", _worked_decomposition, 3),
    ("decomposition_invariants", _decomposition_suite, 3),
    ("monotonicity", _monotonicity, 3),
    ("envelope_laws", _envelope_laws, 1),
    ("usc_index", _usc_index, 1),
    ("hyperspace_witnesses", _witnesses, 1),
    ("evenize", _evenize, 1),
)


def _criterion_seed(seed: int, name: str) -> int:
    return seed * 1_000_003 + zlib.crc32(name.encode())


@contextlib.contextmanager
def inject_fault(fault: str) -> Iterator[None]:
    """Temporarily corrupt the engine; ``parity`` swaps the ordinal parity table."""
    if not fault:
        yield
        return
    if fault != "parity":
        raise ValidationError(f"Unknown fault {fault!r}")
    saved = ordinal._PARITY
    ordinal._PARITY = (Parity.ODD, Parity.EVEN)
    try:
        yield
    finally:
        ordinal._PARITY = saved


def _run_one(name: str, fn: Criterion, exit_code: int, seed: int, cfg: SelftestConfig,
             engine: EngineConfig) -> CriterionResult:
    res = CriterionResult(name, exit_code=exit_code)
    rng = rng_from_seed(_criterion_seed(seed, name))
    start = time.perf_counter()
    try:
        fn(rng, cfg, engine, res)
    except InvariantViolation as exc:
        res.fail(f"invariant violation: {exc}")
        res.exit_code = 3
    except BaireOrderError as exc:
        res.fail(f"{type(exc).__name__}: {exc}")
    res.seconds = time.perf_counter() - start
    logger.info("%-26s %s  cases=%d failures=%d  %.2fs", name, "pass" if res.passed else "FAIL",
                res.cases, len(res.failures), res.seconds)
    return res


def run_selftest(config: SelftestConfig = SelftestConfig(), engine: EngineConfig = DEFAULT_CONFIG,
                 only: Optional[List[str]] = None) -> SelftestReport:
    """
    Run the acceptance criteria.

    The last criterion reruns two cheap ones and checks that the output is
    identical, which is the determinism contract of the command line.

    Parameters
    ----------
    config : SelftestConfig
        Corpus sizes, scale divisor and fault injection.
    engine : EngineConfig
        Seed, budgets and precision.
    only : list of str, optional
        Restrict the run to these criteria.
    """
    selected = [c for c in CRITERIA if only is None or c[0] in only]
    results = []
    with inject_fault(config.fault):
        for name, fn, code in selected:
            results.append(_run_one(name, fn, code, engine.seed, config, engine))
        if only is None or "determinism" in only:
            results.append(_determinism(config, engine))
    return SelftestReport(engine.seed, config.scale, results)


def _determinism(config: SelftestConfig, engine: EngineConfig) -> CriterionResult:
    res = CriterionResult("determinism")
    start = time.perf_counter()
    small = SelftestConfig(scale=max(config.scale, 100))
    runs = []
    for _ in range(2):
        runs.append([_run_one(n, fn, c, engine.seed, small, engine).to_json()
                     for n, fn, c in CRITERIA if n in ("order_laws", "oracle_equivalence", "evenize")])
    res.cases = 1
    if runs[0] != runs[1]:
        res.fail("two runs with the same seed differ")
    res.seconds = time.perf_counter() - start
    return res
