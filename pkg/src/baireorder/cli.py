"""
Command line front end.

Every subcommand reads its inputs as JSON (a file path or inline text), runs
one engine operation and prints a JSON report. Ordinals in a report, such as
the ``delta`` of ``cmp``, are JSON lists of CNF terms rather than strings:
0 prints as ``[]`` and omega as ``[[1, 1]]``, which
``Ordinal.from_json`` reads back. Exit codes: 0 success,
1 validation error, 2 budget exceeded, 3 internal invariant violation.
"""

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from . import __version__
from .combinators import (
    compile_expr,
    expr_from_json,
    point_from_json,
    point_to_json,
    points,
    verify_chain,
    verify_embedding,
)
from .config import DEFAULT_CONFIG, EngineConfig, SelftestConfig
from .errors import BaireOrderError, BudgetExceeded, InvariantViolation, ValidationError
from .hyperspace import check_witness, psi_compact, witness_between
from .kl import (
    FinitaryFunction,
    compare_decompositions,
    decompose,
    star_sum,
    theta_compare,
    theta_sequence,
)
from .ordinal import Ordinal, is_even
from .seq import (
    TransfiniteSeq,
    altlex_compare,
    delta_first_difference,
    ensure_valid,
    evenize,
    seq_canonicalize,
    seq_length,
)
from .utils import dump_report, load_payload, require_keys

logger = logging.getLogger("baireorder")


def _sequence(source: str) -> TransfiniteSeq:
    return ensure_valid(TransfiniteSeq.from_json(load_payload(source)))


def _function(source: str) -> FinitaryFunction:
    return FinitaryFunction.from_json(load_payload(source))


def _ordinal_json(alpha: Optional[Ordinal]) -> Any:
    return None if alpha is None else alpha.to_json()


# -- commands ----------------------------------------------------------------------

def cmd_cmp(args: argparse.Namespace, config: EngineConfig) -> dict:
    cmp = altlex_compare(_sequence(args.x), _sequence(args.y))
    return {
        "order": cmp.order.value,
        "delta": _ordinal_json(cmp.delta),
        "parity": None if cmp.parity is None else cmp.parity.value,
    }


def cmd_delta(args: argparse.Namespace, config: EngineConfig) -> dict:
    delta = delta_first_difference(_sequence(args.x), _sequence(args.y))
    return {"delta": delta.to_json(), "delta_text": str(delta)}


def cmd_canon(args: argparse.Namespace, config: EngineConfig) -> dict:
    x = _sequence(args.x)
    return {"sequence": seq_canonicalize(x).to_json(), "length": str(seq_length(x))}


def cmd_evenize(args: argparse.Namespace, config: EngineConfig) -> dict:
    e = evenize(_sequence(args.x))
    return {"sequence": e.to_json(), "length": str(seq_length(e))}


def cmd_embed(args: argparse.Namespace, config: EngineConfig) -> dict:
    expr = expr_from_json(load_payload(args.expr))
    emb = compile_expr(expr)
    if args.point is not None:
        pts = [point_from_json(expr, load_payload(args.point))]
    else:
        pts = points(expr)
    images = [{"point": point_to_json(expr, p), "image": emb(p).to_json()} for p in pts]
    audit = verify_embedding(expr)
    report = {"even": emb.even, "images": images, "verified": audit.ok}
    if not audit.ok:
        report["violation"] = {"i": audit.i, "j": audit.j, "order": audit.comparison.order.value}
    return report


def cmd_decompose(args: argparse.Namespace, config: EngineConfig) -> dict:
    return decompose(_function(args.f), config.stage_budget).to_json()


def cmd_starsum(args: argparse.Namespace, config: EngineConfig) -> dict:
    data = load_payload(args.payload)
    require_keys(data, ["stages", "upto"], "star-sum payload")
    stages = [FinitaryFunction.from_json(s) for s in data["stages"]]
    indices = [Ordinal.from_json(i) for i in data["indices"]] if "indices" in data else None
    total = star_sum(stages, Ordinal.from_json(data["upto"]), indices, data.get("k"))
    return {"sum": total.to_json()}


def cmd_klcmp(args: argparse.Namespace, config: EngineConfig) -> dict:
    result = compare_decompositions(_function(args.f0), _function(args.f1), config.stage_budget)
    return {
        "delta": result.delta.to_json(),
        "delta_text": str(result.delta),
        "parity": "even" if is_even(result.delta) else "odd",
        "stage0": result.stage0.to_json(),
        "stage1": result.stage1.to_json(),
    }


def cmd_theta_cmp(args: argparse.Namespace, config: EngineConfig) -> dict:
    f0, f1 = _function(args.f0), _function(args.f1)
    report = theta_compare(f0, f1, config.stage_budget).to_json()
    if args.images:
        report["images"] = [theta_sequence(f, config.precision, config.stage_budget).to_json() for f in (f0, f1)]
    return report


def cmd_psi(args: argparse.Namespace, config: EngineConfig) -> dict:
    return psi_compact(_sequence(args.x)).to_json()


def cmd_witness(args: argparse.Namespace, config: EngineConfig) -> dict:
    x, y = _sequence(args.x), _sequence(args.y)
    w = witness_between(x, y)
    return {"witness": w.to_json(), "figure": psi_compact(w).to_json(), "check": check_witness(x, y, w).to_json()}


def cmd_check_witness(args: argparse.Namespace, config: EngineConfig) -> dict:
    x, y = _sequence(args.x), _sequence(args.y)
    w = TransfiniteSeq.from_json(load_payload(args.w))
    report = check_witness(x, y, w)
    if not report.ok:
        raise _ReportedFailure(report.to_json(), "Witness fails its checks")
    return report.to_json()


def cmd_verify_chain(args: argparse.Namespace, config: EngineConfig) -> dict:
    data = load_payload(args.chain)
    if not isinstance(data, list):
        raise ValidationError("Chain payload must be a JSON list of sequences")
    audit = verify_chain([ensure_valid(TransfiniteSeq.from_json(s)) for s in data])
    report = {"ok": audit.ok, "length": len(data)}
    if not audit.ok:
        report.update({"i": audit.i, "j": audit.j, "order": audit.comparison.order.value,
                       "delta": _ordinal_json(audit.comparison.delta)})
        raise _ReportedFailure(report, f"Chain is not increasing at positions {audit.i}, {audit.j}")
    return report


def cmd_selftest(args: argparse.Namespace, config: EngineConfig) -> dict:
    from .selftest import run_selftest

    st = SelftestConfig(scale=args.scale, fault=args.inject_fault or "")
    report = run_selftest(st, config)
    if args.table:
        report.to_frame().to_csv(args.table, index=False)
        logger.info("Wrote per-criterion table to %s", args.table)
    out = report.to_json(timings=args.timings)
    if not report.passed:
        raise _ReportedFailure(out, "Self-test failed", report.exit_code)
    return out


class _ReportedFailure(BaireOrderError):
    """A command produced a full report but its outcome is a failure."""

    def __init__(self, report: dict, message: str, exit_code: int = 1):
        super().__init__(message)
        self.report = report
        self.exit_code = exit_code


# -- parser ------------------------------------------------------------------------

COMMANDS: Dict[str, Callable[[argparse.Namespace, EngineConfig], dict]] = {
    "cmp": cmd_cmp,
    "delta": cmd_delta,
    "canon": cmd_canon,
    "evenize": cmd_evenize,
    "embed": cmd_embed,
    "decompose": cmd_decompose,
    "starsum": cmd_starsum,
    "klcmp": cmd_klcmp,
    "theta-cmp": cmd_theta_cmp,
    "psi": cmd_psi,
    "witness": cmd_witness,
    "check-witness": cmd_check_witness,
    "verify-chain": cmd_verify_chain,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="baireorder",
        description="Exact altlex comparisons, embeddings, KL decompositions and hyperspace witnesses.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=DEFAULT_CONFIG.seed, help="seed for generated corpora")
    parser.add_argument("--budget", type=int, default=DEFAULT_CONFIG.stage_budget,
                        help="decomposition steps per round")
    parser.add_argument("--precision", type=int, default=DEFAULT_CONFIG.precision,
                        help="basis boxes used for truncated USC indices")
    parser.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("cmp", "altlex comparison"), ("delta", "first differing index")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("x")
        p.add_argument("y")
    for name, help_text in (("canon", "canonical presentation"), ("evenize", "even-length image"),
                            ("psi", "compact figure")):
        sub.add_parser(name, help=help_text).add_argument("x")

    p = sub.add_parser("embed", help="compile an order expression and check it")
    p.add_argument("expr")
    p.add_argument("--point", default=None, help="embed only this point")

    sub.add_parser("decompose", help="KL decomposition").add_argument("f")
    sub.add_parser("starsum", help="alternating sum of stages").add_argument("payload")
    p = sub.add_parser("klcmp", help="first differing stage of two decompositions")
    p.add_argument("f0")
    p.add_argument("f1")
    p = sub.add_parser("theta-cmp", help="order of the images of two functions")
    p.add_argument("f0")
    p.add_argument("f1")
    p.add_argument("--images", action="store_true", help="include the truncated image sequences")

    p = sub.add_parser("witness", help="separating witness for x < y")
    p.add_argument("x")
    p.add_argument("y")
    p = sub.add_parser("check-witness", help="evaluate the witness predicates")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("w")
    sub.add_parser("verify-chain", help="check a list of sequences is increasing").add_argument("chain")

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--scale", type=int, default=1, help="divide every corpus size by this")
    p.add_argument("--table", type=Path, default=None, help="write a per-criterion CSV table")
    p.add_argument("--timings", action="store_true", help="include timings in the report")
    p.add_argument("--inject-fault", choices=["parity"], default=None, help="corrupt the engine on purpose")
    return parser


def _configure_logging(verbose: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)
    logger.propagate = False


def _emit(report: dict, out: Optional[Path]) -> None:
    text = dump_report({"version": __version__, **report})
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    config = dataclasses.replace(DEFAULT_CONFIG, seed=args.seed, stage_budget=args.budget,
                                 precision=args.precision)
    try:
        if config.stage_budget < 1 or config.precision < 1:
            raise ValidationError("--budget and --precision must be positive")
        report = COMMANDS[args.command](args, config)
    except _ReportedFailure as exc:
        logger.error("%s", exc)
        _emit(exc.report, args.out)
        return exc.exit_code
    except BudgetExceeded as exc:
        logger.error("%s", exc)
        _emit({"error": type(exc).__name__, "message": str(exc), "trace": exc.trace}, args.out)
        return exc.exit_code
    except InvariantViolation as exc:
        logger.error("Internal invariant violated: %s", exc)
        _emit({"error": type(exc).__name__, "message": str(exc), "dump": exc.dump}, args.out)
        return exc.exit_code
    except BaireOrderError as exc:
        logger.error("%s", exc)
        _emit({"error": type(exc).__name__, "message": str(exc)}, args.out)
        return exc.exit_code
    _emit(report, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
