import json
from pathlib import Path

import pandas as pd

from baireorder.combinators import compile_expr, expr_from_json, point_from_json
from baireorder.hyperspace import check_witness, witness_between
from baireorder.kl import FinitaryFunction, decompose
from baireorder.seq import TransfiniteSeq, altlex_compare, ensure_valid, evenize, seq_canonicalize

CASES = Path(__file__).with_name("cases.json")


def _sequence(data):
    return ensure_valid(TransfiniteSeq.from_json(data))


def _same_sequence(result, expected):
    return seq_canonicalize(result) == seq_canonicalize(TransfiniteSeq.from_json(expected))


def _run_case(case):
    """Return (computed text, passed) for one case."""
    op, args, expected = case["op"], case["args"], case["expected"]
    if op == "cmp":
        cmp = altlex_compare(_sequence(args[0]), _sequence(args[1]))
        text = f"{cmp.order.value} at {cmp.delta}"
        return text, text == expected
    if op == "evenize":
        out = evenize(_sequence(args[0]))
        return str(out), _same_sequence(out, expected)
    if op == "decompose":
        d = decompose(FinitaryFunction.from_json(args[0]))
        text = f"rank {d.rank}"
        return text, text == expected and d.ok
    if op == "witness":
        x, y = _sequence(args[0]), _sequence(args[1])
        w = witness_between(x, y)
        return str(w), _same_sequence(w, expected) and check_witness(x, y, w).ok
    if op == "embed":
        expr = expr_from_json(args[0])
        image = compile_expr(expr)(point_from_json(expr, args[1]))
        return str(seq_canonicalize(image)), _same_sequence(image, expected)
    raise ValueError(f"Unknown operation {op!r}")


def run_validation():
    # 1. Load cases
    try:
        cases = json.loads(CASES.read_text(encoding="utf-8"))
    except FileNotFoundError:
        print(f"Error: {CASES} not found.")
        return 1
    print(f"Loaded {len(cases)} cases from {CASES.name}")

    # 2. Run
    rows = []
    for case in cases:
        computed, passed = _run_case(case)
        rows.append({
            "case": case["name"],
            "op": case["op"],
            "expected": case["expected"] if isinstance(case["expected"], str) else ", ".join(case["expected"]),
            "computed": computed,
            "pass": passed,
        })

    # 3. Report
    table = pd.DataFrame(rows)
    print()
    print(table.to_string(index=False))
    print("-" * 55)
    print(f"Passed: {int(table['pass'].sum())}/{len(table)}")
    return 0 if table["pass"].all() else 1


if __name__ == "__main__":
    raise SystemExit(run_validation())
