"""
Command line reports and exit codes.
"""

import json

from baireorder import __version__
from baireorder.cli import main
from baireorder.ordinal import OMEGA, Ordinal

BELOW_OMEGA = '{"k": 1, "prefix": ["1", "1"], "rep": "1", "top": "0"}'


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_cmp_report(capsys):
    """cmp prints order, delta and parity."""
    code, report = _run(capsys, "cmp", '["1/2", "0"]', '["3/4", "0"]')
    assert code == 0
    assert report["version"] == __version__
    assert report["order"] == "less"
    assert report["delta"] == []
    assert report["parity"] == "even"


def test_cmp_delta_is_a_json_ordinal(capsys):
    """delta is printed as a CNF term list, not a string, and reads back."""
    x = '{"segments": [{"tail": {"start": "1", "limit": "1/2"}}, {"finite": ["1/2", "0"]}]}'
    y = '{"segments": [{"tail": {"start": "1", "limit": "1/2"}}, {"finite": ["1/4", "0"]}]}'
    code, report = _run(capsys, "cmp", x, y)
    assert code == 0
    assert report["order"] == "greater"
    assert report["delta"] == [[1, 1]]
    assert Ordinal.from_json(report["delta"]) == OMEGA


def test_cmp_equal_sequences(capsys):
    """Equal sequences have no delta."""
    code, report = _run(capsys, "cmp", '["1/2", "0"]', '["1/2", "0"]')
    assert code == 0
    assert report["order"] == "equal"
    assert report["delta"] is None


def test_decompose_report(capsys):
    """The worked example prints rank 2 and a passing check report."""
    code, report = _run(capsys, "decompose", BELOW_OMEGA)
    assert code == 0
    assert report["rank"] == [[0, 2]]
    assert len(report["stages"]) == 3


def test_invalid_input_exit_code(capsys):
    """Malformed sequences exit with 1 and name the error."""
    code, report = _run(capsys, "cmp", '["1/2", "3/4", "0"]', '["1/2", "0"]')
    assert code == 1
    assert report["error"] == "SequenceValidationError"


def test_missing_file_exit_code(capsys, tmp_path):
    """A path that does not exist is a validation error."""
    code, report = _run(capsys, "canon", str(tmp_path / "missing.json"))
    assert code == 1
    assert "not found" in report["message"]


def test_budget_exit_code(capsys):
    """A budget that is too small exits with 2 and prints the partial trace."""
    code, report = _run(capsys, "--budget", "1", "decompose", BELOW_OMEGA)
    assert code == 2
    assert report["error"] == "BudgetExceeded"
    assert report["trace"]["stages"]


def test_witness_then_check(capsys):
    """A printed witness passes check-witness."""
    x, y = '["1/2", "0"]', '["3/4", "0"]'
    code, report = _run(capsys, "witness", x, y)
    assert code == 0
    assert report["check"]["ok"] is True
    code, checked = _run(capsys, "check-witness", x, y, json.dumps(report["witness"]))
    assert code == 0
    assert checked["ok"] is True
    code, checked = _run(capsys, "check-witness", x, y, '["7/8", "0"]')
    assert code == 1
    assert checked["ok"] is False


def test_verify_chain(capsys):
    """Increasing chains pass; a misordered pair is reported."""
    code, report = _run(capsys, "verify-chain", '[["1/2", "0"], ["3/4", "0"]]')
    assert code == 0 and report["ok"] is True
    code, report = _run(capsys, "verify-chain", '[["3/4", "0"], ["1/2", "0"]]')
    assert code == 1
    assert (report["i"], report["j"]) == (0, 1)


def test_out_file(capsys, tmp_path):
    """--out writes the report to a file instead of stdout."""
    target = tmp_path / "report.json"
    code = main(["--out", str(target), "evenize", '["0"]'])
    assert code == 0
    assert capsys.readouterr().out == ""
    report = json.loads(target.read_text(encoding="utf-8"))
    assert report["length"] == "2"


def test_selftest_fault_injection(capsys, tmp_path):
    """An injected parity fault is caught with exit code 3; the table is written."""
    table = tmp_path / "criteria.csv"
    code, report = _run(capsys, "selftest", "--scale", "1000", "--inject-fault", "parity", "--table", str(table))
    assert code == 3
    assert report["passed"] is False
    assert table.read_text(encoding="utf-8").startswith("criterion,passed,cases,failures,seconds")


def test_selftest_output_is_deterministic(capsys):
    """Two runs with the same seed print identical bytes."""
    main(["--seed", "7", "selftest", "--scale", "1000"])
    first = capsys.readouterr().out
    main(["--seed", "7", "selftest", "--scale", "1000"])
    assert capsys.readouterr().out == first
