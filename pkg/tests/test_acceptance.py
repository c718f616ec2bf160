"""One test per acceptance criterion, at its stated tolerance and runtime budget.

Each test prints a single PASS/FAIL line straight to the terminal.
"""

import pytest

from qortho.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", [c.number for c in CRITERIA], ids=[c.name.replace(" ", "_") for c in CRITERIA])
def test_criterion(number, capsys):
    result = run_criterion(number)
    with capsys.disabled():
        print("\n" + result.line())
    report = result.report
    ok = bool(report.passed)
    assert ok, f"max residual {report.max_residual:.3g} > tol {report.tolerance:.0e} at {report.worst_point}"
    assert result.in_budget, f"{result.seconds:.2f}s over budget {result.criterion.budget}s"
