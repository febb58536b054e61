"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` (or `ergodica verify` on
the command line, which executes the same checks).  The whole suite is
budgeted to run in well under a minute.
"""

import pytest

from ergodica.verify import CRITERIA, run_criterion


@pytest.fixture(scope="module")
def results():
    return {i: run_criterion(i) for i in range(1, len(CRITERIA) + 1)}


@pytest.mark.parametrize("index", range(1, len(CRITERIA) + 1),
                         ids=[name for name, _ in CRITERIA])
def test_criterion(results, index):
    r = results[index]
    status = "PASS" if r.passed else "FAIL"
    print(f"criterion {r.index:02d} {r.name}: {status} "
          f"({r.elapsed:.1f}s) - {r.details}")
    assert r.passed, f"criterion {r.index} ({r.name}): {r.details}"


def test_total_runtime_within_budget(results):
    total = sum(r.elapsed for r in results.values())
    print(f"acceptance suite total: {total:.1f}s")
    assert total < 60.0, f"acceptance suite took {total:.1f}s (budget 60s)"
