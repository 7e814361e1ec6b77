"""Acceptance criteria 1-12, one test each.

The scoreboard is printed at the end of the pytest run and also when this
file is executed directly: ``python tests/test_acceptance.py``.
"""

import pytest

from jetchar.acceptance import CHECKS, AcceptanceSuite, SuiteConfig

SCOREBOARD = []


@pytest.fixture(scope="module")
def suite():
    return AcceptanceSuite(SuiteConfig())


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(suite, number):
    res = suite.run(number)
    SCOREBOARD.append(res.line())
    print(res.line())
    assert res.passed, res.line()
    assert res.seconds < 120


if __name__ == "__main__":
    results = AcceptanceSuite(SuiteConfig()).run_all(report=lambda r: print(r.line(), flush=True))
    raise SystemExit(0 if all(r.passed for r in results) else 1)
