"""End-to-end acceptance checks, one test per criterion.

Each test runs the bundled check at its stated tolerances and prints a
single ``PASS``/``FAIL`` line. Run ``python3 tests/test_acceptance.py`` for
the same lines plus the per-item evidence without pytest.
"""

import sys

import pytest

from curved_nbody import theorems


def _line(result) -> str:
    status = "PASS" if result.passed else "FAIL"
    failed = "; ".join(i.label for i in result.failures)
    return (f"criterion {result.criterion:2d} {result.theorem:<12s} {status}"
            + (f"  (failed: {failed})" if failed else ""))


@pytest.mark.slow
@pytest.mark.parametrize("theorem", theorems.CRITERIA)
def test_criterion(theorem, capsys):
    result = theorems.run(theorem, seed=0)
    with capsys.disabled():
        print("\n" + _line(result))
    assert result.passed, result.report()


if __name__ == "__main__":
    results = [theorems.run(t, seed=0) for t in theorems.CRITERIA]
    for r in results:
        print(r.report())
    print()
    for r in results:
        print(_line(r))
    sys.exit(0 if all(r.passed for r in results) else 1)
