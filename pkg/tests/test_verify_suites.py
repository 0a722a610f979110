import pytest

from otl.verify import SUITES, UnknownSuite, run_suite


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_suite_passes(suite):
    checks = run_suite(suite)
    assert checks
    failed = [f"{c.name}: {c.detail}" for c in checks if not c.passed]
    assert not failed


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite("nope")
