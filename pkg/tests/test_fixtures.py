from ricciscope.fixtures import FIXTURES, groups, run_fixtures


def test_groups():
    assert groups() == ["core", "ledger-obata", "stiefel"]


def test_all_fixtures_pass():
    results = run_fixtures()
    assert len(results) == len(FIXTURES)
    failed = [r.line() for r in results if not r.passed]
    assert not failed, failed


def test_group_selection():
    results = run_fixtures(["core"])
    assert [r.name for r in results] == ["core.sc-symmetry"]
