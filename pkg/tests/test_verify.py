from qswarm.verify import AVOIDANCE_TABLES, run_checks


def test_every_check_passes():
    results = run_checks()
    assert len(results) == 12
    failed = [f"{r.name}: {r.detail}" for r in results if not r.passed]
    assert failed == []


def test_checks_pass_with_another_seed():
    assert all(result.passed for result in run_checks(seed=99))


def test_avoidance_tables_are_disjoint():
    first, second = AVOIDANCE_TABLES.values()
    assert not first & second
    assert len(first | second) == 8
