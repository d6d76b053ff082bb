import pytest

from gronwall.suites import SUITES, format_rows, run_suite


@pytest.fixture(scope="module")
def all_rows():
    return run_suite("all", 1)


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes(name, all_rows):
    rows = [r for r in all_rows if r[0] == name]
    assert len(rows) == len(SUITES[name])
    assert all(r[2] == r[3] for r in rows), format_rows(rows)


def test_discrete_suite_runs_thousand_instances():
    rows = {r[1]: r for r in run_suite("discrete", 7)}
    assert rows["closed_form_equals_brute_force"][2:] == (1000, 1000)


def test_all_is_deterministic(all_rows):
    assert format_rows(run_suite("all", 1)) == format_rows(all_rows)


def test_single_suite_matches_all(all_rows):
    assert run_suite("lattice", 1) == [r for r in all_rows if r[0] == "lattice"]


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope", 0)
