import threading

from src.cache import ResultCache
from src.errors import PreconditionError
from src.models import CheckReport
from src.verify import (adjointness_check, build_suites, cached_report, hecke_suite, primitive_suite, run_suites,
                        torsion_table_suite)


def passing():
    report = CheckReport(name="passing")
    report.rows.append({'ok': True})
    return report


def failing():
    report = CheckReport(name="failing")
    report.fail("broken on purpose")
    return report


def raising():
    raise PreconditionError("bad parameter")


def test_runner_counts_outcomes():
    stats = run_suites([('a', passing), ('b', failing), ('c', raising)], workers=2)
    assert stats['passed'] == 1
    assert stats['failed'] == 2
    assert stats['timeout'] == 0
    assert len(stats['reports']) == 2
    assert stats['first_failure'] in ("b: broken on purpose", "c: bad parameter")
    assert all('seconds' in report.details for report in stats['reports'])


def test_runner_fail_fast_skips_the_rest():
    release = threading.Event()

    def slow():
        release.wait(5)
        return passing()

    stats = run_suites([('bad', failing), ('slow', slow)], workers=1, fail_fast=True)
    release.set()
    assert stats['failed'] == 1
    assert stats['passed'] == 0
    assert stats['first_failure'] == "bad: broken on purpose"


def test_runner_timeout(caplog):
    release = threading.Event()

    def stuck():
        release.wait(5)
        return passing()

    stats = run_suites([('stuck', stuck)], workers=1, timeout=0.1)
    release.set()
    assert stats['timeout'] == 1
    assert stats['passed'] == 0
    assert stats['still_running'] == ['stuck']
    assert 'stuck keeps running in its worker thread' in caplog.text


def test_scoped_suites():
    cache = ResultCache(None)
    names = [name for name, _ in build_suites({}, cache, p=7, delta=1)]
    assert names == ['dickson invariants', 'hilbert series', 'primitive generator', 'stirling numbers']
    names = [name for name, _ in build_suites({}, cache, p=5, delta=3)]
    assert names == ['dickson invariants', 'stirling numbers']


def test_full_suite_names():
    names = [name for name, _ in build_suites({}, ResultCache(None))]
    assert names[:3] == ['torsion tables', 'hecke eigenvalues', 'congruences']
    assert 'divided powers' in names


def test_cached_report_matches_direct_computation(tmp_path):
    cache = ResultCache(str(tmp_path))
    first = cached_report(cache, 22)
    second = cached_report(cache, 22)
    assert first == second
    assert cache.stats['hits'] == 2
    assert first.small_prime_torsion == [2, 3]


def test_torsion_table_suite(tmp_path):
    report = torsion_table_suite(ResultCache(str(tmp_path)), [10, 22])
    assert report.ok, report.failures


def test_hecke_suite_records_obstruction():
    report = hecke_suite([(11, 10)])
    assert report.ok, report.failures
    assert report.details['obstruction']['value'] == 6


def test_adjointness_on_random_words():
    report = adjointness_check(8, 10, seed=3)
    assert report.ok, report.failures


def test_primitive_suite():
    report = primitive_suite([(5, 1)])
    assert report.ok, report.failures


def test_disabled_cache_without_directory():
    assert not ResultCache(None).enabled
