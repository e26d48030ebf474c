"""
Check suites behind `verify-all` and the thread-pool runner that executes them.
"""
import concurrent.futures
import logging
import random
import time
from typing import Callable, Dict, List, Optional, Tuple

from .boundary import boundary_structure, eigen_obstruction, verify_hecke_eigen
from .cache import ResultCache, cached_structure
from .cohomology import (alpha_consistency_check, fundamental_sequence_check, good_primes, h0_integral,
                         h1_interior, h2_compact)
from .coinvariant_ring import coinvariants_degree, hilbert_check, lemma_pairing_unit, primitive_generator_check
from .combinat import corstir_table, stirling_sweep
from .divpow import DividedPowerElement, divpow_suite, dp_act, nu_order_check, nu_shift_check, pairing
from .errors import ToolkitError
from .invariants import dickson_verify
from .models import CheckReport, CohomologyReport
from .modforms import congruence_suite, eigenvalue_field_check
from .polyspace import S, T, ZZ, HomogeneousPoly, IDENTITY, act

logger = logging.getLogger(__name__)

GOLDEN_TORSION = {
    10: ([4], [2, 2, 3]),
    22: ([2, 3, 4, 4], [2, 2, 2, 3, 3, 4]),
    34: ([2, 2, 3, 3, 4, 4, 4], [2, 2, 2, 2, 3, 3, 4, 8]),
}

# (p, n, j, k, residue, modulus) of the known off-diagonal Hecke entry
HECKE_OBSTRUCTION = (3, 24, 17, 23, 6, 18)

Suite = Tuple[str, Callable[[], CheckReport]]


def cached_report(cache: ResultCache, n: int) -> CohomologyReport:
    """cohomology_report(n) with the two Smith decompositions served from the cache."""
    h0 = h0_integral(n)
    h1 = cached_structure(cache, 'h1_interior', {'n': n}, lambda: h1_interior(n))
    h2 = cached_structure(cache, 'h2_compact', {'n': n}, lambda: h2_compact(n))
    small = sorted({q for q in h1.primes() + h2.primes() if q <= 3})
    return CohomologyReport(n=n, h1_interior=h1, h1_boundary=boundary_structure(n), h2_compact=h2,
                            h0=h0, small_prime_torsion=small)


def cached_coinvariants(cache: ResultCache, p: int, delta: int) -> Callable:
    return lambda d: cached_structure(cache, 'coinvariants_degree', {'p': p, 'delta': delta, 'd': d},
                                      lambda: coinvariants_degree(p, delta, d))


def torsion_table_suite(cache: ResultCache, degrees: List[int]) -> CheckReport:
    report = CheckReport(name="torsion tables")
    for n in degrees:
        row = cached_report(cache, n)
        h1 = row.h1_interior.primary_decomposition()
        h2 = row.h2_compact.primary_decomposition()
        expected = GOLDEN_TORSION.get(n)
        ok = expected is None or (h1, h2) == (expected[0], expected[1])
        if not ok:
            report.fail(f"n={n}: H1_tor {h1}, H2_c {h2}, expected {expected[0]}, {expected[1]}")
        report.rows.append({'n': n, 'h1_primary': h1, 'h2_primary': h2, 'ok': ok})
        report.merge(fundamental_sequence_check(n))
        for ell in good_primes(n).primes[:2]:
            report.merge(alpha_consistency_check(n, ell))
    return report


def hecke_suite(pairs: List[Tuple[int, int]]) -> CheckReport:
    report = CheckReport(name="hecke eigenvalues")
    for p, n in pairs:
        report.merge(verify_hecke_eigen(p, n))
    p, n, j, k, residue, modulus = HECKE_OBSTRUCTION
    value = eigen_obstruction(p, n, j, k)
    if value != residue:
        report.fail(f"obstruction at (p,n,j,k)={(p, n, j, k)} is {value} mod {modulus}, expected {residue}")
    obstruction = verify_hecke_eigen(p, n)
    if obstruction.ok:
        report.fail(f"T_{p} is unexpectedly diagonal in degree {n}")
    report.details = {'obstruction': {'p': p, 'n': n, 'j': j, 'k': k, 'value': value, 'modulus': modulus},
                      'non_diagonal_first': obstruction.details.get('first_failure')}
    return report


def dickson_suite(primes: List[int], deltas: List[int]) -> CheckReport:
    report = CheckReport(name="dickson invariants")
    for p in primes:
        for delta in deltas:
            report.merge(dickson_verify(p, delta))
    return report


def hilbert_suite(cache: ResultCache, specs: List[Dict]) -> CheckReport:
    report = CheckReport(name="hilbert series")
    for entry in specs:
        p, delta, d_max = entry['p'], entry['delta'], entry['dmax']
        report.merge(hilbert_check(p, delta, d_max, cached_coinvariants(cache, p, delta)))
    return report


def _random_word(rng: random.Random, length: int):
    g = IDENTITY
    for _ in range(length):
        g = g @ rng.choice((S, T, T.inverse()))
    return g


def adjointness_check(degree: int, samples: int, seed: int) -> CheckReport:
    """<g f, P> = <f, g P> on random words g in S, T and random f, P over Z."""
    report = CheckReport(name=f"pairing adjointness d={degree}")
    rng = random.Random(seed)
    for _ in range(samples):
        g = _random_word(rng, rng.randint(1, 6))
        f = DividedPowerElement(degree, ZZ, tuple(rng.randint(-5, 5) for _ in range(degree + 1)))
        P = HomogeneousPoly(degree, ZZ, tuple(rng.randint(-5, 5) for _ in range(degree + 1)))
        if pairing(dp_act(g, f), P) != pairing(f, act(g, P)):
            report.fail(f"adjointness fails for {g}")
    report.rows.append({'d': degree, 'samples': samples, 'ok': report.ok})
    return report


def divided_power_suite(p: int, deltas: List[int], seed: int) -> CheckReport:
    report = CheckReport(name="divided powers")
    for delta in deltas:
        report.merge(divpow_suite(p, delta))
    report.merge(adjointness_check(12, 20, seed))
    shifts = [nu_shift_check(24, i) for i in range(25)]
    if not all(shifts):
        report.fail(f"(T - Id) nu_i = (i+1) nu_(i+1) fails at i={shifts.index(False)}")
    report.merge(nu_order_check(12))
    return report


def primitive_suite(pairs: List[Tuple[int, int]]) -> CheckReport:
    report = CheckReport(name="primitive generator")
    for p, delta in pairs:
        report.merge(primitive_generator_check(p, delta))
    if (5, 1) in pairs:
        value = lemma_pairing_unit(5, 1, 1)
        if value != 1:
            report.fail(f"<u_2, f1^4 f2^4 U_1> is {value} mod 5, expected 1")
    return report


def congruences_suite(degrees: List[int], ells: Dict, p_max: int, det_pmax: int) -> CheckReport:
    report = CheckReport(name="congruences")
    for n in degrees:
        report.merge(congruence_suite(n, ells.get(n, []), p_max, det_pmax))
    if not eigenvalue_field_check():
        report.fail("characteristic polynomial of T_2 on S_24 disagrees with the resultant")
    return report


def stirling_suite(primes: List[int], deltas: List[int]) -> CheckReport:
    report = CheckReport(name="stirling numbers")
    for p in primes:
        for delta in deltas:
            report.merge(stirling_sweep(p, delta))
    for p in [p for p in primes if p <= 7]:
        table = corstir_table(p)
        if not table['holds']:
            report.fail(f"Stirling residue trichotomy fails for p={p}")
    return report


def build_suites(config: Dict, cache: ResultCache, p: Optional[int] = None, delta: Optional[int] = None,
                 seed: int = 0) -> List[Suite]:
    """Suites from config defaults; --p/--delta keep only the suites parametrised by them."""
    defaults = config.get('defaults', {})
    dickson_primes = defaults.get('dickson_primes', [5, 7])
    dickson_deltas = defaults.get('dickson_deltas', [1, 2, 3])
    hilbert_specs = defaults.get('hilbert', [{'p': 5, 'delta': 1, 'dmax': 60}, {'p': 7, 'delta': 1, 'dmax': 60},
                                             {'p': 5, 'delta': 2, 'dmax': 130}])
    stirling_primes = defaults.get('stirling_primes', [5, 7, 11])
    stirling_deltas = defaults.get('stirling_deltas', [1, 2, 3])
    primitive_pairs = [(5, 1), (5, 2), (7, 1)]
    scoped = p is not None or delta is not None

    def keep(values, wanted):
        return [v for v in values if wanted is None or v == wanted]

    suites: List[Suite] = []
    if not scoped:
        degrees = defaults.get('table_range', [10, 22, 34])
        pairs = [tuple(pair) for pair in defaults.get('hecke_pairs', [[11, 10], [13, 10], [23, 22], [37, 34]])]
        ells = {int(n): v for n, v in defaults.get('congruence_ells', {10: [5, 7], 22: [5, 7, 11, 13]}).items()}
        suites.append(('torsion tables', lambda: torsion_table_suite(cache, degrees)))
        suites.append(('hecke eigenvalues', lambda: hecke_suite(pairs)))
        suites.append(('congruences', lambda: congruences_suite(defaults.get('congruence_degrees', [10, 22]), ells,
                                                                defaults.get('pmax', 100),
                                                                defaults.get('det_pmax', 50))))
    d_primes, d_deltas = keep(dickson_primes, p), keep(dickson_deltas, delta)
    if d_primes and d_deltas:
        suites.append(('dickson invariants', lambda: dickson_suite(d_primes, d_deltas)))
    specs = [s for s in hilbert_specs if (p is None or s['p'] == p) and (delta is None or s['delta'] == delta)]
    if specs:
        suites.append(('hilbert series', lambda: hilbert_suite(cache, specs)))
    dp_deltas = keep([1, 2], delta)
    if (p is None or p == 5) and dp_deltas:
        suites.append(('divided powers', lambda: divided_power_suite(5, dp_deltas, seed)))
    prim = [pair for pair in primitive_pairs if (p is None or pair[0] == p) and (delta is None or pair[1] == delta)]
    if prim:
        suites.append(('primitive generator', lambda: primitive_suite(prim)))
    s_primes, s_deltas = keep(stirling_primes, p), keep(stirling_deltas, delta)
    if s_primes and s_deltas:
        suites.append(('stirling numbers', lambda: stirling_suite(s_primes, s_deltas)))
    return suites


def _run_one(suite: Callable[[], CheckReport]) -> CheckReport:
    t0 = time.time()
    report = suite()
    report.details = {**report.details, 'seconds': round(time.time() - t0, 2)}
    return report


def run_suites(suites: List[Suite], workers: int = 4, timeout: Optional[float] = None,
               fail_fast: bool = False) -> Dict:
    """
    Run suites on a thread pool; returns counts, per-suite detail lines and the reports.
    A suite still running at the timeout is listed under still_running and finishes in the background.
    """
    stats = {'passed': 0, 'failed': 0, 'timeout': 0, 'details': [], 'first_failure': None, 'reports': [],
             'still_running': []}
    start = time.time()
    executor = concurrent.futures.ThreadPoolExecutor(max_workers=max(1, workers))
    future_to_name = {executor.submit(_run_one, suite): name for name, suite in suites}
    finished = set()

    def record_failure(name: str, message: str):
        stats['failed'] += 1
        stats['details'].append(f"❌ {name}: {message}")
        if stats['first_failure'] is None:
            stats['first_failure'] = f"{name}: {message}"

    try:
        for future in concurrent.futures.as_completed(future_to_name, timeout=timeout):
            name = future_to_name[future]
            finished.add(future)
            try:
                report = future.result()
            except ToolkitError as e:
                logger.error(f"❌ {name}: {e}")
                record_failure(name, str(e))
            except Exception as e:
                logger.exception(f"❌ {name}: unexpected error")
                record_failure(name, f"{type(e).__name__}: {e}")
            else:
                stats['reports'].append(report)
                if report.ok:
                    stats['passed'] += 1
                    stats['details'].append(f"✅ {name}: {len(report.rows)} rows")
                else:
                    record_failure(name, report.failures[0])
            if fail_fast and stats['failed']:
                logger.warning(f"Stopping after first failure in {name}")
                break
    except concurrent.futures.TimeoutError:
        logger.warning(f"⏱️ Suite timeout after {timeout}s")
    for future, name in future_to_name.items():
        if future not in finished:
            if not future.cancel():
                # a running thread cannot be interrupted
                logger.warning(f"⏱️ {name} keeps running in its worker thread, result discarded")
                stats['still_running'].append(name)
            if not fail_fast or not stats['failed']:
                stats['timeout'] += 1
                stats['details'].append(f"⏱️ {name}: Timeout")
    executor.shutdown(wait=False, cancel_futures=True)

    separator = "═" * 60
    logger.info(separator)
    logger.info(f"📊 VERIFICATION REPORT (Total: {time.time() - start:.1f}s)")
    logger.info(separator)
    logger.info(f"✅ Passed:  {stats['passed']} suites")
    logger.info(f"❌ Failed:  {stats['failed']} suites")
    logger.info(f"⏱️ Timeout: {stats['timeout']} suites")
    logger.info("─" * 60)
    for line in stats['details']:
        logger.info(line)
    logger.info(separator)
    return stats
