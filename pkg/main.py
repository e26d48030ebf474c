import argparse
import logging
import os
import sys
from typing import List, Optional

import yaml

from src.boundary import verify_hecke_eigen
from src.cache import ResultCache
from src.cohomology import good_primes
from src.coinvariant_ring import hilbert_check
from src.combinat import stirling_sweep
from src.errors import ToolkitError
from src.invariants import dickson_verify
from src.models import CheckReport
from src.modforms import congruence_suite
from src.reporting import format_check, format_hilbert, format_table, table_row, to_json
from src.verify import build_suites, cached_coinvariants, cached_report, run_suites

DEFAULT_CONFIG = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'config.yaml')


def load_config(config_path=DEFAULT_CONFIG):
    """Load configuration from YAML file."""
    if not os.path.exists(config_path):
        logging.error(f"Config file not found: {config_path}")
        sys.exit(1)

    with open(config_path, 'r', encoding='utf-8') as f:
        try:
            return yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            logging.error(f"Error parsing config file: {e}")
            sys.exit(1)


def setup_logging(log_level, log_file='logs/app.log'):
    """Setup logging configuration."""
    numeric_level = getattr(logging, log_level.upper(), None)
    if not isinstance(numeric_level, int):
        numeric_level = logging.INFO

    log_dir = os.path.dirname(log_file)
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
    logging.basicConfig(
        level=numeric_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_file, encoding='utf-8'),
            logging.StreamHandler()
        ],
        force=True
    )


def parse_range(text: str) -> List[int]:
    """'10..34' -> [10, 12, ..., 34]; a single value is allowed. Odd endpoints are rejected."""
    parts = text.split('..')
    try:
        if len(parts) == 1:
            start = end = int(parts[0])
        elif len(parts) == 2:
            start, end = int(parts[0]), int(parts[1])
        else:
            raise ValueError(text)
    except ValueError:
        raise ToolkitError(f"invalid range '{text}', expected a..b")
    if start > end or start < 2:
        raise ToolkitError(f"invalid range '{text}'")
    if start % 2 or end % 2:
        raise ToolkitError(f"range '{text}' has an odd degree; only even degrees carry the module")
    return list(range(start, end + 1, 2))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=DEFAULT_CONFIG, help="Path to config.yaml")
    output = common.add_mutually_exclusive_group()
    output.add_argument('--json', dest='output', action='store_const', const='json', help="Emit machine-readable JSON")
    output.add_argument('--text', dest='output', action='store_const', const='text', help="Emit text reports (default)")
    common.set_defaults(output='text')
    common.add_argument('--cache-dir', help="Cache directory (overrides env and config)")
    common.add_argument('--no-cache', action='store_true', help="Disable the result cache")
    common.add_argument('--verify-cache', action='store_true', help="Recompute cache hits and compare")
    common.add_argument('--seed', type=int, default=0, help="Seed for sampled spot checks")
    common.add_argument('--debug', action='store_true', help="Enable debug logging")

    parser = argparse.ArgumentParser(description="Torsion in SL2(Z) cohomology, Dickson invariants and congruences")
    sub = parser.add_subparsers(dest='command', required=True)

    table = sub.add_parser('table', parents=[common], help="Torsion tables per even degree")
    table.add_argument('--range', default='10..10')

    hecke = sub.add_parser('hecke-verify', parents=[common], help="Hecke eigenvalues on boundary cohomology")
    hecke.add_argument('--p', type=int, required=True)
    hecke.add_argument('--range', required=True)

    dickson = sub.add_parser('dickson-verify', parents=[common], help="Invariance of the lifted Dickson forms")
    dickson.add_argument('--p', type=int, required=True)
    dickson.add_argument('--delta', type=int, default=1)

    hilbert = sub.add_parser('hilbert', parents=[common], help="Hilbert series of the coinvariants")
    hilbert.add_argument('--p', type=int, required=True)
    hilbert.add_argument('--delta', type=int, default=1)
    hilbert.add_argument('--dmax', type=int, default=60)

    congruences = sub.add_parser('congruences', parents=[common], help="Eisenstein congruences from boundary torsion")
    congruences.add_argument('--range', default='10..10')
    congruences.add_argument('--pmax', type=int)

    stirling = sub.add_parser('stirling', parents=[common], help="Stirling number valuation sweeps")
    stirling.add_argument('--p', type=int, required=True)
    stirling.add_argument('--delta', type=int, default=1)
    stirling.add_argument('--nmax', type=int)

    verify = sub.add_parser('verify-all', parents=[common], help="Run every check suite")
    verify.add_argument('--p', type=int)
    verify.add_argument('--delta', type=int)
    verify.add_argument('--fail-fast', action='store_true')
    return parser


def _emit_checks(reports: List[CheckReport], as_json: bool) -> int:
    if as_json:
        print(to_json([report.to_dict() for report in reports]))
    else:
        for report in reports:
            print(format_check(report))
    return 0 if all(report.ok for report in reports) else 1


def run_command(args, config) -> int:
    cache = ResultCache.from_config(config, cache_dir=args.cache_dir, no_cache=args.no_cache,
                                    verify=args.verify_cache)
    defaults = config.get('defaults', {})
    as_json = args.output == 'json'

    if args.command == 'table':
        rows = [table_row(cached_report(cache, n), good_primes(n).primes) for n in parse_range(args.range)]
        print(format_table(rows, as_json=as_json))
        return 0

    if args.command == 'hecke-verify':
        return _emit_checks([verify_hecke_eigen(args.p, n) for n in parse_range(args.range)], as_json)

    if args.command == 'dickson-verify':
        return _emit_checks([dickson_verify(args.p, args.delta)], as_json)

    if args.command == 'hilbert':
        report = hilbert_check(args.p, args.delta, args.dmax, cached_coinvariants(cache, args.p, args.delta))
        print(format_hilbert(report, as_json=as_json))
        return 0 if report.ok else 1

    if args.command == 'congruences':
        ells = {int(n): v for n, v in defaults.get('congruence_ells', {}).items()}
        p_max = args.pmax or defaults.get('pmax', 100)
        det_pmax = args.pmax or defaults.get('det_pmax', 50)
        reports = []
        for n in parse_range(args.range):
            reports.append(congruence_suite(n, ells.get(n, good_primes(n).primes), p_max, det_pmax))
        return _emit_checks(reports, as_json)

    if args.command == 'stirling':
        return _emit_checks([stirling_sweep(args.p, args.delta, args.nmax)], as_json)

    if args.command == 'verify-all':
        compute = config.get('compute', {})
        suites = build_suites(config, cache, p=args.p, delta=args.delta, seed=args.seed)
        stats = run_suites(suites, workers=compute.get('workers', 4), timeout=compute.get('suite_timeout'),
                           fail_fast=args.fail_fast)
        if as_json:
            print(to_json({'passed': stats['passed'], 'failed': stats['failed'], 'timeout': stats['timeout'],
                           'first_failure': stats['first_failure'],
                           'reports': [report.to_dict() for report in stats['reports']]}))
        else:
            for report in sorted(stats['reports'], key=lambda r: r.name):
                print(format_check(report))
        if stats['first_failure']:
            logging.error(f"First failure: {stats['first_failure']}")
        return 0 if not stats['failed'] and not stats['timeout'] else 1

    raise ToolkitError(f"unknown command {args.command}")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = load_config(args.config)

    app = config.get('app', {})
    log_level = 'DEBUG' if args.debug else app.get('log_level', 'INFO')
    setup_logging(log_level, app.get('log_file', 'logs/app.log'))
    logging.info(f"Starting {app.get('name', 'sl2-torsion')} v{app.get('version', '?')}: {args.command}")

    try:
        code = run_command(args, config)
    except ToolkitError as e:
        logging.error(f"{e}")
        return 2
    except Exception:
        logging.exception("An unexpected error occurred:")
        return 1
    logging.info(f"Finished {args.command} with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
