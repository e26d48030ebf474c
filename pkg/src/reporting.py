import json
import logging
import os
from typing import Dict, List

from jinja2 import Environment, FileSystemLoader

from .models import CheckReport, CohomologyReport

logger = logging.getLogger(__name__)

TEMPLATE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'templates')

_env = Environment(loader=FileSystemLoader(TEMPLATE_DIR), trim_blocks=False, keep_trailing_newline=True)


def render(template_name: str, **context) -> str:
    return _env.get_template(template_name).render(**context)


def to_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)


def table_row(report: CohomologyReport, good_primes: List[int]) -> Dict:
    return {
        'n': report.n,
        'h1': str(report.h1_interior),
        'h1_torsion': list(report.h1_interior.torsion),
        'h1_primary': report.h1_interior.primary_decomposition(),
        'boundary': str(report.h1_boundary),
        'h2': str(report.h2_compact),
        'h2_torsion': list(report.h2_compact.torsion),
        'h2_primary': report.h2_compact.primary_decomposition(),
        'good_primes': list(good_primes),
        'small_prime_torsion': list(report.small_prime_torsion),
    }


def format_table(rows: List[Dict], as_json: bool = False) -> str:
    """Rows sorted by n; divisor lists are already ascending."""
    rows = sorted(rows, key=lambda row: row['n'])
    if as_json:
        return to_json(rows)
    return render('table.txt.j2', title='Torsion in the cohomology of SL2(Z)', rows=rows)


def format_check(report: CheckReport, as_json: bool = False, max_failures: int = 10) -> str:
    if as_json:
        return to_json(report.to_dict())
    return render('check.txt.j2', report=report, max_failures=max_failures)


def format_hilbert(report: CheckReport, as_json: bool = False) -> str:
    if as_json:
        return to_json(report.to_dict())
    return render('hilbert.txt.j2', report=report)
