import json

import pytest
import yaml

import main

SMALL_CONFIG = {
    'app': {'name': 'sl2-torsion', 'version': 'test', 'log_level': 'INFO'},
    'cache': {'enabled': True, 'schema_version': 1},
    'compute': {'workers': 2, 'suite_timeout': 600},
    'defaults': {
        'dickson_primes': [5],
        'dickson_deltas': [1],
        'hilbert': [{'p': 5, 'delta': 1, 'dmax': 12}],
        'stirling_primes': [5],
        'stirling_deltas': [1],
        'pmax': 30,
        'det_pmax': 11,
    },
}


@pytest.fixture
def workspace(tmp_path):
    config = dict(SMALL_CONFIG, app=dict(SMALL_CONFIG['app'], log_file=str(tmp_path / 'logs' / 'app.log')))
    path = tmp_path / 'config.yaml'
    path.write_text(yaml.safe_dump(config), encoding='utf-8')
    return tmp_path


def run(workspace, *argv):
    return main.main(list(argv) + ['--config', str(workspace / 'config.yaml'),
                                   '--cache-dir', str(workspace / 'cache')])


def test_parse_range():
    assert main.parse_range('10..16') == [10, 12, 14, 16]
    assert main.parse_range('22') == [22]


@pytest.mark.parametrize("text", ['11..15', '10..13', 'a..b', '20..10', '1..2..3'])
def test_parse_range_rejects(text):
    with pytest.raises(main.ToolkitError):
        main.parse_range(text)


def test_table_json(workspace, capsys):
    assert run(workspace, 'table', '--range', '10..10', '--json') == 0
    rows = json.loads(capsys.readouterr().out)
    assert rows[0]['n'] == 10
    assert rows[0]['h1_primary'] == [4]
    assert rows[0]['h2_primary'] == [2, 2, 3]
    assert rows[0]['good_primes'] == [5, 7]
    assert list((workspace / 'cache').glob('*.json'))


def test_table_text_sorted(workspace, capsys):
    assert run(workspace, 'table', '--range', '10..12') == 0
    out = capsys.readouterr().out
    assert out.index('n = 10') < out.index('n = 12')
    assert 'good primes' in out


def test_odd_degree_is_invalid_input(workspace, capsys):
    assert run(workspace, 'table', '--range', '11..11') == 2


def test_hecke_verify(workspace, capsys):
    assert run(workspace, 'hecke-verify', '--p', '11', '--range', '10..10') == 0
    assert 'PASS' in capsys.readouterr().out


def test_hecke_obstruction_exits_with_failure(workspace, capsys):
    assert run(workspace, 'hecke-verify', '--p', '3', '--range', '24..24', '--json') == 1
    report, = json.loads(capsys.readouterr().out)
    assert 'entry (17,23) is 6 mod 18, expected 0' in report['failures']


def test_small_prime_is_invalid_input(workspace):
    assert run(workspace, 'dickson-verify', '--p', '3') == 2


def test_dickson_json(workspace, capsys):
    assert run(workspace, 'dickson-verify', '--p', '5', '--delta', '2', '--json') == 0
    reports = json.loads(capsys.readouterr().out)
    assert reports[0]['ok']


def test_hilbert(workspace, capsys):
    assert run(workspace, 'hilbert', '--p', '5', '--dmax', '12') == 0


def test_congruences(workspace, capsys):
    assert run(workspace, 'congruences', '--range', '10..10', '--pmax', '30') == 0


def test_stirling(workspace, capsys):
    assert run(workspace, 'stirling', '--p', '5', '--delta', '1') == 0


def test_scoped_verify_all(workspace, capsys):
    assert run(workspace, 'verify-all', '--p', '5', '--delta', '1', '--json', '--fail-fast') == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary['failed'] == 0
    assert summary['timeout'] == 0
    assert summary['passed'] == len(summary['reports'])


def test_missing_config_exits(tmp_path):
    with pytest.raises(SystemExit):
        main.main(['table', '--config', str(tmp_path / 'missing.yaml')])


def test_text_and_json_are_exclusive(workspace):
    with pytest.raises(SystemExit):
        run(workspace, 'stirling', '--p', '5', '--json', '--text')


def test_text_output(workspace, capsys):
    assert run(workspace, 'dickson-verify', '--p', '5', '--text') == 0
    out = capsys.readouterr().out
    assert 'PASS' in out
    assert not out.lstrip().startswith('[')
