import pytest

from src.cache import ResultCache, cache_key, cached_structure, canonical_json
from src.errors import CacheMismatchError
from src.models import AbelianGroupStructure


class Counter:
    def __init__(self, value):
        self.value = value
        self.calls = 0

    def __call__(self):
        self.calls += 1
        return self.value


def test_key_ignores_parameter_order():
    assert cache_key('h1', {'n': 10, 'p': 5}, 1) == cache_key('h1', {'p': 5, 'n': 10}, 1)
    assert cache_key('h1', {'n': 10}, 1) != cache_key('h1', {'n': 10}, 2)
    assert canonical_json({'b': 1, 'a': [1, 2]}) == '{"a":[1,2],"b":1}'


def test_miss_then_hit(tmp_path):
    cache = ResultCache(str(tmp_path))
    compute = Counter({'torsion': [4]})
    assert cache.get_or_compute('h1', {'n': 10}, compute) == {'torsion': [4]}
    assert cache.get_or_compute('h1', {'n': 10}, compute) == {'torsion': [4]}
    assert compute.calls == 1
    assert cache.stats == {'hits': 1, 'misses': 1, 'corrupt': 0}
    assert not list(tmp_path.glob('*.tmp'))


def test_corrupt_entry_is_recomputed(tmp_path, caplog):
    cache = ResultCache(str(tmp_path))
    compute = Counter([1, 2, 3])
    cache.get_or_compute('op', {}, compute)
    path, = tmp_path.glob('*.json')
    path.write_text('{"key": truncated', encoding='utf-8')
    assert cache.get_or_compute('op', {}, compute) == [1, 2, 3]
    assert compute.calls == 2
    assert cache.stats['corrupt'] == 1
    assert 'Discarding corrupt cache entry' in caplog.text


def test_entry_from_other_version_is_discarded(tmp_path):
    ResultCache(str(tmp_path), version=1).get_or_compute('op', {}, Counter(1))
    newer = ResultCache(str(tmp_path), version=2)
    compute = Counter(2)
    assert newer.get_or_compute('op', {}, compute) == 2
    assert compute.calls == 1


def test_verify_detects_stale_value(tmp_path):
    ResultCache(str(tmp_path)).get_or_compute('op', {'n': 1}, Counter('old'))
    checking = ResultCache(str(tmp_path), verify=True)
    with pytest.raises(CacheMismatchError):
        checking.get_or_compute('op', {'n': 1}, Counter('new'))
    assert checking.get_or_compute('op', {'n': 1}, Counter('old')) == 'old'


def test_disabled_cache_always_computes(tmp_path):
    cache = ResultCache(str(tmp_path), enabled=False)
    compute = Counter(7)
    cache.get_or_compute('op', {}, compute)
    cache.get_or_compute('op', {}, compute)
    assert compute.calls == 2
    assert not list(tmp_path.iterdir())


def test_directory_precedence(tmp_path, monkeypatch):
    config = {'cache': {'directory': str(tmp_path / 'config'), 'env_override': 'TEST_CACHE_DIR'}}
    monkeypatch.delenv('TEST_CACHE_DIR', raising=False)
    assert ResultCache.from_config(config).directory == tmp_path / 'config'
    monkeypatch.setenv('TEST_CACHE_DIR', str(tmp_path / 'env'))
    assert ResultCache.from_config(config).directory == tmp_path / 'env'
    flag = ResultCache.from_config(config, cache_dir=str(tmp_path / 'flag'))
    assert flag.directory == tmp_path / 'flag'
    assert not ResultCache.from_config(config, no_cache=True).enabled


def test_structures_survive_the_cache(tmp_path):
    cache = ResultCache(str(tmp_path))
    structure = AbelianGroupStructure(free_rank=1, torsion=(2, 12))
    first = cached_structure(cache, 'h2', {'n': 22}, lambda: structure)
    second = cached_structure(cache, 'h2', {'n': 22}, lambda: AbelianGroupStructure(0))
    assert first == second == structure
