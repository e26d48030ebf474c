"""
Persistent, content-addressed cache for expensive results (mainly Smith decompositions).

One JSON file per entry, named by the sha256 of the canonical (op, params, version) payload.
Writes go through a temporary file and os.replace, so concurrent writers of the same
(deterministic) value are harmless. Unreadable entries are dropped and recomputed.
"""
import hashlib
import json
import logging
import os
import threading
from pathlib import Path
from typing import Callable, Dict, Optional

from .errors import CacheMismatchError
from .models import AbelianGroupStructure, CacheEntry

logger = logging.getLogger(__name__)

DEFAULT_ENV_OVERRIDE = 'SL2TORSION_CACHE_DIR'


def canonical_json(obj: object) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(',', ':'))


def cache_key(op: str, params: Dict, version: int) -> str:
    payload = canonical_json({'op': op, 'params': params, 'version': version})
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


class ResultCache:
    def __init__(self, directory: Optional[str], enabled: bool = True, verify: bool = False, version: int = 1):
        self.directory = Path(directory) if directory else None
        self.enabled = enabled and self.directory is not None
        self.verify = verify
        self.version = version
        self.stats = {'hits': 0, 'misses': 0, 'corrupt': 0}
        self._lock = threading.Lock()
        if self.enabled:
            self.directory.mkdir(parents=True, exist_ok=True)

    @classmethod
    def from_config(cls, config: Dict, cache_dir: Optional[str] = None, no_cache: bool = False,
                    verify: bool = False) -> 'ResultCache':
        """Directory precedence: --cache-dir, then the environment override, then config."""
        settings = config.get('cache', {})
        env_name = settings.get('env_override', DEFAULT_ENV_OVERRIDE)
        directory = cache_dir or os.environ.get(env_name) or settings.get('directory', '.cache')
        enabled = settings.get('enabled', True) and not no_cache
        return cls(directory, enabled=enabled, verify=verify, version=settings.get('schema_version', 1))

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def _count(self, name: str):
        with self._lock:
            self.stats[name] += 1

    def load(self, key: str) -> Optional[CacheEntry]:
        path = self._path(key)
        if not path.exists():
            return None
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
            if data.get('key') != key or data.get('version') != self.version:
                raise ValueError('key or version mismatch')
            return CacheEntry(key=data['key'], op=data['op'], value=data['value'], version=data['version'])
        except (OSError, ValueError, KeyError) as e:
            logger.warning(f"Discarding corrupt cache entry {path.name}: {e}")
            self._count('corrupt')
            try:
                path.unlink()
            except OSError:
                pass
            return None

    def store(self, entry: CacheEntry):
        path = self._path(entry.key)
        tmp = path.with_name(f"{path.name}.{os.getpid()}.{threading.get_ident()}.tmp")
        with open(tmp, 'w', encoding='utf-8') as f:
            f.write(canonical_json(entry.to_dict()) + '\n')
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)

    def get_or_compute(self, op: str, params: Dict, compute: Callable[[], object]) -> object:
        """Return the JSON value for (op, params), computing and storing it on a miss."""
        if not self.enabled:
            return compute()
        key = cache_key(op, params, self.version)
        entry = self.load(key)
        if entry is not None:
            self._count('hits')
            logger.debug(f"cache hit {op} {params}")
            if self.verify:
                fresh = compute()
                if canonical_json(fresh) != canonical_json(entry.value):
                    raise CacheMismatchError(f"cached {op} {params} differs from recomputation")
            return entry.value
        self._count('misses')
        logger.debug(f"cache miss {op} {params}")
        value = compute()
        self.store(CacheEntry(key=key, op=op, value=value, version=self.version))
        return value


def structure_to_json(structure: AbelianGroupStructure) -> Dict:
    return {'free_rank': structure.free_rank, 'torsion': list(structure.torsion), 'modulus': structure.modulus}


def structure_from_json(data: Dict) -> AbelianGroupStructure:
    return AbelianGroupStructure(free_rank=data['free_rank'], torsion=tuple(data['torsion']), modulus=data['modulus'])


def cached_structure(cache: ResultCache, op: str, params: Dict,
                     compute: Callable[[], AbelianGroupStructure]) -> AbelianGroupStructure:
    return structure_from_json(cache.get_or_compute(op, params, lambda: structure_to_json(compute())))
