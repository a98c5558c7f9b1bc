"""
Redis store for run and comparison payloads.

Entries are the JSON dicts produced by RunResult.to_dict() and ComparisonReport.to_dict(),
keyed by the scenario fingerprint so any change to a scenario field misses the cache.
"""
import redis
import json
import logging
from typing import Any, Optional

import numpy as np

from config import Config

logger = logging.getLogger(__name__)

KEY_PREFIX = 'qmd'


def run_key(path: str, fingerprint: str) -> str:
    return f'{KEY_PREFIX}:run:{path}:{fingerprint}'


def compare_key(fingerprint: str) -> str:
    return f'{KEY_PREFIX}:compare:{fingerprint}'


def _to_json(payload: Any) -> str:
    def numpy_default(obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.integer, np.floating, np.bool_)):
            return obj.item()
        raise TypeError(f"{type(obj).__name__} in a result payload cannot be cached")

    return json.dumps(payload, default=numpy_default)


class ResultCache:
    """Fingerprint-keyed result store; every Redis failure degrades to a cache miss"""

    def __init__(self, host=None, port=None, db=None, enabled=None, ttl=None):
        self.host = host or Config.REDIS_HOST
        self.port = port or Config.REDIS_PORT
        self.db = db if db is not None else Config.REDIS_DB
        self.ttl = ttl or Config.RESULT_CACHE_TTL
        self.redis_client = None
        self.enabled = False
        self.hits = 0
        self.misses = 0

        if enabled is None:
            enabled = Config.CACHE_ENABLED
        if not enabled:
            logger.info("Result cache disabled by configuration")
            return
        self._connect()

    def _connect(self):
        try:
            client = redis.Redis(
                host=self.host,
                port=self.port,
                db=self.db,
                decode_responses=True,
                socket_connect_timeout=2,
                socket_timeout=2
            )
            client.ping()
        except Exception as e:
            logger.warning(f"Result cache unreachable at {self.host}:{self.port} ({e}); results will be recomputed")
            return
        self.redis_client = client
        self.enabled = True
        logger.info(f"Result cache on redis://{self.host}:{self.port}/{self.db}, ttl {self.ttl}s")

    def _load(self, key: str) -> Optional[dict]:
        if not self.enabled:
            return None
        try:
            raw = self.redis_client.get(key)
        except Exception as e:
            logger.error(f"Result cache read failed for {key}: {e}")
            return None
        if raw is None:
            self.misses += 1
            return None
        self.hits += 1
        logger.debug(f"Result cache hit {key}")
        return json.loads(raw)

    def _store(self, key: str, payload: dict) -> bool:
        if not self.enabled:
            return False
        try:
            self.redis_client.setex(key, self.ttl, _to_json(payload))
        except Exception as e:
            logger.error(f"Result cache write failed for {key}: {e}")
            return False
        return True

    def get_run(self, path: str, fingerprint: str) -> Optional[dict]:
        return self._load(run_key(path, fingerprint))

    def put_run(self, path: str, fingerprint: str, payload: dict) -> bool:
        return self._store(run_key(path, fingerprint), payload)

    def get_comparison(self, fingerprint: str) -> Optional[dict]:
        return self._load(compare_key(fingerprint))

    def put_comparison(self, fingerprint: str, payload: dict) -> bool:
        return self._store(compare_key(fingerprint), payload)

    def _matching(self, pattern: str) -> list:
        return list(self.redis_client.scan_iter(match=pattern))

    def _drop(self, pattern: str) -> int:
        if not self.enabled:
            return 0
        try:
            keys = self._matching(pattern)
            deleted = self.redis_client.delete(*keys) if keys else 0
        except Exception as e:
            logger.error(f"Result cache delete failed for {pattern}: {e}")
            return 0
        if deleted:
            logger.info(f"Dropped {deleted} cached results matching {pattern}")
        return deleted

    def invalidate_scenario(self, fingerprint: str) -> int:
        """Drop both runs and the comparison of one scenario"""
        return self._drop(run_key('*', fingerprint)) + self._drop(compare_key(fingerprint))

    def clear_results(self) -> int:
        """Drop every entry under the qmd prefix; other keys in the database are left alone"""
        return self._drop(f'{KEY_PREFIX}:*')

    def get_stats(self) -> dict:
        if not self.enabled:
            return {'enabled': False}

        try:
            runs = {path: len(self._matching(run_key(path, '*'))) for path in ('quantum', 'classical')}
            comparisons = len(self._matching(compare_key('*')))
        except Exception as e:
            logger.error(f"Result cache stats failed: {e}")
            return {'enabled': False, 'error': str(e)}

        lookups = self.hits + self.misses
        return {
            'enabled': True,
            'ttl': self.ttl,
            'runs': runs,
            'comparisons': comparisons,
            'hits': self.hits,
            'misses': self.misses,
            'hit_rate': round(100.0 * self.hits / lookups, 2) if lookups else 0.0
        }


_cache = None


def get_cache() -> ResultCache:
    """Process-wide cache, connected on first use"""
    global _cache
    if _cache is None:
        _cache = ResultCache()
    return _cache


def set_cache(cache: Optional[ResultCache]):
    global _cache
    _cache = cache


if __name__ == '__main__':
    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    cache = ResultCache(enabled=True)
    logger.info(f"Result cache stats: {cache.get_stats()}")
