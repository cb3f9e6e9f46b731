"""
Caching utilities for expensive deterministic constructions (grids, operator matrices)
"""
import hashlib
import json
import os
import threading
from collections import OrderedDict
from functools import wraps

from pydantic import BaseModel


class SimpleCache:
    """Small in-memory cache with a bounded number of entries (oldest evicted first)"""

    def __init__(self, max_entries=32):
        self.max_entries = max(1, int(max_entries))
        self.cache = OrderedDict()
        self._lock = threading.Lock()
        self.stats = {
            'hits': 0,
            'misses': 0,
            'evictions': 0
        }

    def _generate_key(self, *args, **kwargs):
        """Generate cache key from arguments"""
        key_data = json.dumps({'args': args, 'kwargs': kwargs}, sort_keys=True, default=_jsonable)
        return hashlib.md5(key_data.encode()).hexdigest()

    def get(self, key):
        """Get value from cache"""
        with self._lock:
            if key in self.cache:
                self.cache.move_to_end(key)
                self.stats['hits'] += 1
                return self.cache[key]

            self.stats['misses'] += 1
            return None

    def set(self, key, value):
        """Store value, evicting the least recently used entry when full"""
        with self._lock:
            self.cache[key] = value
            self.cache.move_to_end(key)
            while len(self.cache) > self.max_entries:
                self.cache.popitem(last=False)
                self.stats['evictions'] += 1

    def get_stats(self):
        """Get cache statistics"""
        return {
            **self.stats,
            'size': len(self.cache),
            'hit_rate': self.stats['hits'] / max(self.stats['hits'] + self.stats['misses'], 1)
        }


def _jsonable(obj):
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json")
    if hasattr(obj, "tolist"):
        return obj.tolist()
    raise TypeError(f"cannot build a cache key from {type(obj).__name__}")


# Global cache instance
_cache = SimpleCache(max_entries=int(os.getenv('LAB_CACHE_ENTRIES', '32')))


def cached(func):
    """
    Decorator to memoize a pure function whose result is immutable.

    Arguments must be JSON-serializable (pydantic models and numpy arrays are
    converted). Results are shared between callers, so they must be read-only.
    """
    @wraps(func)
    def wrapper(*args, **kwargs):
        cache_key = _cache._generate_key(func.__module__, func.__qualname__, *args, **kwargs)

        cached_result = _cache.get(cache_key)
        if cached_result is not None:
            return cached_result

        result = func(*args, **kwargs)
        _cache.set(cache_key, result)
        return result

    return wrapper
