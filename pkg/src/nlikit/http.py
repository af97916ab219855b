"""Rate limiting and on-disk response caching shared by the API clients."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable


class RateLimiter:
    """Enforce a minimum interval between acquisitions across threads.

    Clock and sleep are injectable so tests can drive a fake clock.
    """

    def __init__(
        self,
        per_second: float,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        if per_second <= 0:
            raise ValueError("per_second must be positive")
        self.interval = 1.0 / per_second
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_allowed: float | None = None

    def acquire(self) -> None:
        # Holding the lock while sleeping intentionally serializes callers.
        with self._lock:
            now = self._clock()
            if self._next_allowed is not None and now < self._next_allowed:
                self._sleep(self._next_allowed - now)
                now = self._next_allowed
            self._next_allowed = now + self.interval


def request_key(endpoint: str, params: dict | None = None) -> str:
    """Canonical cache key: endpoint plus sorted, JSON-encoded parameters."""
    canonical = json.dumps(params or {}, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return f"{endpoint}?{canonical}"


@dataclass(frozen=True)
class CacheEntry:
    request_key: str
    payload: bytes
    fetched_at: str


class DiskCache:
    """Content-addressed response cache: one JSON file per request key.

    Entries never expire; identical keys may be rewritten concurrently
    (last writer wins, payloads are identical by construction).
    """

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path_for(self, key: str) -> Path:
        digest = hashlib.sha256(key.encode("utf-8")).hexdigest()
        return self.root / f"{digest}.json"

    def get(self, key: str) -> CacheEntry | None:
        path = self.path_for(key)
        if not path.exists():
            return None
        obj = json.loads(path.read_text(encoding="utf-8"))
        return CacheEntry(obj["request_key"], obj["payload"].encode("utf-8"), obj["fetched_at"])

    def put(self, key: str, payload: bytes) -> CacheEntry:
        entry = CacheEntry(key, payload, datetime.now(timezone.utc).isoformat())
        obj = {
            "request_key": entry.request_key,
            "payload": payload.decode("utf-8"),
            "fetched_at": entry.fetched_at,
        }
        path = self.path_for(key)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(json.dumps(obj, ensure_ascii=False))
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return entry
