"""Content-addressed on-disk cache for computed tensors and free energies."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

ENV_VAR = "C3REC_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "c3recursion"


def cache_key(version: str, kind: str, g: int, n: int, framing: str, order: int) -> str:
    blob = json.dumps({"version": version, "kind": kind, "g": g, "n": n, "framing": framing, "order": order},
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class CacheEntry:
    key: str
    payload: dict
    created_at: float


class ResultCache:
    """One JSON file per key; writes go to a temp file in the same directory and are renamed into place."""

    def __init__(self, root: os.PathLike | str):
        self.root = Path(root)

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> CacheEntry | None:
        path = self._path(key)
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, ValueError):
            return None
        if data.get("key") != key:
            return None
        return CacheEntry(key, data["payload"], data.get("created_at", 0.0))

    def put(self, key: str, payload: dict) -> CacheEntry:
        entry = CacheEntry(key, payload, time.time())
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump({"key": key, "created_at": entry.created_at, "payload": payload}, fh, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise
        return entry
