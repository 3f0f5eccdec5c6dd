"""Content-addressed result cache for campaign findings.

Each record holds the findings of one work unit, keyed by the unit
identity (field, check, variant, witness flag). Records carry a checksum
of their canonical JSON payload; writes go through a temp file and an
atomic rename, so a killed campaign never leaves a partial record and a
rerun picks up exactly where it stopped.
"""

from __future__ import annotations

import hashlib
import json
import numbers
import os
import tempfile
from fractions import Fraction

import numpy as np

from .errors import CacheCorrupt
from .findings import Finding, finding_from_record

ENV_VAR = "WEILSCOPE_CACHE"


def default_cache_dir() -> str:
    """WEILSCOPE_CACHE when set, else ~/.cache/weilscope."""
    env = os.environ.get(ENV_VAR)
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "weilscope")


def _coerce(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)!r}")


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, no whitespace, numpy coerced."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      default=_coerce)


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _record_path(cache_dir: str, key) -> str:
    return os.path.join(cache_dir, _digest(canonical_json(list(key))) + ".json")


def cache_put(cache_dir: str, key, findings: list[Finding]) -> str:
    """Atomically store the findings of one work unit; returns the path."""
    os.makedirs(cache_dir, exist_ok=True)
    body = json.loads(canonical_json([f.to_record() for f in findings]))
    record = {"key": list(key), "findings": body,
              "checksum": _digest(canonical_json(body))}
    path = _record_path(cache_dir, key)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(canonical_json(record))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def cache_get(cache_dir: str, key) -> list[Finding] | None:
    """Stored findings for the key, None on a miss, CacheCorrupt on damage."""
    path = _record_path(cache_dir, key)
    if not os.path.exists(path):
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            record = json.load(fh)
    except (OSError, ValueError) as exc:
        raise CacheCorrupt(f"unreadable cache record {path}: {exc}") from exc
    if not isinstance(record, dict) or "findings" not in record:
        raise CacheCorrupt(f"malformed cache record {path}")
    if record.get("key") != list(key):
        raise CacheCorrupt(f"key mismatch in cache record {path}")
    if record.get("checksum") != _digest(canonical_json(record["findings"])):
        raise CacheCorrupt(f"checksum mismatch in cache record {path}")
    try:
        return [finding_from_record(r) for r in record["findings"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise CacheCorrupt(f"undecodable findings in {path}: {exc}") from exc
