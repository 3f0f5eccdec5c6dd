"""Findings cache: canonical JSON, round-trips, and corruption detection."""

import json
import os
from fractions import Fraction

import numpy as np
import pytest

from weilscope.cache import (ENV_VAR, CacheCorrupt, cache_get, cache_put,
                             canonical_json, default_cache_dir)
from weilscope.findings import Finding

KEY = ["test", 2, 4, "vanishing", False]

FINDINGS = [
    Finding(kind="PASS", check="vanishing", p=2, m=4, canonical=7,
            field="p=2 m=4", payload={"note": "ok"}),
    Finding(kind="WITNESS", check="vanishing", p=2, m=4, canonical=3,
            field="p=2 m=4", payload={"a": 5, "value": "0"}),
]


class TestCanonicalJson:
    def test_sorted_and_compact(self):
        assert canonical_json({"b": 1, "a": [2, 3]}) == '{"a":[2,3],"b":1}'

    def test_numpy_and_fraction_coercion(self):
        text = canonical_json({
            "flag": np.bool_(True),
            "n": np.int64(7),
            "arr": np.array([1, 2]),
            "frac": Fraction(3, 2),
        })
        assert json.loads(text) == {
            "flag": True, "n": 7, "arr": [1, 2], "frac": "3/2"}

    def test_deterministic(self):
        a = {"x": {"b": 1, "a": 2}, "y": [1, 2]}
        assert canonical_json(a) == canonical_json(dict(reversed(a.items())))


class TestCacheRoundTrip:
    def test_put_then_get(self, tmp_path):
        path = cache_put(str(tmp_path), KEY, FINDINGS)
        assert os.path.isfile(path)
        got = cache_get(str(tmp_path), KEY)
        assert got is not None
        assert [f.to_record() for f in got] == \
               [f.to_record() for f in FINDINGS]

    def test_miss_returns_none(self, tmp_path):
        assert cache_get(str(tmp_path), KEY) is None
        cache_put(str(tmp_path), KEY, FINDINGS)
        assert cache_get(str(tmp_path), ["other", 1]) is None

    def test_empty_findings_roundtrip(self, tmp_path):
        cache_put(str(tmp_path), KEY, [])
        assert cache_get(str(tmp_path), KEY) == []

    def test_distinct_keys_distinct_files(self, tmp_path):
        p1 = cache_put(str(tmp_path), KEY, FINDINGS)
        p2 = cache_put(str(tmp_path), KEY + ["extra"], FINDINGS)
        assert p1 != p2


class TestCacheCorruption:
    def _entry_path(self, tmp_path):
        return cache_put(str(tmp_path), KEY, FINDINGS)

    def test_garbage_bytes(self, tmp_path):
        path = self._entry_path(tmp_path)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("not json {")
        with pytest.raises(CacheCorrupt):
            cache_get(str(tmp_path), KEY)

    def test_checksum_mismatch(self, tmp_path):
        path = self._entry_path(tmp_path)
        with open(path, encoding="utf-8") as fh:
            record = json.load(fh)
        record["findings"][0]["payload"]["note"] = "tampered"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(record, fh)
        with pytest.raises(CacheCorrupt):
            cache_get(str(tmp_path), KEY)

    def test_key_mismatch(self, tmp_path):
        path = self._entry_path(tmp_path)
        other = cache_put(str(tmp_path), ["other key"], FINDINGS)
        os.replace(other, path)
        with pytest.raises(CacheCorrupt):
            cache_get(str(tmp_path), KEY)

    def test_missing_fields(self, tmp_path):
        path = self._entry_path(tmp_path)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"key": None}, fh)
        with pytest.raises(CacheCorrupt):
            cache_get(str(tmp_path), KEY)


class TestDefaultDir:
    def test_env_var_name(self):
        assert ENV_VAR == "WEILSCOPE_CACHE"

    def test_default_mentions_package(self):
        assert "weilscope" in default_cache_dir()
