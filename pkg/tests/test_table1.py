"""Reproduction of the published nice-exponent table over F_11^m."""

import pytest

from weilscope.table1 import (TABLE1_MAX_M, TABLE1_P, TABLE1_ROWS,
                              expected_rows, reproduce_table1)


class TestFixture:
    def test_shape(self):
        assert TABLE1_P == 11
        assert TABLE1_MAX_M == 5
        for m, canonical, congruence, kloosterman, histogram in TABLE1_ROWS:
            assert 1 <= m <= TABLE1_MAX_M
            assert congruence == canonical % (TABLE1_P - 1)
            assert isinstance(kloosterman, bool)
            # the histogram partitions all q output values v
            total = sum(n for _, n in histogram)
            assert total == TABLE1_P ** m

    def test_degree_two_is_empty(self):
        assert all(m != 2 for m, *_ in TABLE1_ROWS)

    def test_expected_rows_filters_by_degree(self):
        assert len(expected_rows(1)) == 2
        assert len(expected_rows(3)) == 4
        assert len(expected_rows(5)) == len(TABLE1_ROWS) == 7


class TestReproduction:
    def test_degrees_up_to_three(self, tmp_path):
        findings = reproduce_table1(cache_dir=str(tmp_path), max_m=3)
        assert len(findings) == 4
        assert all(f.kind == "PASS" for f in findings)
        assert all(f.check == "table1" for f in findings)
        assert {f.canonical for f in findings} == {3, 9, 1209}

    def test_payload_carries_profile(self, tmp_path):
        findings = reproduce_table1(cache_dir=str(tmp_path), max_m=1)
        by_canonical = {f.canonical: f.payload for f in findings}
        assert by_canonical[3]["histogram"] == [[0, 5], [1, 1], [2, 5]]
        assert by_canonical[3]["kloosterman"] is False
        assert by_canonical[9]["kloosterman"] is True

    def test_prime_field_rows_match(self, tmp_path):
        # degree 1 alone: 3 and 9 are the only nice exponents mod 11
        findings = reproduce_table1(cache_dir=str(tmp_path), max_m=1)
        assert [f.kind for f in findings] == ["PASS", "PASS"]
