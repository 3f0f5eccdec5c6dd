"""Campaign orchestration: config validation, determinism, caching, caps."""

import json

import pytest

import weilscope.campaign as campaign
from weilscope.campaign import (CHECK_NAMES, SCHEMA_VERSION, CampaignConfig,
                                Unit, campaign_units, config_fields,
                                findings_to_csv, run_campaign, run_single)
from weilscope.errors import ConfigInvalid
from weilscope.findings import SKIPPED

CSV_HEADER = ("p,m,q,check,kind,canonical_s,s_mod_pminus1,"
              "nice,multiplicities,kloosterman_flag")


def small_config(**kw):
    base = dict(characteristics=(2, 3), max_q=16,
                checks=("vanishing", "mod3", "nice_search"))
    base.update(kw)
    return CampaignConfig(**base)


class TestConfig:
    def test_rejects_composite_characteristic(self):
        with pytest.raises(ConfigInvalid):
            CampaignConfig(characteristics=(4,), max_q=8,
                           checks=("vanishing",))

    def test_rejects_empty_characteristics(self):
        with pytest.raises(ConfigInvalid):
            CampaignConfig(characteristics=(), max_q=8, checks=("mod3",))

    def test_rejects_bad_max_q(self):
        for bad in (1, 0, -5, 1 << 25):
            with pytest.raises(ConfigInvalid):
                CampaignConfig(characteristics=(2,), max_q=bad,
                               checks=("mod3",))

    def test_rejects_unknown_check(self):
        with pytest.raises(ConfigInvalid):
            CampaignConfig(characteristics=(2,), max_q=8,
                           checks=("vanishing", "bogus"))

    def test_rejects_bad_parallelism(self):
        with pytest.raises(ConfigInvalid):
            CampaignConfig(characteristics=(2,), max_q=8,
                           checks=("mod3",), parallelism=0)

    def test_normalizes_order_and_duplicates(self):
        config = CampaignConfig(characteristics=(5, 2, 5), max_q=32,
                                checks=("mod3", "vanishing", "mod3"))
        assert config.characteristics == (2, 5)
        assert config.checks == ("vanishing", "mod3")

    def test_record_excludes_execution_details(self):
        config = small_config(parallelism=3, cache_dir="/tmp/x")
        rec = config.to_record()
        assert "parallelism" not in rec and "cache_dir" not in rec

    def test_config_fields(self):
        config = small_config(max_q=27)
        assert config_fields(config) == \
            [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3)]


class TestUnits:
    def test_one_unit_per_class(self):
        config = CampaignConfig(characteristics=(2,), max_q=8,
                                checks=("vanishing",))
        units, capped = campaign_units(config)
        assert capped == []
        # F_2 has an empty exponent range; F_4 and F_8 have 1 and 2 classes
        assert sorted(u.m for u in units) == [2, 3, 3]

    def test_quadra_units_only_even_degrees(self):
        config = CampaignConfig(characteristics=(2,), max_q=256,
                                checks=("quadra",))
        units, _ = campaign_units(config)
        assert units and all(u.m % 2 == 0 for u in units)
        assert all("sub=" in u.variant for u in units)

    def test_vanishing_units_respect_congruence_scope(self):
        # over F_25 only classes with s = 1 (mod 4) are in scope
        config = CampaignConfig(characteristics=(5,), max_q=25,
                                checks=("vanishing",))
        units, _ = campaign_units(config)
        for u in units:
            s = int(u.variant.split("=")[1])
            assert s % (u.p - 1) == 1 % (u.p - 1)
        assert any(u.m == 2 for u in units)

    def test_cap_findings_above_spectrum_cap(self):
        config = CampaignConfig(characteristics=(1021,), max_q=1021,
                                checks=("three_valued",))
        units, capped = campaign_units(config)
        assert units == []
        assert len(capped) == 1
        assert capped[0].kind == SKIPPED
        assert capped[0].payload["capped"] is True

    def test_spectrum_cost_cap_boundary(self):
        # transform cost is q*p*(1 + p*(m - 1)); the cap keeps degree-2
        # fields schedulable through p = 89 and rejects p = 97 upward
        assert campaign._spectrum_ok(89, 2, 89 ** 2)
        assert not campaign._spectrum_ok(97, 2, 97 ** 2)
        # degree-1 fields bind on the size cap first
        assert campaign._spectrum_ok(509, 1, 509)
        assert not campaign._spectrum_ok(521, 1, 521)
        assert campaign._spectrum_ok(2, 14, 2 ** 14)
        assert not campaign._spectrum_ok(2, 15, 2 ** 15)

    def test_cost_capped_field_reports_skip(self):
        findings = campaign.run_single(97, 2, 5, ["three_valued"])
        assert len(findings) == 1
        assert findings[0].kind == SKIPPED
        assert findings[0].payload["capped"] is True
        assert "cost cap" in findings[0].payload["reason"]


class TestRunCampaign:
    def test_smoke_no_alarms(self, tmp_path):
        report = run_campaign(small_config(cache_dir=str(tmp_path)))
        assert report.exit_code == 0
        assert report.findings
        rec = report.to_record()
        assert rec["schema"] == SCHEMA_VERSION
        assert rec["summary"]["alarms"] == 0

    def test_parallel_matches_serial_byte_for_byte(self, tmp_path):
        serial = run_campaign(small_config(
            max_q=32, cache_dir=str(tmp_path / "a")))
        parallel = run_campaign(small_config(
            max_q=32, cache_dir=str(tmp_path / "b"), parallelism=2))
        assert serial.to_json() == parallel.to_json()

    def test_rerun_resumes_from_cache(self, tmp_path, monkeypatch):
        config = small_config(cache_dir=str(tmp_path))
        first = run_campaign(config)

        def boom(*a, **kw):
            raise AssertionError("cache miss: unit was recomputed")

        monkeypatch.setattr(campaign, "_execute_unit", boom)
        second = run_campaign(config)
        assert first.to_json() == second.to_json()

    def test_witness_changes_cache_identity(self, tmp_path):
        plain = run_campaign(small_config(
            max_q=8, checks=("nice_search",), cache_dir=str(tmp_path)))
        rich = run_campaign(small_config(
            max_q=8, checks=("nice_search",), cache_dir=str(tmp_path),
            witness=True))
        witnesses = [f for f in rich.findings if "n_of_v" in f.payload]
        assert witnesses
        assert all("n_of_v" not in f.payload for f in plain.findings)

    def test_no_cache_dir_runs_inline(self):
        report = run_campaign(CampaignConfig(
            characteristics=(3,), max_q=9, checks=("mod3",)))
        assert report.exit_code == 0
        assert all(f.check == "mod3" for f in report.findings)

    def test_full_check_battery_small_range(self, tmp_path):
        config = CampaignConfig(characteristics=(2, 3), max_q=16,
                                checks=CHECK_NAMES,
                                cache_dir=str(tmp_path))
        report = run_campaign(config)
        assert report.exit_code == 0
        seen = {f.check for f in report.findings}
        # every check leaves a trace on this range except quadra's
        # subfield variants, which need m even and a nontrivial class
        assert {"vanishing", "mod3", "three_valued", "uniform_theorem",
                "nice_search", "valuation", "cmpr", "extension",
                "proposition_s3", "proposition_qminus2",
                "identities"} <= seen


class TestCsv:
    def test_header_and_shape(self, tmp_path):
        report = run_campaign(small_config(cache_dir=str(tmp_path)))
        lines = report.to_csv().splitlines()
        assert lines[0] == CSV_HEADER
        width = len(CSV_HEADER.split(","))
        assert len(lines) == len(report.findings) + 1
        for line in lines[1:]:
            assert len(line.split(",")) == width

    def test_nice_rows_carry_profile(self, tmp_path):
        report = run_campaign(CampaignConfig(
            characteristics=(2,), max_q=8, checks=("nice_search",),
            cache_dir=str(tmp_path)))
        rows = [ln for ln in report.to_csv().splitlines()
                if ",WITNESS," in ln]
        assert rows == ["2,3,8,nice_search,WITNESS,3,0,True,0:4;2:4,True"]

    def test_module_level_renderer_matches_report(self, tmp_path):
        report = run_campaign(small_config(cache_dir=str(tmp_path)))
        assert findings_to_csv(report.findings) == report.to_csv()


class TestRunSingle:
    def test_returns_sorted_findings(self, tmp_path):
        findings = run_single(2, 4, 7, ("valuation", "cmpr", "three_valued"),
                              cache_dir=str(tmp_path))
        assert [f.check for f in findings] == \
            sorted(f.check for f in findings)
        assert all(f.canonical == 7 for f in findings)
        assert all(not f.is_alarm for f in findings)

    def test_rejects_unknown_check(self):
        with pytest.raises(ConfigInvalid):
            run_single(2, 3, 3, ("nope",))

    def test_propositions_variants(self):
        findings = run_single(3, 2, 3, ("propositions",))
        assert {f.check for f in findings} == \
            {"proposition_s3", "proposition_qminus2"}


class TestDeterministicJson:
    def test_json_round_trips(self, tmp_path):
        report = run_campaign(small_config(cache_dir=str(tmp_path)))
        parsed = json.loads(report.to_json())
        assert parsed["schema"] == SCHEMA_VERSION
        assert len(parsed["findings"]) == len(report.findings)

    def test_unit_ordering_is_total(self):
        a = Unit(2, 3, "vanishing", "s=3")
        b = Unit(2, 3, "vanishing", "s=5")
        assert sorted([b, a]) == [a, b]
