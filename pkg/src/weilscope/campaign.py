"""Verification campaigns over ranges of finite fields.

A campaign enumerates fields p^m <= max_q for the selected characteristics,
expands each selected check into per-class (or per-field) work units, runs
the units through an optional worker pool, and merges the findings into a
deterministic report: findings are sorted by (p, m, canonical, check, kind)
with a canonical-JSON tiebreak, so two runs with the same config produce
byte-identical reports at any parallelism level.

Checks whose cost grows faster than the O(q log q) kernels are capped and
produce field-level SKIPPED findings above the cap instead of silently
shrinking their range.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from io import StringIO
from multiprocessing import Pool
from typing import NamedTuple

from . import differential, spectrum, valuation
from .cache import cache_get, cache_put, canonical_json
from .errors import ConfigInvalid
from .exponents import approx_class, enumerate_classes
from .findings import (COUNTEREXAMPLE, PASS, SKIPPED, WITNESS, Finding)
from .gf import MAX_Q, _is_prime, build_field

SCHEMA_VERSION = 1

CHECK_NAMES = ("vanishing", "mod3", "three_valued", "uniform_theorem",
               "nice_search", "valuation", "cmpr", "quadra", "extension",
               "propositions", "identities")

# cost caps; above them a field-level SKIPPED finding is emitted
_IDENTITY_CAP = 512          # identity batteries touch q x q tables
_CONVOLUTION_CAP = 64        # convolution powers inside the identity battery
_DETERMINANT_CAP = 32        # dense q x q determinants
_SPECTRUM_CAP_PRIME = 512    # exact spectra over F_p cost O(q^2) memory
_SPECTRUM_CAP = 1 << 14      # exact spectra, extension fields
_TRANSFORM_CAP = 1 << 26     # q*p*(1 + p*(m-1)) ops per exact transform
_DENSE_CAP = 1 << 24         # q*p entries for dense value tables
_VAL_MODULUS_CAP = 1 << 26   # p^(m+1) bound of the valuation deep stage


class _FieldKey(NamedTuple):
    # enumerate_classes only reads q and p; this avoids building tables
    q: int
    p: int


class Unit(NamedTuple):
    """One schedulable work item; variant encodes the exponent/subfield."""
    p: int
    m: int
    check: str
    variant: str


@dataclass(frozen=True)
class CampaignConfig:
    characteristics: tuple
    max_q: int
    checks: tuple
    parallelism: int = 1
    cache_dir: str | None = None
    witness: bool = False

    def __post_init__(self):
        chars = tuple(sorted({int(c) for c in self.characteristics}))
        if not chars:
            raise ConfigInvalid("at least one characteristic is required")
        for c in chars:
            if not _is_prime(c):
                raise ConfigInvalid(f"characteristic {c} is not prime")
        object.__setattr__(self, "characteristics", chars)
        if not isinstance(self.max_q, int) or not 2 <= self.max_q <= MAX_Q:
            raise ConfigInvalid(f"max_q must be an integer in [2, {MAX_Q}]")
        unknown = set(self.checks) - set(CHECK_NAMES)
        if unknown:
            raise ConfigInvalid(f"unknown checks: {sorted(unknown)}")
        picked = tuple(c for c in CHECK_NAMES if c in set(self.checks))
        if not picked:
            raise ConfigInvalid("at least one check is required")
        object.__setattr__(self, "checks", picked)
        if not isinstance(self.parallelism, int) or self.parallelism < 1:
            raise ConfigInvalid("parallelism must be a positive integer")

    def to_record(self) -> dict:
        # parallelism and cache_dir are execution details, not result
        # identity; leaving them out keeps reports byte-identical across
        # worker counts
        return {"characteristics": list(self.characteristics),
                "max_q": self.max_q, "checks": list(self.checks),
                "witness": self.witness}


def config_fields(config: CampaignConfig) -> list:
    out = []
    for p in config.characteristics:
        q, m = p, 1
        while q <= config.max_q:
            out.append((p, m))
            q *= p
            m += 1
    return sorted(out)


def _spectrum_cap(m: int) -> int:
    return _SPECTRUM_CAP_PRIME if m == 1 else _SPECTRUM_CAP


def _spectrum_ok(p: int, m: int, q: int) -> bool:
    """Exact spectra are scheduled only below both the size and cost caps."""
    if q > _spectrum_cap(m):
        return False
    return q * p * (1 + p * (m - 1)) <= _TRANSFORM_CAP


def _valuation_ok(p: int, m: int, q: int) -> bool:
    if q * p > _DENSE_CAP:
        return False
    return p == 2 or p ** (m + 1) <= _VAL_MODULUS_CAP


def _cap_finding(p: int, m: int, check: str, reason: str) -> Finding:
    return Finding(kind=SKIPPED, check=check, p=p, m=m, canonical=0,
                   field=f"p={p} m={m}",
                   payload={"reason": reason, "capped": True})


def campaign_units(config: CampaignConfig):
    """(work units, cap findings decided without running anything)."""
    units, capped = [], []
    for p, m in config_fields(config):
        q = p ** m
        memo = {}

        def classes():
            # enumeration costs O(q) per field; skip it entirely when every
            # selected check is capped for this field
            if "classes" not in memo:
                memo["classes"] = enumerate_classes(_FieldKey(q=q, p=p))
            return memo["classes"]

        def canonicals():
            return [c.canonical for c in classes()]

        for check in config.checks:
            if check == "propositions":
                units.append(Unit(p, m, check, "s3"))
                units.append(Unit(p, m, check, "qm2"))
            elif check == "nice_search":
                units.extend(Unit(p, m, check, f"s={s}")
                             for s in (c.canonical for c in classes()
                                       if not c.is_trivial))
            elif check in ("vanishing", "mod3"):
                if q * p > _DENSE_CAP:
                    capped.append(_cap_finding(
                        p, m, check, "q*p exceeds the dense value-table cap"))
                else:
                    # the claims are scoped to s = 1 (mod p-1), a class
                    # invariant; other classes would only produce SKIPPED
                    units.extend(Unit(p, m, check, f"s={s}")
                                 for s in (c.canonical for c in classes()
                                           if c.congruence == 1 % (p - 1)))
            elif check in ("three_valued", "uniform_theorem"):
                if not _spectrum_ok(p, m, q):
                    capped.append(_cap_finding(
                        p, m, check, "beyond the exact-spectrum cost cap"))
                else:
                    units.extend(Unit(p, m, check, f"s={s}")
                                 for s in canonicals())
            elif check == "identities":
                if q > _IDENTITY_CAP:
                    capped.append(_cap_finding(
                        p, m, check, "q exceeds the identity-battery cap"))
                else:
                    units.extend(Unit(p, m, check, f"s={s}")
                                 for s in canonicals())
            elif check in ("valuation", "cmpr"):
                if not _valuation_ok(p, m, q):
                    capped.append(_cap_finding(
                        p, m, check, "beyond the valuation cost cap"))
                else:
                    units.extend(Unit(p, m, check, f"s={s}")
                                 for s in canonicals())
            elif check == "extension":
                if not _valuation_ok(p, m, q):
                    capped.append(_cap_finding(
                        p, m, check, "beyond the valuation cost cap"))
                    continue
                for mk in range(1, m):
                    if m % mk:
                        continue
                    units.extend(Unit(p, m, check, f"s={s};sub={mk}")
                                 for s in canonicals())
            elif check == "quadra":
                if m % 2:
                    continue  # no half-degree subfield exists
                if not _valuation_ok(p, m, q):
                    capped.append(_cap_finding(
                        p, m, check, "beyond the valuation cost cap"))
                    continue
                q_k = p ** (m // 2)
                for s in range(q_k, q - 1, q_k - 1):
                    if math.gcd(s, q - 1) == 1:
                        units.append(Unit(p, m, check, f"s={s};sub={m // 2}"))
    return units, capped


# ---------------------------------------------------------------------------
# unit execution


@lru_cache(maxsize=3)
def _field(p: int, m: int):
    return build_field(p, m)


def _three_valued_finding(fld, s: int) -> Finding:
    base = dict(check="three_valued", p=fld.p, m=fld.m,
                field=fld.descriptor(),
                canonical=spectrum._class_canonical(fld, s))
    floor, rational = spectrum.reduced_value_summary(fld, s)
    if floor > 3:
        # more distinct values than three, exactly floor of them when the
        # spectrum is rational; skips the costly value construction
        key = "distinct_values" if rational else "distinct_values_floor"
        return Finding(kind=PASS, payload={
            "three_valued": False, key: floor}, **base)
    spec_obj = spectrum.full_spectrum(fld, s)
    rep = spectrum.three_valued_report(fld, s, spec_obj)
    if rep is None:
        return Finding(kind=PASS, payload={
            "three_valued": False,
            "distinct_values": len(spec_obj.reduced)}, **base)
    if rep.consistent:
        return Finding(kind=WITNESS, payload={
            "three_valued": True, "report": rep.to_record()}, **base)
    payload = {"three_valued": True, "report": rep.to_record(),
               "spectrum": spec_obj.to_record()["reduced"]}
    return Finding(kind=COUNTEREXAMPLE, payload=payload, **base)


def _identities_finding(fld, s: int) -> Finding:
    """Battery of exact spectral identities for one class."""
    p, q, m = fld.p, fld.q, fld.m
    ran, skipped, failures = [], [], []

    def run(name, fn):
        ran.append(name)
        if not fn():
            failures.append(name)

    for b in (2, 3):
        if b < q:
            run(f"scaling_b{b}",
                lambda b=b: spectrum.verify_scaling_law(fld, s, b))
    if p > 2:
        for r in sorted({2, p - 1}):
            run(f"galois_r{r}",
                lambda r=r: spectrum.verify_galois_law(fld, s, r))
    run("algebraic_degree", lambda: spectrum.verify_algebraic_degree(fld, s))
    run("poisson_1", lambda: spectrum.verify_poisson(fld, s, [1]))
    if m >= 2:
        run("poisson_2", lambda: spectrum.verify_poisson(fld, s, [1, 2]))
    run("parseval", lambda: spectrum.moment_exact(fld, s, 2) == q * q)
    run("third_moment",
        lambda: differential.verify_third_moment_link(fld, s))
    run("fourth_moment",
        lambda: differential.verify_fourth_moment_link(fld, s))
    if q <= _CONVOLUTION_CAP:
        run("annihilating",
            lambda: spectrum.verify_annihilating_identity(fld, s))
        if q >= 3:
            run("pair_system",
                lambda: spectrum.verify_pair_system_count(fld, s))
    else:
        skipped.extend(["annihilating", "pair_system"])
    if q <= _DETERMINANT_CAP:
        det = spectrum.determinant_identities(fld, s)
        ran.extend(["determinant_eigen", "determinant_reduced"])
        if not det["eigen"]["match"]:
            failures.append("determinant_eigen")
        if not det["reduced"]["match"]:
            failures.append("determinant_reduced")
    else:
        skipped.extend(["determinant_eigen", "determinant_reduced"])

    base = dict(check="identities", p=p, m=m, field=fld.descriptor(),
                canonical=spectrum._class_canonical(fld, s))
    payload = {"ran": ran, "skipped": skipped}
    if not failures:
        return Finding(kind=PASS, payload=payload, **base)
    payload["failures"] = failures
    payload.update(spectrum._spectrum_payload(fld, s))
    return Finding(kind=COUNTEREXAMPLE, payload=payload, **base)


def _nice_unit(fld, s: int, witness: bool) -> list:
    cls = approx_class(fld.q, fld.p, s)
    counts = differential.diff_counts(fld, s)
    profile = differential._profile_from_counts(fld, s, counts)
    findings = differential.class_profile_finding(fld, cls, profile)
    if witness:
        value_map = [[int(v), int(n)] for v, n in enumerate(counts) if n]
        findings = [Finding(kind=f.kind, check=f.check, p=f.p, m=f.m,
                            canonical=f.canonical, field=f.field,
                            payload=dict(f.payload, n_of_v=value_map))
                    for f in findings]
    return findings


def _execute_unit(unit: Unit, witness: bool) -> list:
    p, m, check, variant = unit
    fld = _field(p, m)
    if check == "propositions":
        if variant == "s3":
            return [differential.verify_proposition_s3(fld)]
        return [differential.verify_proposition_qminus2(fld)]
    info = dict(kv.split("=", 1) for kv in variant.split(";"))
    s = int(info["s"])
    if check == "vanishing":
        return [spectrum.check_vanishing(fld, s)]
    if check == "mod3":
        return [spectrum.check_mod3(fld, s)]
    if check == "three_valued":
        return [_three_valued_finding(fld, s)]
    if check == "uniform_theorem":
        return [differential.verify_uniform_theorem(fld, s)]
    if check == "nice_search":
        return _nice_unit(fld, s, witness)
    if check == "valuation":
        return [valuation.check_valuation(fld, s)]
    if check == "cmpr":
        return [valuation.check_cmpr_bound(fld, s)]
    if check == "extension":
        sub = _field(p, int(info["sub"]))
        return [valuation.check_extension_inequality(fld, sub, s)]
    if check == "quadra":
        sub = _field(p, int(info["sub"]))
        return [valuation.check_quadratic_lemma(fld, sub, s)]
    if check == "identities":
        return [_identities_finding(fld, s)]
    raise ConfigInvalid(f"unknown check {check!r}")


def _unit_key(unit: Unit, witness: bool) -> list:
    return [SCHEMA_VERSION, unit.p, unit.m, unit.check, unit.variant,
            bool(witness)]


def _worker(task):
    unit, cache_dir, witness = task
    if cache_dir:
        hit = cache_get(cache_dir, _unit_key(unit, witness))
        if hit is not None:
            descr = hit[0].field if hit else None
            return unit, descr, hit
    out = _execute_unit(unit, witness)
    if cache_dir:
        cache_put(cache_dir, _unit_key(unit, witness), out)
    return unit, _field(unit.p, unit.m).descriptor(), out


# ---------------------------------------------------------------------------
# reports


_CSV_HEADER = ("p", "m", "q", "check", "kind", "canonical_s",
               "s_mod_pminus1", "nice", "multiplicities", "kloosterman_flag")


def _csv_cells(f: Finding) -> list:
    q = f.p ** f.m
    row = [str(f.p), str(f.m), str(q), f.check, f.kind]
    if f.canonical:
        row.append(str(f.canonical))
        row.append(str(f.canonical % (f.p - 1)) if f.p > 2 else "0")
    else:
        row.extend(["", ""])
    hist = f.payload.get("histogram")
    cls = f.payload.get("class")
    if hist is not None:
        nice = len(hist) <= 3
        row.append(str(bool(f.payload.get("nice", nice))))
        row.append(";".join(f"{k}:{n}" for k, n in hist))
    else:
        row.extend(["", ""])
    row.append(str(bool(cls["kloosterman"])) if cls else "")
    return row


def findings_to_csv(findings) -> str:
    out = StringIO()
    out.write(",".join(_CSV_HEADER) + "\n")
    for f in findings:
        cells = ['"%s"' % c.replace('"', '""') if ("," in c or '"' in c)
                 else c for c in _csv_cells(f)]
        out.write(",".join(cells) + "\n")
    return out.getvalue()


@dataclass
class CampaignReport:
    config: CampaignConfig
    findings: list

    @property
    def counts(self) -> Counter:
        return Counter(f.kind for f in self.findings)

    @property
    def exit_code(self) -> int:
        return 1 if any(f.is_alarm for f in self.findings) else 0

    def to_record(self) -> dict:
        kinds = self.counts
        per_check = Counter(f.check for f in self.findings)
        return {
            "schema": SCHEMA_VERSION,
            "config": self.config.to_record(),
            "summary": {
                "findings": len(self.findings),
                "kinds": dict(sorted(kinds.items())),
                "checks": dict(sorted(per_check.items())),
                "alarms": sum(1 for f in self.findings if f.is_alarm),
            },
            "findings": [f.to_record() for f in self.findings],
        }

    def to_json(self) -> str:
        return canonical_json(self.to_record()) + "\n"

    def to_csv(self) -> str:
        return findings_to_csv(self.findings)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ConfigInvalid(f"unknown report format {fmt!r}")


def _sorted_findings(findings: list) -> list:
    return sorted(findings,
                  key=lambda f: f.sort_key + (canonical_json(f.to_record()),))


def _nice_summaries(config, units, results) -> list:
    """Field-level tallies mirroring the per-field search API.

    Summaries use the short field label (no modulus) so that fully cached
    reruns never have to rebuild field tables just to label a tally row.
    """
    per_field_units = Counter()
    for u in units:
        if u.check == "nice_search":
            per_field_units[(u.p, u.m)] += 1
    nice = Counter()
    for unit, _, out in results:
        if unit.check == "nice_search":
            nice[(unit.p, unit.m)] += sum(1 for f in out
                                          if f.kind == WITNESS)
    return [Finding(
        kind=PASS, check="nice_search", p=p, m=m, canonical=0,
        field=f"p={p} m={m}",
        payload={"classes": per_field_units.get((p, m), 0),
                 "nice": nice.get((p, m), 0),
                 "two_conjectures_apply": p > 2})
        for p, m in config_fields(config)]


def run_campaign(config: CampaignConfig) -> CampaignReport:
    units, findings = campaign_units(config)
    # run same-(field, exponent) units adjacently so the per-exponent
    # transform cache gets hits; results are re-sorted below, so the
    # execution order never shows in the report
    units = sorted(units, key=lambda u: (u.p, u.m, u.variant, u.check))
    tasks = [(u, config.cache_dir, config.witness) for u in units]
    if config.parallelism == 1 or len(tasks) <= 1:
        results = [_worker(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (config.parallelism * 8))
        with Pool(config.parallelism) as pool:
            results = list(pool.imap_unordered(_worker, tasks,
                                               chunksize=chunk))
    results.sort(key=lambda r: r[0])
    for _, _, out in results:
        findings.extend(out)
    if "nice_search" in config.checks:
        findings.extend(_nice_summaries(config, units, results))
    return CampaignReport(config=config, findings=_sorted_findings(findings))


def run_single(p: int, m: int, s: int, checks, witness: bool = False,
               cache_dir: str | None = None) -> list:
    """All selected checks for one field and one exponent, inline."""
    config = CampaignConfig(characteristics=(p,), max_q=p ** m,
                            checks=tuple(checks), parallelism=1,
                            cache_dir=cache_dir, witness=witness)
    q = p ** m
    units, findings = [], []
    for check in config.checks:
        if check == "propositions":
            units.extend([Unit(p, m, check, "s3"), Unit(p, m, check, "qm2")])
            continue
        if check in ("vanishing", "mod3") and q * p > _DENSE_CAP:
            findings.append(_cap_finding(
                p, m, check, "q*p exceeds the dense value-table cap"))
            continue
        if check in ("three_valued", "uniform_theorem") and \
                not _spectrum_ok(p, m, q):
            findings.append(_cap_finding(
                p, m, check, "beyond the exact-spectrum cost cap"))
            continue
        if check == "identities" and q > _IDENTITY_CAP:
            findings.append(_cap_finding(
                p, m, check, "q exceeds the identity-battery cap"))
            continue
        if check in ("valuation", "cmpr", "extension", "quadra") and \
                not _valuation_ok(p, m, q):
            findings.append(_cap_finding(
                p, m, check, "beyond the valuation cost cap"))
            continue
        if check == "extension":
            units.extend(Unit(p, m, check, f"s={s};sub={mk}")
                         for mk in range(1, m) if m % mk == 0)
        elif check == "quadra":
            if m % 2 == 0:
                units.append(Unit(p, m, check, f"s={s};sub={m // 2}"))
        else:
            units.append(Unit(p, m, check, f"s={s}"))
    for unit in units:
        task = (unit, config.cache_dir, config.witness)
        _, _, out = _worker(task)
        findings.extend(out)
    return _sorted_findings(findings)
