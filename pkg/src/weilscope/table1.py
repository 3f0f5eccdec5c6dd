"""Published nice-exponent table over F_{11^m}, m <= 5, and its reproduction.

The fixture below is embedded data transcribed from the published table of
nice exponents s (not ~= 1) over the fields of order 11^m: one row per
nontrivial nice class, giving the canonical exponent, its congruence mod
p - 1 = 10, whether the class is the Kloosterman one (s ~= q - 2, the
dagger in the original layout), and the multiplicity histogram as
(multiplicity, frequency) pairs. Reproduction reruns the search and
demands an exact match in both directions: every fixture row must be
found, and no nice class outside the fixture may appear.
"""

from __future__ import annotations

from .campaign import CampaignConfig, run_campaign, _sorted_findings
from .findings import COUNTEREXAMPLE, PASS, WITNESS, Finding

TABLE1_P = 11
TABLE1_MAX_M = 5

# (degree m, canonical s, s mod 10, kloosterman dagger, histogram)
TABLE1_ROWS = (
    (1, 3, 3, False, ((0, 5), (1, 1), (2, 5))),
    (1, 9, 9, True, ((0, 5), (1, 1), (2, 5))),
    (3, 3, 3, False, ((0, 665), (1, 1), (2, 665))),
    (3, 1209, 9, True, ((0, 665), (1, 1), (2, 665))),
    (4, 241, 1, False, ((0, 7380), (2, 7260), (121, 1))),
    (5, 3, 3, False, ((0, 80525), (1, 1), (2, 80525))),
    (5, 146409, 9, True, ((0, 80525), (1, 1), (2, 80525))),
)


def expected_rows(max_m: int = TABLE1_MAX_M) -> list:
    return [row for row in TABLE1_ROWS if row[0] <= max_m]


def _computed_rows(max_m: int, parallelism: int, cache_dir):
    config = CampaignConfig(characteristics=(TABLE1_P,),
                            max_q=TABLE1_P ** max_m,
                            checks=("nice_search",),
                            parallelism=parallelism,
                            cache_dir=cache_dir)
    report = run_campaign(config)
    rows = {}
    for f in report.findings:
        if f.check != "nice_search" or f.kind != WITNESS:
            continue
        cls = f.payload["class"]
        rows[(f.m, f.canonical)] = {
            "congruence": cls["congruence_mod_p_minus_1"],
            "kloosterman": bool(cls["kloosterman"]),
            "histogram": tuple((int(k), int(n))
                               for k, n in f.payload["histogram"]),
        }
    return rows


def reproduce_table1(parallelism: int = 1, cache_dir: str | None = None,
                     max_m: int = TABLE1_MAX_M) -> list:
    """Row-by-row comparison findings; any mismatch is a COUNTEREXAMPLE."""
    computed = _computed_rows(max_m, parallelism, cache_dir)
    findings = []
    matched = set()
    for m, s, congruence, dagger, histogram in expected_rows(max_m):
        base = dict(check="table1", p=TABLE1_P, m=m, canonical=s,
                    field=f"p={TABLE1_P} m={m}")
        got = computed.get((m, s))
        expected = {"congruence": congruence, "kloosterman": dagger,
                    "histogram": [list(pair) for pair in histogram]}
        if got is None:
            findings.append(Finding(kind=COUNTEREXAMPLE, payload={
                "reason": "published nice class not found",
                "expected": expected}, **base))
            continue
        matched.add((m, s))
        mismatches = []
        if got["congruence"] != congruence:
            mismatches.append("congruence")
        if got["kloosterman"] != dagger:
            mismatches.append("kloosterman")
        if got["histogram"] != histogram:
            mismatches.append("histogram")
        if mismatches:
            findings.append(Finding(kind=COUNTEREXAMPLE, payload={
                "reason": "row disagrees with the published table",
                "mismatched": mismatches,
                "expected": expected,
                "computed": {"congruence": got["congruence"],
                             "kloosterman": got["kloosterman"],
                             "histogram": [list(pair)
                                           for pair in got["histogram"]]}},
                **base))
        else:
            findings.append(Finding(kind=PASS, payload={
                "histogram": [list(pair) for pair in histogram],
                "kloosterman": dagger,
                "congruence": congruence}, **base))
    for (m, s), got in sorted(computed.items()):
        if (m, s) in matched:
            continue
        findings.append(Finding(
            kind=COUNTEREXAMPLE, check="table1", p=TABLE1_P, m=m,
            canonical=s, field=f"p={TABLE1_P} m={m}",
            payload={"reason": "nice class absent from the published table",
                     "computed": {"congruence": got["congruence"],
                                  "kloosterman": got["kloosterman"],
                                  "histogram": [list(pair) for pair
                                                in got["histogram"]]}}))
    return _sorted_findings(findings)
