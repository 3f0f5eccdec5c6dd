"""Differential multiplicities of power permutations and nice exponents.

For an exponent s over L, N(u, v) counts the solutions (x, y) in L^2 of
x + y = u, x^s + y^s = v. The profile of N(1, .) as v runs through L
decides whether s is nice (at most 3 distinct multiplicities) and whether
it is Delta-uniform (N(1, v) in {0, Delta} for v != 1). Two independent
routes compute the profile: a Zech-logarithm kernel and a direct
antilog-table evaluation. The third and fourth power moments of the
Fourier values tie the profile back to the spectrum side.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import ConfigInvalid
from .exponents import approx_class, enumerate_classes, is_invertible
from .findings import (COUNTEREXAMPLE, PASS, SKIPPED, TABLE_DISCREPANCY,
                       WITNESS, Finding)
from .gf import FiniteField
from .spectrum import (_class_canonical, _require_invertible,
                       _spectrum_payload, moment_exact,
                       reduced_value_summary, three_valued_report)

ALGORITHMS = ("ZECH", "TABLE")


@dataclass(frozen=True)
class DiffProfile:
    """Multiplicity histogram of N(1, .) for one exponent.

    histogram maps a multiplicity k to the number of v in L with
    N(1, v) = k; both the frequencies and the mass sum to q.
    uniform_delta is the single nonzero multiplicity attained off v = 1
    (0 when none is attained, None when several are).
    """

    p: int
    m: int
    q: int
    s: int
    histogram: dict
    V: int  # N(1, 1)
    n_at_zero: int  # N(1, 0)
    distinct_values: tuple
    is_nice: bool
    uniform_delta: int | None
    has_two: bool

    def to_record(self) -> dict:
        return {
            "p": self.p,
            "m": self.m,
            "q": self.q,
            "s": self.s,
            "histogram": [[k, f] for k, f in sorted(self.histogram.items())],
            "V": self.V,
            "n_at_zero": self.n_at_zero,
            "nice": self.is_nice,
            "uniform_delta": self.uniform_delta,
            "has_two": self.has_two,
        }

    def multiplicities_text(self) -> str:
        """Campaign CSV cell, "k:freq" pairs sorted by multiplicity."""
        return ";".join(f"{k}:{f}" for k, f in sorted(self.histogram.items()))


def _digits(packed: np.ndarray, p: int, m: int) -> np.ndarray:
    """Little-endian base-p digit matrix, shape (..., m)."""
    out = np.empty(packed.shape + (m,), dtype=np.int64)
    v = packed.copy()
    for j in range(m):
        out[..., j] = v % p
        v //= p
    return out


def _pack(digits: np.ndarray, p: int) -> np.ndarray:
    weights = p ** np.arange(digits.shape[-1], dtype=np.int64)
    return digits @ weights


def _table_counts(field: FiniteField, s: int) -> np.ndarray:
    """Profile counts by direct evaluation of x^s + (1 - x)^s per element.

    Powers go through the log tables, sums through digitwise packed
    arithmetic; the Zech table is never touched, so this is an independent
    oracle for the ZECH route.
    """
    p, m, q = field.p, field.m, field.q
    qm1 = q - 1
    se = s % qm1
    packed = np.zeros(q, dtype=np.int64)
    packed[1:] = field.poly_of_log
    code_of = np.zeros(q, dtype=np.int64)
    code_of[packed[1:]] = np.arange(1, q, dtype=np.int64)
    pow_code = np.zeros(q, dtype=np.int64)
    pow_code[1:] = (np.arange(qm1, dtype=np.int64) * se) % qm1 + 1
    if p == 2:
        one_minus = packed ^ 1
    else:
        d = (-_digits(packed, p, m)) % p
        d[:, 0] = (d[:, 0] + 1) % p
        one_minus = _pack(d, p)
    term1 = packed[pow_code]
    term2 = packed[pow_code[code_of[one_minus]]]
    if p == 2:
        vals = term1 ^ term2
    else:
        vals = _pack((_digits(term1, p, m) + _digits(term2, p, m)) % p, p)
    return np.bincount(code_of[vals], minlength=q)


def diff_counts(field: FiniteField, s: int, algorithm: str = "ZECH",
                backend: str | None = None) -> np.ndarray:
    """counts[v] = N(1, v) indexed by element code; the total mass is q."""
    s = _require_invertible(field, s)
    if algorithm not in ALGORITHMS:
        raise ConfigInvalid(f"unknown profile algorithm {algorithm!r}")
    if algorithm == "TABLE":
        return _table_counts(field, s)
    return _kernels.zech_diff_counts(field.zech_of_log, s % (field.q - 1),
                                     field.neg_log_offset, field.q, backend)


def _profile_from_counts(field: FiniteField, s: int,
                         counts: np.ndarray) -> DiffProfile:
    freq = np.bincount(counts)
    hist = {int(k): int(f) for k, f in enumerate(freq) if f}
    off = np.unique(np.concatenate((counts[:1], counts[2:])))
    off = off[off > 0]
    if off.size == 0:
        delta = 0
    elif off.size == 1:
        delta = int(off[0])
    else:
        delta = None
    distinct = tuple(sorted(hist))
    return DiffProfile(
        p=field.p, m=field.m, q=field.q, s=s,
        histogram=hist,
        V=int(counts[1]),
        n_at_zero=int(counts[0]),
        distinct_values=distinct,
        is_nice=len(distinct) <= 3,
        uniform_delta=delta,
        has_two=2 in hist,
    )


def diff_profile(field: FiniteField, s: int, algorithm: str = "ZECH",
                 backend: str | None = None) -> DiffProfile:
    """Histogram of the differential multiplicities N(1, v) over v in L."""
    s = _require_invertible(field, s)
    return _profile_from_counts(field, s, diff_counts(field, s, algorithm,
                                                      backend))


@lru_cache(maxsize=8)
def _counts_cached(field: FiniteField, s: int) -> np.ndarray:
    return diff_counts(field, s)


def n_uv(field: FiniteField, s: int, u: int, v: int) -> int:
    """#{(x, y) in L^2 : x + y = u, x^s + y^s = v} for element codes u, v.

    N(0, 0) = q, N(0, v) = 0 for v != 0, and for u != 0 the count scales
    back to N(1, v / u^s).
    """
    s = _require_invertible(field, s)
    u = field._check_code(u)
    v = field._check_code(v)
    if u == 0:
        return field.q if v == 0 else 0
    if v == 0:
        w = 0
    else:
        qm1 = field.q - 1
        w = ((v - 1) - (u - 1) * s) % qm1 + 1
    return int(_counts_cached(field, s)[w])


def profile_flags(profile: DiffProfile) -> dict:
    """Niceness and uniformity summary; a Delta-uniform exponent is nice."""
    return {
        "nice": profile.is_nice,
        "uniform_delta": profile.uniform_delta,
        "has_two": profile.has_two,
    }


def verify_third_moment_link(field: FiniteField, s: int) -> bool:
    """sum_a W(a)^3 = q^2 N(1, 1), both sides exact and independent."""
    s = _require_invertible(field, s)
    v = int(diff_counts(field, s)[1])
    return moment_exact(field, s, 3).as_int() == field.q * field.q * v


def verify_fourth_moment_link(field: FiniteField, s: int) -> bool:
    """sum_a W(a)^4 = q^2 sum_{v != 0} N(1, v)^2, exact."""
    s = _require_invertible(field, s)
    counts = diff_counts(field, s)
    rhs = int(np.sum(counts[1:] * counts[1:]))
    return moment_exact(field, s, 4).as_int() == field.q * field.q * rhs


def verify_uniform_theorem(field: FiniteField, s: int) -> Finding:
    """Divisibility, bound and case split for a three-valued spectrum.

    With values {0, A, B}, A = p^a alpha, B = p^b beta, A - B = p^c gamma:
    (1) alpha beta gamma divides N(u, v) for v != u^s, (2) A B < 0 and
    |alpha beta gamma| <= -A B / q, (3) exactly one of case (i) a, b > m/2
    or case (ii) a = b = m/2, |gamma| = 1 and the profile |alpha beta|-
    uniform, (4) case (i) never occurs when m is a power of two, and
    (5) the fourth moment equals q^2 sum_{v != 0} N(1, v)^2.
    """
    s = _require_invertible(field, s)
    p, m, q = field.p, field.m, field.q
    base = dict(check="uniform_theorem", p=p, m=m, field=field.descriptor(),
                canonical=_class_canonical(field, s))
    floor, _ = reduced_value_summary(field, s)
    if floor > 3:
        return Finding(kind=SKIPPED,
                       payload={"reason": "spectrum is not three-valued"},
                       **base)
    rep = three_valued_report(field, s)
    if rep is None:
        return Finding(kind=SKIPPED,
                       payload={"reason": "spectrum is not three-valued"},
                       **base)
    if rep.alpha == 0:
        # degenerate report: three values but no integral {0, A, B} shape
        payload = {"report": rep.to_record()}
        payload.update(_spectrum_payload(field, s))
        return Finding(kind=COUNTEREXAMPLE, payload=payload, **base)
    counts = diff_counts(field, s)
    profile = _profile_from_counts(field, s, counts)
    div = abs(rep.alpha * rep.beta * rep.gamma)
    failures = list(rep.violations)
    off_one = np.concatenate((counts[:1], counts[2:]))
    if np.any(off_one % div):
        failures.append("alpha beta gamma does not divide every N(1, v), v != 1")
    if rep.A * rep.B >= 0:
        failures.append("A and B do not have opposite signs")
    if div * q > -(rep.A * rep.B):
        failures.append("|alpha beta gamma| exceeds -A B / q")
    case_i = 2 * rep.a > m and 2 * rep.b > m
    case_ii = (2 * rep.a == m and 2 * rep.b == m and abs(rep.gamma) == 1
               and profile.uniform_delta is not None
               and profile.uniform_delta in (0, abs(rep.alpha * rep.beta)))
    if case_i == case_ii:
        failures.append("case split is not exclusive: "
                        f"(i)={case_i} (ii)={case_ii}")
    if m & (m - 1) == 0 and case_i:
        failures.append("case (i) over a field of power-of-two degree")
    lhs = rep.N_A * rep.A ** 4 + rep.N_B * rep.B ** 4
    rhs = q * q * int(np.sum(counts[1:] * counts[1:]))
    if lhs != rhs:
        failures.append(f"fourth moment {lhs} != q^2 sum N(1,v)^2 = {rhs}")
    payload = {
        "report": rep.to_record(),
        "case": "i" if case_i else ("ii" if case_ii else "none"),
        "divisor": div,
        "histogram": profile.to_record()["histogram"],
    }
    if failures:
        payload["failures"] = failures
        payload.update(_spectrum_payload(field, s))
        return Finding(kind=COUNTEREXAMPLE, payload=payload, **base)
    return Finding(kind=PASS, payload=payload, **base)


def verify_proposition_s3(field: FiniteField) -> Finding:
    """Profile of the cubing map against its published three-row table.

    Rows: characteristic 2 has multiplicities {0, 2} with frequencies
    {q/2, q/2}; characteristic 3 has {0, q} with {q-1, 1}; for p > 3 the
    printed frequencies "q/2-1, 1, q/2-1" are not integers (q is odd), so
    a profile matching the integral pattern {(q-1)/2, 1, (q-1)/2} is
    recorded as TABLE-DISCREPANCY rather than silently normalized.
    """
    p, m, q = field.p, field.m, field.q
    base = dict(check="proposition_s3", p=p, m=m, field=field.descriptor(),
                canonical=0)
    if q % 3 == 1:
        if is_invertible(q, 3):
            raise AssertionError("q = 1 mod 3 must make the cube non-bijective")
        return Finding(kind=SKIPPED,
                       payload={"reason": "s=3 is not invertible, q = 1 mod 3"},
                       **base)
    profile = diff_profile(field, 3)
    payload = {"s": 3, "histogram": profile.to_record()["histogram"]}
    if p == 2:
        expected = {0: q // 2, 2: q // 2}
    elif p == 3:
        expected = {0: q - 1, q: 1}
    else:
        if profile.distinct_values != (0, 1, 2):
            payload["expected_multiplicities"] = [0, 1, 2]
            return Finding(kind=COUNTEREXAMPLE, payload=payload, **base)
        empirical = {0: (q - 1) // 2, 1: 1, 2: (q - 1) // 2}
        payload["printed_frequencies"] = ["q/2-1", "1", "q/2-1"]
        payload["computed_frequencies"] = [empirical[0], 1, empirical[2]]
        if profile.histogram == empirical:
            payload["note"] = ("printed frequencies are non-integral for odd"
                               " q; computed pattern is (q-1)/2, 1, (q-1)/2")
            return Finding(kind=TABLE_DISCREPANCY, payload=payload, **base)
        return Finding(kind=COUNTEREXAMPLE, payload=payload, **base)
    payload["expected"] = [[k, f] for k, f in sorted(expected.items())]
    if profile.histogram == expected:
        return Finding(kind=PASS, payload=payload, **base)
    return Finding(kind=COUNTEREXAMPLE, payload=payload, **base)


def verify_proposition_qminus2(field: FiniteField) -> Finding:
    """Profile of the inversion-type map s = q - 2 against its table.

    The expected histogram depends on q mod 6; for q = 1 mod 6 the claim
    is that s = q - 2 is not nice. Zero-frequency entries of a table row
    (small q degeneracies) are dropped before comparing.
    """
    p, m, q = field.p, field.m, field.q
    base = dict(check="proposition_qminus2", p=p, m=m,
                field=field.descriptor(), canonical=0)
    if q < 3:
        return Finding(kind=SKIPPED, payload={"reason": "q must be at least 3"},
                       **base)
    s = q - 2
    profile = diff_profile(field, s)
    payload = {"s": s, "histogram": profile.to_record()["histogram"]}
    r = q % 6
    if r == 1:
        if not profile.is_nice:
            return Finding(kind=PASS, payload=dict(payload, nice=False), **base)
        return Finding(kind=COUNTEREXAMPLE,
                       payload=dict(payload, expected="not nice"), **base)
    rows = {
        2: {0: q // 2, 2: q // 2},
        3: {0: (q + 1) // 2, 2: (q - 3) // 2, 3: 1},
        4: {0: q // 2 + 1, 2: q // 2 - 2, 4: 1},
        5: {0: (q - 1) // 2, 1: 1, 2: (q - 1) // 2},
    }
    expected = {k: f for k, f in rows[r].items() if f}
    payload["expected"] = [[k, f] for k, f in sorted(expected.items())]
    if profile.histogram == expected:
        return Finding(kind=PASS, payload=payload, **base)
    return Finding(kind=COUNTEREXAMPLE, payload=payload, **base)


def search_nice(field: FiniteField, algorithm: str = "ZECH",
                backend: str | None = None) -> list:
    """Nice nontrivial classes with their profiles, in canonical order."""
    out = []
    for cls in enumerate_classes(field):
        if cls.is_trivial:
            continue
        profile = diff_profile(field, cls.canonical, algorithm, backend)
        if profile.is_nice:
            out.append((cls, profile))
    return out


def class_profile_finding(field: FiniteField, cls, profile: DiffProfile):
    """Findings contributed by one class to the nice-exponent search.

    Nice nontrivial classes are recorded as WITNESS rows. Over odd
    characteristic every nontrivial invertible class is conjectured to
    have 2 among its multiplicities (for nice classes this is the weaker
    published claim); a class without it is a COUNTEREXAMPLE.
    """
    base = dict(check="nice_search", p=field.p, m=field.m,
                field=field.descriptor(), canonical=cls.canonical)
    findings = []
    if cls.is_trivial:
        return findings
    record = {
        "class": cls.to_record(),
        "histogram": profile.to_record()["histogram"],
        "uniform_delta": profile.uniform_delta,
        "has_two": profile.has_two,
    }
    if profile.is_nice:
        findings.append(Finding(kind=WITNESS, payload=record, **base))
    if field.p > 2 and not profile.has_two:
        claim = ("nice nontrivial class without differential multiplicity 2"
                 if profile.is_nice else
                 "invertible nontrivial class without differential"
                 " multiplicity 2")
        findings.append(Finding(kind=COUNTEREXAMPLE,
                                payload=dict(record, property=claim), **base))
    return findings


def nice_search_findings(field: FiniteField, algorithm: str = "ZECH",
                         backend: str | None = None) -> list:
    """All findings of the nice-exponent search over one field."""
    findings = []
    nice = 0
    classes = 0
    for cls in enumerate_classes(field):
        if cls.is_trivial:
            continue
        classes += 1
        profile = diff_profile(field, cls.canonical, algorithm, backend)
        nice += profile.is_nice
        findings.extend(class_profile_finding(field, cls, profile))
    summary = {"classes": classes, "nice": nice,
               "two_conjectures_apply": field.p > 2}
    findings.append(Finding(kind=PASS, check="nice_search", p=field.p,
                            m=field.m, field=field.descriptor(), canonical=0,
                            payload=summary))
    return findings
