"""phi-adic valuations of Weil spectra, directly and by the digit-sum rule.

All valuations are at the prime (1 - zeta_p) of Z[zeta_p], normalized so
that v(p) = p - 1. The direct route expands a value x = sum_j c_j zeta^j
in powers of pi = zeta - 1: x = sum_k e_k pi^k with
e_k = sum_j binom(j, k) c_j. Nonzero terms have pairwise distinct
valuations (p - 1) v_p(e_k) + k (distinct residues mod p - 1), so v(x)
is exactly their minimum. A nonzero Weil value has |conjugates| <= q,
hence v(x) <= v(q) = (p - 1) m, so e_k mod p^(m+1) determines every term
that can attain the minimum; this keeps the whole computation in exact
int64 / float64-safe ranges.

The independent route is the Gauss-sum digit rule: the minimum over
k in [1, q-2] of digitsum_p(k) + digitsum_p((-k s) mod (q - 1)). The two
routes must agree; a disagreement is a FORMULA-MISMATCH finding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (CharacteristicMismatch, DegreeMismatch, FieldTooLarge,
                     InvalidElement, NotInvertible)
from .exponents import approx_class, is_invertible
from .findings import (COUNTEREXAMPLE, FORMULA_MISMATCH, PASS, SKIPPED,
                       Finding)
from .gf import FiniteField
from .spectrum import (_class_canonical, _require_invertible,
                       _spectrum_payload, integer_value_rows, value_coords)

# stage-2 modulus p^(m+1) must keep chunked int64 products exact
_MAX_MODULUS = 1 << 26


def digitsum_p(p: int, k: int) -> int:
    """Sum of the base-p digits of k >= 0."""
    if k < 0:
        raise InvalidElement(f"digit sum needs a nonnegative index, got {k}")
    total = 0
    while k:
        total += k % p
        k //= p
    return total


def _digit_sum_table(p: int, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.int64)
    v = np.arange(n, dtype=np.int64)
    while v.any():
        out += v % p
        v //= p
    return out


@lru_cache(maxsize=8)
def _pascal_mod(size: int, modulus: int) -> np.ndarray:
    """binom(j, k) mod modulus for 0 <= j, k < size."""
    c = np.zeros((size, size), dtype=np.int64)
    c[:, 0] = 1
    for j in range(1, size):
        c[j, 1:j + 1] = (c[j - 1, 1:j + 1] + c[j - 1, 0:j]) % modulus
    return c


def _matmul_mod(a: np.ndarray, b: np.ndarray, modulus: int) -> np.ndarray:
    """(a @ b) % modulus with entries in [0, modulus), no int64 overflow."""
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    step = max(1, (1 << 62) // (modulus * modulus))
    for j in range(0, a.shape[1], step):
        out = (out + a[:, j:j + step] @ b[j:j + step]) % modulus
    return out


def _min_phi_val(p: int, m: int, rows: np.ndarray) -> tuple[int, int]:
    """(min of v over the rows, index of the first row attaining it).

    rows are nonzero canonical coordinate vectors of Weil values, which
    caps every valuation at (p - 1) m; feeding values beyond that bound
    is an error.
    """
    if p == 2:
        v = np.abs(rows[:, 0])
        tz = np.log2((v & -v).astype(np.float64)).astype(np.int64)
        idx = int(np.argmin(tz))
        return int(tz[idx]), idx
    n = p - 1
    modulus = p ** (m + 1)
    if modulus > _MAX_MODULUS:
        raise FieldTooLarge(f"valuation stage needs p^(m+1) <= {_MAX_MODULUS}")
    # stage 1: the first k with e_k nonzero mod p is the exact minimum,
    # since any p-divisible term is worth at least p - 1 > k
    reduced = (rows % p).astype(np.float64)
    pascal = _pascal_mod(n, p).astype(np.float64)
    block = 32
    for k0 in range(0, n, block):
        cols = np.asarray(reduced @ pascal[:, k0:k0 + block] % p, dtype=np.int64)
        hits = np.nonzero(cols.any(axis=0))[0]
        if hits.size:
            k = k0 + int(hits[0])
            return k, int(np.argmax(cols[:, hits[0]] != 0))
    # stage 2: every e_k is divisible by p; v_p(e_k) <= m suffices now
    uniq, inverse = np.unique(rows % modulus, axis=0, return_inverse=True)
    terms = _matmul_mod(uniq, _pascal_mod(n, modulus), modulus)
    vp = np.zeros_like(terms)
    cur = terms.copy()
    for _ in range(m + 1):
        div = (cur != 0) & (cur % p == 0)
        vp += div
        cur[div] //= p
    vals = np.where(terms != 0, (p - 1) * vp + np.arange(n, dtype=np.int64),
                    np.iinfo(np.int64).max)
    per_row = vals.min(axis=1)
    if np.min(per_row) > (p - 1) * m:
        raise InvalidElement("valuation exceeds the Weil-value norm bound")
    per_a = per_row[inverse]
    idx = int(np.argmin(per_a))
    return int(per_a[idx]), idx


@dataclass(frozen=True)
class ValuationReport:
    """Both valuation routes for one exponent, with their witnesses."""

    p: int
    m: int
    q: int
    s: int
    val_phi_direct: int
    val_phi_stickelberger: int
    argmin_a: int  # element code over L* minimizing the direct route
    argmin_k: int  # character index minimizing the digit rule

    @property
    def consistent(self) -> bool:
        return self.val_phi_direct == self.val_phi_stickelberger

    @property
    def val_phi(self) -> int:
        return self.val_phi_direct

    @property
    def val_p(self) -> Fraction:
        return Fraction(self.val_phi_direct, self.p - 1)

    def to_record(self) -> dict:
        return {
            "p": self.p, "m": self.m, "q": self.q, "s": self.s,
            "val_phi_direct": self.val_phi_direct,
            "val_phi_stickelberger": self.val_phi_stickelberger,
            "val_p": str(self.val_p),
            "argmin_a": self.argmin_a,
            "argmin_k": self.argmin_k,
            "consistent": self.consistent,
        }


def val_report(field: FiniteField, s: int) -> ValuationReport:
    """Minimum phi-adic valuation over the reduced spectrum, two ways.

    The direct minimum runs over a in L* and ignores vanishing values
    (their valuation is infinite; Parseval guarantees a nonzero value
    exists). The digit rule pairs k with (-k s) mod (q - 1).
    """
    s = _require_invertible(field, s)
    p, m, q = field.p, field.m, field.q
    if q < 3:
        raise NotInvertible(f"no exponent range for q = {q}")
    if p > 2 and p ** (m + 1) > _MAX_MODULUS:
        raise FieldTooLarge(f"valuation stage needs p^(m+1) <= {_MAX_MODULUS}")
    coords = value_coords(field, s)[1:]
    keep = np.nonzero(coords.any(axis=1))[0]
    val_direct, local = _min_phi_val(p, m, coords[keep])
    argmin_a = int(keep[local]) + 1
    ds = _digit_sum_table(p, q - 1)
    k = np.arange(1, q - 1, dtype=np.int64)
    totals = ds[k] + ds[(-k * (s % (q - 1))) % (q - 1)]
    j = int(np.argmin(totals))
    return ValuationReport(p=p, m=m, q=q, s=s,
                           val_phi_direct=int(val_direct),
                           val_phi_stickelberger=int(totals[j]),
                           argmin_a=argmin_a, argmin_k=int(k[j]))


def check_valuation(field: FiniteField, s: int) -> Finding:
    """Cross-validate the two valuation routes for one class."""
    s = _require_invertible(field, s)
    base = dict(check="valuation", p=field.p, m=field.m,
                field=field.descriptor(), canonical=_class_canonical(field, s))
    if field.q < 3:
        return Finding(kind=SKIPPED, payload={"reason": "no exponent range"},
                       **base)
    rep = val_report(field, s)
    if rep.consistent:
        return Finding(kind=PASS, payload={
            "val_phi": rep.val_phi, "val_p": str(rep.val_p),
            "argmin_a": rep.argmin_a, "argmin_k": rep.argmin_k}, **base)
    payload = {"report": rep.to_record()}
    payload.update(_spectrum_payload(field, s))
    return Finding(kind=FORMULA_MISMATCH, payload=payload, **base)


def check_extension_inequality(fieldL: FiniteField, fieldK: FiniteField,
                               s: int) -> Finding:
    """val_L(s) <= val_K(s mod (|K| - 1)) * [L:K] for a subfield K of L.

    The exponent acting on K is s reduced mod |K*|; this reduction is
    recorded in the payload. The degree factor cancels the (p - 1)
    normalization, so val_phi values compare directly.
    """
    if fieldK.p != fieldL.p:
        raise CharacteristicMismatch(
            f"{fieldK.p} != {fieldL.p}: not a subfield pair")
    if fieldL.m % fieldK.m:
        raise DegreeMismatch(
            f"degree {fieldK.m} does not divide {fieldL.m}")
    s = _require_invertible(fieldL, s)
    base = dict(check="extension", p=fieldL.p, m=fieldL.m,
                field=fieldL.descriptor(),
                canonical=_class_canonical(fieldL, s))
    if fieldK.q < 3:
        return Finding(kind=SKIPPED, payload={
            "reason": "subfield has no exponent range"}, **base)
    degree = fieldL.m // fieldK.m
    s_k = s % (fieldK.q - 1)
    if not is_invertible(fieldK.q, s_k):
        raise AssertionError("restriction of an invertible exponent stays"
                             " invertible")
    rep_l = val_report(fieldL, s)
    rep_k = val_report(fieldK, s_k)
    payload = {
        "degree": degree,
        "subfield": fieldK.descriptor(),
        "exponent_on_subfield": s_k,
        "val_phi_L": rep_l.val_phi,
        "val_phi_K": rep_k.val_phi,
    }
    if rep_l.val_phi <= rep_k.val_phi * degree:
        return Finding(kind=PASS, payload=payload, **base)
    payload["report_L"] = rep_l.to_record()
    payload["report_K"] = rep_k.to_record()
    payload.update(_spectrum_payload(fieldL, s))
    return Finding(kind=COUNTEREXAMPLE, payload=payload, **base)


def check_cmpr_bound(field: FiniteField, s: int) -> Finding:
    """2 val_phi <= (p - 1) [L:F_p] when the degree is a power of two.

    Applies to invertible nontrivial classes only; the trivial class has
    val_phi = (p - 1) m, which is exactly why it is excluded.
    """
    s = _require_invertible(field, s)
    p, m = field.p, field.m
    base = dict(check="cmpr", p=p, m=m, field=field.descriptor(),
                canonical=_class_canonical(field, s))
    if m & (m - 1):
        return Finding(kind=SKIPPED, payload={
            "reason": "degree is not a power of two"}, **base)
    if field.q < 3:
        return Finding(kind=SKIPPED, payload={"reason": "no exponent range"},
                       **base)
    if approx_class(field.q, p, s).is_trivial:
        return Finding(kind=SKIPPED, payload={"reason": "trivial class"},
                       **base)
    rep = val_report(field, s)
    payload = {"val_phi": rep.val_phi, "bound": (p - 1) * m,
               "val_p": str(rep.val_p)}
    if 2 * rep.val_phi <= (p - 1) * m:
        return Finding(kind=PASS, payload=payload, **base)
    payload["report"] = rep.to_record()
    payload.update(_spectrum_payload(field, s))
    return Finding(kind=COUNTEREXAMPLE, payload=payload, **base)


def check_quadratic_lemma(fieldL: FiniteField, fieldK: FiniteField,
                          s: int) -> Finding:
    """Quadratic extension: -|K| is a value and 2 val_phi = (p - 1) [L:F_p].

    Preconditions: [L:K] = 2, s = 1 mod |K*|, s != 1 mod |L*|, and the
    class of s is nontrivial. The last condition is forced: a Frobenius
    power p^(m/2) satisfies both congruences but its spectrum is {0, q},
    which contains no -|K|.
    """
    if fieldK.p != fieldL.p:
        raise CharacteristicMismatch(
            f"{fieldK.p} != {fieldL.p}: not a subfield pair")
    if fieldL.m != 2 * fieldK.m:
        raise DegreeMismatch(
            f"extension degree must be 2, got {fieldL.m}/{fieldK.m}")
    s = _require_invertible(fieldL, s)
    p, m = fieldL.p, fieldL.m
    base = dict(check="quadra", p=p, m=m, field=fieldL.descriptor(),
                canonical=_class_canonical(fieldL, s))
    q_k = fieldK.q
    if s % (q_k - 1) != 1 % (q_k - 1):
        return Finding(kind=SKIPPED, payload={
            "reason": "exponent is not 1 mod |K*|"}, **base)
    if s % (fieldL.q - 1) == 1:
        return Finding(kind=SKIPPED, payload={
            "reason": "exponent is 1 mod |L*|"}, **base)
    if approx_class(fieldL.q, p, s).is_trivial:
        return Finding(kind=SKIPPED, payload={
            "reason": "trivial class (a Frobenius power)"}, **base)
    # s = 1 mod |K*| implies s = 1 mod p-1, so the spectrum is rational
    w = integer_value_rows(fieldL, s)
    hits = np.nonzero(w[1:] == -q_k)[0]
    rep = val_report(fieldL, s)
    payload = {"value": -q_k, "val_phi": rep.val_phi,
               "expected_val_phi_doubled": (p - 1) * m}
    if hits.size and 2 * rep.val_phi == (p - 1) * m:
        payload["a"] = int(hits[0]) + 1
        return Finding(kind=PASS, payload=payload, **base)
    payload["value_present"] = bool(hits.size)
    payload["report"] = rep.to_record()
    payload.update(_spectrum_payload(fieldL, s))
    return Finding(kind=COUNTEREXAMPLE, payload=payload, **base)
