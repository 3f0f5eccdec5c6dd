"""Weil spectra of power maps and their convolution-algebra identities.

The spectrum of x -> x^s over L is the family of exact character sums

    W(a) = sum_{x in L} zeta_p^(Tr(x^s - a x)),   a in L,

stored as counts of trace exponents, so every value is an exact element of
Z[zeta_p]. Two independent engines produce the dense table: NAIVE evaluates
the defining sum per a, FAST runs an additive-character transform and
permutes rows through the trace-dual basis. They must agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .cyclotomic import CycInt
from .errors import (
    ConfigInvalid,
    FieldTooLarge,
    InvalidElement,
    NonUnit,
    NotInvertible,
    NotRational,
    ZeroScalar,
)
from .exponents import approx_class
from .findings import COUNTEREXAMPLE, SKIPPED, WITNESS, Finding
from .gf import ZECH_NONE, FiniteField

# dense tables hold q*p int64 entries; above this we refuse and callers must
# stream rows through integer_value_rows instead
_MAX_DENSE_ENTRIES = 1 << 27
# pair tables are q*q; moments of order 3 and 4 need them
_MAX_PAIR_Q = 1 << 10
_MAX_DETERMINANT_Q = 32
_MAX_CONVOLUTION_Q = 64
_DET_TOLERANCE = 1e-6


def _require_exponent(s: int) -> int:
    s = int(s)
    if s < 1:
        raise InvalidElement(f"exponent must be a positive integer, got {s}")
    return s


def _require_invertible(field: FiniteField, s: int) -> int:
    s = _require_exponent(s)
    if math.gcd(s, field.q - 1) != 1:
        raise NotInvertible(
            f"gcd({s}, {field.q - 1}) != 1: x^s is not a permutation")
    return s


def trace_powers(field: FiniteField, s: int, scale: int = 1) -> np.ndarray:
    """tau[code] = Tr(scale * x^s) where x is the element with that code."""
    s = _require_exponent(s)
    q = field.q
    if scale == 0:
        raise ZeroScalar("scale must be a unit")
    ls = field.log(scale)
    tau = np.zeros(q, dtype=np.int64)
    k = np.arange(q - 1, dtype=np.int64)
    tau[1:] = field.trace_of_log[(k * s + ls) % (q - 1)]
    return tau


def _counts_rows(field: FiniteField, tau: np.ndarray, codes: np.ndarray,
                 backend: str | None = None) -> np.ndarray:
    """Rows of the dense counts table for the given a-codes, by direct sums."""
    return _kernels.naive_counts(tau[1:], field.trace_of_log, codes,
                                 field.p, field.q, backend=backend)


def _row_block(q: int) -> int:
    # the numpy variant of naive_counts materialises a block x (q-1) table
    return max(1, min(1024, (1 << 23) // q))


def dense_counts(field: FiniteField, s: int, algorithm: str = "FAST",
                 scale: int = 1, backend: str | None = None) -> np.ndarray:
    """counts[a_code, j] = #{x in L : Tr(scale * x^s - a x) = j}, exact.

    W(a) is recovered as sum_j counts[a][j] * zeta^j. The NAIVE engine costs
    O(q^2), the FAST engine O(q p m) plus a row permutation through the
    trace-dual basis; both return identical arrays.
    """
    p, m, q = field.p, field.m, field.q
    if q * p > _MAX_DENSE_ENTRIES:
        raise FieldTooLarge(
            f"dense spectrum table would hold {q * p} entries "
            f"(limit {_MAX_DENSE_ENTRIES}); stream integer_value_rows instead")
    tau = trace_powers(field, s, scale)
    if algorithm == "NAIVE":
        out = np.empty((q, p), dtype=np.int64)
        block = _row_block(q)
        for lo in range(0, q, block):
            codes = np.arange(lo, min(lo + block, q), dtype=np.int64)
            out[codes] = _counts_rows(field, tau, codes, backend)
        return out
    if algorithm != "FAST":
        raise ConfigInvalid(f"algorithm must be FAST or NAIVE, got {algorithm!r}")
    exps = np.zeros(q, dtype=np.int64)
    exps[field.poly_of_log] = tau[1:]
    if p == 2:
        vals = 1 - 2 * exps
        w = _kernels.wht(vals, backend=backend)
        stacked = np.stack([(q + w) // 2, (q - w) // 2], axis=1)
    else:
        stacked = _kernels.pary_transform(exps, p, m, backend=backend)
    counts = np.empty_like(stacked)
    counts[field.code_by_dual] = stacked
    return counts


def _canonical_coords(counts: np.ndarray, p: int) -> np.ndarray:
    """Counts rows to power-basis coordinates (zeta^(p-1) eliminated)."""
    return counts[:, : p - 1] - counts[:, p - 1:]


def value_coords(field: FiniteField, s: int, algorithm: str = "FAST",
                 scale: int = 1, backend: str | None = None) -> np.ndarray:
    """Canonical Z[zeta_p] coordinates of W(a), one row per element code."""
    return _canonical_coords(dense_counts(field, s, algorithm, scale, backend),
                             field.p)


def weil_sum(field: FiniteField, s: int, a: int) -> CycInt:
    """Exact W(a) for a single a, by direct evaluation in O(q)."""
    s = _require_exponent(s)
    field._check_code(a)
    p, q = field.p, field.q
    tau = trace_powers(field, s)
    row = _counts_rows(field, tau, np.array([a], dtype=np.int64))[0]
    return CycInt.from_counts(p, row.tolist())


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Exact Weil spectrum: value at a = 0 plus multiplicities over L*."""

    field: FiniteField
    s: int
    at_zero: CycInt
    reduced: dict  # CycInt -> multiplicity, keys in lexicographic coordinate order

    @property
    def q(self) -> int:
        return self.field.q

    def reduced_items(self):
        return list(self.reduced.items())

    def distinct_values(self):
        return list(self.reduced.keys())

    def to_record(self) -> dict:
        return {
            "s": self.s,
            "at_zero": value_label(self.at_zero),
            "reduced": [[value_label(v), n] for v, n in self.reduced.items()],
        }


def value_label(v: CycInt) -> str:
    """Readable exact label: plain integer when rational, else coordinates."""
    if v.is_rational():
        return str(v.as_int())
    return "(" + ",".join(str(c) for c in v.coords) + ")"


@lru_cache(maxsize=4)
def _coords_cached(field: FiniteField, s: int) -> np.ndarray:
    # shared by the spectrum checks that each need the same transform;
    # callers must not mutate the returned array
    return value_coords(field, s)


def full_spectrum(field: FiniteField, s: int, algorithm: str = "FAST",
                  backend: str | None = None) -> Spectrum:
    if algorithm == "FAST" and backend is None:
        coords = _coords_cached(field, s)
    else:
        coords = value_coords(field, s, algorithm, backend=backend)
    p = field.p
    at_zero = CycInt(p, coords[0].tolist())
    uniq, mult = np.unique(coords[1:], axis=0, return_counts=True)
    reduced = {CycInt(p, row.tolist()): int(n) for row, n in zip(uniq, mult)}
    return Spectrum(field=field, s=s, at_zero=at_zero, reduced=reduced)


def spectrum_stats(spectrum: Spectrum) -> dict:
    """Summary of an invertible class: value count, singularity, rationality."""
    field = spectrum.field
    _require_invertible(field, spectrum.s)
    values = spectrum.distinct_values()
    return {
        "value_count": len(values),
        "is_singular": any(v.is_zero() for v in values),
        "is_integer_valued": all(v.is_rational() for v in values),
        "congruence": spectrum.s % (field.p - 1) if field.p > 2 else 0,
    }


def reduced_value_summary(field: FiniteField, s: int) -> tuple[int, bool]:
    """(floor, rational) for the reduced spectrum, without building values.

    floor is the number of distinct zeta-free coordinates over L*, a lower
    bound for the number of distinct reduced values; rational reports an
    all-rational spectrum, in which case the bound is exact. Lets callers
    that only need "more than r values" skip the value construction.
    """
    s = _require_exponent(s)
    coords = _coords_cached(field, s)
    rational = field.p == 2 or not coords[1:, 1:].any()
    floor = int(np.unique(coords[1:, 0]).size)
    return floor, rational


def power_moment(spectrum: Spectrum, k: int) -> CycInt:
    """Exact sum_{a in L} W(a)^k from the reduced spectrum."""
    if k < 1:
        raise InvalidElement(f"moment order must be >= 1, got {k}")
    total = spectrum.at_zero ** k
    for v, n in spectrum.reduced.items():
        total = total + v ** k * n
    return total


def integer_value_rows(field: FiniteField, s: int,
                       force_stream: bool = False) -> np.ndarray:
    """w[code] = W(a) as a plain integer for every a, exact.

    Uses the FAST dense table when it fits in memory and otherwise streams
    direct rows in blocks (O(q) memory). Raises NotRational on the first a
    whose value is irrational; rational spectra are exactly those of
    exponents s = 1 (mod p-1).
    """
    s = _require_exponent(s)
    p, q = field.p, field.q
    if not force_stream and q * p <= (1 << 24):
        rows = dense_counts(field, s)
        if p > 2:
            tail = rows[:, 1:]
            bad = np.nonzero((tail != tail[:, :1]).any(axis=1))[0]
            if bad.size:
                raise NotRational(f"W(a) is irrational at code {int(bad[0])}")
        return rows[:, 0] - rows[:, 1]
    tau = trace_powers(field, s)
    w = np.empty(q, dtype=np.int64)
    block = _row_block(q)
    for lo in range(0, q, block):
        codes = np.arange(lo, min(lo + block, q), dtype=np.int64)
        rows = _counts_rows(field, tau, codes)
        if p > 2:
            tail = rows[:, 1:]
            bad = np.nonzero((tail != tail[:, :1]).any(axis=1))[0]
            if bad.size:
                raise NotRational(
                    f"W(a) is irrational at code {int(codes[bad[0]])}")
        w[codes] = rows[:, 0] - rows[:, 1]
    return w


# ---------------------------------------------------------------------------
# exact power moments by direct solution counting (orthogonality route)


@lru_cache(maxsize=2)
def _pair_add_codes(field: FiniteField) -> np.ndarray:
    """codes of x + y for every pair of codes; q x q int32 table."""
    p, m, q = field.p, field.m, field.q
    if q > _MAX_PAIR_Q:
        raise FieldTooLarge(f"pair table needs q <= {_MAX_PAIR_Q}, got q = {q}")
    packed = np.empty(q, dtype=np.int64)
    packed[0] = 0
    packed[1:] = field.poly_of_log
    if p == 2:
        total = packed[:, None] ^ packed[None, :]
    else:
        a = packed[:, None].copy()
        b = packed[None, :].copy()
        total = np.zeros((q, q), dtype=np.int64)
        power = 1
        for _ in range(m):
            total += ((a % p + b % p) % p) * power
            a //= p
            b //= p
            power *= p
    codes = np.where(total == 0, 0, field.log_of_poly[total] + 1)
    return codes.astype(np.int32)


def _neg_codes(field: FiniteField) -> np.ndarray:
    q = field.q
    out = np.arange(q, dtype=np.int64)
    if field.p != 2:
        out[1:] = (np.arange(q - 1) + field.neg_log_offset) % (q - 1) + 1
    return out


def moment_exact(field: FiniteField, s: int, k: int) -> CycInt:
    """Exact sum_{a in L} W(a)^k without computing any spectrum.

    Character orthogonality collapses the a-sum to counting solution tuples
    of x_1 + ... + x_k = 0, so this is an independent cross-check of the
    transform engines. k = 3, 4 need the q x q pair table; k = 4 additionally
    assumes an invertible exponent (where all values are real).
    """
    s = _require_exponent(s)
    p, q = field.p, field.q
    tau = trace_powers(field, s)
    if k == 1:
        counts = [0] * p
        counts[int(tau[0])] = q
        return CycInt.from_counts(p, counts)
    if k == 2:
        neg = _neg_codes(field)
        e = (tau + tau[neg]) % p
        return CycInt.from_counts(p, np.bincount(e, minlength=p).tolist()) * q
    if k == 3:
        add = _pair_add_codes(field)
        neg = _neg_codes(field)
        e = tau[neg[add]]
        e += tau[:, None]
        e += tau[None, :]
        e %= p
        counts = np.bincount(e.ravel(), minlength=p)
        return CycInt.from_counts(p, counts.tolist()) * q
    if k == 4:
        _require_invertible(field, s)
        add = _pair_add_codes(field)
        pair_tr = (tau[:, None] + tau[None, :]) % p
        flat = add.astype(np.int64) * p + pair_tr
        conv = np.bincount(flat.ravel(), minlength=q * p).reshape(q, p)
        # entries stay below q and the Gram sums below q^3 < 2^53, so the
        # float64 matmul is exact integer arithmetic
        cf = conv.astype(np.float64)
        gram = cf.T @ cf
        shift = (np.arange(p)[None, :] - np.arange(p)[:, None]) % p
        coords = np.bincount(shift.ravel(), weights=gram.ravel(), minlength=p)
        counts = [int(round(c)) for c in coords]
        return CycInt.from_counts(p, counts) * q
    raise InvalidElement(f"moment order must be 1..4, got {k}")


# ---------------------------------------------------------------------------
# transformation laws


def _galois_coords(coords: np.ndarray, p: int, r: int) -> np.ndarray:
    """Apply zeta -> zeta^r to every row of canonical coordinates."""
    n = coords.shape[0]
    full = np.zeros((n, p), dtype=np.int64)
    full[:, (np.arange(p - 1) * r) % p] = coords
    return full[:, : p - 1] - full[:, p - 1:]


def verify_scaling_law(field: FiniteField, s: int, b: int) -> bool:
    """Spectrum of x -> b x^s is the a -> a b^(-1/s) rearrangement of x -> x^s."""
    s = _require_invertible(field, s)
    field._check_code(b)
    if b == 0:
        raise ZeroScalar("scaling constant must be a unit")
    q = field.q
    base = dense_counts(field, s)
    scaled = dense_counts(field, s, scale=b)
    s_inv = pow(s, -1, q - 1)
    shift = (-s_inv * field.log(b)) % (q - 1)
    perm = np.zeros(q, dtype=np.int64)
    perm[1:] = (np.arange(q - 1) + shift) % (q - 1) + 1
    return bool(np.array_equal(scaled, base[perm]))


def verify_galois_law(field: FiniteField, s: int, r: int) -> bool:
    """Galois action: zeta -> zeta^r sends W(a) to W(a r^(1 - 1/s))."""
    s = _require_invertible(field, s)
    p, q = field.p, field.q
    if r % p == 0:
        raise NonUnit(f"{r} is not a unit modulo {p}")
    coords = value_coords(field, s)
    lhs = _galois_coords(coords, p, r % p)
    lr = field.log(field.from_int(r % p))
    shift = (lr * ((1 - pow(s, -1, q - 1)) % (q - 1))) % (q - 1)
    perm = np.zeros(q, dtype=np.int64)
    perm[1:] = (np.arange(q - 1) + shift) % (q - 1) + 1
    return bool(np.array_equal(lhs, coords[perm]))


def verify_algebraic_degree(field: FiniteField, s: int) -> bool:
    """Rationality and fixed-field laws of the spectrum under Gal(Q(zeta)/Q).

    The spectrum is integer valued iff s = 1 (mod p-1), and zeta -> zeta^r
    fixes it pointwise iff r^(s-1) = 1 (mod p).
    """
    s = _require_invertible(field, s)
    p = field.p
    coords = value_coords(field, s)
    integral = bool((coords[:, 1:] == 0).all()) if p > 2 else True
    if integral != (s % (p - 1) == 1 % (p - 1)):
        return False
    for r in range(2, p):
        fixed = bool(np.array_equal(_galois_coords(coords, p, r), coords))
        if fixed != (pow(r, s - 1, p) == 1):
            return False
    return True


def verify_poisson(field: FiniteField, s: int, basis: list[int]) -> bool:
    """Poisson summation over the span S of the given basis codes.

    Checks sum_{a in S_perp} W(a) mu(a x) = (q / |S|) sum_{t in S} mu(f(x + t))
    exactly for every x in L.
    """
    s = _require_exponent(s)
    p, q = field.p, field.q
    for t in basis:
        field._check_code(t)
        if t == 0:
            raise InvalidElement("basis elements must be nonzero")
    span = {0}
    for t in basis:
        scaled = [field.mul(t, field.from_int(c)) for c in range(1, p)]
        span = {field.add(x, y) for x in span for y in [0] + scaled}
    if len(span) != p ** len(basis):
        raise InvalidElement("basis codes are not linearly independent")

    perp = np.ones(q, dtype=bool)
    k = np.arange(q - 1, dtype=np.int64)
    for t in basis:
        lt = field.log(t)
        tr_t = np.zeros(q, dtype=np.int64)
        tr_t[1:] = field.trace_of_log[(k + lt) % (q - 1)]
        perp &= tr_t == 0

    counts = dense_counts(field, s)
    cols = np.arange(p, dtype=np.int64)
    lhs = np.zeros((q, p), dtype=np.int64)
    for a in np.nonzero(perp)[0]:
        if a == 0:
            tr_ax = np.zeros(q, dtype=np.int64)
        else:
            tr_ax = np.zeros(q, dtype=np.int64)
            tr_ax[1:] = field.trace_of_log[(k + (a - 1)) % (q - 1)]
        lhs += counts[a][(cols[None, :] - tr_ax[:, None]) % p]

    tau = trace_powers(field, s)
    rhs = np.zeros((q, p), dtype=np.int64)
    weight = q // len(span)
    codes = np.arange(q, dtype=np.int64)
    for t in sorted(span):
        shifted = np.array([field.add(int(x), t) for x in codes])
        rhs[codes, tau[shifted]] += weight
    return bool(np.array_equal(_canonical_coords(lhs, p),
                               _canonical_coords(rhs, p)))


# ---------------------------------------------------------------------------
# convolution powers and annihilating identities


def _conv_packed(field: FiniteField, s: int, n: int) -> list[list[int]]:
    """Counts vectors of f^[1..n] with f = mu(x^s), packed into big integers.

    Level k holds, for each z, the vector #{(x_1..x_k): sum x_i = z,
    Tr(sum x_i^s) = t} encoded as sum_t c_t X^t with X = 2^bits, reduced
    cyclically by X^p = 1. Plain Python integers keep this exact: the
    coefficients reach q^(k-1), far beyond int64.
    """
    p, q = field.p, field.q
    tau = trace_powers(field, s)
    bits = max(n, 1) * q.bit_length() + 4
    mask_all = (1 << (p * bits)) - 1

    neg = _neg_codes(field)
    sub = np.asarray(_pair_add_codes(field))[:, neg]

    levels = []
    state = [1 << (int(tau[x]) * bits) for x in range(q)]
    levels.append(list(state))
    shifts = [int(tau[x]) * bits for x in range(q)]
    for _ in range(n - 1):
        nxt = [0] * q
        for x in range(q):
            sh = shifts[x]
            row = sub[:, x]
            for z in range(q):
                nxt[z] += state[row[z]] << sh
        for z in range(q):
            v = nxt[z]
            while v > mask_all:
                v = (v & mask_all) + (v >> (p * bits))
            nxt[z] = v
        state = nxt
        levels.append(list(state))
    return [_unpack_level(level, p, bits) for level in levels]


def _unpack_level(level: list[int], p: int, bits: int) -> list[list[int]]:
    mask = (1 << bits) - 1
    return [[(v >> (t * bits)) & mask for t in range(p)] for v in level]


def convolution_power(field: FiniteField, s: int, n: int) -> dict[int, CycInt]:
    """n-fold additive convolution of mu(f) with itself, exact per element.

    Returns {code z: f^[n](z)}; n = 0 is the convolution identity (indicator
    of zero). Cost is O(n q^2) big-integer operations, so q is capped.
    """
    s = _require_exponent(s)
    p, q = field.p, field.q
    if q > _MAX_CONVOLUTION_Q:
        raise FieldTooLarge(
            f"convolution powers need q <= {_MAX_CONVOLUTION_Q}, got q = {q}")
    if n < 0:
        raise InvalidElement(f"convolution order must be >= 0, got {n}")
    if n == 0:
        out = {z: CycInt.from_int(p, 0) for z in range(q)}
        out[0] = CycInt.from_int(p, 1)
        return out
    levels = _conv_packed(field, s, n)
    return {z: CycInt.from_counts(p, counts)
            for z, counts in enumerate(levels[n - 1])}


def _sigma_coefficients(values: list[CycInt], p: int) -> list[CycInt]:
    """Coefficients sigma_0..sigma_r of prod_i (T - A_i), sigma_0 = 1."""
    coeffs = [CycInt.from_int(p, 1)]
    for a in values:
        nxt = coeffs + [CycInt.from_int(p, 0)]
        for i in range(len(coeffs), 0, -1):
            nxt[i] = nxt[i] - coeffs[i - 1] * a
        coeffs = nxt
    return coeffs


def _poly_value(coeffs: list[CycInt], x: CycInt, p: int) -> CycInt:
    acc = CycInt.from_int(p, 0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def verify_annihilating_identity(field: FiniteField, s: int) -> bool:
    """Exact annihilator laws attached to the distinct spectrum values.

    With A_1..A_r the distinct values of W on L* and sigma_i their signed
    elementary symmetric functions:
      (1) sum_i sigma_i W(a)^(r-i) = sigma_r delta_0(a) for every a,
      (2) q sum_i sigma_i f^[r-i](z) = sigma_r for every z,
      (3) when 0 is a value, the kernel expansion over the nonzero values:
          q sum_i sigma'_i f^[n-i](z) = sigma'_n sum_{c: W(c)=0} mu(c z),
      (4) q divides the product of the nonzero values.
    """
    s = _require_invertible(field, s)
    p, q = field.p, field.q
    if q > _MAX_CONVOLUTION_Q:
        raise FieldTooLarge(
            f"annihilating identities need q <= {_MAX_CONVOLUTION_Q}, got q = {q}")
    spec = full_spectrum(field, s)
    values = spec.distinct_values()
    r = len(values)
    sigma = _sigma_coefficients(values, p)
    for v in values:
        if not _poly_value(sigma, v, p).is_zero():
            return False

    levels = _conv_packed(field, s, r)
    layers = [convolution_power(field, s, 0)]
    layers.extend({z: CycInt.from_counts(p, counts)
                   for z, counts in enumerate(level)} for level in levels)
    sigma_r = sigma[r]
    for z in range(q):
        acc = CycInt.from_int(p, 0)
        for i in range(r + 1):
            acc = acc + sigma[i] * layers[r - i][z]
        if not (acc * q) == sigma_r:
            return False

    nonzero = [v for v in values if not v.is_zero()]
    product = CycInt.from_int(p, 1)
    for v in nonzero:
        product = product * v
    if any(c % q for c in product.coords):
        return False

    if len(nonzero) < r:
        n = len(nonzero)
        sigma_nz = _sigma_coefficients(nonzero, p)
        coords = value_coords(field, s)
        zero_codes = [a for a in range(q) if not coords[a].any()]
        for z in range(q):
            acc = CycInt.from_int(p, 0)
            for i in range(n + 1):
                acc = acc + sigma_nz[i] * layers[n - i][z]
            kernel_counts = [0] * p
            for c in zero_codes:
                if c == 0 or z == 0:
                    kernel_counts[0] += 1
                else:
                    t = field.trace_of_log[((c - 1) + (z - 1)) % (q - 1)]
                    kernel_counts[int(t)] += 1
            rhs = sigma_nz[n] * CycInt.from_counts(p, kernel_counts)
            if not (acc * q) == rhs:
                return False
    return True


def verify_pair_system_count(field: FiniteField, s: int) -> bool:
    """Solution count of {x1^s + x2^s = 0, w x1 + w^2 x2 = 0} versus the
    shifted spectrum product sum, w the canonical generator.

    The exact identity is q^2 (N - 1) = (q-1) sum_j W(w^j) W(w^(j+1)).
    """
    s = _require_invertible(field, s)
    p, q = field.p, field.q
    if q > _MAX_CONVOLUTION_Q:
        raise FieldTooLarge(
            f"pair system check needs q <= {_MAX_CONVOLUTION_Q}, got q = {q}")
    if q < 3:
        raise InvalidElement("needs a generator distinct from 1, so q >= 3")
    qm1 = q - 1
    # x2 = -x1 / w, so count x1 = w^k with w^(ks) (1 + w^(lc s)) = 0
    lc = (field.neg_log_offset - 1) % qm1
    zech = field.zech_of_log
    direct = 1  # x1 = x2 = 0
    if zech[(lc * s) % qm1] == ZECH_NONE:
        direct += qm1
    w = value_coords(field, s)
    vals = [CycInt(p, w[k + 1].tolist()) for k in range(qm1)]
    total = CycInt.from_int(p, 0)
    for j in range(qm1):
        total = total + vals[j] * vals[(j + 1) % qm1]
    return (total * qm1) == q * q * (direct - 1)


# ---------------------------------------------------------------------------
# determinant identities


def determinant_identities(field: FiniteField, s: int) -> dict:
    """Both determinant factorizations of the character-kernel matrices.

    eigen:   prod_{a in L} W(a)   = det[ mu(f(a - b)) ]_{a,b in L}
    reduced: -q prod_{a in L*} W(a) = det[ mu(f(x - y)) - 1 ]_{x,y in L}

    (Subtracting the all-ones matrix shifts only the eigenvalue at a = 0,
    from W(0) = 0 to -q, which is where the second identity comes from.)

    The left sides are exact; determinants are floating point, so the match
    flags compare against 1e-6 of the product scale prod max(1, |W(a)|).
    """
    s = _require_invertible(field, s)
    p, q = field.p, field.q
    if q > _MAX_DETERMINANT_Q:
        raise FieldTooLarge(
            f"determinant identities need q <= {_MAX_DETERMINANT_Q}, got q = {q}")
    coords = value_coords(field, s)
    values = [CycInt(p, coords[a].tolist()) for a in range(q)]
    tau = trace_powers(field, s)
    zeta = complex(math.cos(2 * math.pi / p), math.sin(2 * math.pi / p))
    mu = zeta ** np.arange(p)
    add = np.asarray(_pair_add_codes(field))
    neg = _neg_codes(field)
    sub = add[:, neg]
    kernel = mu[tau[sub]]

    lhs_eigen = complex(1.0)
    scale = 1.0
    for v in values:
        c = v.to_complex()
        lhs_eigen *= c
        scale *= max(1.0, abs(c))
    rhs_eigen = complex(np.linalg.det(kernel))

    lhs_reduced = complex(-q)
    for v in values[1:]:
        lhs_reduced *= v.to_complex()
    rhs_reduced = complex(np.linalg.det(kernel - 1))

    def pack(lhs, rhs):
        return {
            "lhs": [lhs.real, lhs.imag],
            "rhs": [rhs.real, rhs.imag],
            "match": bool(abs(lhs - rhs) <= _DET_TOLERANCE * scale),
        }

    return {
        "eigen": pack(lhs_eigen, rhs_eigen),
        "reduced": pack(lhs_reduced, rhs_reduced),
        "scale": scale,
    }


# ---------------------------------------------------------------------------
# three-valued structure


@dataclass(frozen=True)
class ThreeValuedReport:
    """Structure constants of a three-valued spectrum {0, A, B}."""

    A: int
    B: int
    N_A: int
    N_B: int
    N_zero: int
    a: int
    b: int
    c: int
    alpha: int
    beta: int
    gamma: int
    V: int
    violations: tuple

    @property
    def consistent(self) -> bool:
        return not self.violations

    def to_record(self) -> dict:
        return {
            "A": self.A, "B": self.B,
            "N_A": self.N_A, "N_B": self.N_B, "N_zero": self.N_zero,
            "a": self.a, "b": self.b, "c": self.c,
            "alpha": self.alpha, "beta": self.beta, "gamma": self.gamma,
            "V": self.V,
            "violations": list(self.violations),
        }


def _val_p(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def three_valued_report(field: FiniteField, s: int,
                        spectrum: Spectrum | None = None) -> ThreeValuedReport | None:
    """Full structural report when the reduced spectrum has exactly 3 values.

    Verifies the closed-form multiplicity formulas, both moment identities,
    the p-adic splittings A = p^a alpha, B = p^b beta, A - B = p^c gamma with
    alpha, beta, gamma pairwise coprime, and the divisibilities
    alpha gamma | q - B, beta gamma | q - A. Violations are listed, never
    silently dropped. Returns None when the spectrum is not three-valued.
    """
    s = _require_invertible(field, s)
    p, q = field.p, field.q
    spec = spectrum if spectrum is not None else full_spectrum(field, s)
    if len(spec.reduced) != 3:
        return None
    violations = []
    items = spec.reduced_items()
    if not all(v.is_rational() for v, _ in items):
        return ThreeValuedReport(0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
                                 ("irrational values in a 3-valued spectrum",))
    table = {v.as_int(): n for v, n in items}
    if 0 not in table:
        violations.append("zero is not among the values")
        return ThreeValuedReport(0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
                                 tuple(violations))
    if s % (p - 1) != 1 % (p - 1):
        violations.append("exponent is not 1 mod p-1")
    nonzero = sorted(v for v in table if v != 0)
    B, A = nonzero[0], nonzero[1]
    N_A, N_B, N_zero = table[A], table[B], table[0]
    if N_A * A + N_B * B != q:
        violations.append("first moment != q")
    if N_A * A * A + N_B * B * B != q * q:
        violations.append("second moment != q^2")
    num_a, den_a = q * (q - B), A * (A - B)
    num_b, den_b = q * (q - A), B * (B - A)
    if num_a % den_a or num_a // den_a != N_A:
        violations.append("multiplicity formula fails for A")
    if num_b % den_b or num_b // den_b != N_B:
        violations.append("multiplicity formula fails for B")
    if (A * B) % q:
        violations.append("q does not divide AB")
        V = 0
    else:
        V = A + B - (A * B) // q
    a, b, c = _val_p(A, p), _val_p(B, p), _val_p(A - B, p)
    alpha, beta, gamma = A // p ** a, B // p ** b, (A - B) // p ** c
    for x, y, label in ((alpha, beta, "alpha, beta"),
                        (alpha, gamma, "alpha, gamma"),
                        (beta, gamma, "beta, gamma")):
        if math.gcd(abs(x), abs(y)) != 1:
            violations.append(f"{label} are not coprime")
    if (q - B) % (alpha * gamma):
        violations.append("alpha gamma does not divide q - B")
    if (q - A) % (beta * gamma):
        violations.append("beta gamma does not divide q - A")
    return ThreeValuedReport(A=A, B=B, N_A=N_A, N_B=N_B, N_zero=N_zero,
                             a=a, b=b, c=c, alpha=alpha, beta=beta,
                             gamma=gamma, V=V, violations=tuple(violations))


# ---------------------------------------------------------------------------
# vanishing and mod-3 checks


def _spectrum_payload(field: FiniteField, s: int) -> dict:
    spec = full_spectrum(field, s)
    return {"spectrum": spec.to_record()["reduced"]}


def _class_canonical(field: FiniteField, s: int) -> int:
    if field.q < 3:
        return 0  # no exponent range, field-level placeholder
    return approx_class(field.q, field.p, s).canonical


def check_vanishing(field: FiniteField, s: int) -> Finding:
    """Search for a in L* with W(a) = 0; applies to s = 1 (mod p-1), q > 2.

    Emits WITNESS with the vanishing a, COUNTEREXAMPLE with the full spectrum
    if no value vanishes, SKIPPED when the congruence precondition fails.
    """
    s = _require_invertible(field, s)
    p, q = field.p, field.q
    base = dict(check="vanishing", p=p, m=field.m, field=field.descriptor(),
                canonical=_class_canonical(field, s))
    if q <= 2:
        return Finding(kind=SKIPPED, payload={"reason": "q must exceed 2"}, **base)
    if s % (p - 1) != 1 % (p - 1):
        return Finding(kind=SKIPPED,
                       payload={"reason": "exponent not 1 mod p-1"}, **base)
    w = integer_value_rows(field, s)
    zeros = np.nonzero(w[1:] == 0)[0]
    if zeros.size:
        a = int(zeros[0]) + 1
        return Finding(kind=WITNESS, payload={"a": a, "value": 0}, **base)
    return Finding(kind=COUNTEREXAMPLE, payload=_spectrum_payload(field, s), **base)


def check_mod3(field: FiniteField, s: int) -> Finding:
    """Search for a in L* with W(a) = 0 (mod 3); same scope as check_vanishing."""
    s = _require_invertible(field, s)
    p, q = field.p, field.q
    base = dict(check="mod3", p=p, m=field.m, field=field.descriptor(),
                canonical=_class_canonical(field, s))
    if q <= 2:
        return Finding(kind=SKIPPED, payload={"reason": "q must exceed 2"}, **base)
    if s % (p - 1) != 1 % (p - 1):
        return Finding(kind=SKIPPED,
                       payload={"reason": "exponent not 1 mod p-1"}, **base)
    w = integer_value_rows(field, s)
    hits = np.nonzero(w[1:] % 3 == 0)[0]
    if hits.size:
        a = int(hits[0]) + 1
        return Finding(kind=WITNESS, payload={"a": a, "value": int(w[a])}, **base)
    return Finding(kind=COUNTEREXAMPLE, payload=_spectrum_payload(field, s), **base)
