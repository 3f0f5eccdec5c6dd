"""Finite field F_{p^m} with discrete-log, trace and Zech-logarithm tables.

Elements are encoded as integers in [0, q): 0 is the zero element and
1 + k is omega^k for the primitive root omega = x mod (modulus). The packed
base-p value of the coefficient vector of omega^k is kept in poly_of_log,
with log_of_poly as its inverse; all additive structure (Zech table, traces,
character indexing) is derived from those two tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import (DegreeMismatch, FieldTooLarge, IndexOutOfRange,
                     InvalidElement, NonPrimitiveRoot, NotPrime,
                     ReducibleModulus)

MAX_Q = 2 ** 24

ZECH_NONE = -1


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (n stays below 2^24 here)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# -- small polynomial helpers over F_p (lists of ints, index = degree) -------


def _poly_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    m = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for k in range(len(prod) - 1, m - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for i in range(m):
                prod[k - m + i] = (prod[k - m + i] - c * mod[i]) % p
    out = prod[:m]
    while len(out) < m:
        out.append(0)
    return out


def _poly_powmod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    m = len(mod) - 1
    result = [1] + [0] * (m - 1)
    cur = list(base)
    while e:
        if e & 1:
            result = _poly_mulmod(result, cur, mod, p)
        cur = _poly_mulmod(cur, cur, mod, p)
        e >>= 1
    return result


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    def trim(v):
        while v and v[-1] == 0:
            v.pop()
        return v

    a, b = trim(list(a)), trim(list(b))
    while b:
        inv = pow(b[-1], p - 2, p)
        r = list(a)
        while len(r) >= len(b) and trim(r):
            if len(r) < len(b):
                break
            c = (r[-1] * inv) % p
            shift = len(r) - len(b)
            for i, bi in enumerate(b):
                r[shift + i] = (r[shift + i] - c * bi) % p
            trim(r)
        a, b = b, r
    return a


def _x_power_order_full(mod: list[int], p: int, m: int, q: int) -> bool:
    """True iff x has multiplicative order exactly q-1 in F_p[x]/(mod)."""
    x = [0] * m
    if m == 1:
        x[0] = (-mod[0]) % p
        if x[0] == 0:
            return False
    else:
        x[1] = 1
    one = [1] + [0] * (m - 1)
    if _poly_powmod(x, q - 1, mod, p) != one:
        return False
    for r in factorize(q - 1):
        if _poly_powmod(x, (q - 1) // r, mod, p) == one:
            return False
    return True


def _is_irreducible(mod: list[int], p: int, m: int) -> bool:
    if m == 1:
        return True
    if mod[0] == 0:
        return False
    x = [0, 1] + [0] * (m - 2)
    # Frobenius iterates x^(p^k) mod f
    frob = [x]
    for _ in range(m):
        frob.append(_poly_powmod(frob[-1], p, mod, p))
    minus_x = [(-c) % p for c in x]
    top = [(a + b) % p for a, b in zip(frob[m], minus_x)]
    if any(top):
        return False
    for r in factorize(m):
        h = [(a + b) % p for a, b in zip(frob[m // r], minus_x)]
        g = _poly_gcd(mod, h, p)
        if len(g) != 1:
            return False
    return True


def _default_modulus(p: int, m: int, q: int) -> tuple[int, ...]:
    """Smallest monic modulus with x primitive, ordered by the word
    (c_{m-1},...,c_0) with coefficient a_i = (-1)^(m-i) c_i mod p."""
    signs = [(-1) ** (m - i) % p for i in range(m)]
    word = [0] * m
    while True:
        # increment the word (c_0 fastest? the word orders c_{m-1} first,
        # so c_0 is the least significant position)
        for pos in range(m - 1, -1, -1):
            word[pos] += 1
            if word[pos] < p:
                break
            word[pos] = 0
        else:
            raise NonPrimitiveRoot(f"no primitive modulus of degree {m} over F_{p}")
        coeffs = [(signs[i] * word[m - 1 - i]) % p for i in range(m)]
        if coeffs[0] == 0:
            continue
        if _x_power_order_full(coeffs + [1], p, m, q):
            return tuple(coeffs) + (1,)


@dataclass(frozen=True)
class FieldSpec:
    p: int
    m: int
    modulus: tuple[int, ...]  # c_0..c_m, monic

    @property
    def q(self) -> int:
        return self.p ** self.m

    def descriptor(self) -> str:
        mod = ",".join(str(c) for c in self.modulus)
        return f"p={self.p} m={self.m} modulus={mod} generator=x"


def _inv_mod_p(mat: np.ndarray, p: int) -> np.ndarray:
    n = mat.shape[0]
    a = mat.astype(np.int64) % p
    inv = np.eye(n, dtype=np.int64)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r, col] % p), None)
        if piv is None:
            raise ValueError("singular matrix modulo p")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            inv[[col, piv]] = inv[[piv, col]]
        f = pow(int(a[col, col]), p - 2, p)
        a[col] = (a[col] * f) % p
        inv[col] = (inv[col] * f) % p
        for r in range(n):
            if r != col and a[r, col]:
                c = a[r, col].copy()
                a[r] = (a[r] - c * a[col]) % p
                inv[r] = (inv[r] - c * inv[col]) % p
    return inv


class FiniteField:
    """Immutable table-backed finite field; construct via build_field."""

    def __init__(self, spec: FieldSpec, backend: str | None = None):
        self.spec = spec
        self.p = spec.p
        self.m = spec.m
        self.q = spec.q
        self.modulus = spec.modulus
        self._build_tables(backend)

    def _build_tables(self, backend):
        p, m, q = self.p, self.m, self.q
        mod_low = np.array(self.modulus[:m], dtype=np.int64)
        antilog = _kernels.antilog_chain(mod_low, p, m, q, backend=backend)
        if antilog[0] != 1:
            raise NonPrimitiveRoot("antilog chain does not start at 1")
        log = np.full(q, -1, dtype=np.int64)
        log[antilog] = np.arange(q - 1, dtype=np.int64)
        if not np.array_equal(log[antilog], np.arange(q - 1)):
            raise NonPrimitiveRoot("x does not generate the unit group")
        self.poly_of_log = antilog
        self.log_of_poly = log

        tb = self._trace_basis()
        digits = antilog.copy()
        tr = np.zeros(q - 1, dtype=np.int64)
        for i in range(m):
            tr += tb[i] * (digits % p)
            digits //= p
        self.trace_of_log = tr % p

        c0 = antilog % p
        bumped = antilog - c0 + (c0 + 1) % p
        self.zech_of_log = np.where(bumped == 0, ZECH_NONE, log[bumped])
        none_at = (q - 1) // 2 if p != 2 else 0
        if self.zech_of_log[none_at] != ZECH_NONE or \
                int(np.count_nonzero(self.zech_of_log == ZECH_NONE)) != 1:
            raise NonPrimitiveRoot("inconsistent Zech table")
        self.neg_log_offset = 0 if p == 2 else (q - 1) // 2

    def _trace_basis(self) -> list[int]:
        """Tr(x^j) for j < 2m-1 from Newton's identities on the modulus."""
        p, m = self.p, self.m
        e = [0] * (m + 1)
        e[0] = 1
        for i in range(1, m + 1):
            e[i] = ((-1) ** i * self.modulus[m - i]) % p
        ps = [m % p]
        for k in range(1, 2 * m - 1):
            acc = 0
            for i in range(1, min(k, m) + 1):
                acc += (-1) ** (i - 1) * e[i] * ps[k - i] if i < k else 0
            if k <= m:
                acc += (-1) ** (k - 1) * k * e[k]
            ps.append(acc % p)
        self._power_sums = ps
        return ps[:m]

    # -- element encoding helpers ------------------------------------------

    def _check_code(self, x: int) -> int:
        if not 0 <= x < self.q:
            raise InvalidElement(f"element code {x} outside [0, {self.q})")
        return x

    def trace(self, x: int) -> int:
        self._check_code(x)
        if x == 0:
            return 0
        return int(self.trace_of_log[x - 1])

    def zech(self, k: int) -> int | None:
        if not 0 <= k <= self.q - 2:
            raise IndexOutOfRange(f"log index {k} outside [0, {self.q - 2}]")
        z = int(self.zech_of_log[k])
        return None if z == ZECH_NONE else z

    def pow_exponent_log(self, k: int, s: int) -> int:
        if not 0 <= k <= self.q - 2:
            raise IndexOutOfRange(f"log index {k} outside [0, {self.q - 2}]")
        return (k * s) % (self.q - 1)

    def log(self, x: int) -> int:
        self._check_code(x)
        if x == 0:
            raise InvalidElement("zero has no discrete log")
        return x - 1

    def packed(self, x: int) -> int:
        """Packed base-p coefficient value of the element with code x."""
        self._check_code(x)
        return 0 if x == 0 else int(self.poly_of_log[x - 1])

    def code_of_packed(self, v: int) -> int:
        if not 0 <= v < self.q:
            raise InvalidElement(f"packed value {v} outside [0, {self.q})")
        return 0 if v == 0 else int(self.log_of_poly[v]) + 1

    def from_int(self, j: int) -> int:
        """Embed the rational integer j via the prime subfield."""
        j %= self.p
        return 0 if j == 0 else int(self.log_of_poly[j]) + 1

    def mul(self, a: int, b: int) -> int:
        self._check_code(a), self._check_code(b)
        if a == 0 or b == 0:
            return 0
        return (a - 1 + b - 1) % (self.q - 1) + 1

    def inv(self, a: int) -> int:
        self._check_code(a)
        if a == 0:
            raise InvalidElement("zero is not invertible")
        return (1 - a) % (self.q - 1) + 1

    def pow(self, a: int, e: int) -> int:
        self._check_code(a)
        if a == 0:
            if e <= 0:
                raise InvalidElement("0**e needs e > 0")
            return 0
        return ((a - 1) * e) % (self.q - 1) + 1

    def neg(self, a: int) -> int:
        self._check_code(a)
        if self.p == 2 or a == 0:
            return a
        return (a - 1 + self.neg_log_offset) % (self.q - 1) + 1

    def add(self, a: int, b: int) -> int:
        self._check_code(a), self._check_code(b)
        if a == 0:
            return b
        if b == 0:
            return a
        z = int(self.zech_of_log[(b - a) % (self.q - 1)])
        if z == ZECH_NONE:
            return 0
        return (a - 1 + z) % (self.q - 1) + 1

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def poly_str(self, x: int) -> str:
        v = self.packed(self._check_code(x))
        if v == 0:
            return "0"
        terms = []
        i = 0
        while v:
            c = v % self.p
            if c:
                if i == 0:
                    terms.append(str(c))
                elif i == 1:
                    terms.append("x" if c == 1 else f"{c}*x")
                else:
                    terms.append(f"x^{i}" if c == 1 else f"{c}*x^{i}")
            v //= self.p
            i += 1
        return "+".join(terms)

    def descriptor(self) -> str:
        return self.spec.descriptor()

    # -- character indexing (trace-dual basis) ------------------------------

    @cached_property
    def dual_basis_matrix(self) -> np.ndarray:
        """Row j = coefficient vector of the trace-dual basis element d_j."""
        m, p = self.m, self.p
        gram = np.empty((m, m), dtype=np.int64)
        ps = self._power_sums
        for i in range(m):
            for j in range(m):
                gram[i, j] = ps[i + j]
        return _inv_mod_p(gram, p)

    @cached_property
    def code_by_dual(self) -> np.ndarray:
        """code_by_dual[v] = element code of sum_j v_j d_j, v in digit order."""
        p, m, q = self.p, self.m, self.q
        idx = np.arange(q, dtype=np.int64)
        digits = np.empty((q, m), dtype=np.int64)
        for i in range(m):
            digits[:, i] = idx % p
            idx //= p
        coeffs = (digits @ self.dual_basis_matrix) % p
        ppow = p ** np.arange(m, dtype=np.int64)
        packed = coeffs @ ppow
        return self.log_of_poly[packed] + 1

    def __repr__(self):
        return f"FiniteField({self.descriptor()})"


def build_field(p: int, m: int, modulus=None, backend: str | None = None) -> FiniteField:
    """Construct F_{p^m}; modulus defaults to the word-minimal primitive one."""
    if not isinstance(p, int) or not _is_prime(p):
        raise NotPrime(f"characteristic {p} is not prime")
    if not isinstance(m, int) or m < 1:
        raise DegreeMismatch(f"extension degree {m} must be a positive integer")
    q = p ** m
    if q > MAX_Q:
        raise FieldTooLarge(f"q = {q} exceeds the supported bound 2^24")
    if modulus is None:
        mod = _default_modulus(p, m, q)
    else:
        mod = tuple(int(c) % p for c in modulus)
        if len(mod) != m + 1 or mod[m] != 1:
            raise DegreeMismatch(f"modulus must be monic of degree {m}")
        full = list(mod)
        if m >= 2 and not _is_irreducible(full, p, m):
            raise ReducibleModulus(f"{mod} is reducible over F_{p}")
        if not _x_power_order_full(full, p, m, q):
            raise NonPrimitiveRoot(f"x is not a primitive root of {mod}")
    return FiniteField(FieldSpec(p, m, mod), backend=backend)
