"""Exact arithmetic in Z[zeta_p] for prime p.

Elements are stored on the power basis 1, zeta, ..., zeta^(p-2); the relation
1 + zeta + ... + zeta^(p-1) = 0 eliminates zeta^(p-1). Coordinates are plain
Python ints, so no operation here can overflow. For p = 2 the basis is just 1
and the class degenerates to ordinary integers.
"""

from __future__ import annotations

import cmath
import math

from .errors import CharacteristicMismatch, NonUnit, NotRational


class CycInt:
    """Immutable cyclotomic integer with exact coordinates."""

    __slots__ = ("p", "coords")

    def __init__(self, p: int, coords):
        coords = tuple(int(c) for c in coords)
        if len(coords) != p - 1:
            raise ValueError(f"need {p - 1} coordinates, got {len(coords)}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, *a):
        raise AttributeError("CycInt is immutable")

    @classmethod
    def from_counts(cls, p: int, counts) -> "CycInt":
        """Value sum_j counts[j] * zeta^j from a length-p counts vector."""
        counts = list(counts)
        if len(counts) != p:
            raise ValueError(f"need {p} counts, got {len(counts)}")
        last = counts[p - 1]
        return cls(p, [counts[j] - last for j in range(p - 1)])

    @classmethod
    def from_int(cls, p: int, n: int) -> "CycInt":
        return cls(p, [int(n)] + [0] * (p - 2))

    @classmethod
    def zeta(cls, p: int, j: int = 1) -> "CycInt":
        counts = [0] * p
        counts[j % p] = 1
        return cls.from_counts(p, counts)

    # -- ring operations -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, int):
            return CycInt.from_int(self.p, other)
        if isinstance(other, CycInt):
            if other.p != self.p:
                raise CharacteristicMismatch(
                    f"mixed cyclotomic orders {self.p} and {other.p}")
            return other
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycInt(self.p, [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.p, [-a for a in self.coords])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycInt(self.p, [a - b for a, b in zip(self.coords, o.coords)])

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, int):
            return CycInt(self.p, [a * other for a in self.coords])
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.p
        counts = [0] * p
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    if b:
                        counts[(i + j) % p] += a * b
        return CycInt.from_counts(p, counts)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers leave the ring")
        out = CycInt.from_int(self.p, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            return self.is_rational() and self.coords[0] == other
        if isinstance(other, CycInt):
            return self.p == other.p and self.coords == other.coords
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.coords))

    def __repr__(self):
        return f"CycInt(p={self.p}, {self.coords})"

    def __bool__(self):
        return any(self.coords)

    # -- structure maps --------------------------------------------------------

    def galois(self, t: int) -> "CycInt":
        """Field automorphism zeta -> zeta^t for t coprime to p."""
        p = self.p
        t %= p
        if t == 0:
            raise NonUnit(f"exponent {t} is divisible by {p}")
        counts = [0] * p
        for j, a in enumerate(self.coords):
            counts[(j * t) % p] += a
        return CycInt.from_counts(p, counts)

    def conjugate(self) -> "CycInt":
        if self.p == 2:
            return self
        return self.galois(self.p - 1)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def as_int(self) -> int:
        if not self.is_rational():
            raise NotRational(f"{self!r} has irrational part")
        return self.coords[0]

    def to_complex(self) -> complex:
        return sum(c * cmath.exp(2j * math.pi * j / self.p)
                   for j, c in enumerate(self.coords) if c)

    # -- valuation at the prime above p ---------------------------------------

    def divide_phi(self) -> "CycInt":
        """Exact quotient by (1 - zeta); the dividend must lie in the ideal."""
        p = self.p
        total = sum(self.coords)
        if total % p:
            raise ValueError("not divisible by (1 - zeta)")
        t = total // p
        out = []
        prefix = 0
        for j, c in enumerate(self.coords):
            prefix += c
            out.append(prefix - (j + 1) * t)
        return CycInt(p, out)

    def phi_val(self):
        """Valuation at (1 - zeta); math.inf for zero."""
        if self.is_zero():
            return math.inf
        v = 0
        x = self
        while sum(x.coords) % self.p == 0:
            x = x.divide_phi()
            v += 1
        return v
