"""Invertible exponents modulo the two spectrum-preserving equivalences.

s' ~ s when s' = p^j s mod (q-1): both give the same spectrum function.
s' ~= s additionally allows s' in the coset of the inverse exponent 1/s,
which permutes the spectrum without changing the value multiset. Campaigns
iterate one canonical representative per ~= class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotInvertible


def is_invertible(q: int, s: int) -> bool:
    """True when x -> x^s permutes the field with q elements."""
    return math.gcd(s, q - 1) == 1


def _power_coset(q: int, p: int, s: int) -> list[int]:
    out = [s]
    t = (s * p) % (q - 1)
    while t != s:
        out.append(t)
        t = (t * p) % (q - 1)
    return sorted(out)


@dataclass(frozen=True)
class ExponentClass:
    q: int
    p: int
    canonical: int
    coset: tuple[int, ...]
    inverse_coset: tuple[int, ...]
    approx_members: tuple[int, ...]
    congruence: int  # canonical mod (p-1), constant on each ~ coset
    is_trivial: bool
    is_kloosterman: bool

    def to_record(self) -> dict:
        return {
            "canonical": self.canonical,
            "members": list(self.approx_members),
            "congruence_mod_p_minus_1": self.congruence,
            "trivial": self.is_trivial,
            "kloosterman": self.is_kloosterman,
        }


def approx_class(q: int, p: int, s: int) -> ExponentClass:
    """The ~= class of s. The exponent must be invertible."""
    if q < 3:
        raise NotInvertible(f"no exponent range for q = {q}")
    s %= q - 1
    if s == 0 or math.gcd(s, q - 1) != 1:
        raise NotInvertible(f"gcd({s}, {q - 1}) != 1")
    coset = _power_coset(q, p, s)
    inv = pow(s, -1, q - 1)
    inverse_coset = _power_coset(q, p, inv)
    members = tuple(sorted(set(coset) | set(inverse_coset)))
    canonical = members[0]
    return ExponentClass(
        q=q,
        p=p,
        canonical=canonical,
        coset=tuple(coset),
        inverse_coset=tuple(inverse_coset),
        approx_members=members,
        congruence=canonical % (p - 1),
        is_trivial=1 in members,
        is_kloosterman=q - 2 in members,
    )


def enumerate_classes(field) -> list[ExponentClass]:
    """All ~= classes of invertible exponents in [1, q-2], canonical order.

    The trivial class comes first by construction since its canonical is 1.
    """
    q, p = field.q, field.p
    if q < 3:
        return []
    res = np.arange(q - 1, dtype=np.int64)
    unit = np.gcd(res, q - 1) == 1
    unit[0] = False  # exponent 0 is not in range
    seen = np.zeros(q - 1, dtype=bool)
    out = []
    for s in range(1, q - 1):
        if not unit[s] or seen[s]:
            continue
        cls = approx_class(q, p, s)
        for t in cls.approx_members:
            seen[t] = True
        out.append(cls)
    return out
