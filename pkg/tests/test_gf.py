"""Field construction, tables and element arithmetic."""

import numpy as np
import pytest

import reference
from weilscope import _kernels
from weilscope.errors import (DegreeMismatch, FieldTooLarge, IndexOutOfRange,
                              InvalidElement, NonPrimitiveRoot, NotPrime,
                              ReducibleModulus)
from weilscope.gf import FieldSpec, build_field

# Frozen outputs of reference.ref_default_modulus, computed once up front.
DEFAULT_MODULI = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 2, 0, 0, 1),
    (5, 1): (3, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (7, 1): (4, 1),
    (7, 2): (3, 6, 1),
    (11, 1): (9, 1),
    (11, 2): (7, 10, 1),
    (11, 3): (5, 1, 0, 1),
    (13, 1): (11, 1),
    (13, 2): (2, 12, 1),
    (17, 1): (14, 1),
    (19, 1): (17, 1),
    (23, 1): (18, 1),
}

SMALL_FIELDS = [(2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2), (11, 1), (13, 1)]


@pytest.mark.parametrize("p,m", sorted(DEFAULT_MODULI))
def test_default_modulus(p, m):
    fld = build_field(p, m)
    assert fld.modulus == DEFAULT_MODULI[(p, m)]


def test_default_modulus_matches_reference_search():
    for p, m in [(2, 5), (3, 3), (5, 2), (13, 1)]:
        assert build_field(p, m).modulus == reference.ref_default_modulus(p, m)


def test_zech_known_values():
    f8 = build_field(2, 3)
    # 1 + omega = omega^3 in F_8 with modulus x^3 + x + 1
    assert f8.zech(1) == 3
    assert f8.zech(0) is None
    f11 = build_field(11, 1)
    # generator is 2; 1 + 2 = 3 = 2^8 mod 11
    assert f11.zech(1) == 8
    assert f11.zech(5) is None  # 1 + 2^5 = 33 = 0 mod 11


def test_trace_f8_table():
    f8 = build_field(2, 3)
    assert list(f8.trace_of_log) == [1, 0, 0, 1, 0, 1, 1]


def test_trace_prime_field_is_identity():
    f11 = build_field(11, 1)
    for x in range(11):
        assert f11.trace(x) == f11.packed(x)


@pytest.mark.parametrize("p,m", SMALL_FIELDS)
def test_arithmetic_matches_reference(p, m):
    fld = build_field(p, m)
    ref = reference.RefField(p, fld.modulus)

    def as_ref(code):
        if code == 0:
            return ref.zero
        return ref.pow(ref.x, code - 1)

    codes = range(fld.q)
    elems = [as_ref(c) for c in codes]
    for a in codes:
        assert fld.trace(a) == ref.trace(elems[a])
        if a:
            assert as_ref(fld.inv(a)) == ref.pow(elems[a], fld.q - 2)
        assert as_ref(fld.neg(a)) == ref.sub(ref.zero, elems[a])
        for b in codes:
            assert as_ref(fld.add(a, b)) == ref.add(elems[a], elems[b])
            assert as_ref(fld.mul(a, b)) == ref.mul(elems[a], elems[b])


@pytest.mark.parametrize("p,m", SMALL_FIELDS)
def test_add_consistent_with_packed_digits(p, m):
    # Zech-based addition must agree with digitwise base-p addition of the
    # packed coefficient values; this ties the two tables together.
    fld = build_field(p, m)
    packed = np.array([fld.packed(c) for c in range(fld.q)])
    for a in range(fld.q):
        for b in range(fld.q):
            want = 0
            pa, pb = int(packed[a]), int(packed[b])
            for i in range(m):
                want += ((pa // p ** i + pb // p ** i) % p) * p ** i
            assert fld.packed(fld.add(a, b)) == want


def test_tables_deterministic():
    a = build_field(3, 4)
    b = build_field(3, 4)
    for name in ("poly_of_log", "log_of_poly", "trace_of_log", "zech_of_log"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


@pytest.mark.parametrize("p,m", [(2, 8), (3, 4), (11, 2)])
def test_backends_build_identical_tables(p, m):
    if not _kernels.HAS_NUMBA:
        pytest.skip("numba unavailable")
    fast = build_field(p, m, backend="numba")
    slow = build_field(p, m, backend="numpy")
    for name in ("poly_of_log", "log_of_poly", "trace_of_log", "zech_of_log"):
        assert np.array_equal(getattr(fast, name), getattr(slow, name))


def test_user_modulus_accepted():
    fld = build_field(2, 3, modulus=(1, 1, 0, 1))
    assert fld.modulus == (1, 1, 0, 1)
    # a different primitive modulus gives a different log table
    alt = build_field(2, 3, modulus=(1, 0, 1, 1))
    assert alt.modulus == (1, 0, 1, 1)
    assert not np.array_equal(alt.poly_of_log, fld.poly_of_log)


def test_build_errors():
    with pytest.raises(NotPrime):
        build_field(4, 1)
    with pytest.raises(NotPrime):
        build_field(1, 3)
    with pytest.raises(FieldTooLarge):
        build_field(2, 25)
    with pytest.raises(DegreeMismatch):
        build_field(2, 0)
    with pytest.raises(DegreeMismatch):
        build_field(2, 3, modulus=(1, 1, 1))  # degree 2, not 3
    with pytest.raises(DegreeMismatch):
        build_field(3, 2, modulus=(1, 1, 2))  # not monic
    with pytest.raises(ReducibleModulus):
        build_field(2, 2, modulus=(1, 0, 1))  # x^2 + 1 = (x+1)^2
    with pytest.raises(ReducibleModulus):
        build_field(2, 4, modulus=(0, 1, 0, 0, 1))  # divisible by x
    with pytest.raises(NonPrimitiveRoot):
        # x^4 + x^3 + x^2 + x + 1 is irreducible but x has order 5
        build_field(2, 4, modulus=(1, 1, 1, 1, 1))
    with pytest.raises(NonPrimitiveRoot):
        build_field(11, 1, modulus=(8, 1))  # root 3 has order 5 mod 11


def test_element_errors():
    fld = build_field(3, 2)
    with pytest.raises(InvalidElement):
        fld.trace(9)
    with pytest.raises(InvalidElement):
        fld.trace(-1)
    with pytest.raises(InvalidElement):
        fld.log(0)
    with pytest.raises(InvalidElement):
        fld.inv(0)
    with pytest.raises(IndexOutOfRange):
        fld.zech(8)
    with pytest.raises(IndexOutOfRange):
        fld.pow_exponent_log(-1, 3)


def test_encoding_basics():
    fld = build_field(5, 2)
    assert fld.packed(0) == 0
    assert fld.packed(1) == 1  # omega^0 = 1
    assert fld.from_int(1) == 1
    assert fld.from_int(0) == 0
    assert fld.from_int(5) == 0
    assert fld.log(1) == 0
    assert fld.code_of_packed(fld.packed(17)) == 17
    assert fld.pow_exponent_log(3, 7) == 21 % 24
    # pow on codes agrees with repeated multiplication
    acc = 1
    for _ in range(6):
        acc = fld.mul(acc, 9)
    assert fld.pow(9, 6) == acc
    assert fld.pow(0, 3) == 0
    with pytest.raises(InvalidElement):
        fld.pow(0, 0)


def test_descriptor_line():
    fld = build_field(2, 3)
    assert fld.descriptor() == "p=2 m=3 modulus=1,1,0,1 generator=x"
    assert FieldSpec(11, 1, (9, 1)).descriptor() == \
        "p=11 m=1 modulus=9,1 generator=x"


@pytest.mark.parametrize("p,m", [(2, 4), (3, 3), (5, 2), (7, 2), (13, 1)])
def test_dual_basis_property(p, m):
    # d_j is characterized by Tr(d_j * x^i) = delta_ij; therefore the element
    # with dual digits v must satisfy Tr(elem * x^i) = i-th digit of v.
    fld = build_field(p, m)
    dual = fld.code_by_dual
    assert dual.shape == (fld.q,)
    assert sorted(dual.tolist()) == list(range(fld.q))  # bijection
    for v in range(fld.q):
        el = int(dual[v])
        for i in range(m):
            xi = fld.code_of_packed(p ** i)
            assert fld.trace(fld.mul(el, xi)) == (v // p ** i) % p


@pytest.mark.parametrize("p,m", SMALL_FIELDS)
def test_trace_linearity_and_frobenius(p, m):
    fld = build_field(p, m)
    rng = np.random.default_rng(20260815)
    for _ in range(200):
        a, b = int(rng.integers(fld.q)), int(rng.integers(fld.q))
        assert fld.trace(fld.add(a, b)) == (fld.trace(a) + fld.trace(b)) % p
        assert fld.trace(fld.pow(a, p) if a else 0) == fld.trace(a)
