"""Valuation tests: pi-adic direct route versus the digit-sum rule.

Frozen values below were computed with the brute-force routines in
tests/reference.py (repeated division by (1 - zeta) in Z[zeta_p], and
the full digit-sum minimum) before the fast module existed.
"""

import numpy as np
import pytest

import reference as ref
from weilscope.errors import (CharacteristicMismatch, DegreeMismatch,
                              FieldTooLarge, InvalidElement, NotInvertible)
from weilscope.exponents import approx_class, enumerate_classes, is_invertible
from weilscope.gf import build_field
from weilscope.spectrum import value_coords
from weilscope.valuation import (ValuationReport, _min_phi_val,
                                 check_cmpr_bound,
                                 check_extension_inequality,
                                 check_quadratic_lemma, check_valuation,
                                 digitsum_p, val_report)

# (p, m, s) -> (val_phi, argmin_k); computed independently and frozen
FROZEN_VALS = {
    (2, 3, 3): (2, 1),
    (2, 4, 7): (2, 1),
    (2, 5, 3): (3, 5),
    (3, 2, 5): (2, 1),
    (5, 1, 3): (2, 1),
    (7, 1, 5): (2, 1),
    (3, 2, 1): (4, 1),
    (2, 4, 1): (4, 1),
}

SMALL_FIELDS = [(2, 3), (2, 4), (2, 5), (3, 2), (3, 3),
                (5, 1), (5, 2), (7, 1), (11, 1), (13, 1), (17, 1)]


class TestDigitSum:
    def test_examples(self):
        assert digitsum_p(2, 13) == 3
        assert digitsum_p(3, 8) == 4
        for p in (2, 3, 5, 7):
            assert digitsum_p(p, 0) == 0

    def test_matches_digit_expansion(self):
        rng = np.random.default_rng(7)
        for p in (2, 3, 5, 11):
            for k in rng.integers(0, 1 << 40, size=20):
                k = int(k)
                want, rest = 0, k
                while rest:
                    rest, d = divmod(rest, p)
                    want += d
                assert digitsum_p(p, k) == want

    def test_negative_rejected(self):
        with pytest.raises(InvalidElement):
            digitsum_p(3, -1)


class TestMinPhiVal:
    def test_rows_match_reference(self):
        # exact per-row minimum and first-row witness on real spectra
        for p, m in SMALL_FIELDS:
            fld = build_field(p, m)
            for cls in enumerate_classes(fld):
                coords = value_coords(fld, cls.canonical)[1:]
                rows = coords[coords.any(axis=1)]
                vals = [ref.ref_phi_val(p, row.tolist()) for row in rows]
                got_val, got_idx = _min_phi_val(p, m, rows)
                assert got_val == min(vals)
                assert got_idx == vals.index(min(vals))

    def test_deep_divisibility_rows(self):
        # rows that are zero mod p in every pi coordinate force stage 2
        cases = [
            (3, 2, [[9, 0], [3, 3]]),
            (5, 2, [[25, 0, 0, 0], [10, 5, 0, 0]]),
            (7, 1, [[7, 0, 0, 0, 0, 0], [14, 7, 0, 0, 0, 0]]),
            (13, 1, [[13] + [0] * 11]),
        ]
        for p, m, data in cases:
            rows = np.array(data, dtype=np.int64)
            want = [ref.ref_phi_val(p, r.tolist()) for r in rows]
            got_val, got_idx = _min_phi_val(p, m, rows)
            assert got_val == min(want)
            assert got_idx == want.index(min(want))

    def test_modulus_guard(self):
        with pytest.raises(FieldTooLarge):
            _min_phi_val(1021, 2, np.ones((1, 1020), dtype=np.int64))

    def test_norm_bound_violation_rejected(self):
        # p^(m+1) is not a Weil value of F_p^m; its valuation breaks the cap
        with pytest.raises(InvalidElement):
            _min_phi_val(3, 1, np.array([[27, 0]], dtype=np.int64))


class TestValReport:
    @pytest.mark.parametrize("key", sorted(FROZEN_VALS))
    def test_frozen(self, key):
        p, m, s = key
        want_val, want_k = FROZEN_VALS[key]
        rep = val_report(build_field(p, m), s)
        assert rep.val_phi == want_val
        assert rep.val_phi_direct == rep.val_phi_stickelberger == want_val
        assert rep.argmin_k == want_k

    def test_exhaustive_against_references(self):
        for p, m in SMALL_FIELDS:
            fld = build_field(p, m)
            rfld = ref.RefField(p, ref.ref_default_modulus(p, m))
            for cls in enumerate_classes(fld):
                s = cls.canonical
                rep = val_report(fld, s)
                assert rep.consistent
                assert rep.val_phi_direct == ref.ref_val_direct(rfld, s)
                assert rep.val_phi_stickelberger == \
                    ref.ref_stickelberger(p, fld.q, s)

    def test_routes_consistent_larger(self):
        for p, m in [(2, 8), (2, 10), (3, 4), (5, 3), (31, 1), (61, 1),
                     (11, 2), (127, 1)]:
            fld = build_field(p, m)
            for cls in enumerate_classes(fld):
                rep = val_report(fld, cls.canonical)
                assert rep.consistent, (p, m, cls.canonical)
                assert 1 <= rep.val_phi <= (p - 1) * m

    def test_witnesses_attain_the_minimum(self):
        from weilscope.cyclotomic import CycInt
        for p, m, s in [(2, 4, 7), (2, 5, 3), (3, 3, 5), (5, 2, 7),
                        (13, 1, 5), (3, 2, 1)]:
            fld = build_field(p, m)
            rep = val_report(fld, s)
            row = value_coords(fld, s)[rep.argmin_a]
            assert CycInt(p, row.tolist()).phi_val() == rep.val_phi
            k = rep.argmin_k
            pair = (-k * (s % (fld.q - 1))) % (fld.q - 1)
            assert digitsum_p(p, k) + digitsum_p(p, pair) == rep.val_phi

    def test_trivial_class_attains_the_cap(self):
        for p, m in [(2, 4), (3, 2), (5, 2), (7, 1), (17, 1)]:
            fld = build_field(p, m)
            assert val_report(fld, 1).val_phi == (p - 1) * m
            assert val_report(fld, p % (fld.q - 1)).val_phi == (p - 1) * m

    def test_constant_on_classes(self):
        fld = build_field(2, 5)
        for cls in enumerate_classes(fld):
            vals = {val_report(fld, s).val_phi for s in cls.approx_members}
            assert len(vals) == 1

    def test_report_shape(self):
        rep = val_report(build_field(5, 1), 3)
        assert isinstance(rep, ValuationReport)
        assert str(rep.val_p) == "1/2"
        rec = rep.to_record()
        for key in ("p", "m", "q", "s", "val_phi_direct",
                    "val_phi_stickelberger", "val_p", "argmin_a",
                    "argmin_k", "consistent"):
            assert key in rec
        assert rec["consistent"] is True

    def test_errors(self):
        with pytest.raises(NotInvertible):
            val_report(build_field(2, 4), 3)
        with pytest.raises(NotInvertible):
            val_report(build_field(2, 1), 1)


class TestCheckValuation:
    def test_pass(self):
        fnd = check_valuation(build_field(2, 4), 7)
        assert fnd.kind == "PASS"
        assert fnd.check == "valuation"
        assert fnd.canonical == 7
        assert fnd.payload["val_phi"] == 2
        assert fnd.payload["val_p"] == "2"

    def test_skipped_on_binary_base(self):
        assert check_valuation(build_field(2, 1), 1).kind == "SKIPPED"

    def test_never_mismatches_small(self):
        for p, m in [(2, 6), (3, 3), (5, 2), (19, 1)]:
            fld = build_field(p, m)
            for cls in enumerate_classes(fld):
                assert check_valuation(fld, cls.canonical).kind == "PASS"


class TestExtensionInequality:
    def test_reduction_to_trivial_subfield_exponent(self):
        fnd = check_extension_inequality(build_field(2, 4),
                                         build_field(2, 2), 7)
        assert fnd.kind == "PASS"
        assert fnd.check == "extension"
        assert fnd.payload["exponent_on_subfield"] == 1
        assert fnd.payload["degree"] == 2
        assert fnd.payload["val_phi_L"] == 2
        assert fnd.payload["val_phi_K"] == 2

    def test_same_field_is_equality(self):
        fld = build_field(2, 4)
        fnd = check_extension_inequality(fld, fld, 7)
        assert fnd.kind == "PASS"
        assert fnd.payload["val_phi_L"] == fnd.payload["val_phi_K"]
        assert fnd.payload["degree"] == 1

    def test_cubic_tower(self):
        fnd = check_extension_inequality(build_field(2, 6),
                                         build_field(2, 3), 5)
        assert fnd.kind == "PASS"
        assert fnd.payload["exponent_on_subfield"] == 5

    def test_exponent_not_invertible_upstairs(self):
        # gcd(3, 63) = 3: the map is not a permutation of F_64
        with pytest.raises(NotInvertible):
            check_extension_inequality(build_field(2, 6),
                                       build_field(2, 3), 3)

    def test_guards(self):
        with pytest.raises(CharacteristicMismatch):
            check_extension_inequality(build_field(3, 2),
                                       build_field(2, 2), 5)
        with pytest.raises(DegreeMismatch):
            check_extension_inequality(build_field(2, 4),
                                       build_field(2, 3), 7)

    def test_prime_subfield_of_two_elements_skipped(self):
        fnd = check_extension_inequality(build_field(2, 2),
                                         build_field(2, 1), 2)
        assert fnd.kind == "SKIPPED"

    def test_sweep_never_fails(self):
        for p, m_l, m_k in [(2, 4, 2), (2, 6, 2), (2, 6, 3), (2, 8, 4),
                            (3, 4, 2), (3, 6, 3), (5, 2, 1), (7, 2, 1),
                            (13, 2, 1)]:
            fl, fk = build_field(p, m_l), build_field(p, m_k)
            for cls in enumerate_classes(fl):
                fnd = check_extension_inequality(fl, fk, cls.canonical)
                assert fnd.kind == "PASS", (p, m_l, m_k, cls.canonical)


class TestCmprBound:
    def test_equality_case(self):
        fnd = check_cmpr_bound(build_field(2, 4), 7)
        assert fnd.kind == "PASS"
        assert fnd.check == "cmpr"
        assert fnd.payload["val_phi"] == 2
        assert fnd.payload["bound"] == 4

    def test_prime_field_degree_one(self):
        fnd = check_cmpr_bound(build_field(13, 1), 5)
        assert fnd.kind == "PASS"
        assert 2 * fnd.payload["val_phi"] <= 12

    def test_skips(self):
        assert check_cmpr_bound(build_field(2, 3), 3).kind == "SKIPPED"
        assert check_cmpr_bound(build_field(2, 6), 5).kind == "SKIPPED"
        assert check_cmpr_bound(build_field(3, 2), 1).kind == "SKIPPED"
        assert check_cmpr_bound(build_field(3, 2), 3).kind == "SKIPPED"

    def test_sweep_never_fails(self):
        for p, m in [(2, 1), (2, 2), (2, 4), (2, 8), (3, 1), (3, 2), (3, 4),
                     (5, 1), (5, 2), (7, 1), (13, 1), (17, 1), (17, 2)]:
            fld = build_field(p, m)
            for cls in enumerate_classes(fld):
                fnd = check_cmpr_bound(fld, cls.canonical)
                if cls.is_trivial or (m & (m - 1)):
                    assert fnd.kind == "SKIPPED"
                else:
                    assert fnd.kind == "PASS", (p, m, cls.canonical)


class TestQuadraticLemma:
    def test_quartic_over_quadratic(self):
        fnd = check_quadratic_lemma(build_field(2, 4), build_field(2, 2), 7)
        assert fnd.kind == "PASS"
        assert fnd.check == "quadra"
        assert fnd.payload["value"] == -4
        assert fnd.payload["val_phi"] == 2
        assert fnd.payload["a"] >= 1

    def test_quadratic_over_prime(self):
        fnd = check_quadratic_lemma(build_field(3, 2), build_field(3, 1), 5)
        assert fnd.kind == "PASS"
        assert fnd.payload["value"] == -3

    def test_frobenius_class_skipped(self):
        # s = |K| satisfies both congruences yet its spectrum is {0, q};
        # the nontriviality precondition is what keeps the claim true
        fnd = check_quadratic_lemma(build_field(2, 4), build_field(2, 2), 4)
        assert fnd.kind == "SKIPPED"
        assert "Frobenius" in fnd.payload["reason"]
        fnd = check_quadratic_lemma(build_field(2, 2), build_field(2, 1), 2)
        assert fnd.kind == "SKIPPED"

    def test_congruence_skips(self):
        fl, fk = build_field(2, 4), build_field(2, 2)
        assert check_quadratic_lemma(fl, fk, 1).kind == "SKIPPED"
        assert check_quadratic_lemma(fl, fk, 2).kind == "SKIPPED"

    def test_degree_guard(self):
        with pytest.raises(DegreeMismatch):
            check_quadratic_lemma(build_field(2, 4), build_field(2, 1), 7)

    def test_exhaustive_small_pairs(self):
        passes = 0
        for p, m_k in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2),
                       (5, 1), (7, 1), (11, 1), (13, 1)]:
            fl, fk = build_field(p, 2 * m_k), build_field(p, m_k)
            q_l, q_k = fl.q, fk.q
            for s in range(1, q_l - 1):
                if not is_invertible(q_l, s):
                    continue
                fnd = check_quadratic_lemma(fl, fk, s)
                assert fnd.kind != "COUNTEREXAMPLE", (p, m_k, s)
                if fnd.kind == "SKIPPED":
                    if "Frobenius" in fnd.payload["reason"]:
                        assert approx_class(q_l, p, s).is_trivial
                    continue
                passes += 1
        assert passes > 40
