from fractions import Fraction

import pytest

from doubleoctic.arrangement import parse_arrangement
from doubleoctic.catalog import lookup
from doubleoctic.modforms import coefficient_lookup
from doubleoctic.verify import (MODULAR_LAMBDAS, CorrectionPolynomial, H2TraceRule,
                                VerificationError, calibrate_correction, effective_rows,
                                involution_formula, kummer_good_primes, predictions,
                                resolution_correction, resolve_variants, trace_h3,
                                verify_involution, verify_kummer_family, verify_modularity)


def test_generic_arrangement_correction():
    arr = parse_arrangement("xyzt(x+y+z+t)(x+2y+4z+8t)(x+3y+9z+27t)(x+5y+25z+125t)")
    corr = resolution_correction(arr)
    assert (corr.alpha, corr.beta, corr.gamma, corr.twists) == (28, 28, 0, ())


def test_correction_of_x53():
    corr = resolution_correction(lookup("53"))
    assert corr.alpha == corr.beta and corr.gamma == 0
    assert len(corr.twists) == sum(lookup("53").inventory.flags.values()) == 2


def test_correction_polynomial_part_is_character_free():
    # only the explicit chi(w) p terms can depend on p mod 4
    corr = resolution_correction(lookup("244"))
    plain = CorrectionPolynomial(corr.gamma, corr.beta, corr.alpha)
    for p in (5, 7, 13, 19):
        assert plain(p) == corr.alpha * p * p + corr.beta * p + corr.gamma


def test_trace_of_a_pure_tate_count_is_zero():
    arr = lookup("53")
    h11, p = 53, 7
    count = 1 + h11 * p + h11 * p * p + p ** 3
    assert trace_h3(arr, p, CorrectionPolynomial(0, 0, 0), H2TraceRule(h11), count) == 0


def test_x53_at_5():
    tr = trace_h3(lookup("53"), 5)
    assert tr == coefficient_lookup("32k4B1", 5) + 5 * coefficient_lookup("32A1", 5)
    assert coefficient_lookup("32A1", 5) == -2


def test_bad_primes_rejected():
    with pytest.raises(VerificationError):
        trace_h3(lookup("53"), 3)
    with pytest.raises(VerificationError):
        trace_h3(lookup("53"), 9)


def test_h2_rule_for_244():
    rule = H2TraceRule.of(lookup("244"))
    assert rule(5) == 39 * 5 and rule(7) == 37 * 7
    assert "(-4/p)" in rule.describe()


def test_calibrated_matches_derived():
    arr = lookup("53")
    pred = predictions(arr)[0]
    cal = calibrate_correction(arr, (5, 7, 11), pred)
    der = resolution_correction(arr)
    assert (cal.alpha, cal.beta, cal.gamma) == (der.alpha, der.beta, der.gamma)
    with pytest.raises(VerificationError):
        calibrate_correction(arr, (5, 5, 7), pred)


def test_calibrated_mode_separates_fit_primes():
    rows = verify_modularity("53", 61, mode="calibrated")
    fit = [r.prime for r in rows if r.role == "fit"]
    assert fit == [5, 7, 11]
    assert all(r.match for r in rows)
    assert all("calibrated" in r.provenance[-2] for r in rows)


def test_verify_small_range():
    rows = verify_modularity("53", 31)
    assert [r.prime for r in rows] == [5, 7, 11, 13, 17, 19, 23, 29, 31]
    assert all(r.match for r in rows)
    assert verify_modularity("53", 4) == []


def test_rigid_3_and_239_match_their_forms():
    for key in ("3", "239"):
        assert all(r.match for r in verify_modularity(key, 31))


def test_287_variant_is_resolved():
    rows = verify_modularity("287", 41)
    res = resolve_variants(rows)
    assert res["uniform"] == ["a+3pb"]
    assert {r.variant for r in effective_rows(rows)} == {"a+3pb"}


def test_unknown_arrangement():
    with pytest.raises(VerificationError):
        verify_modularity("999", 31)


def test_involution_formulas():
    a, b = 10, 3
    assert involution_formula("274", 7, a, b) == 1 + 343 - a + 7 * b + 49 + 21
    assert involution_formula("244", 5, a, b) == 1 + 125 - a + 5 * b + 50 - 5
    with pytest.raises(VerificationError):
        involution_formula("21", 5, a, b)


def test_involution_report_small():
    res = verify_involution("53", 23)
    assert res["uniform_lift"] == 0 and res["matches"] == res["primes"] == 7
    assert res["split_matches"] == 7
    with pytest.raises(VerificationError):
        verify_involution("21", 23)


def test_kummer_family_small():
    res = verify_kummer_family(8, Fraction(1, 9), 31)
    assert res["special"] and res["modular_lambda"]
    assert all(r.special_match and r.charpoly_match for r in res["rows"])


def test_kummer_general_member_needs_the_character():
    res = verify_kummer_family(2, 4, 31)
    assert all(r.twisted_match for r in res["rows"])
    assert any(r.character == -1 for r in res["rows"])
    assert all(r.charpoly_match == (r.character == 1 or r.trace == 0) for r in res["rows"])


def test_kummer_parameters():
    assert Fraction(-1, 64) in MODULAR_LAMBDAS and len(MODULAR_LAMBDAS) == 7
    with pytest.raises(VerificationError):
        verify_kummer_family(0, 4, 31)
    with pytest.raises(VerificationError):
        verify_kummer_family(-1, 4, 31)


def test_irrational_mu_uses_square_primes():
    primes = kummer_good_primes(8, 2, 47)
    assert primes and all(pow(2, (p - 1) // 2, p) == 1 for p in primes)
