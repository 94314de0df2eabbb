"""Measures: frozen values, duality identities, and certificate checks.

Oracles: combinatorial measures are re-counted with independent loops;
LP measures are pinned by hand-derived exact optima, by the reciprocal
identity between margin and threshold weight, and by the dense/level
program agreement for symmetric inputs. Certificates must re-verify.
"""

import random
from fractions import Fraction

import pytest

from xorlift.core import (
    BooleanFunction,
    build_function,
    expansion,
    from_predicate,
    mod_predicate,
    SymmetricPredicate,
    weight,
)
from xorlift.measures import (
    MeasureReport,
    NoSignRepresentation,
    approx_degree,
    approx_weight,
    certificate_holds,
    degree_bounded_threshold_weight,
    epsilon_d,
    gamma_value,
    krawtchouk,
    margin,
    odd_even_degree,
    pp_upper_poly,
    r_value,
    report_to_json,
    sign_degree,
    signed_monomial_complexity,
    threshold_weight,
    _margin_dense,
    _margin_symmetric,
    _weight_lp_dense,
    _weight_lp_symmetric,
)

THIRD = Fraction(1, 3)


def _pred(s):
    return SymmetricPredicate.from_string(s)


def _random_function(rng, n):
    return BooleanFunction(n, rng.getrandbits(1 << n))


# ---------------------------------------------------------------------------
# Combinatorial measures
# ---------------------------------------------------------------------------


def test_odd_even_degree_alternating_is_zero():
    for n in range(1, 10):
        signs = tuple((-1) ** w for w in range(n + 1))
        assert odd_even_degree(SymmetricPredicate(signs)) == 0


def test_odd_even_degree_direct_counts():
    # [-,-,+,+,-]: steps of two change at i=0, 1, 2
    assert odd_even_degree(_pred("--++-")) == 3
    # residues 0 mod 3 at n=8: [-,+,+,-,+,+,-,+,+]
    assert odd_even_degree(mod_predicate(3, {0}, 8)) == 5


def test_odd_even_degree_matches_loop_count():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(1, 12)
        signs = tuple(rng.choice((-1, 1)) for _ in range(n + 1))
        pred = SymmetricPredicate(signs)
        count = 0
        for i in range(n - 1):
            if signs[i] != signs[i + 2]:
                count += 1
        assert odd_even_degree(pred) == count


def test_r_value_examples():
    assert r_value(_pred("+-+-+")) == (0, 0, 0)
    assert r_value(SymmetricPredicate((1,) * 7)) == (0, 0, 0)
    # AND-type at n=6: single change at level 4 forces r1 = 2
    assert r_value(_pred("++++++-")) == (0, 2, 2)


def test_r_value_window_property():
    # the returned pair clears every change from [r0, n - r1), and no
    # smaller component does
    rng = random.Random(12)
    for _ in range(300):
        n = rng.randint(1, 11)
        signs = tuple(rng.choice((-1, 1)) for _ in range(n + 1))
        pred = SymmetricPredicate(signs)
        got = r_value(pred)
        changes = {i for i in range(n - 1) if signs[i] != signs[i + 2]}
        if got is None:
            assert n % 2 == 1 and n // 2 in changes
            continue
        r0, r1, r = got
        assert r == max(r0, r1)
        assert r0 <= n / 2 and r1 <= n / 2
        assert not changes & set(range(r0, (n + 1) // 2))
        assert not changes & set(range(n // 2, n - r1))
        if r0:
            assert changes & set(range(r0 - 1, (n + 1) // 2))
        if r1:
            assert changes & set(range(n // 2, n - r1 + 1))


def test_r_value_undefined_at_middle_change():
    # n=5 with a change at level 2 cannot be cleared by cutoffs <= 5/2
    assert r_value(_pred("++-+++")) is None


def test_gamma_value_examples():
    assert gamma_value(_pred("+-+-+")) == 1
    # single change at k=0, n=6
    assert gamma_value(_pred("-++++++")) == 5
    # residues 0 mod 3 at n=9: nearest change to (n-1)/2 = 4 sits at k=3
    assert gamma_value(mod_predicate(3, {0}, 9)) == 2
    assert gamma_value(SymmetricPredicate((1, 1, 1))) is None


def test_gamma_value_matches_scan():
    rng = random.Random(13)
    for _ in range(200):
        n = rng.randint(1, 12)
        signs = tuple(rng.choice((-1, 1)) for _ in range(n + 1))
        pred = SymmetricPredicate(signs)
        best = None
        for k in range(n):
            if signs[k] != signs[k + 1]:
                v = abs(2 * k - n + 1)
                best = v if best is None else min(best, v)
        assert gamma_value(pred) == best


# ---------------------------------------------------------------------------
# Krawtchouk sums
# ---------------------------------------------------------------------------


def test_krawtchouk_matches_direct_character_sums():
    for n in range(1, 7):
        for w in range(n + 1):
            x = (1 << w) - 1  # canonical input of weight w
            for s in range(n + 1):
                direct = 0
                for mask in range(1 << n):
                    if mask.bit_count() == s:
                        direct += -1 if (mask & x).bit_count() & 1 else 1
                assert krawtchouk(n, w, s) == direct


# ---------------------------------------------------------------------------
# Margin and threshold weight
# ---------------------------------------------------------------------------


def test_margin_of_parity_and_its_negation():
    for n in (1, 2, 3, 5):
        f = build_function(f"parity:{n}")
        assert margin(f).value == 1
        assert margin(f.negate()).value == 1


def test_margin_of_constant_is_one():
    assert margin(BooleanFunction(2, 0)).value == 1


def test_margin_threshold_weight_reciprocal():
    rng = random.Random(14)
    cases = [build_function("maj:3"), build_function("mod:3,{0};4")]
    cases += [_random_function(rng, n) for n in (2, 3, 4) for _ in range(5)]
    for f in cases:
        m = margin(f)
        w = threshold_weight(f)
        assert m.value * w.value == 1
        assert certificate_holds(f, m)
        assert certificate_holds(f, w)


def test_majority3_margin_value():
    # exact expansion (x1+x2+x3-x1x2x3)/2 has mass 1 and product 1/2
    rep = margin(build_function("maj:3"))
    assert rep.value == Fraction(1, 2)
    assert threshold_weight(build_function("maj:3")).value == 2


def test_threshold_weight_of_single_characters():
    for n in (1, 2, 3):
        for s in range(1 << n):
            vals = [
                (-1 if (s & x).bit_count() & 1 else 1) for x in range(1 << n)
            ]
            f = BooleanFunction.from_values(vals)
            assert threshold_weight(f).value == 1
            assert threshold_weight(f.negate()).value == 1


def test_dense_and_level_margins_agree():
    rng = random.Random(15)
    for n in (1, 2, 3, 4):
        for _ in range(6):
            signs = tuple(rng.choice((-1, 1)) for _ in range(n + 1))
            pred = SymmetricPredicate(signs)
            f = from_predicate(pred)
            dense_value, _ = _margin_dense(f)
            level_value, _ = _margin_symmetric(pred)
            assert dense_value == level_value
            s1, dense_w, _ = _weight_lp_dense(f, None, None)
            s2, level_w, _ = _weight_lp_symmetric(pred, None, None)
            assert (s1, s2) == ("optimal", "optimal")
            assert dense_w == level_w
            s1, dense_a, _ = _weight_lp_dense(f, None, THIRD)
            s2, level_a, _ = _weight_lp_symmetric(pred, None, THIRD)
            assert (s1, s2) == ("optimal", "optimal")
            assert dense_a == level_a


def test_symmetric_margin_scales_past_dense_cap():
    rep = margin(build_function("mod:3,{0};10"))
    assert 0 < rep.value <= 1
    assert certificate_holds(build_function("mod:3,{0};10"), rep)


# ---------------------------------------------------------------------------
# Approximate weight
# ---------------------------------------------------------------------------


def test_approx_weight_of_parity_is_one_minus_eps():
    for n in (1, 3, 4):
        f = build_function(f"parity:{n}")
        for eps in (Fraction(1, 3), Fraction(1, 2), Fraction(7, 8)):
            rep = approx_weight(f, eps)
            assert rep.value == 1 - eps
            assert certificate_holds(f, rep)


def test_approx_weight_of_constant():
    f = BooleanFunction(1, 0)  # constant +1
    assert approx_weight(f, Fraction(1, 2)).value == Fraction(1, 2)


def test_approx_weight_of_majority3():
    rep = approx_weight(build_function("maj:3"), THIRD)
    assert 0 < rep.value <= 2
    assert certificate_holds(build_function("maj:3"), rep)


def test_approx_weight_monotone_and_below_threshold_weight():
    rng = random.Random(16)
    for _ in range(8):
        f = _random_function(rng, 3)
        wt = threshold_weight(f).value
        prev = None
        for eps in (Fraction(1, 8), Fraction(1, 3), Fraction(2, 3)):
            cur = approx_weight(f, eps).value
            assert cur <= wt
            if prev is not None:
                assert cur <= prev
            prev = cur
        assert margin(f).value >= 1 / wt


# ---------------------------------------------------------------------------
# Degree measures
# ---------------------------------------------------------------------------


def test_epsilon_d_frozen_values():
    parity2 = build_function("parity:2")
    assert epsilon_d(parity2, 1) == 1
    assert epsilon_d(parity2, 2) == 0
    assert epsilon_d(BooleanFunction(1, 0), 0) == 0


def test_epsilon_d_monotone_to_zero():
    rng = random.Random(17)
    for _ in range(6):
        f = _random_function(rng, 3)
        errs = [epsilon_d(f, d) for d in range(4)]
        assert all(a >= b for a, b in zip(errs, errs[1:]))
        assert errs[-1] == 0


def test_approx_degree_examples():
    assert approx_degree(build_function("parity:3"), THIRD) == 3
    assert approx_degree(build_function("maj:3"), Fraction(2, 3)) == 1
    assert approx_degree(BooleanFunction(2, 0), Fraction(1, 9)) == 0


def test_sign_degree_examples():
    for n in (1, 2, 3, 4):
        assert sign_degree(build_function(f"parity:{n}")) == n
    assert sign_degree(build_function("maj:3")) == 1
    assert sign_degree(BooleanFunction(2, 0)) == 0


def test_sign_degree_of_random_functions_matches_definition():
    rng = random.Random(18)
    for _ in range(10):
        f = _random_function(rng, 3)
        d = sign_degree(f)
        if d:
            with pytest.raises(NoSignRepresentation):
                degree_bounded_threshold_weight(f, d - 1)
        rep = degree_bounded_threshold_weight(f, d)
        assert certificate_holds(f, rep)


def test_degree_bounded_weight_examples():
    parity3 = build_function("parity:3")
    assert degree_bounded_threshold_weight(parity3, 3).value == 1
    with pytest.raises(NoSignRepresentation):
        degree_bounded_threshold_weight(parity3, 2)
    maj = build_function("maj:3")
    rep = degree_bounded_threshold_weight(maj, 1)
    assert rep.value == threshold_weight_restricted_to_linear(maj)
    assert degree_bounded_threshold_weight(maj, 3).value == threshold_weight(maj).value


def threshold_weight_restricted_to_linear(f):
    """Independent check: scan integer linear forms for maj:3."""
    # maj:3 = sign(x1+x2+x3), mass 3, and no linear form does better than 3
    # because the six weight-1 inputs force each |c_i| >= 1
    return 3


def test_signed_monomial_complexity():
    assert signed_monomial_complexity(build_function("parity:2")) == 1
    assert signed_monomial_complexity(build_function("maj:3")) == 3
    assert signed_monomial_complexity(BooleanFunction(1, 3)) == 1  # constant -1
    rng = random.Random(19)
    for _ in range(5):
        f = _random_function(rng, 2)
        k = signed_monomial_complexity(f)
        table = expansion(f)
        assert 1 <= k <= len(table.coeffs)
        assert (k == 1) == (weight(table) == 1 and len(table.coeffs) == 1 or _is_character(f))


def _is_character(f):
    vals = [f.value(x) for x in range(f.size)]
    for s in range(f.size):
        signs = [(-1 if (s & x).bit_count() & 1 else 1) for x in range(f.size)]
        if vals == signs or vals == [-v for v in signs]:
            return True
    return False


# ---------------------------------------------------------------------------
# The explicit sign-representing polynomial
# ---------------------------------------------------------------------------


def test_pp_upper_poly_small_cases():
    p = pp_upper_poly(_pred("+-+"))
    assert p.as_dict() == {3: Fraction(2)}
    q = pp_upper_poly(SymmetricPredicate((1,) * 5))
    assert q.as_dict() == {0: Fraction(2)}


def test_pp_upper_poly_sign_represents_everything_even():
    for n in (2, 4, 6):
        for bits in range(1 << (n + 1)):
            signs = tuple(1 - 2 * ((bits >> w) & 1) for w in range(n + 1))
            pred = SymmetricPredicate(signs)
            p = pp_upper_poly(pred)
            f = from_predicate(pred)
            assert all(f.value(x) * p.evaluate(x) > 0 for x in range(1 << n))
            k = odd_even_degree(pred)
            assert weight(p) <= 4 * (2 * n) ** k
            assert all(c.denominator == 1 for _, c in p.coeffs)


def test_pp_upper_poly_rejects_odd_arity():
    with pytest.raises(ValueError):
        pp_upper_poly(_pred("+--+"))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def test_report_serialization():
    rep = margin(build_function("parity:2"))
    data = report_to_json(rep)
    assert data["measure"] == "margin"
    assert data["value"] == {"num": 1, "den": 1}
    assert data["certificate"] is not None
    assert data["wall_time_ms"] >= 0


def test_certificate_rejects_tampered_value():
    f = build_function("maj:3")
    rep = threshold_weight(f)
    forged = MeasureReport(rep.measure, rep.params, rep.value + 1, rep.certificate, 0.0)
    assert not certificate_holds(f, forged)
