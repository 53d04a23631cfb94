import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicfl import default_params, make_field
from cubicfl.cyclo import CycValue, Mu3, psi
from cubicfl.errors import HypothesisNotMet, NotCovered, ZeroArgument
from cubicfl.orbital_j import G_integral
from cubicfl.sums import (
    SumParams,
    calibrate_normalization,
    cubic_brute,
    cubic_closed,
    di_identity_check,
    gauss_pair,
    hilbert3,
    kloosterman_brute,
    kloosterman_closed,
    random_di_parameters,
    random_triple_parameters,
    s_func,
    triple_cubic_check,
)

from conftest import padic_numbers, tame_symbol_exponent

FLD = make_field(7, 16)
PARAMS = SumParams(FLD, "chi")
BAR = SumParams(FLD, "chi_bar")
NUMS = padic_numbers(FLD, -6, 6)
AXIOM_EXAMPLES = 500


# -- cubic Hilbert symbol ------------------------------------------------------------


def test_units_pair_trivially():
    assert hilbert3(FLD.num(2), FLD.num(3), PARAMS) == Mu3(0)


def test_steinberg_example():
    assert hilbert3(FLD.num(2), FLD.num(-1), PARAMS) == Mu3(0)


def test_p_against_three_matches_power_residue_oracle():
    value = hilbert3(FLD.uniformizer, FLD.num(3), PARAMS)
    assert value.k == tame_symbol_exponent(FLD.uniformizer, FLD.num(3)) == 2
    assert hilbert3(FLD.uniformizer, FLD.num(3), BAR).k == 1


def test_zero_argument():
    with pytest.raises(ZeroArgument):
        hilbert3(FLD.zero, FLD.one, PARAMS)


@given(NUMS, NUMS)
@settings(max_examples=200, deadline=None)
def test_symbol_matches_tame_oracle(a, b):
    assert hilbert3(a, b, PARAMS).k == tame_symbol_exponent(a, b)
    assert hilbert3(a, b, BAR).k == tame_symbol_exponent(a, b, -1)


@given(NUMS, NUMS)
@settings(max_examples=AXIOM_EXAMPLES, deadline=None)
def test_axiom_antisymmetry(x, y):
    assert hilbert3(y, x, PARAMS) == hilbert3(x, y, PARAMS).inverse()


@given(NUMS, NUMS, NUMS)
@settings(max_examples=AXIOM_EXAMPLES, deadline=None)
def test_axiom_bilinearity(x, y, z):
    assert hilbert3(x * y, z, PARAMS) == hilbert3(x, z, PARAMS) * hilbert3(y, z, PARAMS)


@given(NUMS)
@settings(max_examples=AXIOM_EXAMPLES, deadline=None)
def test_axiom_steinberg(x):
    one_minus = FLD.one - x
    if one_minus.is_zero():
        return
    assert hilbert3(x, one_minus, PARAMS) == Mu3(0)


@given(NUMS)
@settings(max_examples=AXIOM_EXAMPLES, deadline=None)
def test_axiom_units_detect_cubes_of_p(x):
    trivial_on_units = all(hilbert3(x, FLD.num(u), PARAMS) == Mu3(0) for u in range(1, 7))
    assert trivial_on_units == (x.val % 3 == 0)


@given(NUMS, NUMS, st.integers(1, 4))
@settings(max_examples=AXIOM_EXAMPLES, deadline=None)
def test_axiom_perturbation(x, z, gap):
    y = FLD.element(5, 1, x.val + gap)
    assert hilbert3(x + y, z, PARAMS) == hilbert3(x, z, PARAMS)


# -- the s-function ---------------------------------------------------------------------


@pytest.mark.parametrize("m", [-6, -4, -2, 0, 2])
def test_s_even_valuation_is_one(m):
    assert s_func(FLD.element(3, 1, m)) == CycValue.rational(7, 1)


def test_s_one_over_p_is_gauss_sum():
    oracle = sum((CycValue.zeta_p_power(7, 1, z * z) for z in range(7)), CycValue.zero(7))
    assert s_func(FLD.num(1) / 7) == oracle


@given(padic_numbers(FLD, -5, 3), padic_numbers(FLD, -1, 1))
@settings(max_examples=200, deadline=None)
def test_s_square_class_invariance(x, y):
    assert s_func(x * y * y) == s_func(x)


# -- Kloosterman integrals ---------------------------------------------------------------


def test_kloosterman_integral_units_case():
    assert kloosterman_closed(FLD.one, FLD.num(2), FLD.num(3), PARAMS) == CycValue.rational(7, Fraction(6, 7))
    assert kloosterman_closed(FLD.uniformizer, FLD.num(2), FLD.num(3), PARAMS).is_zero()


def test_kloosterman_non_square_ratio_vanishes():
    a = FLD.element(1, 0, -3)
    b = FLD.element(3, 0, -3)
    assert not (b / a).is_square()
    assert kloosterman_closed(FLD.one, a, b, PARAMS).is_zero()
    assert kloosterman_brute(FLD.one, a, b, PARAMS).is_zero()


def test_kloosterman_measure_of_units():
    value = kloosterman_brute(FLD.one, FLD.zero, FLD.zero, PARAMS)
    assert value == CycValue.rational(7, Fraction(6, 7))


def test_kloosterman_twisted_gauss_sum():
    y, a = FLD.uniformizer, FLD.num(3) / 7
    oracle = CycValue.zero(7)
    for u in range(1, 7):
        twist = Mu3(tame_symbol_exponent(y, FLD.num(u)))
        oracle = oracle + twist * CycValue.zeta_p_power(7, 1, 3 * u)
    oracle = oracle.scale(Fraction(1, 7))
    assert kloosterman_brute(y, a, FLD.zero, PARAMS) == oracle
    assert kloosterman_closed(y, a, FLD.zero, PARAMS) == oracle


@pytest.mark.parametrize("va, vb", [(-3, -3), (-2, -4), (-1, 0), (-4, -4), (1, -2)])
def test_kloosterman_closed_equals_brute(va, vb):
    for k in range(3):
        y = FLD.element(2, k, k + 1)
        a, b = FLD.element(3, 1, va), FLD.element(1, 2, vb)
        assert kloosterman_closed(y, a, b, PARAMS) == kloosterman_brute(y, a, b, PARAMS)


def test_kloosterman_root_choice_irrelevant():
    y, a, b = FLD.one, FLD.element(2, 0, -3), FLD.element(2, 0, -3)
    assert kloosterman_closed(y, a, b, PARAMS) == kloosterman_closed(y, a, b, PARAMS, flip_root=True)


# -- cubic exponential integrals ---------------------------------------------------------


def test_cubic_integral_cases():
    one = CycValue.rational(7, 1)
    assert cubic_closed("C", FLD.num(2), FLD.num(3)) == one
    assert cubic_closed("C", FLD.num(1) / 7, FLD.one).is_zero()
    assert cubic_closed("C0", FLD.num(1) / 7, FLD.one) == CycValue.rational(7, Fraction(-1, 7))
    assert cubic_brute("C", FLD.zero, FLD.zero) == one


def test_omitted_branch_is_not_covered():
    with pytest.raises(NotCovered):
        cubic_closed("C", FLD.one, FLD.element(1, 0, -2))


@pytest.mark.parametrize("kind", ["C", "C0", ("Cl", -1), ("Cl", 1)])
@pytest.mark.parametrize("va, vb", [(-3, -3), (-2, -4), (-1, 0), (-4, -2), (0, -1), (-2, -2)])
def test_cubic_closed_equals_brute(kind, va, vb):
    a, b = FLD.element(3, 1, va), FLD.element(2, 2, vb)
    try:
        closed = cubic_closed(kind, a, b)
    except NotCovered:
        return
    assert closed == cubic_brute(kind, a, b)


@given(padic_numbers(FLD, -4, 2), padic_numbers(FLD, -4, 2), padic_numbers(FLD, 0, 0))
@settings(max_examples=150, deadline=None)
def test_cubic_unit_scaling(x, y, u):
    assert cubic_brute("C", u * x, u * u * u * y) == cubic_brute("C", x, y)


def test_cubic_root_choice_irrelevant():
    a, b = FLD.element(2, 0, -4), FLD.element(2, 0, -4)
    assert cubic_closed("C", a, b) == cubic_closed("C", a, b, flip_root=True)


# -- Gauss-sum lemma and the two identities ----------------------------------------------


@pytest.mark.parametrize("p, unit", [(7, 1), (7, 3), (13, 1)])
def test_gauss_pair_is_inverse_q(p, unit):
    fld = make_field(p, 12)
    assert gauss_pair(fld.num(unit) / p, default_params(fld)) == CycValue.rational(p, Fraction(1, p))


def test_gauss_pair_precondition():
    with pytest.raises(HypothesisNotMet):
        gauss_pair(FLD.one, PARAMS)


@pytest.mark.parametrize("bullet", [1, 2])
def test_duke_iwaniec_random(bullet):
    rng = random.Random(bullet)
    for _ in range(10):
        assert di_identity_check(*random_di_parameters(FLD, rng, bullet), params=PARAMS)


def test_duke_iwaniec_hypothesis_guard():
    inv_p = FLD.num(1) / 7
    with pytest.raises(HypothesisNotMet):
        di_identity_check(inv_p, 2 * inv_p, 3 * inv_p, FLD.element(1, 0, 3), params=PARAMS)


def test_normalization_calibration_records_degeneracy():
    chosen, passing = calibrate_normalization(FLD)
    assert chosen == "chi"
    assert "chi" in passing


def test_triple_cubic_examples():
    p3 = FLD.element(1, 0, 3)
    assert triple_cubic_check(p3, -p3)
    assert triple_cubic_check(p3, 2 * p3)
    assert triple_cubic_check(p3 * FLD.rho, p3)


@pytest.mark.parametrize("congruent", [True, False])
def test_triple_cubic_random(congruent):
    rng = random.Random(int(congruent))
    for _ in range(5):
        assert triple_cubic_check(*random_triple_parameters(FLD, rng, congruent))


# -- G integrals -----------------------------------------------------------------------------


@pytest.mark.parametrize("ua, ub", [(2, 3), (1, 1), (3, 5)])
def test_g_integrals(ua, ub):
    a, b = FLD.element(ua, 0, 2), FLD.element(ub, 1, 2)
    assert G_integral(2, 1, a, b, "closed").is_zero()
    assert G_integral(2, 1, a, b, "brute").is_zero()
    assert G_integral(1, 1, a, b, "closed") == G_integral(1, 1, a, b, "brute")
    assert G_integral(1, 1, a, b, "closed") == G_integral(1, 1, b, a, "closed")


def test_g_integral_hypotheses():
    with pytest.raises(HypothesisNotMet):
        G_integral(1, 1, FLD.element(1, 0, 1), FLD.element(1, 0, 1))
