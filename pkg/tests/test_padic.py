from fractions import Fraction

import pytest
from hypothesis import given, settings

from cubicfl import make_field
from cubicfl.cyclo import CycValue, psi
from cubicfl.errors import DivisionByZero, InvalidField, NoSquareRoot, PrecisionLoss, TailNotJustified
from cubicfl.padic import (
    FullBall,
    Product,
    Union,
    UnitBall,
    ValShell,
    ValTail,
    default_precision,
    hensel_sqrt,
    integrate,
)

from conftest import padic_numbers

FLD = make_field(7, 16)


@pytest.mark.parametrize("p, residue", [(7, 2), (13, 3), (19, 7), (31, 5)])
def test_smaller_root_choice(p, residue):
    fld = make_field(p, 8)
    assert fld.rho_residue == residue
    assert (residue * residue + residue + 1) % p == 0


def test_larger_root_choice():
    assert make_field(7, 8, rho_choice="larger").rho_residue == 4


@pytest.mark.parametrize("p", [5, 3, 2, 11, 25, 49, 91])
def test_rejects_bad_primes(p):
    with pytest.raises(InvalidField):
        make_field(p, 8)


def test_rejects_tiny_precision():
    with pytest.raises(InvalidField):
        make_field(7, 1)


@pytest.mark.parametrize("precision", [2, 4, 9, 20])
def test_rho_is_a_primitive_cube_root(precision):
    fld = make_field(7, precision)
    modulus = 7**precision
    assert pow(fld.rho_unit, 3, modulus) == 1
    assert fld.rho_unit % 7 != 1
    assert (fld.rho ** 2 + fld.rho + 1).is_zero()
    assert fld.rho ** 3 == fld.one


def test_product_of_valuation_one_numbers():
    x, y = 7 * FLD.num(3), 7 * FLD.num(4)
    prod = x * y
    assert prod.val == 2
    assert prod.residue == 5


def test_one_minus_one_is_exact_zero():
    assert (FLD.one + FLD.num(-1)).is_zero()
    assert abs(FLD.zero) == 0


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        FLD.one / FLD.zero


def test_precision_loss_is_loud():
    fld = make_field(7, 4, min_digits=2)
    x = fld.num(1)
    y = fld.num(1 + 7**3)
    with pytest.raises(PrecisionLoss):
        y - x


def test_parse_element_syntax():
    assert FLD.parse("3*rho^2*p^-1") == FLD.element(3, 2, -1)
    assert FLD.parse("-1") == FLD.num(-1)
    assert FLD.parse("p") == FLD.uniformizer


def test_absolute_value():
    assert abs(FLD.element(3, 0, 2)) == Fraction(1, 49)
    assert abs(FLD.element(3, 0, -1)) == 7


def test_default_precision_rule():
    assert default_precision([0, 3, -5]) == 18
    assert default_precision([]) == 16


@given(padic_numbers(FLD), padic_numbers(FLD))
@settings(max_examples=200, deadline=None)
def test_valuation_laws(x, y):
    assert (x * y).val == x.val + y.val
    s = x + y
    if not s.is_zero():
        assert s.val >= min(x.val, y.val)
    if x.val != y.val:
        assert s.val == min(x.val, y.val)


@given(padic_numbers(FLD))
@settings(max_examples=200, deadline=None)
def test_inverse_and_negation(x):
    assert x * x.inverse() == FLD.one
    assert (x + (-x)).is_zero()


def test_sqrt_of_four():
    y = hensel_sqrt(FLD.num(4))
    assert y * y == FLD.num(4)
    assert y.residue in (2, 5)


def test_sqrt_odd_valuation_fails():
    with pytest.raises(NoSquareRoot):
        hensel_sqrt(FLD.uniformizer)


def test_sqrt_non_residue_fails():
    with pytest.raises(NoSquareRoot):
        hensel_sqrt(FLD.num(3))


def test_minus_three_is_a_square():
    root = 1 + 2 * FLD.rho
    assert root * root == FLD.num(-3)
    y = hensel_sqrt(FLD.num(-3))
    assert y * y == FLD.num(-3)


@given(padic_numbers(FLD))
@settings(max_examples=200, deadline=None)
def test_sqrt_squares_back(x):
    square = x * x
    y = hensel_sqrt(square)
    assert y * y == square


def test_psi_integrates_to_one_over_o():
    value = integrate(FullBall(0, 0), lambda x: psi(x), 1, vectorized=False, field_params=FLD)
    assert value == CycValue.rational(7, 1)


def test_psi_over_valuation_minus_one_shell():
    value = integrate(ValShell(-1), lambda x: psi(x), 1, vectorized=False, field_params=FLD)
    oracle = CycValue.zero(7)
    for t in range(1, 7):
        oracle = oracle + CycValue.zeta_p_power(7, 1, t)
    assert value == oracle == CycValue.rational(7, -1)


def test_unit_ball_has_multiplicative_mass_one():
    one = CycValue.rational(7, 1)
    value = integrate(UnitBall(multiplicative=True), lambda x: one, 2, vectorized=False, field_params=FLD)
    assert value == one


@pytest.mark.parametrize("depth", [0, 1, 2, 3])
def test_ball_measure(depth):
    one = CycValue.rational(7, 1)
    value = integrate(FullBall(0, depth), lambda x: one, depth + 1, vectorized=False, field_params=FLD)
    assert value == CycValue.rational(7, Fraction(1, 7**depth))


def test_additivity_over_disjoint_shells():
    one = CycValue.rational(7, 1)
    pieces = Union(ValShell(0), ValShell(1), FullBall(0, 2))
    value = integrate(pieces, lambda x: one, 3, vectorized=False, field_params=FLD)
    assert value == one


def test_product_region_measure():
    one = CycValue.rational(7, 1)
    value = integrate(Product(FullBall(0, 1), ValShell(0)), lambda x, y: one, 2, vectorized=False,
                      field_params=FLD)
    assert value == CycValue.rational(7, Fraction(6, 49))


def test_tail_requires_support_bound():
    one = CycValue.rational(7, 1)
    with pytest.raises(TailNotJustified):
        integrate(ValTail(0), lambda x: one, 3, vectorized=False, field_params=FLD)
    value = integrate(ValTail(0), lambda x: one, 3, vectorized=False, field_params=FLD, support_bound=(0, 2))
    assert value == CycValue.rational(7, Fraction(1) - Fraction(1, 343))


def test_json_round_trip():
    x = FLD.element(5, 1, -3)
    from cubicfl.padic import PAdicNumber

    assert PAdicNumber.from_json(FLD, x.to_json()) == x
    assert PAdicNumber.from_json(FLD, FLD.zero.to_json()).is_zero()
