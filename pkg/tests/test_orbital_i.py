from fractions import Fraction

import pytest

from cubicfl import make_field
from cubicfl.cyclo import CycValue, psi
from cubicfl.errors import CostGuard, HypothesisNotMet
from cubicfl.orbital_i import (
    I_brute,
    I_closed,
    I_deg_brute,
    I_deg_closed,
    I_j_reduced,
    I_j_sum_term,
    I_piece_closed,
    I_singleton,
    completion_identities,
)

FLD = make_field(7, 16)
RHO = FLD.rho
ONE = CycValue.rational(7, 1)
UNITS = [FLD.num(1), FLD.num(3), RHO, -RHO * RHO]


def el(unit, m):
    return unit * FLD.uniformizer**m


def test_units_give_one():
    assert I_closed(el(UNITS[1], 0), el(UNITS[2], 0)) == ONE


def test_valuation_one_gives_2q():
    assert I_closed(el(UNITS[1], 1), el(UNITS[2], 1)) == CycValue.rational(7, 14)


@pytest.mark.parametrize("va, vb", [(3, 4), (1, 2), (5, 6), (3, 5)])
def test_odd_valuation_below_one_vanishes(va, vb):
    assert I_closed(el(UNITS[1], va), el(UNITS[3], vb)).is_zero()


@pytest.mark.parametrize("va, vb", [(-1, 0), (2, -1), (-2, -2)])
def test_vanishes_off_integers(va, vb):
    assert I_closed(el(UNITS[0], va), el(UNITS[2], vb)).is_zero()


@pytest.mark.parametrize("va", range(-1, 5))
@pytest.mark.parametrize("vb", range(-1, 5))
def test_functional_equation_and_reality(va, vb):
    for u in UNITS:
        for w in UNITS:
            a, b = el(u, va), el(w, vb)
            value = I_closed(a, b)
            assert value == I_closed(-b, -a)
            assert value == value.conj()
            assert I_closed(b, a) == I_closed(-a, -b).conj()


@pytest.mark.parametrize("va, vb", [(0, 0), (0, 1), (1, 0), (1, 1), (-1, 0), (0, -1)])
def test_full_layer_matches_closed(va, vb):
    a, b = el(UNITS[1], va), el(UNITS[2], vb)
    assert I_brute(a, b, "full") == I_closed(a, b)


def test_full_layer_cost_guard():
    with pytest.raises(CostGuard):
        I_brute(el(UNITS[0], 2), el(UNITS[0], 2), "full")


def test_ordered_layers_need_ordering():
    with pytest.raises(HypothesisNotMet):
        I_brute(el(UNITS[0], 2), el(UNITS[0], 1), "reduced")


@pytest.mark.parametrize("va, vb", [(2, 2), (1, 2), (2, 3), (0, 2), (3, 3)])
def test_layers_agree(va, vb):
    a, b = el(UNITS[2], va), el(UNITS[1], vb)
    closed = I_closed(a, b)
    for layer in ("j-sum", "reduced", "split"):
        assert I_brute(a, b, layer) == closed


@pytest.mark.parametrize("va, vb", [(1, 1), (2, 2), (2, 3), (3, 3), (3, 4)])
def test_split_pieces_match_closed(va, vb):
    a, b = el(UNITS[3], va), el(UNITS[1], vb)
    for j in range(0, va + 1):
        pieces = I_j_reduced(j, a, b, split=True)
        whole = I_j_reduced(j, a, b)
        assert pieces[1] + pieces[2] + pieces[3] == whole == I_j_sum_term(j, a, b)
        for k in (1, 2, 3):
            assert pieces[k] == I_piece_closed(k, j, a, b), (k, j)


@pytest.mark.parametrize("va, vb", [(0, 0), (0, 2), (2, 2), (2, 3), (3, 3), (3, 5), (4, 4), (5, 5)])
def test_completion_identities(va, vb):
    for u in UNITS:
        records = completion_identities(el(u, va), el(UNITS[1], vb))
        assert records
        assert all(r.holds for r in records), [r.label for r in records if not r.holds]


def test_degenerate_closed_values():
    assert I_deg_closed(1, FLD.num(3)) == ONE
    assert I_deg_closed(1, FLD.uniformizer).is_zero()
    a = FLD.num(1) / 7
    assert I_deg_closed(2, a) == ONE + psi(a) + psi(-RHO * a)
    assert I_deg_closed(1, a) == psi(-a) + ONE + psi(RHO * RHO * a)


@pytest.mark.parametrize("which", [1, 2])
@pytest.mark.parametrize("m", [-2, -1, 0, 1, 2])
def test_degenerate_brute_matches_closed(which, m):
    for u in UNITS:
        a = el(u, m)
        assert I_deg_brute(which, a) == I_deg_closed(which, a)


def test_singleton_orbits():
    assert all(I_singleton(FLD, k) == ONE for k in range(3))
