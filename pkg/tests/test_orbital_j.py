import random
from fractions import Fraction

import pytest

from cubicfl import make_field
from cubicfl.cyclo import CycValue, Mu3, psi
from cubicfl.errors import HypothesisNotMet, StratumUndefined
from cubicfl.orbital_j import (
    BigCellPoint,
    J_brute,
    J_closed,
    J_deg,
    J_deg_closed,
    J_piece_closed,
    J_twisted_closed,
    J_twisted_from_pieces,
    assemble_and_test,
    kappa2,
    kappa_big_cell,
)
from cubicfl.sums import SumParams, hilbert3

FLD = make_field(7, 16)
PARAMS = SumParams(FLD, "chi")
RHO = FLD.rho
ONE = CycValue.rational(7, 1)
UNITS = [FLD.num(1), FLD.num(2), RHO, -RHO * RHO]


def el(unit, m):
    return unit * FLD.uniformizer**m


def point(a, b, x1=0, z1=0, y1=0, x2=0, y2=0, z2=0):
    n = FLD.num
    return BigCellPoint(n(x1), n(z1), n(y1), n(x2), n(y2), n(z2), a, b)


def random_integral(rng, low=0):
    return FLD.element(rng.randrange(1, 7) + 7 * rng.randrange(49), rng.randrange(3), rng.randrange(low, 3))


def test_assemble_identity_coordinates():
    _, in_k = assemble_and_test(point(FLD.num(2), FLD.num(3)))
    assert in_k
    _, in_k = assemble_and_test(point(FLD.uniformizer, FLD.uniformizer))
    assert not in_k
    _, in_k = assemble_and_test(point(FLD.one, FLD.one, x1=FLD.num(1) / 7))
    assert not in_k


def test_assembled_matrix_has_unit_determinant():
    rng = random.Random(3)
    a, b = el(UNITS[2], 1), el(UNITS[1], 1)
    pt = BigCellPoint(*(FLD.num(rng.randrange(49)) for _ in range(6)), a, b)
    m = assemble_and_test(pt)[0]
    det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
           - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
           + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    assert det == FLD.one


def k_point(a, b, y1, x2, u, z2):
    """A point of the big cell with y2 = u / b; x1 and z1 are chosen so that row 1 is integral."""
    y2 = u / b
    return BigCellPoint(a / (b * b * y2), FLD.zero, y1, x2, y2, z2, a, b)


def random_k_points(a, b, rng, count):
    """Points of the big cell inside SL_3(O): row 1 is solved for (x1, z1), rows 2 and 3 by rejection."""
    found = []
    inv_a, s = a.inverse(), b / a
    for _ in range(1000 * count):
        y1, x2, z2 = (inv_a * random_integral(rng) for _ in range(3))
        y2 = b.inverse() * random_integral(rng)
        r, t = random_integral(rng), random_integral(rng)
        z1 = r * inv_a
        x1 = (r * z2 + b.inverse() - t) / (s * y2)
        pt = BigCellPoint(x1, z1, y1, x2, y2, z2, a, b)
        if assemble_and_test(pt)[1]:
            found.append(pt)
            if len(found) == count:
                break
    return found


def test_kappa2_cases():
    one, two = FLD.one, FLD.num(2)
    assert kappa2(((one, two), (FLD.zero, one)), one, PARAMS) == Mu3(0)
    assert kappa2(((one, two), (FLD.num(3), two)), FLD.num(-4), PARAMS) == Mu3(0)
    g = ((one, FLD.num(3)), (FLD.uniformizer, FLD.num(23)))
    det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
    assert det == FLD.num(2)
    assert kappa2(g, det, PARAMS) == hilbert3(FLD.uniformizer, FLD.num(23) / 2, PARAMS)
    g = ((FLD.num(4), FLD.num(1)), (FLD.uniformizer, FLD.num(2)))
    assert kappa2(g, FLD.one, PARAMS) == hilbert3(FLD.uniformizer, FLD.num(2), PARAMS)


def test_kappa2_rejects_non_integral():
    with pytest.raises(HypothesisNotMet):
        kappa2(((FLD.num(1) / 7, FLD.one), (FLD.zero, FLD.one)), FLD.one, PARAMS)


def test_kappa_strata():
    assert kappa_big_cell(point(FLD.num(2), FLD.num(3)), PARAMS).value == Mu3(0)
    a, b = FLD.num(3), el(UNITS[1], 2)
    pt = k_point(a, b, FLD.zero, FLD.zero, FLD.num(5), FLD.zero)
    value = kappa_big_cell(pt, PARAMS)
    assert value.stratum == "a-unit"
    assert value.value == hilbert3(b, a, PARAMS) * hilbert3(b / a, pt.y2, PARAMS)
    a, b = el(UNITS[2], 1), el(UNITS[1], 2)
    u = FLD.num(3)
    y1 = FLD.num(2) / a
    pt = k_point(a, b, y1, FLD.zero, u, (b / a) * (u / b) / (a * y1))
    assert assemble_and_test(pt)[1]
    value = kappa_big_cell(pt, PARAMS)
    assert value.stratum == "3a"
    expected = hilbert3(b, a, PARAMS) * hilbert3(y1 * pt.y2, a / b, PARAMS) * hilbert3(pt.y2, y1, PARAMS)
    assert value.value == expected


def test_kappa_undefined_strata():
    a, b = el(UNITS[0], 1), FLD.num(2)
    pt = point(a, b, y1=a.inverse(), x2=b / a)
    assert assemble_and_test(pt)[1]
    with pytest.raises(StratumUndefined):
        kappa_big_cell(pt, PARAMS)


@pytest.mark.parametrize("va, vb", [(0, 1), (0, 2), (1, 1), (1, 2), (2, 2), (2, 3)])
def test_kappa_bi_invariance(va, vb):
    """kappa(n g n') = kappa(g) for n, n' in N(O), sampled over points of SL_3(O)."""
    rng = random.Random(va * 10 + vb)
    a, b = el(UNITS[2], va), el(UNITS[1], vb)
    points = random_k_points(a, b, rng, 40)
    assert len(points) >= 8
    strata = set()
    for pt in points:
        try:
            base = kappa_big_cell(pt, PARAMS)
        except StratumUndefined:
            continue
        strata.add(base.stratum)
        for moved in (pt.left_translate(*(random_integral(rng) for _ in range(3))),
                      pt.right_translate(*(random_integral(rng) for _ in range(3)))):
            assert assemble_and_test(moved)[1]
            try:
                assert kappa_big_cell(moved, PARAMS).value == base.value
            except StratumUndefined:
                continue
    assert strata


def test_twisted_closed_cases():
    assert J_twisted_closed(el(UNITS[1], 0), el(UNITS[2], 0)) == ONE
    assert J_twisted_closed(el(UNITS[1], 1), el(UNITS[2], 1)) == CycValue.rational(7, 14)
    assert J_twisted_closed(el(UNITS[1], 3), el(UNITS[2], 5)).is_zero()


def test_j_is_twisted_value_divided_by_symbol():
    a, b = el(UNITS[1], 2), el(UNITS[2], 3)
    assert hilbert3(a, b, PARAMS) * J_closed(a, b, PARAMS) == J_twisted_closed(a, b)


@pytest.mark.parametrize("va", range(-1, 5))
@pytest.mark.parametrize("vb", range(-1, 5))
def test_conjugation_functional_equation(va, vb):
    for u in UNITS:
        a, b = el(u, va), el(UNITS[1], vb)
        assert J_closed(b, a, PARAMS) == J_closed(a, b, PARAMS).conj()


@pytest.mark.parametrize("va, vb", [(1, 1), (2, 2), (2, 3), (3, 3), (3, 4), (4, 4), (4, 6), (5, 5), (6, 6)])
def test_pieces_assemble(va, vb):
    for u in UNITS:
        a, b = el(u, va), el(UNITS[1], vb)
        assert J_twisted_from_pieces(a, b) == J_twisted_closed(a, b)


def test_piece_values():
    a, b = el(UNITS[1], 1), el(UNITS[2], 1)
    assert J_piece_closed("J1", a, b) == J_piece_closed("J2", a, b) == CycValue.rational(7, 7)
    assert J_piece_closed("J>0", a, b).is_zero()
    a, b = el(UNITS[1], 2), el(UNITS[2], 3)
    assert J_piece_closed("J1", a, b).is_zero()
    assert J_piece_closed("J0", el(UNITS[0], 3), el(UNITS[2], 3)) == CycValue.rational(7, Fraction(8, 7) * 343)
    assert J_piece_closed("J0", el(UNITS[0], 2), el(UNITS[2], 2)) == CycValue.rational(7, 98)


@pytest.mark.parametrize("va, vb", [(-1, 0), (0, -2), (0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (0, 2)])
def test_brute_matches_closed(va, vb):
    for u in UNITS:
        a, b = el(u, va), el(UNITS[1], vb)
        assert J_brute(a, b, PARAMS) == J_closed(a, b, PARAMS)


def test_brute_matches_closed_deepest_cell():
    a, b = el(UNITS[2], 2), el(UNITS[1], 2)
    assert J_brute(a, b, PARAMS) == J_closed(a, b, PARAMS)


def test_brute_functional_equation():
    a, b = el(UNITS[2], 1), el(UNITS[3], 2)
    assert J_brute(b, a, PARAMS) == J_brute(a, b, PARAMS).conj()


def test_degenerate_closed_values():
    assert J_deg_closed(1, FLD.num(3)) == ONE
    assert J_deg_closed(2, FLD.uniformizer).is_zero()
    a = FLD.uniformizer
    expected = sum((psi(3 * RHO**k / a) for k in range(3)), CycValue.zero(7)).scale(49)
    assert J_deg_closed(1, a) == expected
    assert J_deg_closed("singletons") == ONE


@pytest.mark.parametrize("which", [1, 2])
@pytest.mark.parametrize("m", [-2, -1, 0, 1, 2])
def test_degenerate_brute_matches_closed(which, m):
    for u in UNITS:
        c = el(u, m)
        assert J_deg(which, c, "brute", PARAMS) == J_deg(which, c, "closed", PARAMS)
