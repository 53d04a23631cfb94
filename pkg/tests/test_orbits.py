import random

import numpy as np
import pytest
import sympy

from cubicfl.errors import CostGuard, InvalidField
from cubicfl.orbits import (
    E1,
    E2,
    FAMILIES,
    KUZNETSOV_REPRESENTATIVES,
    AdditiveCharacter,
    HElement,
    OrbitVector,
    act,
    ad_unipotent,
    antidiagonal,
    canonicalize,
    classify,
    cocycle_argument,
    cocycle_c,
    find_witness,
    invariants,
    is_relevant,
    orbit_census,
    orbit_field,
    random_family_vector,
    random_h_element,
    relevance_oracle,
    relevant_vector,
    s_w4_block,
    stabilizer,
    u_block,
)

FLD = orbit_field(7)
Q, RHO = FLD.q, FLD.rho


def vec(*blocks):
    return OrbitVector.from_blocks(FLD, blocks)


def scaled(c, v):
    return (c * v[0], c * v[1])


ZERO = (0, 0)


def n_compose(n1, n2):
    return (n1[0] + n2[0], n1[1] + n2[1], n1[2] + n2[2] + n1[0] * n2[1])


def test_field_validation():
    assert orbit_field(13).rho == 3
    with pytest.raises(InvalidField):
        orbit_field(11)


def test_ad_identity_and_entry():
    assert np.array_equal(ad_unipotent(0, 0, 0, FLD) % Q, np.eye(8, dtype=int))
    assert ad_unipotent(3, 0, 0, FLD)[0, 1] % Q == 3


def test_ad_is_a_homomorphism():
    rng = random.Random(1)
    for _ in range(50):
        n1 = tuple(rng.randrange(Q) for _ in range(3))
        n2 = tuple(rng.randrange(Q) for _ in range(3))
        lhs = (ad_unipotent(*n1, FLD).dot(ad_unipotent(*n2, FLD))) % Q
        rhs = ad_unipotent(*n_compose(n1, n2), FLD) % Q
        assert np.array_equal(lhs.astype(int), rhs.astype(int))


def test_block_factorization():
    """Ad(n) = [[I, s], [0, I]] diag(u, u*) with u* = w4 (u^-1)^t w4 and s = (s w4) w4."""
    rng = random.Random(2)
    w4 = sympy.Matrix(antidiagonal(4))
    for _ in range(50):
        n = tuple(rng.randrange(Q) for _ in range(3))
        u = sympy.Matrix(u_block(*n, FLD))
        u_star = w4 * u.inv_mod(Q).T * w4
        s = sympy.Matrix(s_w4_block(*n, FLD)) * w4
        upper = sympy.BlockMatrix([[sympy.eye(4), s], [sympy.zeros(4), sympy.eye(4)]]).as_explicit()
        diag = sympy.diag(u, u_star)
        assert (upper * diag).applyfunc(lambda v: v % Q) == sympy.Matrix(ad_unipotent(*n, FLD))


def test_sw4_is_alternating():
    rng = random.Random(12)
    for _ in range(20):
        m = s_w4_block(*(rng.randrange(Q) for _ in range(3)), FLD)
        assert np.array_equal((m + m.T) % Q, np.zeros((4, 4), dtype=object))


def test_action_identity_and_zero():
    xi = vec((1, 2), (3, 4), (5, 6), (0, 1))
    assert act(xi, HElement.identity(FLD)) == xi
    zero = vec(ZERO, ZERO, ZERO, ZERO)
    rng = random.Random(3)
    assert all(act(zero, random_h_element(FLD, rng)) == zero for _ in range(20))


def test_right_action_axiom():
    rng = random.Random(4)
    for _ in range(300):
        xi = OrbitVector(FLD, tuple(rng.randrange(Q) for _ in range(8)))
        g1, g2 = random_h_element(FLD, rng), random_h_element(FLD, rng)
        assert act(act(xi, g1), g2) == act(xi, g1 * g2)
        assert act(act(xi, g1), g1.inverse()) == xi


def test_cocycle_trivial_at_identity():
    xi = vec((1, 2), (3, 4), (5, 6), (0, 1))
    assert cocycle_argument(xi, (0, 0, 0)) == 0
    assert cocycle_c(xi, (0, 0, 0)) == AdditiveCharacter(Q)(0)


def test_cocycle_law():
    rng = random.Random(5)
    for _ in range(300):
        xi = OrbitVector(FLD, tuple(rng.randrange(Q) for _ in range(8)))
        n1 = tuple(rng.randrange(Q) for _ in range(3))
        n2 = tuple(rng.randrange(Q) for _ in range(3))
        moved = act(xi, HElement(FLD, n=n1))
        lhs = cocycle_argument(xi, n_compose(n1, n2))
        assert lhs == (cocycle_argument(xi, n1) + cocycle_argument(moved, n2)) % Q


def test_cocycle_independent_of_sl2():
    rng = random.Random(6)
    for _ in range(200):
        xi = OrbitVector(FLD, tuple(rng.randrange(Q) for _ in range(8)))
        g = random_h_element(FLD, rng)
        n = tuple(rng.randrange(Q) for _ in range(3))
        assert cocycle_argument(act(xi, HElement(FLD, h=g.h)), n) == cocycle_argument(xi, n)


def test_invariant_examples():
    assert invariants(vec(E2, scaled(3, E1), scaled(5, E1), ZERO)) == (1, 2, 2, 2, 2)
    assert invariants(vec(ZERO, ZERO, ZERO, ZERO)) == (0, 0, 0, 0, 0)
    assert invariants(vec(ZERO, E2, scaled(RHO * RHO, E2), ZERO)) == (0, 1, 1, 1, 1)


def test_canonical_examples():
    rep, witness, family = canonicalize(vec(E1, scaled(2, E2), scaled(3, E2), (1, 1)))
    assert family == "generic"
    assert rep.block(1) == E2 and rep.block(4) == ZERO
    assert rep.block(2)[1] == 0 and rep.block(3)[1] == 0
    v = (2, 5)
    xi = vec(ZERO, v, scaled(3, v), scaled(4, v))
    rep, witness, family = canonicalize(xi)
    assert family == "sl2-line"
    assert rep == vec(ZERO, E2, scaled(3, E2), ZERO)
    assert act(xi, witness) == rep


def test_relevance_examples():
    assert is_relevant(vec(ZERO, E2, scaled(RHO * RHO, E2), ZERO))
    assert not is_relevant(vec(ZERO, E2, E2, ZERO))
    assert is_relevant(vec(E2, ZERO, ZERO, ZERO))
    assert not relevance_oracle(vec(ZERO, ZERO, ZERO, ZERO))
    assert not relevance_oracle(vec(ZERO, E2, scaled(3, E1), ZERO))


def test_census_is_clean():
    census = orbit_census(FLD, samples=300, seed=7)
    assert census["failures"] == []
    assert sum(v["total"] for v in census["families"].values()) == 300


@pytest.mark.parametrize("family", ["sl2-line", "sl2-plane", "first-second-line", "first-third-line"])
def test_relevant_conditions_against_oracle(family):
    rng = random.Random(8)
    for _ in range(3):
        xi = relevant_vector(FLD, family, rng)
        assert classify(xi).family == family
        assert is_relevant(xi) and relevance_oracle(xi)


def test_random_relevance_against_oracle():
    rng = random.Random(9)
    for _ in range(25):
        xi = random_family_vector(FLD, rng)
        assert is_relevant(xi) == relevance_oracle(xi)


def test_family_representatives_are_fixed_points():
    rng = random.Random(10)
    seen = set()
    for _ in range(400):
        rep, _, family = canonicalize(random_family_vector(FLD, rng))
        assert canonicalize(rep)[0] == rep
        seen.add(family)
    assert seen == set(FAMILIES)


def test_distinct_generic_parameters_are_distinct_orbits():
    xi = vec(E2, scaled(1, E1), scaled(2, E1), ZERO)
    eta = vec(E2, scaled(1, E1), scaled(3, E1), ZERO)
    assert find_witness(xi, eta) is None
    g = HElement(FLD, ((2, 3), (1, 2)), (1, 4, 6))
    found = find_witness(xi, act(xi, g))
    assert found is not None and act(xi, found) == act(xi, g)


def test_stabilizer_cost_guard():
    with pytest.raises(CostGuard):
        stabilizer(vec(E2, ZERO, ZERO, ZERO), budget=10)


def test_stabilizer_is_a_subgroup():
    xi = vec(E2, ZERO, ZERO, ZERO)
    stab = stabilizer(xi)
    members = {(g.h, g.n) for g in stab}
    rng = random.Random(11)
    for _ in range(30):
        g1, g2 = rng.choice(stab), rng.choice(stab)
        prod = g1 * g2
        assert (prod.h, prod.n) in members


def test_kuznetsov_representatives():
    for rep in KUZNETSOV_REPRESENTATIVES:
        for a in range(1, Q):
            if rep.label == "central" and pow(a, 3, Q) != 1:
                continue
            for b in range(1, Q):
                assert rep.matrix(a, b, q=Q) == rep.bruhat_product(a, b, q=Q)
