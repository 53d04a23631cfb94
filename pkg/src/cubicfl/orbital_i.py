"""The big-cell orbital integral I(a, b), its reduction tower, and the two degenerate
integrals I_1(a), I_2(a).

Brute-force layers share one technique: variables entering the phase linearly over a
ball are integrated exactly (the integral of psi(L z) over c + p^r O is
psi(L c) * vol * [L p^r in O]); the remaining variables are summed over cosets with a
stability check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cyclo import CycValue, PhaseBatch, psi
from .errors import CostGuard, HypothesisNotMet
from .padic import DepthPolicy, FullBall, PAdicNumber, PadicArray, Product, integrate
from .sums import cubic_closed

LAYERS = ("full", "j-sum", "reduced", "split")


@dataclass(frozen=True)
class IParams:
    a: PAdicNumber
    b: PAdicNumber

    def __post_init__(self):
        if self.a.is_zero() or self.b.is_zero():
            raise ValueError("I(a, b) needs nonzero a and b")

    @property
    def field(self):
        return self.a.field


def _pow_q(fld, exponent: int) -> Fraction:
    return Fraction(fld.p) ** exponent


# ---------------------------------------------------------------------------
# closed form
# ---------------------------------------------------------------------------


def _cl_sum(a: PAdicNumber, b: PAdicNumber, ell: int, sign: int = -1) -> CycValue:
    """sum over k of C_l(b^-1 + sign * rho^k a^-1, 2 a^-1 b^-1)."""
    fld = a.field
    second = fld.num(2) / (a * b)
    total = CycValue.zero(fld.p)
    for k in range(3):
        total = total + cubic_closed(("Cl", ell), b.inverse() + sign * (fld.rho**k / a), second)
    return total


def _i_closed_ordered(a: PAdicNumber, b: PAdicNumber) -> CycValue:
    fld = a.field
    p = fld.p
    va, vb = a.val, b.val
    if va < 0:
        return CycValue.zero(p)
    if va == vb:
        if va == 0:
            return CycValue.rational(p, 1)
        if va == 1:
            return CycValue.rational(p, 2 * p)
        total = CycValue.zero(p)
        for ell in range((va + 1) // 2, va):
            total = total + _cl_sum(a, b, ell)
        return CycValue.rational(p, 3 * p**va) + total.scale(p ** (va + vb))
    if va == 0:
        return cubic_closed("C", b.inverse(), fld.num(2) / (a * b)).scale(p**vb)
    if va % 2:
        return CycValue.zero(p)
    return _cl_sum(a, b, va // 2).scale(p ** (va + vb))


def I_closed(a: PAdicNumber, b: PAdicNumber) -> CycValue:
    """Closed form of I(a, b); for |b| > |a| uses I(a, b) = conj I(-b, -a)."""
    IParams(a, b)
    if b.val >= a.val:
        return _i_closed_ordered(a, b)
    return _i_closed_ordered(-b, -a).conj()


# ---------------------------------------------------------------------------
# brute-force layers
# ---------------------------------------------------------------------------


def _require_integral(a, b):
    if a.val < 0 or b.val < 0:
        raise HypothesisNotMet("this layer needs a, b in O")


def _require_ordered(a, b):
    if b.val < a.val:
        raise HypothesisNotMet("this layer needs |b| <= |a|")


def _x_depth(j: int, va: int, vb: int) -> int:
    """Coset depth of the free variable: the cubic term needs min(val a, val b) - 2j."""
    return max(0, min(va, vb) - 2 * j)


def _policy(depths, refine, stability_check: bool, budget: int) -> DepthPolicy:
    return DepthPolicy(tuple(depths), stability_check, budget, refine=tuple(refine))


def I_j_reduced(j: int, a: PAdicNumber, b: PAdicNumber, *, split: bool = False,
                stability_check: bool = True, budget: int = 20_000_000):
    """I(j; a, b) from the two-variable form in (x, y); with ``split`` returns {1, 2, 3} pieces.

    Coordinates: x in b^-1 p^j O and y = rho^2 a^-1 b x + t with t in p^-j O / O, which
    parametrizes the condition b x - rho a y in a p^-j exactly.
    """
    _require_integral(a, b)
    _require_ordered(a, b)
    fld = a.field
    p = fld.p
    va, vb = a.val, b.val
    if not 0 <= j <= min(va, vb):
        raise HypothesisNotMet("need 0 <= j <= min(val a, val b)")
    rho = fld.rho
    m = min(j, va - j, (va - j) // 2)
    slope = PadicArray.constant(fld, rho * rho * b / a)
    lin = PadicArray.constant(fld, 1 - rho * b / a)
    cubic = PadicArray.constant(fld, fld.num(2) * b * b / a)
    ca, cb = PadicArray.constant(fld, a), PadicArray.constant(fld, b)
    unit_y = PadicArray.constant(fld, -(1 + 2 * rho))

    def integrand(x: PadicArray, t: PadicArray):
        y = slope * x + t
        ay = ca * y
        inside = ay.in_ideal(j) & (y * (cb * x + ay)).in_ideal(j)
        phase = lin * x + unit_y * y + cubic * x * x * x
        if not split:
            return PhaseBatch.from_psi(phase, mask=inside)
        in_m = y.in_ideal(-m)
        in_j = y.in_ideal(-j)
        small_square = (ay * y).in_ideal(j)
        return {
            1: PhaseBatch.from_psi(phase, mask=inside & in_m),
            2: PhaseBatch.from_psi(phase, mask=inside & ~in_j),
            3: PhaseBatch.from_psi(phase, mask=inside & in_j & ~small_square),
        }

    region = Product(FullBall(0, j - vb), FullBall(0, -j))
    policy = _policy((_x_depth(j, va, vb), 0), (True, False), stability_check, budget)
    result = integrate(region, integrand, policy, field_params=fld)
    scale = p**va
    if split:
        zero = CycValue.zero(p)
        return {k: result.get(k, zero).scale(scale) for k in (1, 2, 3)}
    return result.scale(scale)


def I_j_sum_term(j: int, a: PAdicNumber, b: PAdicNumber, *, stability_check: bool = True,
                 budget: int = 20_000_000) -> CycValue:
    """I(j; a, b) from the three-variable (x, y, s) form with s integrated exactly.

    The s-domain is the intersection of -x/a + a^-1 p^-j and y/b + b^-1 p^-j, which is the
    smaller ball whenever it is nonempty; the remaining (x, y) are parametrized so that
    the intersection is nonempty.
    """
    _require_integral(a, b)
    fld = a.field
    p = fld.p
    va, vb = a.val, b.val
    if not 0 <= j <= min(va, vb):
        raise HypothesisNotMet("need 0 <= j <= min(val a, val b)")
    ca, cb = PadicArray.constant(fld, a), PadicArray.constant(fld, b)
    two = PadicArray.constant(fld, 2)
    b_small = vb >= va
    if b_small:
        slope = PadicArray.constant(fld, -b / a)
        s_center_coeff = PadicArray.constant(fld, -a.inverse())
        big = a
    else:
        slope = PadicArray.constant(fld, -a / b)
        s_center_coeff = PadicArray.constant(fld, b.inverse())
        big = b

    def integrand(free: PadicArray, t: PadicArray):
        if b_small:
            x, y = free, slope * free + t
            s0 = s_center_coeff * x
        else:
            y, x = free, slope * free + t
            s0 = s_center_coeff * y
        ay, bx = ca * y, cb * x
        quad = ay * bx - bx * bx - ay * ay
        inside = ay.in_ideal(j) & bx.in_ideal(j) & quad.in_ideal(big.val + j)
        phase = x + y + two * (bx * x * y - ay * x * y + quad * s0)
        return PhaseBatch.from_psi(phase, mask=inside)

    free_exp = j - (vb if b_small else va)
    region = Product(FullBall(0, free_exp), FullBall(0, -j))
    policy = _policy((_x_depth(j, va, vb), 0), (True, False), stability_check, budget)
    value = integrate(region, integrand, policy, field_params=fld)
    return value.scale(p**big.val)


def I_j_full_term(j: int, a: PAdicNumber, b: PAdicNumber, *, depth: int | None = None,
                  stability_check: bool = True, budget: int = 20_000_000) -> CycValue:
    """Contribution of the shell |t| = q^-j to the defining five-variable integral.

    Coordinates: x = -a s + u, y = b s + v with u, v in p^-j O; z is integrated exactly
    over its ball rho^2((x b + y rho^2 a) s - x y) + p^-j O.
    """
    fld = a.field
    p = fld.p
    va, vb = a.val, b.val
    rho = fld.rho
    low = min(j, min(va, vb) - j) - va - vb
    ca, cb = PadicArray.constant(fld, a), PadicArray.constant(fld, b)
    r1, r2 = PadicArray.constant(fld, rho), PadicArray.constant(fld, rho * rho)
    two = PadicArray.constant(fld, 2)

    def integrand(s: PadicArray, u: PadicArray, v: PadicArray):
        x = u - ca * s
        y = cb * s + v
        lin = x * cb + y * r2 * ca
        z_coeff = two * (r1 * cb * x + r2 * ca * y)
        inside = lin.in_ideal(j) & z_coeff.in_ideal(j)
        z0 = r2 * (lin * s - x * y)
        phase = x + y + two * ca * r2 * x * y * y - z_coeff * z0
        return PhaseBatch.from_psi(phase, mask=inside)

    if depth is None:
        depth = 1
    region = Product(FullBall(0, low), FullBall(0, -j), FullBall(0, -j))
    policy = DepthPolicy((depth, depth, depth), stability_check, budget, separate=True)
    value = integrate(region, integrand, policy, field_params=fld)
    return value.scale(Fraction(1, p**j))


def I_brute(a: PAdicNumber, b: PAdicNumber, layer: str = "reduced", *, stability_check: bool = True,
            budget: int = 20_000_000) -> CycValue:
    """I(a, b) by coset summation at the requested layer of the reduction tower."""
    IParams(a, b)
    if layer not in LAYERS:
        raise ValueError(f"layer must be one of {LAYERS}")
    fld = a.field
    p = fld.p
    va, vb = a.val, b.val
    if layer == "full":
        if max(-va, -vb) > 1 or max(va, vb) > 1:
            raise CostGuard("layer full is limited to valuations in {-1, 0, 1}")
        total = CycValue.zero(p)
        for j in range(0, min(va, vb) + 1):
            total = total + I_j_full_term(j, a, b, stability_check=stability_check, budget=budget)
        return total
    _require_integral(a, b)
    total = CycValue.zero(p)
    for j in range(0, min(va, vb) + 1):
        if layer == "j-sum":
            total = total + I_j_sum_term(j, a, b, stability_check=stability_check, budget=budget)
        elif layer == "reduced":
            total = total + I_j_reduced(j, a, b, stability_check=stability_check, budget=budget)
        else:
            pieces = I_j_reduced(j, a, b, split=True, stability_check=stability_check, budget=budget)
            total = total + pieces[1] + pieces[2] + pieces[3]
    return total


# ---------------------------------------------------------------------------
# split pieces in closed form
# ---------------------------------------------------------------------------


def I_piece_closed(piece: int, j: int, a: PAdicNumber, b: PAdicNumber) -> CycValue:
    """Closed value of piece 1, 2 or 3 of I(j; a, b) for |b| <= |a| <= 1."""
    _require_integral(a, b)
    _require_ordered(a, b)
    fld = a.field
    p = fld.p
    va, vb = a.val, b.val
    rho = fld.rho
    if not 0 <= j <= va:
        raise HypothesisNotMet("need 0 <= j <= val a")
    second = fld.num(2) / (a * b)
    if piece == 1:
        if j in (0, va):
            return cubic_closed("C", a / b, fld.num(2) * a * a / b).scale(p**vb)
        if j == va - 1:
            pi = fld.uniformizer
            arg1 = (rho * rho * a / b - 1) / pi
            arg2 = fld.num(2) * a * a / (b * pi**3)
            return cubic_closed("C", arg1, arg2).scale(p ** (vb + 1))
        if (va + 1) // 2 <= j <= va - 2:
            return cubic_closed(("Cl", j), b.inverse() - rho / a, second).scale(p ** (va + vb))
        return CycValue.zero(p)
    if piece == 2:
        if j != 0:
            return CycValue.zero(p)
        total = CycValue.zero(p)
        for ell in range((va + 1) // 2, va):
            total = total + cubic_closed(("Cl", ell), b.inverse() - a.inverse(), second)
        return total.scale(p ** (va + vb))
    if piece == 3:
        if (va + 1) // 2 <= j <= va - 1:
            return cubic_closed(("Cl", j), b.inverse() - rho * rho / a, second).scale(p ** (va + vb))
        return CycValue.zero(p)
    raise ValueError("piece must be 1, 2 or 3")


# ---------------------------------------------------------------------------
# completion identities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityRecord:
    index: int
    label: str
    lhs: CycValue
    rhs: CycValue

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def completion_identities(a: PAdicNumber, b: PAdicNumber) -> list[IdentityRecord]:
    """The seven cubic-integral identities that assemble the closed form, where applicable."""
    _require_integral(a, b)
    _require_ordered(a, b)
    fld = a.field
    p = fld.p
    va, vb = a.val, b.val
    rho, pi = fld.rho, fld.uniformizer
    second = fld.num(2) / (a * b)
    zero = CycValue.zero(p)
    records: list[IdentityRecord] = []

    first = cubic_closed("C", a / b, fld.num(2) * a * a / b)
    if va == vb:
        records.append(IdentityRecord(1, "equal absolute values", first, CycValue.rational(p, 1)))
    elif va == 0:
        records.append(IdentityRecord(1, "unit a", first, cubic_closed("C", b.inverse(), second)))
    else:
        records.append(IdentityRecord(1, "|b| < |a| < 1", first, zero))

    shifted = lambda: cubic_closed("C", (rho * rho * a / b - 1) / pi, fld.num(2) * a * a / (b * pi**3))
    c1 = lambda: cubic_closed(("Cl", 1), b.inverse() - rho / a, second)
    if va == 2:
        rhs2 = cubic_closed("C", pi * (b.inverse() - rho / a), fld.num(2) * pi**3 / (a * b))
        records.append(IdentityRecord(2, "unit rescaling at val a = 2", shifted(), rhs2))
        if vb > va:
            records.append(IdentityRecord(3, "|b| < |a| = q^-2", shifted(), c1().scale(p)))
        else:
            records.append(IdentityRecord(4, "|b| = |a| = q^-2", shifted(),
                                          CycValue.rational(p, Fraction(1, p)) + c1().scale(p)))
    if va >= 3 and vb > va:
        records.append(IdentityRecord(5, "|b| < |a| <= q^-3", shifted(), zero))
        for ell in range(0, va):
            if 2 * ell == va:
                continue
            for k in range(3):
                value = cubic_closed(("Cl", ell), b.inverse() - rho**k / a, second)
                records.append(IdentityRecord(6, f"vanishing C_{ell}, k={k}", value, zero))
    if va >= 3 and vb == va:
        lhs = shifted().scale(p)
        rhs = CycValue.rational(p, 1) + cubic_closed(("Cl", va - 1), b.inverse() - rho / a, second).scale(p**va)
        records.append(IdentityRecord(7, "|b| = |a| <= q^-3", lhs, rhs))
    return records


# ---------------------------------------------------------------------------
# degenerate integrals
# ---------------------------------------------------------------------------


def I_deg_closed(which: int, a: PAdicNumber) -> CycValue:
    fld = a.field
    p = fld.p
    if a.is_zero():
        raise ValueError("a must be nonzero")
    if a.val > 0:
        return CycValue.zero(p)
    if a.val == 0:
        return CycValue.rational(p, 1)
    rho = fld.rho
    if which == 1:
        return psi(-a) + 1 + psi(rho * rho * a)
    if which == 2:
        return psi(a) + 1 + psi(-rho * a)
    raise ValueError("which must be 1 or 2")


def I_deg_brute(which: int, a: PAdicNumber, *, max_valuation: int = 4, stability_check: bool = True,
                budget: int = 20_000_000) -> CycValue:
    """Shell-by-shell evaluation of the degenerate integrals.

    For |t| = q^-j two of the three variables enter linearly and are integrated exactly;
    the last one is summed over cosets.  |a| < 1 gives an empty domain (t in O and
    a^-2 t^-1 in O are incompatible).
    """
    fld = a.field
    p = fld.p
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    if a.is_zero():
        raise ValueError("a must be nonzero")
    if a.val > 0:
        return CycValue.zero(p)
    n = -a.val
    if n > max_valuation:
        raise CostGuard(f"|a| = q^{n} exceeds the degenerate budget")
    rho = fld.rho
    ca = PadicArray.constant(fld, a)
    inv_a = PadicArray.constant(fld, a.inverse())
    inv_a2 = PadicArray.constant(fld, a.inverse() ** 2)
    r1, r2 = PadicArray.constant(fld, rho), PadicArray.constant(fld, rho * rho)
    total = CycValue.zero(p)
    for j in range(0, 2 * n + 1):

        if which == 1:
            # free variable x in -a + p^-j O with |x| <= q^(2n-j); y, z exact
            def integrand(x: PadicArray, j=j):
                z_coeff = inv_a2 * x - r2 * inv_a
                slope = r1 * ca - r2 * x
                y_coeff = 1 - r1 * inv_a * x - r2 * inv_a * slope + inv_a2 * x * slope
                inside = x.in_ideal(j - 2 * n) & z_coeff.in_ideal(j) & y_coeff.in_ideal(j)
                return PhaseBatch.from_psi(x, mask=inside)
        else:
            # free variable y in a + p^-j O with |y| <= q^(2n-j); x, z exact
            def integrand(y: PadicArray, j=j):
                z_coeff = -(inv_a2 * y) - r1 * inv_a
                slope = r2 * (ca - y)
                x_coeff = inv_a2 * (y - slope) * y - r1 * (r2 * y + slope) * inv_a + 1
                inside = y.in_ideal(j - 2 * n) & z_coeff.in_ideal(j) & x_coeff.in_ideal(j)
                return PhaseBatch.from_psi(y, mask=inside)

        center = -a if which == 1 else a
        depth = max(1, 2 * n - j + 1, 1 - j)
        policy = DepthPolicy(depth, stability_check, budget)
        shell = integrate(FullBall(center, -j), integrand, policy, field_params=fld)
        # |t|^2 = q^-2j on the shell, and the two exact balls have volume q^j each
        total = total + shell
    return total


def I_singleton(fld, k: int) -> CycValue:
    """Orbital integral over the one-point orbit of the central element rho^k.

    The orbit is a single point of K, so the integral is the value 1 of the unit
    test function there.
    """
    if k % 3 not in (0, 1, 2):
        raise ValueError("k indexes a cube root of unity")
    return CycValue.rational(fld.p, 1)
