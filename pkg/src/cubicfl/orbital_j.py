"""The metaplectic orbital integral J(a, b), its pieces, the auxiliary integrals G_j^l,
and the two degenerate integrals J_1(a), J_2(a).

Coordinates on the big cell: u_i has entries x_i (1,2), z_i (1,3), y_i (2,3) and
g = u_1 g_{a,b} u_2 with g_{a,b} = antidiag(b^-1, -a^-1 b, a).

The brute-force evaluation of J uses two exact reductions that only rely on the group
structure, not on any closed form:

* The integrand is left- and right-invariant under N(O), so the integral over N x N
  equals a plain sum over representatives of N(O)\\N and N/N(O); every coordinate is
  then summed over F/O.
* For fixed y_1 and u_2 the rows r_2, r_3 of g do not involve x_1, z_1, and the first
  row is h_1 + x_1 r_2 + (z_1 - x_1 y_1) r_3.  Whenever r_2, r_3 are integral and
  primitive the admissible (x_1, z_1) form a translate of O^2, so the x_1, z_1 integral
  is psi(x_1^0) for an explicit x_1^0 read off from a unit 2 x 2 minor.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cyclo import CycValue, Mu3, PhaseBatch, psi
from .errors import HypothesisNotMet, StratumUndefined
from .padic import DepthPolicy, FullBall, PAdicNumber, PadicArray, Product, ValShell, integrate
from .sums import SumParams, cubic_closed, default_params, hilbert3, hilbert3_batch

# ---------------------------------------------------------------------------
# big-cell points and kappa
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BigCellPoint:
    x1: PAdicNumber
    z1: PAdicNumber
    y1: PAdicNumber
    x2: PAdicNumber
    y2: PAdicNumber
    z2: PAdicNumber
    a: PAdicNumber
    b: PAdicNumber

    def left_translate(self, alpha, beta, gamma) -> "BigCellPoint":
        """Coordinates of n u_1 for n in N(O) with entries alpha, gamma (row 1), beta (row 2)."""
        return BigCellPoint(self.x1 + alpha, self.z1 + alpha * self.y1 + gamma, self.y1 + beta,
                            self.x2, self.y2, self.z2, self.a, self.b)

    def right_translate(self, alpha, beta, gamma) -> "BigCellPoint":
        """Coordinates of u_2 n for n in N(O)."""
        return BigCellPoint(self.x1, self.z1, self.y1, self.x2 + alpha, self.y2 + beta,
                            self.z2 + self.x2 * beta + gamma, self.a, self.b)


def assemble_and_test(pt: BigCellPoint):
    """The matrix u_1 g_{a,b} u_2 (as nested tuples) and whether it lies in SL_3(O)."""
    a, b = pt.a, pt.b
    x1, z1, y1, x2, y2, z2 = pt.x1, pt.z1, pt.y1, pt.x2, pt.y2, pt.z2
    s = b / a
    matrix = (
        (a * z1, a * z1 * x2 - s * x1, a * z1 * z2 - s * x1 * y2 + b.inverse()),
        (a * y1, a * y1 * x2 - s, a * y1 * z2 - s * y2),
        (a, a * x2, a * z2),
    )
    in_k = all(entry.is_integral() for row in matrix for entry in row)
    return matrix, in_k


def kappa2(g, det: PAdicNumber, params: SumParams | None = None) -> Mu3:
    """kappa on GL_2(O) embedded in a corner: (c, d det^-1)_3 when 0 < |c| < 1."""
    (alpha, beta), (c, d) = g
    if not all(entry.is_integral() for entry in (alpha, beta, c, d)) or not det.is_unit():
        raise HypothesisNotMet("kappa2 needs an integral matrix with unit determinant")
    if c.is_zero() or c.val == 0:
        return Mu3(0)
    return hilbert3(c, d / det, params)


@dataclass(frozen=True)
class KappaValue:
    value: Mu3
    stratum: str


def kappa_big_cell(pt: BigCellPoint, params: SumParams | None = None) -> KappaValue:
    """kappa(u_1 g_{a,b} u_2) on the strata where an explicit formula is available."""
    _, in_k = assemble_and_test(pt)
    if not in_k:
        raise HypothesisNotMet("the point does not lie in SL_3(O)")
    a, b = pt.a, pt.b
    h = lambda x, y: hilbert3(x, y, params)  # noqa: E731
    if a.val == 0 and b.val == 0:
        return KappaValue(Mu3(0), "units")
    if a.val == 0:
        return KappaValue(h(b, a) * h(b / a, pt.y2), "a-unit")
    if b.val == 0:
        raise StratumUndefined("no formula for |b| = 1 > |a|; use the conjugation symmetry")
    ay1, ax2 = a * pt.y1, a * pt.x2
    w = pt.x2 * pt.y2 - pt.z2
    if ay1.is_unit():
        return KappaValue(h(b, a) * h(pt.y1 * pt.y2, a / b) * h(pt.y2, pt.y1), "3a")
    if ax2.is_unit():
        return KappaValue(h(b, ax2) * h(-w / pt.x2, ax2 / b), "3b")
    if pt.y1.is_zero():
        raise StratumUndefined("the formula needs y1 != 0 (a measure-zero stratum)")
    value = h(b, a) * h(pt.y1, a / b) * h(ay1 * w, ay1 * pt.x2 - b / a) * h(b, w)
    return KappaValue(value, "3c")


# ---------------------------------------------------------------------------
# closed form and its pieces
# ---------------------------------------------------------------------------


def _cl_sum(a: PAdicNumber, b: PAdicNumber, ell: int) -> CycValue:
    """sum over k of C_l(b^-1 + rho^k a^-1, -27^-1 a^-1 b^-1)."""
    fld = a.field
    second = -(a * b * 27).inverse()
    total = CycValue.zero(fld.p)
    for k in range(3):
        total = total + cubic_closed(("Cl", ell), b.inverse() + fld.rho**k / a, second)
    return total


def _twisted_ordered(a: PAdicNumber, b: PAdicNumber) -> CycValue:
    """(a, b)_3 J(a, b) for |b| <= |a|."""
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
        return cubic_closed("C", b.inverse(), -(a * b * 27).inverse()).scale(p**vb)
    if va % 2:
        return CycValue.zero(p)
    return _cl_sum(a, b, va // 2).scale(p ** (va + vb))


def J_twisted_closed(a: PAdicNumber, b: PAdicNumber) -> CycValue:
    """(a, b)_3 J(a, b) in closed form, for any nonzero a, b."""
    if a.is_zero() or b.is_zero():
        raise ValueError("J(a, b) needs nonzero a and b")
    if b.val >= a.val:
        return _twisted_ordered(a, b)
    return _twisted_ordered(b, a).conj()


def J_closed(a: PAdicNumber, b: PAdicNumber, params: SumParams | None = None) -> CycValue:
    """Closed form of J(a, b); for |b| > |a| uses J(a, b) = conj J(b, a)."""
    return hilbert3(b, a, params) * J_twisted_closed(a, b)


JPIECES = ("J1", "J2", "J3", "J0", "J>0", "Jl")


def J_piece_closed(name: str, a: PAdicNumber, b: PAdicNumber, ell: int | None = None) -> CycValue:
    """Twisted value (a, b)_3 * piece for 1 > |a| >= |b|.

    Pieces: J1, J2, J3 (the split by |a y1|, |a x2|), J0 and J>0 (the split of J3), and
    Jl (the shell |x_1| = |b|^-1 q^-l of J>0; pass ``ell``).
    """
    fld = a.field
    p = fld.p
    va, vb = a.val, b.val
    if not 0 < va <= vb:
        raise HypothesisNotMet("pieces are defined for 1 > |a| >= |b|")
    inv_abs_a = Fraction(p**va)
    if name in ("J1", "J2"):
        return CycValue.rational(p, p if va == vb == 1 else 0)
    if name == "J0":
        if va != vb or va == 1:
            return CycValue.zero(p)
        if va % 3 == 0:
            return CycValue.rational(p, (1 + Fraction(1, p)) * inv_abs_a)
        return CycValue.rational(p, 2 * inv_abs_a)
    if name == "Jl":
        if ell is None or not (va + 1) // 2 <= ell <= va - 1:
            raise HypothesisNotMet("Jl needs ceil(val a / 2) <= l <= val a - 1")
        if va == vb and ell == vb - 1 and vb % 3 == 0:
            ratio_cubed = -((a / b) ** 3)
            near_one = (ratio_cubed - 1).in_ideal(1)
            base = (p - 1 - Fraction(1, p)) if near_one else -(1 + Fraction(1, p))
            return CycValue.rational(p, base * inv_abs_a)
        if va == vb:
            head = CycValue.rational(p, inv_abs_a if ell == va - 1 else 0)
            return head + _cl_sum(a, b, ell).scale(p ** (va + vb))
        if 2 * ell == va:
            return _cl_sum(a, b, ell).scale(p ** (va + vb))
        return CycValue.zero(p)
    if name == "J>0":
        total = CycValue.zero(p)
        for k in range((va + 1) // 2, va):
            total = total + J_piece_closed("Jl", a, b, k)
        return total
    if name == "J3":
        return J_piece_closed("J0", a, b) + J_piece_closed("J>0", a, b)
    raise ValueError(f"piece must be one of {JPIECES}")


def J_twisted_from_pieces(a: PAdicNumber, b: PAdicNumber) -> CycValue:
    """(a, b)_3 (J1 + J2 + J3) for 1 > |a| >= |b|."""
    return sum((J_piece_closed(n, a, b) for n in ("J1", "J2", "J3")), CycValue.zero(a.field.p))


# ---------------------------------------------------------------------------
# brute force
# ---------------------------------------------------------------------------


def _kappa_exponents(a: PAdicNumber, b: PAdicNumber, y1, x2, y2, z2, w, params) -> np.ndarray:
    """Batched kappa exponents on points already known to lie in SL_3(O)."""
    fld = a.field
    shape = np.broadcast_shapes(y1.shape, x2.shape, y2.shape, z2.shape)
    if a.val == 0 and b.val == 0:
        return np.zeros(shape, dtype=np.int64)
    ca, cb = PadicArray.constant(fld, a), PadicArray.constant(fld, b)
    ba = hilbert3(b, a, params).k
    if a.val == 0:
        return (ba + hilbert3_batch(PadicArray.constant(fld, b / a), y2, params)) % 3
    if b.val == 0:
        raise StratumUndefined("no formula for |b| = 1 > |a|")
    ay1, ax2 = ca * y1, ca * x2
    in_3a = ~ay1.in_ideal(1)
    in_3b = ~ax2.in_ideal(1)
    out = np.zeros(shape, dtype=np.int64)
    if in_3a.any():
        s = in_3a
        sy1, sy2 = y1.broadcast(shape).select(s), y2.broadcast(shape).select(s)
        ab = PadicArray.constant(fld, a / b)
        out[s] = ba + hilbert3_batch(sy1 * sy2, ab, params) + hilbert3_batch(sy2, sy1, params)
    if in_3b.any():
        s = in_3b
        sx2, sw = ax2.broadcast(shape).select(s), w.broadcast(shape).select(s)
        inv_b_ax2 = sx2 * PadicArray.constant(fld, b.inverse())
        # (z2/x2 - y2, t) = (-w, t) - (x2, t)
        x2s = x2.broadcast(shape).select(s)
        out[s] = (hilbert3_batch(cb, sx2, params) + hilbert3_batch(-sw, inv_b_ax2, params)
                  - hilbert3_batch(x2s, inv_b_ax2, params))
    rest = ~(in_3a | in_3b)
    if rest.any():
        s = rest
        sy1 = y1.broadcast(shape).select(s)
        sx2 = x2.broadcast(shape).select(s)
        sw = w.broadcast(shape).select(s)
        say1 = ca * sy1
        mid = say1 * sx2 - PadicArray.constant(fld, b / a)
        out[s] = (ba + hilbert3_batch(sy1, PadicArray.constant(fld, a / b), params)
                  + hilbert3_batch(say1 * sw, mid, params) + hilbert3_batch(cb, sw, params))
    return out % 3


def _j_brute_core(a: PAdicNumber, b: PAdicNumber, params: SumParams, budget: int) -> CycValue:
    fld = a.field
    p = fld.p
    va, vb = a.val, b.val
    ca, cb = PadicArray.constant(fld, a), PadicArray.constant(fld, b)
    b_over_a = PadicArray.constant(fld, b / a)

    def integrand(y1: PadicArray, x2: PadicArray, y2: PadicArray, z2: PadicArray):
        shape = np.broadcast_shapes(y1.shape, x2.shape, y2.shape, z2.shape)
        w = x2 * y2 - z2
        # move off x2 y2 = z2 inside the same N(O)-orbit (z2 -> z2 + 1)
        hit = w.zero_mask()
        if hit.any():
            bump = PadicArray.from_ints(fld, hit.astype(np.int64))
            z2 = z2 + bump
            w = w - bump
        ay1 = ca * y1
        row2 = (ay1, ay1 * x2 - b_over_a, ay1 * z2 - b_over_a * y2)
        inside = np.ones(shape, dtype=bool)
        for entry in row2:
            inside &= entry.in_ideal(0)
        by2 = cb * y2
        bw = cb * w
        unit_b = vb == 0
        unit_by2 = inside & ~by2.in_ideal(1)
        unit_bw = inside & ~unit_by2 & ~bw.in_ideal(1)
        if not unit_b:
            inside &= unit_by2 | unit_bw
        if not inside.any():
            return None
        kappa = _kappa_exponents(a, b, y1.broadcast(shape).select(inside),
                                 x2.broadcast(shape).select(inside), y2.broadcast(shape).select(inside),
                                 z2.broadcast(shape).select(inside), w.broadcast(shape).select(inside),
                                 params)
        base = (y1 + x2 + y2).broadcast(shape)
        batches = {}
        mu3 = np.zeros(shape, dtype=np.int64)
        mu3[inside] = -kappa
        if unit_b:
            batches["b"] = PhaseBatch.from_psi(base, mu3=mu3, mask=inside)
        else:
            for key, mask, denom, numer in (
                ("by2", unit_by2, by2, ca),
                ("bw", unit_bw, bw, ca * x2),
            ):
                if not mask.any():
                    continue
                d = denom.broadcast(shape).select(mask)
                nmr = numer.broadcast(shape).select(mask) if numer.shape else numer
                x1_center = nmr / (d * cb)
                phase = base.select(mask) + x1_center
                batches[key] = PhaseBatch.from_psi(phase, mu3=mu3[mask])
        return batches

    # y1 and y2 use the shifted representative set 1 + p^-k {0..p^k-1}, which avoids 0
    region = Product(FullBall(1, -va), FullBall(0, -va), FullBall(1, -vb), FullBall(0, -va))
    policy = DepthPolicy(0, False, budget)
    parts = integrate(region, integrand, policy, field_params=fld)
    if isinstance(parts, dict):
        return sum(parts.values(), CycValue.zero(p))
    return parts


def J_brute(a: PAdicNumber, b: PAdicNumber, params: SumParams | None = None, *,
            budget: int = 20_000_000) -> CycValue:
    """J(a, b) as an exact sum over N(O)-double-coset representatives of the big cell.

    |b| = 1 > |a| has no direct kappa formula and is obtained from J(a, b) = conj J(b, a).
    """
    if a.is_zero() or b.is_zero():
        raise ValueError("J(a, b) needs nonzero a and b")
    fld = a.field
    params = params or default_params(fld)
    if a.val < 0 or b.val < 0:
        # the bottom-left entry and the lower-left 2x2 minor of every u_1 g u_2 are a and b
        return CycValue.zero(fld.p)
    if b.val == 0 and a.val > 0:
        return J_brute(b, a, params, budget=budget).conj()
    return _j_brute_core(a, b, params, budget)


# ---------------------------------------------------------------------------
# the auxiliary integrals G_j^l
# ---------------------------------------------------------------------------


def _check_g_hypotheses(j: int, ell: int, a: PAdicNumber, b: PAdicNumber) -> None:
    va, vb = a.val, b.val
    equal_case = va == vb and va >= 2 and va <= 2 * ell and ell <= va - 1
    strict_case = 0 < va < vb and 2 * ell == va
    if not (equal_case or strict_case):
        raise HypothesisNotMet("G_j^l needs |a| = |b| <= q^-2 with val(a)/2 <= l < val(a), "
                               "or |b| < |a| < 1 with l = val(a)/2")
    if j not in (ell, ell + 1):
        raise HypothesisNotMet("j must be l or l + 1")


def G_integral(j: int, ell: int, a: PAdicNumber, b: PAdicNumber, mode: str = "closed", *,
               stability_check: bool = True) -> CycValue:
    """Integral over {(x, y) in O^2 : x^3 - y^3 in a p^-j} of
    psi(p^l b^-1 x - 27^-1 p^3l a^-1 b^-1 x^3 + p^l a^-1 y)."""
    _check_g_hypotheses(j, ell, a, b)
    fld = a.field
    p = fld.p
    va, vb = a.val, b.val
    if mode == "closed":
        if j == ell + 1:
            return CycValue.zero(p)
        head = Fraction(1, p * p) if (ell == va - 1 and va == vb) else Fraction(0)
        return CycValue.rational(p, head) + _cl_sum(a, b, ell).scale(Fraction(p ** (2 * ell), p**va))
    if mode != "brute":
        raise ValueError("mode must be 'closed' or 'brute'")
    m = va - j
    pi = fld.uniformizer
    cx = PadicArray.constant(fld, pi**ell / b)
    cx3 = PadicArray.constant(fld, -(pi ** (3 * ell)) / (a * b * 27))
    cy = PadicArray.constant(fld, pi**ell / a)

    def integrand(x: PadicArray, y: PadicArray):
        inside = (x * x * x - y * y * y).in_ideal(m)
        return PhaseBatch.from_psi(cx * x + cx3 * x * x * x + cy * y, mask=inside)

    dx = max(1, m, vb - ell, va + vb - 3 * ell)
    dy = max(1, m, va - ell)
    policy = DepthPolicy((dx, dy), stability_check)
    return integrate(Product(FullBall(0, 0), FullBall(0, 0)), integrand, policy, field_params=fld)


# ---------------------------------------------------------------------------
# degenerate orbits
# ---------------------------------------------------------------------------

DEGENERATE = (1, 2, "singletons")


def J_deg_closed(which, a: PAdicNumber | None = None) -> CycValue:
    if which == "singletons":
        return CycValue.rational(a.field.p if a is not None else 7, 1)
    fld = a.field
    p = fld.p
    if a.is_zero():
        raise ValueError("a must be nonzero")
    rho = fld.rho
    if which == 1:
        if a.val < 0:
            return CycValue.zero(p)
        if a.val == 0:
            return CycValue.rational(p, 1)
        total = sum((psi(3 * rho**k / a) for k in range(3)), CycValue.zero(p))
        return total.scale(p ** (2 * a.val))
    if which == 2:
        if a.val > 0:
            return CycValue.zero(p)
        if a.val == 0:
            return CycValue.rational(p, 1)
        total = sum((psi(-3 * rho**k * a) for k in range(3)), CycValue.zero(p))
        return total.scale(Fraction(p ** (-2 * a.val)))
    raise ValueError(f"which must be one of {DEGENERATE}")


def _min_k(x: PadicArray, top: int) -> np.ndarray:
    """Smallest k >= 0 with x in p^-k O, for entries known to lie in p^-top O."""
    k = np.full(x.shape, top, dtype=np.int64)
    for level in range(top - 1, -1, -1):
        k[x.in_ideal(-level)] = level
    return k


def _j_deg1_brute(a: PAdicNumber, params: SumParams, stability_check: bool, budget: int) -> CycValue:
    """y_1 = 0 representative; z_1, z_2 integrated exactly.

    With z_1 = -x_1 x_2 + a^-1 s and z_2 = a^-1 t (s, t in O) the only remaining condition
    is y_2 s + x_1 t in a^-2 + a x_1 x_2 y_2 + O, whose (s, t)-volume is
    q^-k [center in p^-k O] with q^k = max(1, |x_1|, |y_2|).
    """
    fld = a.field
    p = fld.p
    n = a.val
    ca = PadicArray.constant(fld, a)
    inv_a2 = PadicArray.constant(fld, a.inverse() ** 2)

    def integrand(x1: PadicArray, x2: PadicArray, y2: PadicArray):
        shape = np.broadcast_shapes(x1.shape, x2.shape, y2.shape)
        k = np.maximum(_min_k(x1, n), _min_k(y2, n))
        center = (inv_a2 + ca * x1 * x2 * y2).broadcast(shape)
        inside = np.zeros(shape, dtype=bool)
        for level in np.unique(k):
            sel = k == level
            inside[sel] = center.in_ideal(-int(level))[sel]
        if not inside.any():
            return None
        weight = p ** (n - k)  # q^(2n) * q^-k, scaled by q^-n below to stay integral
        mu3 = np.zeros(shape, dtype=np.int64)
        if n > 0:
            on_domain = (_min_k(x1, n) == n) & (_min_k(x2, n) == n) & (_min_k(y2, n) == n)
            if np.any(inside & ~on_domain):
                raise StratumUndefined("support leaves the domain of the kappa formula")
            sx2, sy2 = x2.broadcast(shape).select(inside), y2.broadcast(shape).select(inside)
            mu3[inside] = -hilbert3_batch(ca, sx2 * sy2 * sy2, params)
        phase = (x2 + y2 - x1).broadcast(shape)
        return PhaseBatch.from_psi(phase, mu3=mu3, weight=weight, mask=inside)

    region = Product(FullBall(0, -n), FullBall(0, -n), FullBall(0, -n))
    policy = DepthPolicy(0, stability_check, budget, separate=True)
    return integrate(region, integrand, policy, field_params=fld).scale(p**n)


def _j_deg2_brute(a: PAdicNumber, params: SumParams, stability_check: bool, budget: int) -> CycValue:
    """x_1 = 0 representative on the domain |z_1| = |z_2| = |a|^2; x_2, y_1, y_2 exact."""
    fld = a.field
    p = fld.p
    n = -a.val
    ca = PadicArray.constant(fld, a)
    a3 = PadicArray.constant(fld, a**3)
    inv_a2 = PadicArray.constant(fld, a.inverse() ** 2)
    inv_a3 = PadicArray.constant(fld, a.inverse() ** 3)

    def integrand(z1: PadicArray, z2: PadicArray):
        shape = np.broadcast_shapes(z1.shape, z2.shape)
        z1b, z2b = z1.broadcast(shape), z2.broadcast(shape)
        x2 = a3 * z1b.inverse()
        y1 = a3 * z2b.inverse()
        y2 = inv_a3 * z1b * z2b
        entries = (
            inv_a2 * z1b, ca - inv_a2 * x2 * z1b, ca * y2 - inv_a2 * z1b * z2b,
            inv_a2 * y1, inv_a2 * x2 * y1, ca - inv_a2 * y1 * z2b,
            inv_a2 * x2, inv_a2 * z2b,
        )
        for entry in entries:
            if not entry.in_ideal(0).all():
                raise StratumUndefined("domain point outside SL_3(O)")
        mu3 = -(hilbert3_batch(ca, z2b, params) - hilbert3_batch(ca, z1b, params)
                - hilbert3_batch(z1b, z2b, params))
        return PhaseBatch.from_psi(x2 - y1 + y2, mu3=mu3)

    region = Product(ValShell(-2 * n), ValShell(-2 * n))
    policy = DepthPolicy(-n, stability_check, budget, separate=True)
    # the y_2 ball a^-3 z_1 z_2 + a^-1 O has volume |a|^-1; the x_2, y_1 balls have volume 1
    return integrate(region, integrand, policy, field_params=fld).scale(Fraction(1, p**n))


def J_deg(which, a: PAdicNumber | None = None, mode: str = "closed", params: SumParams | None = None, *,
          stability_check: bool = True, budget: int = 20_000_000) -> CycValue:
    """J_1(a), J_2(a) or the singleton-orbit value, in closed or brute mode."""
    if mode == "closed":
        return J_deg_closed(which, a)
    if mode != "brute":
        raise ValueError("mode must be 'closed' or 'brute'")
    if which == "singletons":
        # f_0(zeta n) is supported on N(O), where psi is trivial: the integral is vol N(O)
        return CycValue.rational(a.field.p if a is not None else 7, 1)
    if a is None or a.is_zero():
        raise ValueError("a must be nonzero")
    fld = a.field
    p = fld.p
    params = params or default_params(fld)
    if which == 1:
        if a.val < 0:
            return CycValue.zero(p)  # the (2,1) entry a must be integral
        return _j_deg1_brute(a, params, stability_check, budget)
    if which == 2:
        if a.val > 0:
            return CycValue.zero(p)  # the (3,1) entry a^-2 must be integral
        if a.val == 0:
            return CycValue.rational(p, 1)  # domain O^5, kappa trivial, psi trivial
        return _j_deg2_brute(a, params, stability_check, budget)
    raise ValueError(f"which must be one of {DEGENERATE}")
