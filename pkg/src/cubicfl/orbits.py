"""Orbits of H = SL_2 x N on F_q^8 over a prime field with q = 1 (mod 3).

N is the upper unipotent group of SL_3 with coordinates n = (x, y, z) for the matrix
[[1, x, z], [0, 1, y], [0, 0, 1]].  H acts on the right through the unipotent block u(n)
of Ad(n) and through lambda(h) = diag(h, h, h, h); the two commute, so the action is

    xi^(h, n) = (xi_1 h, (xi_2 + x xi_1) h, (xi_3 - y xi_1) h,
                 (xi_4 + x xi_3 + y rho^2 xi_2 - (x y + z rho) xi_1) h).

The cocycle c(xi, (h, n)) = psi(xi M(n) xi^t) is independent of h, and an orbit is
relevant when psi(x + y) c(xi, n) is trivial on the stabilizer.  Finite groups are
unimodular, so no modular factors enter.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy

from .cyclo import CycValue
from .errors import CostGuard, InvalidField

# ---------------------------------------------------------------------------
# the field
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitField:
    """F_q with a fixed primitive cube root of unity rho."""

    q: int
    rho: int = field(default=0)

    def __post_init__(self):
        q = self.q
        if not isinstance(q, int) or q <= 3 or not sympy.isprime(q) or q % 3 != 1:
            raise InvalidField(f"q = {q} must be a prime > 3 with q = 1 mod 3")
        roots = sorted(r for r in range(2, q) if (r * r + r + 1) % q == 0)
        if self.rho == 0:
            object.__setattr__(self, "rho", roots[0])
        elif self.rho % q not in roots:
            raise InvalidField(f"{self.rho} is not a primitive cube root of unity mod {q}")

    def inv(self, value: int) -> int:
        return pow(value % self.q, -1, self.q)

    @property
    def half(self) -> int:
        return self.inv(2)


def orbit_field(q: int = 7, rho: int = 0) -> OrbitField:
    return OrbitField(q, rho)


# ---------------------------------------------------------------------------
# group elements and vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HElement:
    """(h, n) with h in SL_2(F_q) and n = (x, y, z) in N(F_q)."""

    field: OrbitField
    h: tuple = ((1, 0), (0, 1))
    n: tuple = (0, 0, 0)

    def __post_init__(self):
        q = self.field.q
        h = tuple(tuple(int(v) % q for v in row) for row in self.h)
        n = tuple(int(v) % q for v in self.n)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "n", n)
        (a, b), (c, d) = h
        if (a * d - b * c) % q != 1:
            raise ValueError("h must have determinant 1")

    @classmethod
    def identity(cls, fld: OrbitField) -> "HElement":
        return cls(fld)

    def __mul__(self, other: "HElement") -> "HElement":
        q = self.field.q
        h = _mat2_mul(self.h, other.h, q)
        x1, y1, z1 = self.n
        x2, y2, z2 = other.n
        return HElement(self.field, h, (x1 + x2, y1 + y2, z1 + z2 + x1 * y2))

    def inverse(self) -> "HElement":
        (a, b), (c, d) = self.h
        x, y, z = self.n
        return HElement(self.field, ((d, -b), (-c, a)), (-x, -y, x * y - z))

    def to_json(self) -> dict:
        return {"h": [list(r) for r in self.h], "n": list(self.n)}


def _mat2_mul(g, h, q):
    (a, b), (c, d) = g
    (e, f), (s, t) = h
    return ((a * e + b * s) % q, (a * f + b * t) % q), ((c * e + d * s) % q, (c * f + d * t) % q)


@dataclass(frozen=True)
class OrbitVector:
    """xi = (xi_1, xi_2, xi_3, xi_4) with each xi_i in F_q^2, stored as 8 residues."""

    field: OrbitField
    coords: tuple

    def __post_init__(self):
        coords = tuple(int(v) % self.field.q for v in self.coords)
        if len(coords) != 8:
            raise ValueError("an orbit vector has 8 coordinates")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_blocks(cls, fld: OrbitField, blocks) -> "OrbitVector":
        return cls(fld, tuple(v for block in blocks for v in block))

    @classmethod
    def parse(cls, fld: OrbitField, text: str) -> "OrbitVector":
        """``"a,b;c,d;e,f;g,h"``: four blocks of two residues."""
        blocks = [part.split(",") for part in text.replace(" ", "").split(";")]
        if len(blocks) != 4 or any(len(b) != 2 for b in blocks):
            raise ValueError(f"expected four ';'-separated pairs, got {text!r}")
        return cls.from_blocks(fld, [[int(v) for v in b] for b in blocks])

    def block(self, i: int) -> tuple:
        """xi_i for i = 1..4."""
        return self.coords[2 * i - 2: 2 * i]

    @property
    def blocks(self) -> tuple:
        return tuple(self.block(i) for i in range(1, 5))

    def format(self) -> str:
        return ";".join(f"{a},{b}" for a, b in self.blocks)

    def to_json(self) -> list:
        return [list(b) for b in self.blocks]


E1 = (1, 0)
E2 = (0, 1)


def _scaled(c: int, v: tuple) -> tuple:
    return (c * v[0], c * v[1])


# ---------------------------------------------------------------------------
# matrices: Ad(n), its blocks, and the cocycle form
# ---------------------------------------------------------------------------


def ad_unipotent(x: int, y: int, z: int, fld: OrbitField) -> np.ndarray:
    """The 8x8 matrix Ad(n) for n = (x, y, z), entries reduced mod q."""
    r, r2 = fld.rho, fld.rho * fld.rho
    w = x * y - z
    rows = [
        [1, x, -y, -(x * y + r * z), -(x * y + r2 * z), x * w, -z * y, z * w],
        [0, 1, 0, r2 * y, r * y, w, -y * y, y * w],
        [0, 0, 1, x, x, -x * x, z, -z * x],
        [0, 0, 0, 1, 0, -x, -r * y, r * x * y + r2 * z],
        [0, 0, 0, 0, 1, -x, -r2 * y, r2 * x * y + r * z],
        [0, 0, 0, 0, 0, 1, 0, y],
        [0, 0, 0, 0, 0, 0, 1, -x],
        [0, 0, 0, 0, 0, 0, 0, 1],
    ]
    return np.array(rows, dtype=object) % fld.q


def u_block(x: int, y: int, z: int, fld: OrbitField) -> np.ndarray:
    r, r2 = fld.rho, fld.rho * fld.rho
    rows = [[1, x, -y, -y * x - z * r], [0, 1, 0, y * r2], [0, 0, 1, x], [0, 0, 0, 1]]
    return np.array(rows, dtype=object) % fld.q


def s_w4_block(x: int, y: int, z: int, fld: OrbitField) -> np.ndarray:
    """s(n) w_4, an alternating 4x4 matrix."""
    r, r2 = fld.rho, fld.rho * fld.rho
    rows = [
        [0, (z - y * x) * y * r2, z * x * r, -(y * x + z * r2)],
        [(y * x - z) * y * r2, 0, -(z + x * y * r2), y * r],
        [-z * x * r, z + x * y * r2, 0, x],
        [y * x + z * r2, -y * r, -x, 0],
    ]
    return np.array(rows, dtype=object) % fld.q


def antidiagonal(k: int) -> np.ndarray:
    return np.fliplr(np.eye(k, dtype=np.int64)).astype(object)


def cocycle_matrix(x: int, y: int, z: int, fld: OrbitField) -> np.ndarray:
    """The symmetric 8x8 matrix j(s) w_8 whose quadratic form gives the cocycle."""
    r, r2 = fld.rho, fld.rho * fld.rho
    a = (z - x * y) * y * r2
    b = x * z * r
    c = x * y + z * r2
    d = x * y * r2 + z
    rows = [
        [0, 0, 0, a, 0, b, 0, -c],
        [0, 0, -a, 0, -b, 0, c, 0],
        [0, -a, 0, 0, 0, -d, 0, y * r],
        [a, 0, 0, 0, d, 0, -y * r, 0],
        [0, -b, 0, d, 0, 0, 0, x],
        [b, 0, -d, 0, 0, 0, -x, 0],
        [0, c, 0, -y * r, 0, -x, 0, 0],
        [-c, 0, y * r, 0, x, 0, 0, 0],
    ]
    return np.array(rows, dtype=object) % fld.q


# ---------------------------------------------------------------------------
# the action, the cocycle and the invariants
# ---------------------------------------------------------------------------


def _apply_h(v: tuple, h: tuple, q: int) -> tuple:
    (a, b), (c, d) = h
    return ((v[0] * a + v[1] * c) % q, (v[0] * b + v[1] * d) % q)


def act(xi: OrbitVector, g: HElement) -> OrbitVector:
    fld = xi.field
    q, r2 = fld.q, fld.rho * fld.rho
    x, y, z = g.n
    x1, x2, x3, x4 = xi.blocks
    new = (
        x1,
        tuple(x2[i] + x * x1[i] for i in range(2)),
        tuple(x3[i] - y * x1[i] for i in range(2)),
        tuple(x4[i] + x * x3[i] + y * r2 * x2[i] - (y * x + z * fld.rho) * x1[i] for i in range(2)),
    )
    return OrbitVector.from_blocks(fld, [_apply_h(v, g.h, q) for v in new])


@dataclass(frozen=True)
class AdditiveCharacter:
    """psi_m(t) = zeta_q^(m t) on F_q; m must be nonzero."""

    q: int
    multiplier: int = 1

    def __post_init__(self):
        if self.multiplier % self.q == 0:
            raise ValueError("the character must be nontrivial")

    def exponent(self, t: int) -> int:
        return self.multiplier * t % self.q

    def __call__(self, t: int) -> CycValue:
        return CycValue.zeta_p_power(self.q, 1, self.exponent(t))


def cocycle_argument(xi: OrbitVector, n: tuple) -> int:
    """xi j(s) w_8 xi^t in F_q."""
    m = cocycle_matrix(*n, xi.field)
    v = np.array(xi.coords, dtype=object)
    return int(v @ m @ v) % xi.field.q


def cocycle_c(xi: OrbitVector, n: tuple, character: AdditiveCharacter | None = None) -> CycValue:
    """c(xi, [h, Ad(n)]) for any h; n is (x, y, z)."""
    character = character or AdditiveCharacter(xi.field.q)
    return character(cocycle_argument(xi, n))


def twisted_cocycle_argument(xi: OrbitVector, n: tuple) -> int:
    """Argument of c_psi(xi, (h, n)) = psi(x + y) c(xi, n)."""
    return (n[0] + n[1] + cocycle_argument(xi, n)) % xi.field.q


def _rank(vectors, q: int) -> int:
    rows = [list(v) for v in vectors if any(v)]
    return _rank_mod(rows, q) if rows else 0


def _rank_mod(rows, q: int) -> int:
    rows = [[v % q for v in row] for row in rows]
    rank = 0
    for col in range(2):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], -1, q)
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col] * inv
                rows[i] = [(a - f * b) % q for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def invariants(xi: OrbitVector) -> tuple:
    """(d_1, d_12, d_13, d_123, d_1234): dimensions of spans of the blocks."""
    q = xi.field.q
    b1, b2, b3, b4 = xi.blocks
    return (_rank([b1], q), _rank([b1, b2], q), _rank([b1, b3], q), _rank([b1, b2, b3], q),
            _rank([b1, b2, b3, b4], q))


# ---------------------------------------------------------------------------
# canonical representatives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Family:
    name: str
    shape: str
    condition: str


FAMILIES = {
    f.name: f for f in (
        Family("zero", "(0, 0, 0, 0)", "never"),
        Family("fourth-only", "(0, 0, 0, e2)", "never"),
        Family("third-line", "(0, 0, e2, 0)", "never"),
        Family("third-plane", "(0, 0, e2, beta e1)", "never"),
        Family("sl2-line", "(0, e2, alpha e2, 0)", "alpha = rho^2"),
        Family("sl2-plane", "(0, e2, alpha e2, beta e1)", "alpha = rho, beta = rho^2 / 2"),
        Family("second-plane", "(0, e2, beta e1, 0)", "never"),
        Family("first-only", "(e2, 0, 0, 0)", "always"),
        Family("first-fourth", "(e2, 0, 0, beta e1)", "never"),
        Family("first-second-line", "(e2, alpha e2, beta e1, 0)",
               "1 + 2 beta rho alpha^2 = 0"),
        Family("first-third-line", "(e2, beta e1, alpha e2, 0)", "2 rho^2 alpha^2 beta = 1"),
        Family("generic", "(e2, beta e1, beta' e1, 0)", "always"),
    )
}


@dataclass(frozen=True)
class OrbitClass:
    invariants: tuple
    representative: OrbitVector
    witness: HElement
    family: str
    parameters: dict
    relevant: bool

    def to_json(self) -> dict:
        return {
            "invariants": list(self.invariants),
            "family": self.family,
            "parameters": dict(sorted(self.parameters.items())),
            "representative": self.representative.to_json(),
            "witness": self.witness.to_json(),
            "relevant": self.relevant,
        }


def sl2_to_e2(v: tuple, fld: OrbitField) -> tuple:
    """Some h in SL_2(F_q) with v h = e_2 (v nonzero)."""
    q = fld.q
    a, b = v[0] % q, v[1] % q
    if b:
        # (a, b) [[b^-1, 0], [-a, b]] ... rows of h: we need a h11 + b h21 = 0, a h12 + b h22 = 1
        binv = fld.inv(b)
        return ((b, 0), (-a, binv))
    if not a:
        raise ValueError("the zero vector cannot be moved to e2")
    ainv = fld.inv(a)
    return ((0, ainv), (-a, 0))


def _n2(a: int) -> tuple:
    return ((1, a), (0, 1))


def _coords(v: tuple) -> tuple:
    """(e1-coordinate, e2-coordinate)."""
    return v[0], v[1]


def canonicalize(xi: OrbitVector) -> tuple:
    """(representative, witness, family) with act(xi, witness) == representative."""
    fld = xi.field
    q, rho = fld.q, fld.rho
    r2 = rho * rho % q
    inv = fld.inv
    b1, b2, b3, b4 = xi.blocks
    ident = HElement.identity(fld)

    def finish(h0, h1, n, family):
        g = HElement(fld, h0) * HElement(fld, h1, n)
        return act(xi, g), g, family

    if any(b1):
        h0 = sl2_to_e2(b1, fld)
        moved = act(xi, HElement(fld, h0))
        _, v2, v3, v4 = moved.blocks
        p2, q2 = _coords(v2)
        p3, q3 = _coords(v3)
        p4, q4 = _coords(v4)
        if p2 == 0 and p3 == 0:
            x, y = -q2, q3
            z = (q4 + x * q3 + y * r2 * q2 - x * y) * inv(rho)
            family = "first-only" if p4 == 0 else "first-fourth"
            return finish(h0, _n2(0), (x, y, z), family)
        if p2 == 0:
            x = -p4 * inv(p3)
            y = q3
            z = (q4 + x * q3 + y * r2 * q2 - x * y) * inv(rho)
            return finish(h0, _n2(0), (x, y, z), "first-second-line")
        if p3 == 0:
            x = -q2
            y = -p4 * inv(r2 * p2)
            z = (q4 + x * q3 + y * r2 * q2 - x * y) * inv(rho)
            return finish(h0, _n2(0), (x, y, z), "first-third-line")
        a = (q2 * p3 - r2 * q3 * p2 - p4) * inv(p2 * p3 * (r2 - 1))
        x = -q2 - a * p2
        y = q3 + a * p3
        z = (q4 + x * q3 + y * r2 * q2 - x * y) * inv(rho)
        return finish(h0, _n2(a), (x, y, z), "generic")

    if any(b2):
        h0 = sl2_to_e2(b2, fld)
        moved = act(xi, HElement(fld, h0))
        _, _, v3, v4 = moved.blocks
        p3, q3 = _coords(v3)
        p4, q4 = _coords(v4)
        if p3 == 0:
            y = -q4 * inv(r2)
            family = "sl2-line" if p4 == 0 else "sl2-plane"
            return finish(h0, _n2(0), (0, y, 0), family)
        a = -q3 * inv(p3)
        x = -p4 * inv(p3)
        y = -(q4 + x * q3) * inv(r2)
        return finish(h0, _n2(a), (x, y, 0), "second-plane")

    if any(b3):
        h0 = sl2_to_e2(b3, fld)
        moved = act(xi, HElement(fld, h0))
        p4, q4 = _coords(moved.block(4))
        family = "third-line" if p4 == 0 else "third-plane"
        return finish(h0, _n2(0), (-q4, 0, 0), family)

    if any(b4):
        return finish(sl2_to_e2(b4, fld), _n2(0), (0, 0, 0), "fourth-only")
    return xi, ident, "zero"


def family_parameters(rep: OrbitVector, family: str) -> dict:
    """The alpha / beta parameters read off a canonical representative."""
    b1, b2, b3, b4 = rep.blocks
    if family in ("third-plane", "first-fourth"):
        return {"beta": b4[0]}
    if family == "sl2-line":
        return {"alpha": b3[1]}
    if family == "sl2-plane":
        return {"alpha": b3[1], "beta": b4[0]}
    if family == "second-plane":
        return {"beta": b3[0]}
    if family == "first-second-line":
        return {"alpha": b2[1], "beta": b3[0]}
    if family == "first-third-line":
        return {"alpha": b3[1], "beta": b2[0]}
    if family == "generic":
        return {"beta": b2[0], "beta_prime": b3[0]}
    return {}


def family_is_relevant(fld: OrbitField, family: str, params: dict) -> bool:
    q, rho = fld.q, fld.rho
    r2 = rho * rho % q
    if family in ("first-only", "generic"):
        return True
    if family == "sl2-line":
        return params["alpha"] == r2
    if family == "sl2-plane":
        return params["alpha"] == rho and params["beta"] == r2 * fld.half % q
    if family == "first-second-line":
        return (1 + 2 * params["beta"] * rho * params["alpha"] ** 2) % q == 0
    if family == "first-third-line":
        return (2 * r2 * params["alpha"] ** 2 * params["beta"]) % q == 1
    return False


def classify(xi: OrbitVector) -> OrbitClass:
    rep, witness, family = canonicalize(xi)
    params = family_parameters(rep, family)
    return OrbitClass(invariants(xi), rep, witness, family, params,
                      family_is_relevant(xi.field, family, params))


def is_relevant(xi: OrbitVector) -> bool:
    return classify(xi).relevant


# ---------------------------------------------------------------------------
# exhaustive oracle
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def sl2_elements(q: int) -> np.ndarray:
    """All of SL_2(F_q) as an array of shape (q^3 - q, 2, 2)."""
    out = []
    for a, b, c in itertools.product(range(q), repeat=3):
        if a:
            d = (1 + b * c) * pow(a, -1, q) % q
            out.append(((a, b), (c, d)))
        elif b:
            # a = 0 forces -b c = 1
            if (-b * c) % q == 1:
                for d in range(q):
                    out.append(((a, b), (c, d)))
    return np.array(out, dtype=np.int64)


@lru_cache(maxsize=None)
def n_elements(q: int) -> np.ndarray:
    return np.array(list(itertools.product(range(q), repeat=3)), dtype=np.int64)


def group_order(q: int) -> int:
    return (q**3 - q) * q**3


def _orbit_images(xi: OrbitVector) -> tuple[np.ndarray, np.ndarray]:
    """Images of xi under all (h, n): array (|N|, |SL2|, 8) plus the n list."""
    fld = xi.field
    q, rho = fld.q, fld.rho
    r2 = rho * rho % q
    ns = n_elements(q)
    x, y, z = ns[:, 0:1], ns[:, 1:2], ns[:, 2:3]
    b1, b2, b3, b4 = (np.array(b, dtype=np.int64) for b in xi.blocks)
    m1 = np.broadcast_to(b1, (len(ns), 2))
    m2 = (b2 + x * b1) % q
    m3 = (b3 - y * b1) % q
    m4 = (b4 + x * b3 + y * r2 * b2 - ((y * x + z * rho) % q) * b1) % q
    moved = np.stack([m1, m2, m3, m4], axis=1)  # (|N|, 4, 2)
    hs = sl2_elements(q)
    images = np.einsum("nkj,hji->nhki", moved, hs) % q
    return images.reshape(len(ns), len(hs), 8), ns


def stabilizer(xi: OrbitVector, budget: int = 5_000_000) -> list[HElement]:
    fld = xi.field
    if group_order(fld.q) > budget:
        raise CostGuard(f"|H(F_{fld.q})| = {group_order(fld.q)} exceeds the enumeration budget {budget}")
    images, ns = _orbit_images(xi)
    target = np.array(xi.coords, dtype=np.int64)
    hit = np.all(images == target, axis=2)
    hs = sl2_elements(fld.q)
    return [HElement(fld, tuple(map(tuple, hs[j])), tuple(ns[i])) for i, j in zip(*np.nonzero(hit))]


def relevance_oracle(xi: OrbitVector, character: AdditiveCharacter | None = None, *,
                     budget: int = 5_000_000) -> bool:
    """True when psi(x + y) c(xi, n) is 1 on the whole stabilizer, found by enumeration of H(F_q)."""
    character = character or AdditiveCharacter(xi.field.q)
    seen = set()
    for g in stabilizer(xi, budget):
        if g.n in seen:
            continue
        seen.add(g.n)
        if character.exponent(twisted_cocycle_argument(xi, g.n)) != 0:
            return False
    return True


def find_witness(xi: OrbitVector, eta: OrbitVector, budget: int = 5_000_000) -> HElement | None:
    """Some g with act(xi, g) == eta, or None; exhaustive."""
    fld = xi.field
    if group_order(fld.q) > budget:
        raise CostGuard(f"|H(F_{fld.q})| = {group_order(fld.q)} exceeds the enumeration budget {budget}")
    images, ns = _orbit_images(xi)
    hit = np.all(images == np.array(eta.coords, dtype=np.int64), axis=2)
    idx = np.argwhere(hit)
    if not len(idx):
        return None
    i, j = idx[0]
    return HElement(fld, tuple(map(tuple, sl2_elements(fld.q)[j])), tuple(ns[i]))


# ---------------------------------------------------------------------------
# sampling and census
# ---------------------------------------------------------------------------


def random_sl2(fld: OrbitField, rng: random.Random) -> tuple:
    hs = sl2_elements(fld.q)
    return tuple(map(tuple, hs[rng.randrange(len(hs))]))


def random_h_element(fld: OrbitField, rng: random.Random) -> HElement:
    return HElement(fld, random_sl2(fld, rng), tuple(rng.randrange(fld.q) for _ in range(3)))


def random_family_vector(fld: OrbitField, rng: random.Random) -> OrbitVector:
    """A random vector from a random family; uniform vectors are almost always generic."""
    q = fld.q
    name = rng.choice(sorted(FAMILIES))
    nz = lambda: rng.randrange(1, q)  # noqa: E731
    any_ = lambda: rng.randrange(q)  # noqa: E731
    zero = (0, 0)
    blocks = {
        "zero": (zero, zero, zero, zero),
        "fourth-only": (zero, zero, zero, E2),
        "third-line": (zero, zero, E2, zero),
        "third-plane": (zero, zero, E2, _scaled(nz(), E1)),
        "sl2-line": (zero, E2, _scaled(any_(), E2), zero),
        "sl2-plane": (zero, E2, _scaled(any_(), E2), _scaled(nz(), E1)),
        "second-plane": (zero, E2, _scaled(nz(), E1), zero),
        "first-only": (E2, zero, zero, zero),
        "first-fourth": (E2, zero, zero, _scaled(nz(), E1)),
        "first-second-line": (E2, _scaled(any_(), E2), _scaled(nz(), E1), zero),
        "first-third-line": (E2, _scaled(nz(), E1), _scaled(any_(), E2), zero),
        "generic": (E2, _scaled(nz(), E1), _scaled(nz(), E1), zero),
    }[name]
    base = OrbitVector.from_blocks(fld, blocks)
    return act(base, random_h_element(fld, rng))


def relevant_vector(fld: OrbitField, family: str, rng: random.Random) -> OrbitVector:
    """A representative satisfying the family's relevance condition (for families that have one)."""
    q, rho = fld.q, fld.rho
    r2 = rho * rho % q
    inv = fld.inv
    if family == "sl2-line":
        blocks = ((0, 0), E2, _scaled(r2, E2), (0, 0))
    elif family == "sl2-plane":
        blocks = ((0, 0), E2, _scaled(rho, E2), _scaled(r2 * fld.half, E1))
    elif family == "first-second-line":
        alpha = rng.randrange(1, q)
        beta = -fld.half * r2 * inv(alpha * alpha)
        blocks = (E2, _scaled(alpha, E2), _scaled(beta, E1), (0, 0))
    elif family == "first-third-line":
        alpha = rng.randrange(1, q)
        beta = fld.half * rho * inv(alpha * alpha)
        blocks = (E2, _scaled(beta, E1), _scaled(alpha, E2), (0, 0))
    else:
        raise ValueError(f"family {family!r} has no parametric relevance condition")
    return act(OrbitVector.from_blocks(fld, blocks), random_h_element(fld, rng))


def orbit_census(fld: OrbitField, samples: int = 1000, seed: int = 0) -> dict:
    """Classify random vectors and check invariance of the classification along random H-moves."""
    rng = random.Random(seed)
    counts = {name: {"total": 0, "relevant": 0} for name in sorted(FAMILIES)}
    failures = []
    for index in range(samples):
        xi = random_family_vector(fld, rng)
        g = random_h_element(fld, rng)
        moved = act(xi, g)
        cls, cls_moved = classify(xi), classify(moved)
        checks = {
            "invariants": invariants(xi) == invariants(moved) == cls.invariants,
            "canonical": cls.representative == cls_moved.representative and cls.family == cls_moved.family,
            "witness": act(xi, cls.witness) == cls.representative,
            "fixed_point": canonicalize(cls.representative)[0] == cls.representative,
            "representative_invariants": invariants(cls.representative) == cls.invariants,
        }
        if not all(checks.values()):
            failures.append({"index": index, "xi": xi.format(), "g": g.to_json(),
                             "failed": sorted(k for k, ok in checks.items() if not ok)})
        counts[cls.family]["total"] += 1
        counts[cls.family]["relevant"] += cls.relevant
    return {"q": fld.q, "rho": fld.rho, "samples": samples, "seed": seed,
            "families": counts, "failures": failures}


# ---------------------------------------------------------------------------
# relevant orbits of the Kuznetsov side (static data)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KuznetsovRepresentative:
    label: str
    parameters: str
    stabilizer: str

    def matrix(self, a, b=None, *, q: int):
        """The displayed 3x3 representative over F_q (entries mod q)."""
        inv = lambda v: pow(v % q, -1, q)  # noqa: E731
        if self.label == "central":
            m = [[a, 0, 0], [0, a, 0], [0, 0, a]]
        elif self.label == "w1w2":
            m = [[0, 0, inv(a * a)], [a, 0, 0], [0, a, 0]]
        elif self.label == "w2w1":
            m = [[0, a, 0], [0, 0, a], [inv(a * a), 0, 0]]
        else:
            m = [[0, 0, inv(b)], [0, -inv(a) * b, 0], [a, 0, 0]]
        return [[v % q for v in row] for row in m]

    def bruhat_product(self, a, b=None, *, q: int):
        """t(.,.) times the Weyl word, computed from the factors."""
        inv = lambda v: pow(v % q, -1, q)  # noqa: E731
        w1 = sympy.Matrix([[0, -1, 0], [1, 0, 0], [0, 0, 1]])
        w2 = sympy.Matrix([[1, 0, 0], [0, 0, -1], [0, 1, 0]])

        def t(u, v):
            return sympy.diag(u, inv(u) * v, inv(v))

        if self.label == "central":
            m = t(a, a * a)
        elif self.label == "w1w2":
            m = t(inv(a * a), inv(a)) * w1 * w2
        elif self.label == "w2w1":
            m = t(-a, a * a) * w2 * w1
        else:
            m = t(inv(b), inv(a)) * w1 * w2 * w1
        return [[int(m[i, j]) % q for j in range(3)] for i in range(3)]


KUZNETSOV_REPRESENTATIVES = (
    KuznetsovRepresentative("central", "a in mu_3", "N x N diagonal: {(n, a^-1 n a)}"),
    KuznetsovRepresentative("w1w2", "a in F^*", "N x U_{2,1} quotient (integral over N x U_{2,1})"),
    KuznetsovRepresentative("w2w1", "a in F^*", "U_{2,1} x N quotient (integral over U_{2,1} x N)"),
    KuznetsovRepresentative("long", "a, b in F^*", "trivial (integral over N x N)"),
)
