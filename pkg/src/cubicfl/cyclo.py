"""Exact values in Q(zeta_N), N = 3 p^L, and the additive character psi.

A :class:`CycValue` is stored in the canonical basis
``zeta_3^k * zeta_{p^L}^e`` with ``k in {0, 1}`` and ``0 <= e < phi(p^L)``, at the
smallest level L that holds it.  Equality is equality of canonical coefficients.
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import ConductorOverflow, PrecisionLoss

_DENSE_LIMIT = 3_000_000


def _canonicalize(p: int, level: int, terms: dict) -> dict:
    """Reduce {(k, e): coeff} (k mod 3, e mod p^level) to canonical form at ``level``."""
    mod = p**level
    out: dict = defaultdict(Fraction)
    for (k, e), c in terms.items():
        if not c:
            continue
        k %= 3
        e %= mod
        if k == 2:
            out[(0, e)] -= c
            out[(1, e)] -= c
        else:
            out[(k, e)] += c
    if level > 0:
        step = p ** (level - 1)
        phi = (p - 1) * step
        for (k, e) in [key for key in out if key[1] >= phi]:
            c = out.pop((k, e))
            r = e - phi
            for i in range(p - 1):
                out[(k, r + i * step)] -= c
    return {key: c for key, c in out.items() if c}


def _demote(p: int, level: int, terms: dict) -> tuple[int, dict]:
    while level > 0 and all(e % p == 0 for _, e in terms):
        terms = {(k, e // p): c for (k, e), c in terms.items()}
        level -= 1
    return level, terms


class CycValue:
    """An element of Q(zeta_3, zeta_{p^level}); immutable."""

    __slots__ = ("p", "level", "terms", "_hash")

    def __init__(self, p: int, level: int, terms: dict, *, canonical: bool = False):
        if not canonical:
            terms = _canonicalize(p, level, terms)
        level, terms = _demote(p, level, terms)
        self.p = p
        self.level = level
        self.terms = terms
        self._hash = None

    # -- constructors ------------------------------------------------------------
    @classmethod
    def zero(cls, p: int) -> "CycValue":
        return cls(p, 0, {}, canonical=True)

    @classmethod
    def rational(cls, p: int, value) -> "CycValue":
        value = Fraction(value)
        return cls(p, 0, {(0, 0): value} if value else {}, canonical=True)

    @classmethod
    def zeta_p_power(cls, p: int, level: int, exponent: int) -> "CycValue":
        """zeta_{p^level}^exponent."""
        return cls(p, level, {(0, exponent): Fraction(1)})

    @classmethod
    def zeta3(cls, p: int, k: int = 1) -> "CycValue":
        return cls(p, 0, {(k, 0): Fraction(1)})

    # -- basic properties --------------------------------------------------------
    @property
    def N(self) -> int:
        return 3 * self.p**self.level

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return self.level == 0 and all(k == 0 for k, _ in self.terms)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.terms.get((0, 0), Fraction(0))

    def _p_with(self, other: "CycValue") -> int:
        if self.level and other.level and self.p != other.p:
            raise ValueError("cyclotomic values for different primes")
        return self.p if self.level else other.p

    def promoted_terms(self, level: int) -> dict:
        if level < self.level:
            raise ValueError("cannot demote below the stored level")
        factor = self.p ** (level - self.level)
        return {(k, e * factor): c for (k, e), c in self.terms.items()}

    # -- arithmetic ------------------------------------------------------------------
    def _lift(self, other) -> "CycValue":
        if isinstance(other, CycValue):
            return other
        if isinstance(other, Mu3):
            return other.embed(self.p)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return CycValue.rational(self.p, other)
        raise TypeError(f"cannot combine CycValue with {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        p = self._p_with(other)
        level = max(self.level, other.level)
        total = dict(self.promoted_terms(level))
        for key, c in other.promoted_terms(level).items():
            total[key] = total.get(key, Fraction(0)) + c
        return CycValue(p, level, {k: c for k, c in total.items() if c}, canonical=True)

    __radd__ = __add__

    def __neg__(self):
        return CycValue(self.p, self.level, {k: -c for k, c in self.terms.items()}, canonical=True)

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        p = self._p_with(other)
        level = max(self.level, other.level)
        left = self.promoted_terms(level)
        right = other.promoted_terms(level)
        product: dict = defaultdict(Fraction)
        mod = p**level
        for (k1, e1), c1 in left.items():
            for (k2, e2), c2 in right.items():
                product[((k1 + k2) % 3, (e1 + e2) % mod)] += c1 * c2
        return CycValue(p, level, dict(product))

    __rmul__ = __mul__

    def scale(self, factor) -> "CycValue":
        factor = Fraction(factor)
        if not factor:
            return CycValue.zero(self.p)
        return CycValue(self.p, self.level, {k: c * factor for k, c in self.terms.items()}, canonical=True)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def conj(self) -> "CycValue":
        return CycValue(self.p, self.level, {(-k, -e): c for (k, e), c in self.terms.items()})

    # -- comparison --------------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = CycValue.rational(self.p, other)
        elif isinstance(other, Mu3):
            other = other.embed(self.p)
        if not isinstance(other, CycValue):
            return NotImplemented
        if self.level != other.level or self.terms != other.terms:
            return False
        return self.level == 0 or self.p == other.p

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.level, frozenset(self.terms.items())))
        return self._hash

    # -- display and serialization --------------------------------------------------------
    def __complex__(self) -> complex:
        return complex_embed(self)

    def __repr__(self):
        if self.is_rational():
            return f"CycValue({self.as_fraction()})"
        parts = []
        for (k, e), c in sorted(self.terms.items()):
            base = []
            if k:
                base.append("z3")
            if e:
                base.append(f"z{self.p}^{self.level}^{e}" if self.level > 1 else f"z{self.p}^{e}")
            parts.append(f"{c}*{'*'.join(base) or '1'}")
        return "CycValue(" + " + ".join(parts) + ")"

    def to_json(self, level: int | None = None) -> dict:
        """{"N": N, "terms": [[n, "num/den"], ...]} meaning sum of coeff * zeta_N^n."""
        level = self.level if level is None else max(level, self.level)
        pl = self.p**level
        pairs = []
        for (k, e), c in sorted(self.promoted_terms(level).items()):
            n = (k * pl + 3 * e) % (3 * pl)
            pairs.append([n, str(c)])
        pairs.sort()
        return {"N": 3 * pl, "terms": pairs}

    @classmethod
    def from_json(cls, p: int, data: dict) -> "CycValue":
        n_total = int(data["N"])
        pl = n_total // 3
        level = round(math.log(pl, p)) if pl > 1 else 0
        if 3 * p**level != n_total:
            raise ValueError(f"N = {n_total} is not 3 * {p}^L")
        terms: dict = defaultdict(Fraction)
        for n, coeff in data["terms"]:
            n = int(n)
            k = n % 3
            e = ((n - k * pl) // 3) % pl
            terms[(k, e)] += Fraction(coeff)
        return cls(p, level, dict(terms))


def complex_embed(value: CycValue) -> complex:
    """Image under zeta_N -> exp(2 pi i / N)."""
    total = 0j
    pl = value.p**value.level
    for (k, e), c in value.terms.items():
        angle = 2 * math.pi * (k / 3 + e / pl)
        total += float(c) * cmath.exp(1j * angle)
    return total


@dataclass(frozen=True)
class Mu3:
    """rho_C^k for the fixed embedding rho -> zeta_3."""

    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "k", self.k % 3)

    def __mul__(self, other):
        if isinstance(other, Mu3):
            return Mu3(self.k + other.k)
        if isinstance(other, CycValue):
            return self.embed(other.p) * other
        return NotImplemented

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int):
        return Mu3(self.k * n)

    def inverse(self) -> "Mu3":
        return Mu3(-self.k)

    conj = inverse

    def embed(self, p: int) -> CycValue:
        return CycValue.zeta3(p, self.k)


def psi(x) -> CycValue:
    """The additive character with conductor O: psi(t / p^m) = zeta_{p^m}^t."""
    fld = x.field
    if x.val is None or x.val >= 0:
        return CycValue.rational(fld.p, 1)
    m = -x.val
    if m > fld.M:
        raise ConductorOverflow(f"conductor exponent {m} exceeds M = {fld.M}")
    if x.prec < m:
        raise PrecisionLoss(f"psi needs {m} digits, have {x.prec}")
    return CycValue.zeta_p_power(fld.p, m, x.unit % fld.p**m)


def sum_values(values: Iterable[CycValue], p: int) -> CycValue:
    total = CycValue.zero(p)
    for v in values:
        total = total + v
    return total


# ---------------------------------------------------------------------------
# batched accumulation
# ---------------------------------------------------------------------------


@dataclass
class PhaseBatch:
    """weight * rho_C^mu3 * zeta_{p^level}^exps, summed over the unmasked entries."""

    level: int
    exps: object
    mu3: object = 0
    weight: object = 1
    mask: object = None

    @classmethod
    def from_psi(cls, psi_argument, mu3=0, weight=1, mask=None) -> "PhaseBatch":
        if mask is not None:
            psi_argument = psi_argument.select(mask)
            mu3 = mu3 if np.ndim(mu3) == 0 else np.asarray(mu3)[mask]
            weight = weight if np.ndim(weight) == 0 else np.asarray(weight)[mask]
        level, exps = psi_argument.psi_exponents()
        return cls(level, exps, mu3, weight)

    @classmethod
    def constant(cls, count, mu3=0, weight=1) -> "PhaseBatch":
        return cls(0, np.zeros(count, dtype=np.int64), mu3, weight)


def _dense_reduce(p: int, level: int, counts: np.ndarray) -> dict:
    """Canonical integer coefficients of sum counts[k, e] zeta_3^k zeta_{p^level}^e."""
    c = counts.astype(object) if np.abs(counts).max(initial=0) > 2**60 else counts.copy()
    c[0] -= c[2]
    c[1] -= c[2]
    c[2] = 0
    if level > 0:
        step = p ** (level - 1)
        for k in (0, 1):
            view = c[k].reshape(p, step)
            view[: p - 1] -= view[p - 1]
            view[p - 1] = 0
    ks, es = np.nonzero(c[:2])
    return {(int(k), int(e)): int(c[k, e]) for k, e in zip(ks, es)}


class PhaseAccumulator:
    """Sums PhaseBatch objects exactly, grouped by level and measure weight."""

    def __init__(self, p: int):
        self.p = p
        self._dense: dict = {}
        self._sparse: dict = defaultdict(lambda: defaultdict(int))

    def add(self, batch: PhaseBatch, scale: Fraction, points: int | None = None) -> None:
        """Accumulate ``scale`` times the batch sum; ``points`` is the size of the coset chunk,
        used when every field of the batch is a broadcast constant."""
        p = self.p
        level = batch.level
        pl = p**level
        exps = np.asarray(batch.exps, dtype=np.int64)
        mu3 = np.asarray(batch.mu3, dtype=np.int64) % 3
        shape = np.broadcast_shapes(exps.shape, mu3.shape, np.shape(batch.weight))
        if shape == () and points is not None:
            shape = (points,)
        if 0 in shape:
            return
        exps = np.broadcast_to(exps, shape)
        mu3 = np.broadcast_to(mu3, shape)
        keys = (mu3 * pl + exps).ravel()
        weight = batch.weight
        if np.ndim(weight) == 0:
            uniq, counts = np.unique(keys, return_counts=True)
            counts = counts.astype(np.int64) * int(weight)
        else:
            weight = np.broadcast_to(np.asarray(weight, dtype=np.int64), shape).ravel()
            uniq, inverse = np.unique(keys, return_inverse=True)
            counts = np.zeros(uniq.size, dtype=np.int64)
            np.add.at(counts, inverse, weight)
        scale = Fraction(scale)
        if 3 * pl <= _DENSE_LIMIT:
            slot = (level, scale)
            if slot not in self._dense:
                self._dense[slot] = np.zeros(3 * pl, dtype=np.int64)
            np.add.at(self._dense[slot], uniq, counts)
        else:
            bucket = self._sparse[(level, scale)]
            for key, cnt in zip(uniq.tolist(), counts.tolist()):
                bucket[key] += cnt

    def value(self) -> CycValue:
        p = self.p
        total = CycValue.zero(p)
        for (level, scale), arr in self._dense.items():
            terms = _dense_reduce(p, level, arr.reshape(3, p**level))
            if terms:
                coeffs = {key: Fraction(v) * scale for key, v in terms.items()}
                total = total + CycValue(p, level, coeffs, canonical=True)
        for (level, scale), bucket in self._sparse.items():
            pl = p**level
            coeffs = {(key // pl, key % pl): Fraction(v) * scale for key, v in bucket.items() if v}
            total = total + CycValue(p, level, coeffs)
        return total
