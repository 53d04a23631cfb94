"""Truncated arithmetic in Q_p and the coset-summation engine behind every brute-force sum.

Scalars are :class:`PAdicNumber` (valuation plus a unit known modulo a power of p).
Batches of points are :class:`PadicArray` values: fixed-point numbers ``p**shift * arr``
with ``arr`` a numpy int64 array known modulo ``p**digits``.  Batches are what the
brute-force integrals feed through :func:`integrate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np
import sympy

from .errors import (
    CostGuard,
    DivisionByZero,
    InvalidField,
    NoSquareRoot,
    PrecisionLoss,
    StabilityFailure,
    TailNotJustified,
)

# int64 products of two residues must not overflow
_ARRAY_MODULUS_CAP = 3_037_000_499


# ---------------------------------------------------------------------------
# field parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldParams:
    """Q_p with p = 1 (mod 3), a working precision and a chosen cube root of unity.

    ``P`` is the number of p-adic digits carried by freshly created numbers and
    ``M`` bounds the conductor exponent psi may be evaluated at (N = 3 p^M).
    """

    p: int
    P: int
    M: int
    rho_choice: str = "smaller"
    min_digits: int = 2
    rho_unit: int = field(init=False, repr=False, compare=False)
    array_digits: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _validate_prime(self.p)
        if self.P < 2:
            raise InvalidField("precision must be at least 2")
        if self.M < 0 or self.P < self.M + 1:
            raise InvalidField("need P >= M + 1 so psi can be evaluated at every allowed conductor")
        if self.rho_choice not in ("smaller", "larger"):
            raise InvalidField("rho_choice must be 'smaller' or 'larger'")
        roots = sorted(r for r in range(1, self.p) if (r * r + r + 1) % self.p == 0)
        start = roots[0] if self.rho_choice == "smaller" else roots[1]
        object.__setattr__(self, "rho_unit", _hensel_lift_rho(start, self.p, self.P))
        digits = 1
        while self.p ** (digits + 1) <= _ARRAY_MODULUS_CAP:
            digits += 1
        object.__setattr__(self, "array_digits", digits)

    @property
    def q(self) -> int:
        return self.p

    @property
    def N(self) -> int:
        return 3 * self.p**self.M

    @property
    def rho_residue(self) -> int:
        return self.rho_unit % self.p

    @property
    def rho(self) -> "PAdicNumber":
        return PAdicNumber(self, 0, self.rho_unit, self.P)

    @property
    def zero(self) -> "PAdicNumber":
        return PAdicNumber(self, None, 0, 0)

    @property
    def one(self) -> "PAdicNumber":
        return PAdicNumber(self, 0, 1, self.P)

    @property
    def uniformizer(self) -> "PAdicNumber":
        return PAdicNumber(self, 1, 1, self.P)

    def num(self, value) -> "PAdicNumber":
        """Coerce an int, Fraction or PAdicNumber into this field."""
        if isinstance(value, PAdicNumber):
            if value.field != self:
                raise ValueError("mixing numbers from different fields")
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not field elements")
        if isinstance(value, int):
            return _from_int(self, value, self.P)
        if isinstance(value, Fraction):
            return _from_int(self, value.numerator, self.P) / _from_int(self, value.denominator, self.P)
        raise TypeError(f"cannot coerce {type(value).__name__} into Q_{self.p}")

    def element(self, unit: int = 1, rho_power: int = 0, p_power: int = 0) -> "PAdicNumber":
        """The number ``unit * rho**rho_power * p**p_power``."""
        x = self.num(unit) * self.rho ** (rho_power % 3)
        return x * self.uniformizer**p_power

    def parse(self, text: str) -> "PAdicNumber":
        return parse_element(self, text)


def _validate_prime(p: int) -> None:
    if not isinstance(p, int) or isinstance(p, bool):
        raise InvalidField("p must be an integer")
    if p <= 3:
        raise InvalidField(f"p = {p} must exceed 3")
    if not sympy.isprime(p):
        raise InvalidField(f"p = {p} is not prime")
    if p % 3 != 1:
        raise InvalidField(f"p = {p} is not 1 mod 3, so Q_p has no primitive cube root of unity")


def _hensel_lift_rho(start: int, p: int, digits: int) -> int:
    root, known = start, 1
    while known < digits:
        known = min(2 * known, digits)
        mod = p**known
        f = (root * root + root + 1) % mod
        root = (root - f * pow(2 * root + 1, -1, mod)) % mod
    return root % p**digits


def make_field(p: int, precision: int = 24, rho_choice: str = "smaller",
               max_conductor: int | None = None, min_digits: int = 2) -> FieldParams:
    """Build the field parameters; ``max_conductor`` defaults to ``precision - 1``."""
    if max_conductor is None:
        max_conductor = precision - 1
    return FieldParams(p=p, P=precision, M=max_conductor, rho_choice=rho_choice, min_digits=min_digits)


def default_precision(valuations: Iterable[int]) -> int:
    """Working precision 2(V+4) for inputs of absolute valuation at most V, floored at 16."""
    span = max((abs(v) for v in valuations), default=0)
    return max(16, 2 * (span + 4))


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------


def _from_int(fld: FieldParams, n: int, prec: int) -> "PAdicNumber":
    if n == 0:
        return fld.zero
    v = 0
    while n % fld.p == 0:
        n //= fld.p
        v += 1
    return PAdicNumber(fld, v, n, prec)


class PAdicNumber:
    """A nonzero p^val * unit with the unit known modulo p^prec, or the exact zero (val is None)."""

    __slots__ = ("field", "val", "unit", "prec")

    def __init__(self, fld: FieldParams, val: int | None, unit: int, prec: int):
        self.field = fld
        if val is None:
            self.val, self.unit, self.prec = None, 0, 0
            return
        if prec < 1:
            raise PrecisionLoss("no significant digits left")
        if unit % fld.p == 0:
            raise ValueError("unit part must be prime to p")
        self.val = val
        self.prec = prec
        self.unit = unit % fld.p**prec

    # -- predicates and accessors -------------------------------------------------
    def is_zero(self) -> bool:
        return self.val is None

    def __bool__(self) -> bool:
        return self.val is not None

    @property
    def valuation(self) -> float | int:
        return math.inf if self.val is None else self.val

    def __abs__(self) -> Fraction:
        if self.val is None:
            return Fraction(0)
        return Fraction(1, self.field.p**self.val) if self.val >= 0 else Fraction(self.field.p ** (-self.val))

    def is_integral(self) -> bool:
        return self.val is None or self.val >= 0

    def is_unit(self) -> bool:
        return self.val == 0

    def in_ideal(self, k: int) -> bool:
        """Membership in p^k O."""
        return self.val is None or self.val >= k

    @property
    def residue(self) -> int:
        """Unit part modulo p."""
        if self.val is None:
            raise ValueError("zero has no unit part")
        return self.unit % self.field.p

    def unit_part(self) -> "PAdicNumber":
        if self.val is None:
            raise ValueError("zero has no unit part")
        return PAdicNumber(self.field, 0, self.unit, self.prec)

    def digits_mod(self, k: int) -> int:
        """Integer r in [0, p^k) with self = r mod p^k O; requires self integral."""
        if self.val is None or self.val >= k:
            return 0
        if self.val < 0:
            raise ValueError("digits_mod needs an integral number")
        if self.prec < k - self.val:
            raise PrecisionLoss(f"need {k - self.val} digits, have {self.prec}")
        p = self.field.p
        return (self.unit * p**self.val) % p**k

    def fractional_part(self) -> tuple[int, int]:
        """(m, t) with self = t / p^m mod O and 0 <= t < p^m."""
        if self.val is None or self.val >= 0:
            return 0, 0
        m = -self.val
        if self.prec < m:
            raise PrecisionLoss(f"fractional part needs {m} digits, have {self.prec}")
        return m, self.unit % self.field.p**m

    def is_square(self) -> bool:
        if self.val is None:
            return True
        p = self.field.p
        return self.val % 2 == 0 and pow(self.residue, (p - 1) // 2, p) == 1

    # -- arithmetic -------------------------------------------------------------------
    def _coerce(self, other) -> "PAdicNumber":
        if isinstance(other, PAdicNumber):
            if other.field != self.field:
                raise ValueError("mixing numbers from different fields")
            return other
        return self.field.num(other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if other.val is None:
            return self
        if self.val is None:
            return other
        x, y = (self, other) if self.val <= other.val else (other, self)
        p = self.field.p
        shift = y.val - x.val
        top = min(x.prec, y.prec + shift)
        mod = p**top
        total = x.unit % mod
        if shift < top:
            total = (total + y.unit * p**shift) % mod
        if total == 0:
            return self.field.zero
        lost = 0
        while total % p == 0:
            total //= p
            lost += 1
        if lost and top - lost < self.field.min_digits:
            raise PrecisionLoss(f"cancellation left {top - lost} significant digits")
        return PAdicNumber(self.field, x.val + lost, total, top - lost)

    __radd__ = __add__

    def __neg__(self):
        if self.val is None:
            return self
        return PAdicNumber(self.field, self.val, -self.unit, self.prec)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.val is None or other.val is None:
            return self.field.zero
        prec = min(self.prec, other.prec)
        return PAdicNumber(self.field, self.val + other.val, self.unit * other.unit, prec)

    __rmul__ = __mul__

    def inverse(self) -> "PAdicNumber":
        if self.val is None:
            raise DivisionByZero("inverse of zero")
        return PAdicNumber(self.field, -self.val, pow(self.unit, -1, self.field.p**self.prec), self.prec)

    def __truediv__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n == 0:
            return self.field.one
        if self.val is None:
            if n < 0:
                raise DivisionByZero("negative power of zero")
            return self
        base = self if n > 0 else self.inverse()
        mod = self.field.p**base.prec
        return PAdicNumber(self.field, base.val * abs(n), pow(base.unit, abs(n), mod), base.prec)

    # -- comparison ---------------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, PAdicNumber):
            try:
                other = self._coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        if other.field != self.field:
            return False
        if self.val is None or other.val is None:
            return self.val is None and other.val is None
        if self.val != other.val:
            return False
        prec = min(self.prec, other.prec)
        return (self.unit - other.unit) % self.field.p**prec == 0

    def __hash__(self):
        if self.val is None:
            return hash(("padic-zero", self.field.p))
        return hash((self.field.p, self.val, self.residue))

    def __repr__(self):
        if self.val is None:
            return "PAdicNumber(0)"
        return f"PAdicNumber(p^{self.val}*{self.unit % self.field.p**min(self.prec, 4)}... mod p^{self.prec})"

    def to_json(self) -> dict:
        if self.val is None:
            return {"zero": True}
        return {"val": self.val, "unit": str(self.unit), "prec": self.prec}

    @classmethod
    def from_json(cls, fld: FieldParams, data: dict) -> "PAdicNumber":
        if data.get("zero"):
            return fld.zero
        return cls(fld, int(data["val"]), int(data["unit"]), int(data["prec"]))


def hensel_sqrt(x: PAdicNumber) -> PAdicNumber:
    """A square root of x; raises NoSquareRoot for odd valuation or non-residue unit."""
    if x.val is None:
        raise ValueError("hensel_sqrt needs a nonzero argument")
    fld = x.field
    p = fld.p
    if x.val % 2:
        raise NoSquareRoot("odd valuation")
    r = x.residue
    if pow(r, (p - 1) // 2, p) != 1:
        raise NoSquareRoot("unit part is not a square mod p")
    root = min(sympy.ntheory.residue_ntheory.sqrt_mod(r, p, all_roots=True))
    known = 1
    while known < x.prec:
        known = min(2 * known, x.prec)
        mod = p**known
        root = (root - (root * root - x.unit) * pow(2 * root, -1, mod)) % mod
    return PAdicNumber(fld, x.val // 2, root, x.prec)


def parse_element(fld: FieldParams, text: str) -> PAdicNumber:
    """Parse expressions such as ``3*rho^2*p^-1`` or ``(1+2*rho)*p^2`` (``^`` or ``**``)."""
    rho_sym, p_sym = sympy.symbols("rho p")
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals={"rho": rho_sym, "p": p_sym})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise ValueError(f"cannot parse element {text!r}") from exc

    def walk(node) -> PAdicNumber:
        if node == rho_sym:
            return fld.rho
        if node == p_sym:
            return fld.uniformizer
        if node.is_Integer:
            return fld.num(int(node))
        if node.is_Rational:
            return fld.num(Fraction(int(node.p), int(node.q)))
        if node.is_Add:
            total = fld.zero
            for arg in node.args:
                total = total + walk(arg)
            return total
        if node.is_Mul:
            total = fld.one
            for arg in node.args:
                total = total * walk(arg)
            return total
        if node.is_Pow and node.exp.is_Integer:
            return walk(node.base) ** int(node.exp)
        raise ValueError(f"unsupported term {node} in element {text!r}")

    value = walk(expr)
    return value


# ---------------------------------------------------------------------------
# vectorized fixed-point batches
# ---------------------------------------------------------------------------


_ZERO_SHIFT = 1 << 40


def _modpow_array(base: np.ndarray, exponent: int, mod: int) -> np.ndarray:
    result = np.ones_like(base)
    b = base % mod
    while exponent:
        if exponent & 1:
            result = (result * b) % mod
        b = (b * b) % mod
        exponent >>= 1
    return result


class PadicArray:
    """A batch of p-adic numbers ``p**shift * arr`` known modulo ``p**(shift + digits)``.

    ``arr`` is an int64 array (possibly 0-dimensional, for broadcast constants) with
    entries in ``[0, p**digits)``.  An exact zero constant uses a huge shift.
    """

    __slots__ = ("field", "shift", "digits", "arr")

    def __init__(self, fld: FieldParams, shift: int, digits: int, arr):
        if digits < 1:
            raise PrecisionLoss("batch lost all significant digits")
        self.field = fld
        self.shift = shift
        self.digits = min(digits, fld.array_digits)
        self.arr = np.asarray(arr, dtype=np.int64) % fld.p**self.digits

    # -- constructors ------------------------------------------------------------
    @classmethod
    def constant(cls, fld: FieldParams, x) -> "PadicArray":
        x = fld.num(x)
        if x.val is None:
            return cls(fld, _ZERO_SHIFT, fld.array_digits, 0)
        return cls(fld, x.val, x.prec, x.unit % fld.p ** min(x.prec, fld.array_digits))

    @classmethod
    def from_ints(cls, fld: FieldParams, ints, shift: int = 0) -> "PadicArray":
        """Exact integers (nonnegative, below p^array_digits) scaled by p^shift."""
        arr = np.asarray(ints, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= fld.p**fld.array_digits):
            raise PrecisionLoss("integer batch exceeds the array modulus")
        return cls(fld, shift, fld.array_digits, arr)

    def _lift(self, other) -> "PadicArray":
        if isinstance(other, PadicArray):
            return other
        return PadicArray.constant(self.field, other)

    @property
    def shape(self):
        return self.arr.shape

    @property
    def size(self) -> int:
        return int(self.arr.size)

    def is_exact_zero_constant(self) -> bool:
        return self.shift >= _ZERO_SHIFT // 2

    # -- ring operations ----------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        if other.is_exact_zero_constant():
            return self
        if self.is_exact_zero_constant():
            return other
        p = self.field.p
        s = min(self.shift, other.shift)
        top = min(self.shift + self.digits, other.shift + other.digits)
        digits = min(top - s, self.field.array_digits)
        if digits < 1:
            raise PrecisionLoss("sum of batches has no known digits")
        mod = p**digits
        total = np.zeros(np.broadcast_shapes(self.arr.shape, other.arr.shape), dtype=np.int64)
        for term in (self, other):
            k = term.shift - s
            if k < digits:
                total = total + (term.arr % p ** (digits - k)) * p**k
        return PadicArray(self.field, s, digits, total % mod)

    __radd__ = __add__

    def __neg__(self):
        if self.is_exact_zero_constant():
            return self
        return PadicArray(self.field, self.shift, self.digits, -self.arr)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if self.is_exact_zero_constant() or other.is_exact_zero_constant():
            return PadicArray.constant(self.field, 0)
        digits = min(self.digits, other.digits)
        mod = self.field.p**digits
        return PadicArray(self.field, self.shift + other.shift, digits, (self.arr % mod) * (other.arr % mod) % mod)

    __rmul__ = __mul__

    def scale_p(self, k: int) -> "PadicArray":
        """Multiply by p**k."""
        return PadicArray(self.field, self.shift + k, self.digits, self.arr)

    def inverse(self) -> "PadicArray":
        """Entrywise inverse; all entries must share one valuation."""
        vals = self.valuations()
        if vals.size == 0:
            return PadicArray(self.field, -self.shift, self.digits, self.arr)
        v = int(vals.flat[0])
        if np.any(vals != v):
            raise ValueError("inverse of a batch needs a uniform valuation")
        t = v - self.shift
        digits = self.digits - t
        if digits < 1:
            raise PrecisionLoss("inverse has no known digits")
        p = self.field.p
        mod = p**digits
        units = (self.arr // p**t) % mod
        phi = (p - 1) * p ** (digits - 1)
        return PadicArray(self.field, -v, digits, _modpow_array(units, phi - 1, mod))

    def __truediv__(self, other):
        other = self._lift(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    # -- selection ------------------------------------------------------------------
    def select(self, mask: np.ndarray) -> "PadicArray":
        if self.arr.ndim == 0:
            return self
        return PadicArray(self.field, self.shift, self.digits, self.arr[mask])

    def take(self, index: np.ndarray) -> "PadicArray":
        if self.arr.ndim == 0:
            return self
        return PadicArray(self.field, self.shift, self.digits, self.arr[index])

    def broadcast(self, shape) -> "PadicArray":
        return PadicArray(self.field, self.shift, self.digits, np.broadcast_to(self.arr, shape).copy())

    # -- valuation data ---------------------------------------------------------------
    def zero_mask(self) -> np.ndarray:
        """Entries indistinguishable from zero at the known precision."""
        return self.arr == 0

    def in_ideal(self, k: int) -> np.ndarray:
        """Boolean array: entry lies in p^k O."""
        if self.is_exact_zero_constant() or k <= self.shift:
            return np.ones(self.arr.shape, dtype=bool)
        need = k - self.shift
        if need > self.digits:
            raise PrecisionLoss(f"membership in p^{k} needs {need} digits, batch has {self.digits}")
        return self.arr % self.field.p**need == 0

    def _strip(self):
        p = self.field.p
        r = self.arr.copy()
        tz = np.zeros(r.shape, dtype=np.int64)
        live = r != 0
        for _ in range(self.digits):
            step = live & (r % p == 0)
            if not step.any():
                break
            tz[step] += 1
            r[step] //= p
        return tz, r

    def valuations(self) -> np.ndarray:
        if np.any(self.arr == 0):
            raise PrecisionLoss("batch entry indistinguishable from zero; valuation unknown")
        tz, _ = self._strip()
        return self.shift + tz

    def valuations_and_residues(self) -> tuple[np.ndarray, np.ndarray]:
        if np.any(self.arr == 0):
            raise PrecisionLoss("batch entry indistinguishable from zero; valuation unknown")
        tz, r = self._strip()
        return self.shift + tz, r % self.field.p

    def psi_exponents(self) -> tuple[int, np.ndarray]:
        """(m, t) such that psi of each entry is zeta_{p^m}^t."""
        if self.is_exact_zero_constant() or self.shift >= 0:
            return 0, np.zeros(self.arr.shape, dtype=np.int64)
        level = -self.shift
        if level > self.digits:
            raise PrecisionLoss(f"psi needs {level} digits, batch has {self.digits}")
        if level > self.field.M:
            from .errors import ConductorOverflow

            raise ConductorOverflow(f"conductor exponent {level} exceeds M = {self.field.M}")
        return level, self.arr % self.field.p**level

    def to_padic(self, index, exact: bool = False) -> PAdicNumber:
        """Scalar view of one entry; ``exact`` marks entries that are exact integers (coset
        representatives), so a stored 0 is the number zero rather than an unknown multiple of
        p^(shift + digits)."""
        value = int(self.arr[index]) if self.arr.ndim else int(self.arr)
        if self.is_exact_zero_constant():
            return self.field.zero
        if value == 0:
            if exact:
                return self.field.zero
            raise PrecisionLoss("entry indistinguishable from zero")
        p = self.field.p
        t = 0
        while value % p == 0:
            value //= p
            t += 1
        return PAdicNumber(self.field, self.shift + t, value, self.digits - t)


# ---------------------------------------------------------------------------
# regions and integration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FullBall:
    """center + p^depth O with additive measure."""

    center: object = 0
    depth: int = 0


@dataclass(frozen=True)
class ValShell:
    """{x : val(x) = ell}; ``multiplicative`` selects d*x normalized so that O* has mass 1."""

    ell: int
    multiplicative: bool = False


def UnitBall(multiplicative: bool = False) -> ValShell:
    return ValShell(0, multiplicative)


@dataclass(frozen=True)
class ValTail:
    """The infinite union of shells val(x) >= start (or <= start when ``upward`` is False)."""

    start: int
    upward: bool = True
    multiplicative: bool = False


@dataclass(frozen=True)
class Product:
    factors: tuple

    def __init__(self, *factors):
        object.__setattr__(self, "factors", tuple(factors))


@dataclass(frozen=True)
class Union:
    parts: tuple

    def __init__(self, *parts):
        object.__setattr__(self, "parts", tuple(parts))


@dataclass(frozen=True)
class DepthPolicy:
    """Coset depth per variable, with an optional recomputation one level deeper.

    ``refine`` marks which variables are deepened by the stability check; by default all are.
    """

    depth: int | tuple[int, ...]
    stability_check: bool = True
    budget: int = 20_000_000
    chunk: int = 1 << 20
    refine: tuple[bool, ...] | None = None
    separate: bool = False

    def depths(self, n: int) -> tuple[int, ...]:
        if isinstance(self.depth, int):
            return (self.depth,) * n
        if len(self.depth) != n:
            raise ValueError("depth tuple does not match the number of variables")
        return tuple(self.depth)

    def deeper(self, n: int) -> list["DepthPolicy"]:
        """Policies for the stability recomputation: one jointly deeper policy, or one per
        refined variable when ``separate`` is set."""
        current = self.depths(n)
        flags = self.refine or (True,) * n
        if not self.separate:
            finer = tuple(d + 1 if flag else d for d, flag in zip(current, flags))
            return [DepthPolicy(finer, False, self.budget, self.chunk, self.refine)]
        out = []
        for i, flag in enumerate(flags):
            if flag:
                finer = tuple(d + 1 if k == i else d for k, d in enumerate(current))
                out.append(DepthPolicy(finer, False, self.budget, self.chunk, self.refine))
        return out


def _factor_points(fld: FieldParams, factor, depth: int) -> tuple[PadicArray, Fraction, int]:
    """Representatives of factor modulo p^depth, their common measure, and their count."""
    p = fld.p
    if isinstance(factor, FullBall):
        if depth < factor.depth:
            raise ValueError("coset depth must be at least the ball exponent")
        n = p ** (depth - factor.depth)
        base = PadicArray.from_ints(fld, np.arange(n, dtype=np.int64), shift=factor.depth)
        center = fld.num(factor.center)
        points = base if center.is_zero() else base + PadicArray.constant(fld, center)
        return points, Fraction(1, 1) / Fraction(p) ** depth, n
    if isinstance(factor, ValShell):
        if depth <= factor.ell:
            raise ValueError("depth must exceed the shell valuation")
        width = depth - factor.ell
        t = np.arange(p**width, dtype=np.int64)
        t = t[t % p != 0]
        points = PadicArray.from_ints(fld, t, shift=factor.ell)
        if factor.multiplicative:
            weight = Fraction(1, t.size)
        else:
            weight = Fraction(1, 1) / Fraction(p) ** depth
        return points, weight, int(t.size)
    if isinstance(factor, ValTail):
        raise TailNotJustified("truncate ValTail with a support bound before integrating")
    raise TypeError(f"unsupported region factor {factor!r}")


def _expand_tail(tail: ValTail, bound: tuple[int, int] | None) -> list:
    if bound is None:
        raise TailNotJustified(f"tail starting at valuation {tail.start} has no declared support bound")
    lo, hi = bound
    if tail.upward:
        lo = max(lo, tail.start)
    else:
        hi = min(hi, tail.start)
    return [ValShell(ell, tail.multiplicative) for ell in range(lo, hi + 1)]


def _flatten(region, support_bound) -> list[tuple]:
    """Disjoint list of products of simple factors."""
    if isinstance(region, Union):
        out = []
        for part in region.parts:
            out.extend(_flatten(part, support_bound))
        return out
    if isinstance(region, Product):
        expanded = [[]]
        for factor in region.factors:
            options = _flatten(factor, support_bound)
            expanded = [prefix + list(opt) for prefix in expanded for opt in options]
        return [tuple(e) for e in expanded]
    if isinstance(region, ValTail):
        return [(shell,) for shell in _expand_tail(region, support_bound)]
    return [(region,)]


def iterate_product(fld: FieldParams, factors: Sequence, depths: Sequence[int],
                    budget: int, chunk: int) -> Iterator[tuple[list[PadicArray], Fraction]]:
    """Yield flattened meshgrid chunks of coset representatives and the per-point measure."""
    pieces = [_factor_points(fld, f, d) for f, d in zip(factors, depths)]
    total = 1
    for _, _, n in pieces:
        total *= n
    if total > budget:
        raise CostGuard(f"{total} coset representatives exceed the budget of {budget}")
    weight = Fraction(1)
    for _, w, _ in pieces:
        weight *= w
    counts = [n for _, _, n in pieces]
    inner = 1
    for n in counts[1:]:
        inner *= n
    step = max(1, chunk // max(inner, 1))
    for start in range(0, counts[0], step):
        stop = min(counts[0], start + step)
        idx = np.indices([stop - start] + counts[1:]).reshape(len(counts), -1)
        idx[0] += start
        yield [pts.take(ix) for (pts, _, _), ix in zip(pieces, idx)], weight


def integrate(region, integrand: Callable, depth: DepthPolicy | int, *, vectorized: bool = True,
              support_bound: tuple[int, int] | None = None, field_params: FieldParams | None = None):
    """Exact coset sum of ``integrand`` over ``region``.

    In vectorized mode the integrand receives one :class:`PadicArray` per variable and
    returns a :class:`cubicfl.cyclo.PhaseBatch`, a dict of them (one sum per key), or None.
    In scalar mode it receives :class:`PAdicNumber` values and returns a CycValue or None.
    """
    from .cyclo import CycValue, PhaseAccumulator

    if field_params is None:
        raise ValueError("integrate needs field_params")
    policy = depth if isinstance(depth, DepthPolicy) else DepthPolicy(depth)
    products = _flatten(region, support_bound)
    p = field_params.p
    keyed = {"flag": False}

    def run(pol: DepthPolicy):
        accumulators: dict = {}
        scalar_total = CycValue.zero(p)

        def feed(key, batch, weight, count):
            if batch is None:
                return
            if key not in accumulators:
                accumulators[key] = PhaseAccumulator(p)
            accumulators[key].add(batch, weight, count)

        for factors in products:
            depths = pol.depths(len(factors))
            for points, weight in iterate_product(field_params, factors, depths, pol.budget, pol.chunk):
                if vectorized:
                    out = integrand(*points)
                    if isinstance(out, dict):
                        keyed["flag"] = True
                        for key, batch in out.items():
                            feed(key, batch, weight, points[0].size)
                    else:
                        feed(None, out, weight, points[0].size)
                else:
                    for i in range(points[0].size):
                        value = integrand(*(pt.to_padic(i, exact=True) for pt in points))
                        if value is not None:
                            scalar_total = scalar_total + value * weight
        if keyed["flag"]:
            return {key: acc.value() for key, acc in accumulators.items()}
        total = accumulators[None].value() if None in accumulators else CycValue.zero(p)
        return total + scalar_total

    result = run(policy)
    if policy.stability_check:
        n_vars = len(products[0]) if products else 1
        for finer_policy in policy.deeper(n_vars):
            finer = run(finer_policy)
            if isinstance(result, dict):
                zero = CycValue.zero(p)
                keys = set(result) | set(finer)
                stable = all(result.get(k, zero) == finer.get(k, zero) for k in keys)
            else:
                stable = finer == result
            if not stable:
                raise StabilityFailure(
                    f"coset sum changed between depth {policy.depth} and depth {finer_policy.depth}"
                )
    return result
