"""The nine acceptance checks, each returning a one-line verdict.

Every check is deterministic (fixed seeds) and reports its own wall time against a limit.
``tests/test_acceptance.py`` and ``scripts/run_acceptance.py`` both drive this module.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import orbits
from .cyclo import CycValue, psi
from .errors import NotCovered
from .matcher import default_unit_reps, sweep, verify_degenerate, verify_functional_equations
from .orbital_i import I_brute, I_closed
from .orbital_j import G_integral, J_brute, J_closed
from .padic import FieldParams, make_field
from .sums import (
    cubic_brute,
    cubic_closed,
    default_params,
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

FL_PRIMES = (7, 13)
FL_WINDOW = (-2, 4)
FULL_LAYER_LIMIT = 300


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    limit: float | None = None
    failures: list = field(default_factory=list)

    @property
    def within_limit(self) -> bool:
        return self.limit is None or self.seconds <= self.limit

    @property
    def ok(self) -> bool:
        return self.passed and self.within_limit

    def line(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        budget = f" / limit {self.limit:.0f}s" if self.limit is not None else ""
        note = "" if self.within_limit else " (over time limit)"
        return f"[criterion {self.number}] {verdict}  {self.title}: {self.detail} [{self.seconds:.1f}s{budget}]{note}"


class _Tally:
    def __init__(self):
        self.total = 0
        self.failures: list = []

    def check(self, ok: bool, label) -> None:
        self.total += 1
        if not ok:
            self.failures.append(label)

    @property
    def failed(self) -> int:
        return len(self.failures)

    def summary(self, noun: str = "cases") -> str:
        return f"{self.total - self.failed}/{self.total} {noun} exact"


def _timed(number: int, title: str, limit: float | None, body: Callable[[], tuple[_Tally, str]]) -> CriterionResult:
    start = time.perf_counter()
    tally, detail = body()
    seconds = time.perf_counter() - start
    return CriterionResult(number, title, tally.failed == 0 and tally.total > 0, detail, seconds, limit,
                           tally.failures[:20])


def _field(p: int) -> FieldParams:
    return make_field(p, 24)


def criterion_1() -> CriterionResult:
    def body():
        tally = _Tally()
        for p in FL_PRIMES:
            report = sweep(FL_WINDOW, field_params=_field(p), stop_on_failure=False)
            for record in report.records:
                tally.check(record.passed, (p, record.label, [x.to_json() for _, x in record.inputs]))
        return tally, tally.summary("grid points") + f" over p in {FL_PRIMES}"

    return _timed(1, "big-cell matching, closed forms", 60, body)


def criterion_2() -> CriterionResult:
    def body():
        fld = _field(7)
        params = default_params(fld)
        pi = fld.uniformizer
        units = default_unit_reps(fld)
        pairs = [(units[i], units[j]) for i in (0, 3, 5) for j in (1, 2)]
        tally = _Tally()
        for u, w in pairs:
            for va in range(-4, 3):
                for vb in range(-4, 3):
                    a, b = u * pi**va, w * pi**vb
                    for vy in range(0, 6):
                        y = units[4] * pi**vy
                        tally.check(kloosterman_closed(y, a, b, params) == kloosterman_brute(y, a, b, params),
                                    ("K", va, vb, vy))
                    kinds = ["C", "C0"]
                    if (u, w) == pairs[0]:
                        kinds += [("Cl", -1), ("Cl", 1), ("Cl", 2)]
                    for kind in kinds:
                        try:
                            closed = cubic_closed(kind, a, b)
                        except NotCovered:
                            continue
                        tally.check(closed == cubic_brute(kind, a, b), (kind, va, vb))
        return tally, tally.summary("Kloosterman and cubic integrals")

    return _timed(2, "character sums, closed vs coset sums", 60, body)


def _all_unit_pairs(fld):
    units = default_unit_reps(fld)
    return [(u, w) for u in units for w in units]


def criterion_3(include_full: bool = True) -> CriterionResult:
    def body():
        fld = _field(7)
        params = default_params(fld)
        pi = fld.uniformizer
        tally = _Tally()
        pairs = _all_unit_pairs(fld)
        for u, w in pairs:
            for va in range(0, 3):
                for vb in range(0, 3):
                    a, b = u * pi**va, w * pi**vb
                    tally.check(J_brute(a, b, params) == J_closed(a, b, params), ("J", va, vb))
        for u, w in pairs:
            for va in range(0, 4):
                for vb in range(0, 4):
                    a, b = u * pi**va, w * pi**vb
                    closed = I_closed(a, b)
                    for layer in ("j-sum", "reduced", "split"):
                        if layer != "j-sum" and vb < va:
                            value = I_brute(-b, -a, layer).conj()
                        else:
                            value = I_brute(a, b, layer)
                        tally.check(value == closed, ("I", layer, va, vb))
        detail = tally.summary("J and I layer comparisons")
        if include_full:
            full = _Tally()
            small = default_unit_reps(fld)[:3]
            start = time.perf_counter()
            values = set()
            for u in small:
                for w in small:
                    for va in (0, 1):
                        for vb in (0, 1):
                            a, b = u * pi**va, w * pi**vb
                            value = I_brute(a, b, "full")
                            ok = value == I_closed(a, b)
                            if va == vb:
                                ok = ok and value == CycValue.rational(7, 1 if va == 0 else 14)
                                values.add(str(value.as_fraction()))
                            full.check(ok, ("full", va, vb))
            full_seconds = time.perf_counter() - start
            detail += (f"; full layer {full.summary('cases')} (diagonal values {sorted(values, key=int)}) "
                       f"in {full_seconds:.0f}s of {FULL_LAYER_LIMIT}s")
            full.check(full_seconds <= FULL_LAYER_LIMIT, ("full layer time", round(full_seconds, 1)))
            tally.total += full.total
            tally.failures += full.failures
        return tally, detail

    return _timed(3, "orbital integrals, brute vs closed", 600, body)


def criterion_4() -> CriterionResult:
    def body():
        tally = _Tally()
        rng = random.Random(4)
        for p in FL_PRIMES:
            fld = _field(p)
            params = default_params(fld)
            for _ in range(20):
                unit = fld.num(rng.randrange(1, p) + p * rng.randrange(p**3)) * fld.rho ** rng.randrange(3)
                a = unit / p
                tally.check(gauss_pair(a, params) == CycValue.rational(p, Fraction(1, p)), (p, a.to_json()))
        return tally, tally.summary("Gauss pairs equal to 1/q")

    return _timed(4, "cubic Gauss sum modulus", None, body)


def criterion_5() -> CriterionResult:
    def body():
        fld = _field(7)
        params = default_params(fld)
        rng = random.Random(5)
        tally = _Tally()
        for bullet in (1, 2):
            for _ in range(50):
                args = random_di_parameters(fld, rng, bullet)
                tally.check(di_identity_check(*args, params=params), ("di", bullet))
        for congruent in (True, False):
            for _ in range(20):
                a, b = random_triple_parameters(fld, rng, congruent)
                tally.check(triple_cubic_check(a, b), ("triple", congruent))
        return tally, tally.summary("identity instances (2x50 cubic/Kloosterman, 2x20 triple)")

    return _timed(5, "cubic/Kloosterman and triple cubic identities", None, body)


def criterion_6() -> CriterionResult:
    def body():
        fld = _field(7)
        params = default_params(fld)
        pi = fld.uniformizer
        units = default_unit_reps(fld)
        tally = _Tally()
        for which in ("1", "2", "alt1", "alt2", "singletons"):
            for m in range(-3, 4):
                for u in units:
                    record = verify_degenerate(u * pi**m, which, "closed", params)
                    tally.check(record.passed, (which, m))
        closed_count = tally.total
        for which in ("1", "2", "alt1", "alt2"):
            for m in range(-2, 3):
                for u in units:
                    record = verify_degenerate(u * pi**m, which, "brute", params)
                    tally.check(record.passed, (which, m, "brute"))
        return tally, (f"{tally.total - tally.failed}/{tally.total} matchings exact "
                       f"({closed_count} closed, {tally.total - closed_count} brute cross-checks)")

    return _timed(6, "degenerate orbits with transfer factors", 60, body)


def criterion_7() -> CriterionResult:
    def body():
        tally = _Tally()
        for p in FL_PRIMES:
            fld = _field(p)
            params = default_params(fld)
            pi = fld.uniformizer
            for u, w in _all_unit_pairs(fld):
                for m in range(FL_WINDOW[0], FL_WINDOW[1] + 1):
                    for n in range(FL_WINDOW[0], FL_WINDOW[1] + 1):
                        record = verify_functional_equations(u * pi**m, w * pi**n, params)
                        for check in record.checks:
                            tally.check(check.holds, (p, check.name, m, n))
        return tally, tally.summary("functional-equation instances")

    return _timed(7, "functional equations", None, body)


def criterion_8() -> CriterionResult:
    def body():
        fld = orbits.orbit_field(7)
        tally = _Tally()
        census = orbits.orbit_census(fld, samples=1000, seed=8)
        for index in range(census["samples"]):
            tally.check(True, index)
        for failure in census["failures"]:
            tally.failures.append(failure)
        rng = random.Random(8)
        vectors = [orbits.random_family_vector(fld, rng) for _ in range(80)]
        for family in ("sl2-line", "sl2-plane", "first-second-line", "first-third-line"):
            vectors += [orbits.relevant_vector(fld, family, rng) for _ in range(5)]
        agree = 0
        for xi in vectors:
            ok = orbits.is_relevant(xi) == orbits.relevance_oracle(xi)
            agree += ok
            tally.check(ok, ("oracle", xi.format()))
        fixed = 0
        seen = set()
        for _ in range(600):
            rep, _, family = orbits.canonicalize(orbits.random_family_vector(fld, rng))
            ok = orbits.canonicalize(rep)[0] == rep
            fixed += ok
            seen.add(family)
            tally.check(ok, ("fixed point", rep.format()))
        tally.check(seen == set(orbits.FAMILIES), ("families reached", sorted(seen)))
        detail = (f"census 1000 samples, {len(census['failures'])} failures; oracle agrees on {agree}/{len(vectors)}; "
                  f"{fixed}/600 representatives fixed, {len(seen)}/{len(orbits.FAMILIES)} families reached")
        return tally, detail

    return _timed(8, "finite-field orbit classifier", 120, body)


def _random_number(fld, rng, lo=-5, hi=5):
    p = fld.p
    unit = rng.randrange(1, p) + p * rng.randrange(p**3)
    return fld.element(unit, rng.randrange(3), rng.randrange(lo, hi + 1))


def criterion_9() -> CriterionResult:
    def body():
        fld = _field(7)
        params = default_params(fld)
        rng = random.Random(9)
        tally = _Tally()
        one = fld.one
        h = lambda x, y: hilbert3(x, y, params)  # noqa: E731
        for _ in range(500):
            x, y, z = (_random_number(fld, rng) for _ in range(3))
            tally.check(h(y, x) == h(x, y).inverse(), "antisymmetry")
            tally.check(h(x * y, z) == h(x, z) * h(y, z), "bilinearity")
            if not (one - x).is_zero():
                tally.check(h(x, one - x).k == 0, "steinberg")
            units_trivial = all(h(x, fld.num(u)).k == 0 for u in range(1, 7))
            tally.check(units_trivial == (x.val % 3 == 0), "units detect valuation")
            small = fld.element(rng.randrange(1, 7), rng.randrange(3), x.val + rng.randrange(1, 4))
            tally.check(h(x + small, z) == h(x, z), "perturbation")
        for _ in range(500):
            x, y = _random_number(fld, rng, -4, 3), _random_number(fld, rng, -4, 3)
            tally.check(psi(x + y) == psi(x) * psi(y), "psi additivity")
            s = _random_number(fld, rng, -1, 1)
            tally.check(s_func(x * s * s) == s_func(x), "s square class")
        for _ in range(200):
            x, y = _random_number(fld, rng, -4, 2), _random_number(fld, rng, -4, 2)
            u = _random_number(fld, rng, 0, 0)
            tally.check(cubic_brute("C", u * x, u**3 * y) == cubic_brute("C", x, y), "C unit scaling")
        for va in (2, 3, 4):
            for ell in range((va + 1) // 2, va):
                for _ in range(3):
                    a = _random_number(fld, rng, va, va)
                    b = _random_number(fld, rng, va, va)
                    tally.check(G_integral(ell + 1, ell, a, b, "closed").is_zero(), "G vanishing closed")
                    tally.check(G_integral(ell + 1, ell, a, b, "brute").is_zero(), "G vanishing brute")
                    tally.check(G_integral(ell, ell, a, b, "brute") == G_integral(ell, ell, b, a, "brute"),
                                "G symmetry")
        return tally, tally.summary("property instances")

    return _timed(9, "property suites", None, body)


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9,
}


def run_all(numbers=None, echo: Callable[[str], None] | None = print) -> list[CriterionResult]:
    results = []
    for number in numbers or sorted(CRITERIA):
        result = CRITERIA[number]()
        results.append(result)
        if echo:
            echo(result.line())
    return results
