"""Matching of the I and J orbital integrals: the big-cell identity, the degenerate
identities with their transfer factors, the functional equations, and grid sweeps.

Every record stores its inputs, the normalization pin and both sides as exact
:class:`CycValue` objects, so a failing record reproduces on its own.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cyclo import CycValue, Mu3, psi
from .errors import FirstFailure
from .orbital_i import I_brute, I_closed, I_deg_brute, I_deg_closed, I_singleton
from .orbital_j import J_brute, J_closed, J_deg
from .padic import FieldParams, PAdicNumber, make_field
from .sums import SumParams, default_params, hilbert3

SCHEMA_VERSION = 1
FL_MODES = ("closed-closed", "brute-closed", "closed-brute")
DEGENERATE_CASES = ("1", "2", "alt1", "alt2", "singletons")
SWEEP_MODES = FL_MODES + ("degenerate", "functional")


# ---------------------------------------------------------------------------
# records and reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SideCheck:
    name: str
    lhs: CycValue
    rhs: CycValue

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


@dataclass(frozen=True, eq=True)
class MatchRecord:
    """One verified identity (or group of identities) at one grid point.

    ``i_value`` and ``j_value`` are the raw orbital integrals; ``twist`` is the cubic
    symbol factor and ``transfer`` the remaining transfer factor, so that for the
    big-cell case ``i_value == twist * j_value``.
    """

    kind: str
    label: str
    inputs: tuple
    i_value: CycValue
    j_value: CycValue
    checks: tuple
    twist: Mu3 | None = None
    transfer: CycValue | None = None
    wall_ms: float = field(default=0.0, compare=False)

    @property
    def passed(self) -> bool:
        return all(check.holds for check in self.checks)

    def input(self, name: str) -> PAdicNumber:
        return dict(self.inputs)[name]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "label": self.label,
            "inputs": [[name, x.to_json()] for name, x in self.inputs],
            "I": self.i_value.to_json(),
            "J": self.j_value.to_json(),
            "twist": None if self.twist is None else self.twist.k,
            "transfer": None if self.transfer is None else self.transfer.to_json(),
            "checks": [{"name": c.name, "lhs": c.lhs.to_json(), "rhs": c.rhs.to_json(), "pass": c.holds}
                       for c in self.checks],
            "pass": self.passed,
        }

    @classmethod
    def from_json(cls, fld: FieldParams, data: dict, wall_ms: float = 0.0) -> "MatchRecord":
        p = fld.p
        return cls(
            kind=data["kind"],
            label=data["label"],
            inputs=tuple((name, PAdicNumber.from_json(fld, x)) for name, x in data["inputs"]),
            i_value=CycValue.from_json(p, data["I"]),
            j_value=CycValue.from_json(p, data["J"]),
            checks=tuple(SideCheck(c["name"], CycValue.from_json(p, c["lhs"]), CycValue.from_json(p, c["rhs"]))
                         for c in data["checks"]),
            twist=None if data["twist"] is None else Mu3(data["twist"]),
            transfer=None if data["transfer"] is None else CycValue.from_json(p, data["transfer"]),
            wall_ms=wall_ms,
        )


@dataclass
class MatchReport:
    field: FieldParams
    normalization: str
    records: list = field(default_factory=list)
    wall_ms: float = 0.0

    @property
    def total(self) -> int:
        return len(self.records)

    @property
    def passed(self) -> int:
        return sum(r.passed for r in self.records)

    @property
    def failed(self) -> int:
        return self.total - self.passed

    def merge(self, other: "MatchReport") -> None:
        if other.field != self.field or other.normalization != self.normalization:
            raise ValueError("cannot merge reports over different fields or normalizations")
        self.records.extend(other.records)

    def __eq__(self, other):
        if not isinstance(other, MatchReport):
            return NotImplemented
        return (self.field == other.field and self.normalization == other.normalization
                and self.records == other.records)

    def to_json(self) -> dict:
        """Deterministic payload; every timing lives under the separate "timing" key."""
        fld = self.field
        return {
            "schema_version": SCHEMA_VERSION,
            "field": {"p": fld.p, "P": fld.P, "M": fld.M, "rho_residue": fld.rho_residue,
                      "normalization": self.normalization},
            "cases": [r.to_json() for r in self.records],
            "summary": {"total": self.total, "passed": self.passed, "failed": self.failed},
            "timing": {"wall_ms": round(self.wall_ms, 3),
                       "cases_ms": [round(r.wall_ms, 3) for r in self.records]},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, data: dict) -> "MatchReport":
        if data.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {data.get('schema_version')}")
        info = data["field"]
        fld = _field_from_json(info)
        timing = data.get("timing", {})
        cases_ms = timing.get("cases_ms", [0.0] * len(data["cases"]))
        records = [MatchRecord.from_json(fld, case, ms) for case, ms in zip(data["cases"], cases_ms)]
        return cls(fld, info["normalization"], records, timing.get("wall_ms", 0.0))

    @classmethod
    def loads(cls, text: str) -> "MatchReport":
        return cls.from_json(json.loads(text))


def _field_from_json(info: dict) -> FieldParams:
    p = int(info["p"])
    for choice in ("smaller", "larger"):
        fld = make_field(p, int(info["P"]), rho_choice=choice, max_conductor=int(info["M"]))
        if fld.rho_residue == int(info["rho_residue"]):
            return fld
    raise ValueError(f"{info['rho_residue']} is not a cube root of unity mod {p}")


# ---------------------------------------------------------------------------
# single verifications
# ---------------------------------------------------------------------------


def _abs_power(x: PAdicNumber, power: int) -> Fraction:
    """|x|^power with |p| = 1/p."""
    return Fraction(x.field.p) ** (-power * x.val)


def _timed(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


def _i_brute_any_order(a: PAdicNumber, b: PAdicNumber, layer: str, budget: int) -> CycValue:
    if min(a.val, b.val) < 0:
        return I_brute(a, b, "full", budget=budget)
    if layer in ("reduced", "split") and b.val < a.val:
        # these layers parametrize |b| <= |a| only; the swap is an exact change of variables
        return I_brute(-b, -a, layer, budget=budget).conj()
    return I_brute(a, b, layer, budget=budget)


def verify_fl(a: PAdicNumber, b: PAdicNumber, mode: str = "closed-closed", params: SumParams | None = None, *,
              layer: str = "j-sum", budget: int = 20_000_000, c_factor: int = -54,
              d_factor: int = 54) -> MatchRecord:
    """I(a, b) against (c, d)_3 J(c, d) with c = -54 a, d = 54 b.

    ``c_factor`` and ``d_factor`` exist only to induce failures in tests of the reporting path.
    """
    if mode not in FL_MODES:
        raise ValueError(f"mode must be one of {FL_MODES}")
    params = params or default_params(a.field)
    start = time.perf_counter()
    c, d = c_factor * a, d_factor * b
    if mode == "brute-closed":
        i_value = _i_brute_any_order(a, b, layer, budget)
    else:
        i_value = I_closed(a, b)
    if mode == "closed-brute":
        j_value = J_brute(c, d, params, budget=budget)
    else:
        j_value = J_closed(c, d, params)
    twist = hilbert3(c, d, params)
    check = SideCheck("I(a,b) = (c,d)_3 J(c,d)", i_value, twist * j_value)
    return MatchRecord("fl", mode, (("a", a), ("b", b), ("c", c), ("d", d)), i_value, j_value,
                       (check,), twist=twist, transfer=CycValue.rational(a.field.p, 1), wall_ms=_timed(start))


def _degenerate_data(c: PAdicNumber, which: str):
    """(I index, a, J index, transfer factor) for each matching."""
    fld = c.field
    rho = fld.rho
    inv_c = c.inverse()
    if which == "1":
        return 1, 3 * (rho - rho * rho) * inv_c, 1, psi(-3 * rho * inv_c).scale(_abs_power(c, 2))
    if which == "2":
        return 2, 3 * (rho - 1) * c, 2, psi(3 * rho * c).scale(_abs_power(c, -2))
    if which == "alt1":
        return 1, 3 * (rho - 1) * c, 2, psi(3 * c).scale(_abs_power(c, -2))
    if which == "alt2":
        return 2, 3 * (rho * rho - 1) * inv_c, 1, psi(-3 * inv_c).scale(_abs_power(c, 2))
    raise ValueError(f"which must be one of {DEGENERATE_CASES}")


def verify_degenerate(c: PAdicNumber, which, mode: str = "closed", params: SumParams | None = None, *,
                      budget: int = 20_000_000) -> MatchRecord:
    """The degenerate matchings I_i(a) = transfer * J_k(c), or the three singleton orbits."""
    which = str(which)
    if mode not in ("closed", "brute"):
        raise ValueError("mode must be 'closed' or 'brute'")
    if c.is_zero():
        raise ValueError("c must be nonzero")
    fld = c.field
    params = params or default_params(fld)
    start = time.perf_counter()
    one = CycValue.rational(fld.p, 1)
    if which == "singletons":
        checks = []
        for k in range(3):
            i_side = I_singleton(fld, k)
            j_side = J_deg("singletons", c, mode=mode, params=params)
            checks.append(SideCheck(f"zeta = rho^{k}: I = 1", i_side, one))
            checks.append(SideCheck(f"zeta = rho^{k}: J = 1", j_side, one))
        return MatchRecord("degenerate", which, (("c", c),), one, one, tuple(checks),
                           transfer=one, wall_ms=_timed(start))
    i_index, a, j_index, transfer = _degenerate_data(c, which)
    if mode == "closed":
        i_value = I_deg_closed(i_index, a)
        j_value = J_deg(j_index, c, mode="closed", params=params)
    else:
        i_value = I_deg_brute(i_index, a, budget=budget)
        j_value = J_deg(j_index, c, mode="brute", params=params, budget=budget)
    check = SideCheck(f"I_{i_index}(a) = transfer * J_{j_index}(c)", i_value, transfer * j_value)
    return MatchRecord("degenerate", f"{which}:{mode}", (("c", c), ("a", a)), i_value, j_value, (check,),
                       transfer=transfer, wall_ms=_timed(start))


def verify_functional_equations(a: PAdicNumber, b: PAdicNumber, params: SumParams | None = None) -> MatchRecord:
    """I(a,b) = I(-b,-a), I(b,a) = conj I(-a,-b) and J(b,a) = conj J(a,b), all in closed form."""
    if a.is_zero() or b.is_zero():
        raise ValueError("a and b must be nonzero")
    params = params or default_params(a.field)
    start = time.perf_counter()
    i_ab = I_closed(a, b)
    j_ab = J_closed(a, b, params)
    checks = (
        SideCheck("I(a,b) = I(-b,-a)", i_ab, I_closed(-b, -a)),
        SideCheck("I(b,a) = conj I(-a,-b)", I_closed(b, a), I_closed(-a, -b).conj()),
        SideCheck("J(b,a) = conj J(a,b)", J_closed(b, a, params), j_ab.conj()),
    )
    return MatchRecord("functional", "fe", (("a", a), ("b", b)), i_ab, j_ab, checks, wall_ms=_timed(start))


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def default_unit_reps(fld: FieldParams) -> list[PAdicNumber]:
    """Rational units plus rho-twisted ones; cubic symbol twists are invisible on 1, 2, 3, -1 alone
    at some primes."""
    rho = fld.rho
    return [fld.num(1), fld.num(2), fld.num(3), rho, rho * rho, fld.num(-1)]


def sweep_tasks(fld: FieldParams, val_range: Sequence[int], unit_reps: Iterable[PAdicNumber],
                modes: Iterable[str]) -> list[tuple]:
    lo, hi = val_range
    units = list(unit_reps)
    modes = set(modes)
    unknown = modes - set(SWEEP_MODES)
    if unknown:
        raise ValueError(f"unknown sweep modes {sorted(unknown)}")
    pi = fld.uniformizer
    grid = [(u * pi**m, w * pi**n) for m in range(lo, hi + 1) for n in range(lo, hi + 1)
            for u in units for w in units]
    tasks = []
    for mode in SWEEP_MODES:
        if mode not in modes:
            continue
        if mode in FL_MODES:
            tasks += [("fl", mode, a, b) for a, b in grid]
        elif mode == "functional":
            tasks += [("functional", mode, a, b) for a, b in grid]
        else:
            cs = [u * pi**m for m in range(lo, hi + 1) for u in units]
            tasks += [("degenerate", which, c, None) for which in DEGENERATE_CASES for c in cs]
    return tasks


def run_task(task: tuple, params: SumParams, budget: int = 20_000_000) -> MatchRecord:
    kind, mode, x, y = task
    if kind == "fl":
        return verify_fl(x, y, mode, params, budget=budget)
    if kind == "functional":
        return verify_functional_equations(x, y, params)
    return verify_degenerate(x, mode, "closed", params, budget=budget)


def _run_chunk(chunk: list, params: SumParams, budget: int) -> MatchReport:
    report = MatchReport(params.field, params.symbol_normalization)
    for task in chunk:
        report.records.append(run_task(task, params, budget))
    return report


def sweep(val_range: Sequence[int], unit_reps: Iterable[PAdicNumber] | None = None,
          modes: Iterable[str] = ("closed-closed",), *, field_params: FieldParams | None = None,
          params: SumParams | None = None, workers: int = 1, budget: int = 20_000_000,
          stop_on_failure: bool = True) -> MatchReport:
    """Run every requested verification over the grid u p^m, w p^n with m, n in val_range.

    With ``workers > 1`` chunks run in worker processes and the coordinator merges the
    partial reports in task order.  The first failing record raises FirstFailure unless
    ``stop_on_failure`` is false.
    """
    if params is None:
        fld = field_params or make_field(7)
        params = default_params(fld)
    fld = params.field
    units = default_unit_reps(fld) if unit_reps is None else list(unit_reps)
    start = time.perf_counter()
    tasks = sweep_tasks(fld, val_range, units, modes) if val_range[0] <= val_range[1] else []
    report = MatchReport(fld, params.symbol_normalization)
    if workers > 1 and len(tasks) > 1:
        size = -(-len(tasks) // workers)
        chunks = [tasks[i:i + size] for i in range(0, len(tasks), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_chunk, chunks, [params] * len(chunks), [budget] * len(chunks)):
                report.merge(part)
    else:
        report = _run_chunk(tasks, params, budget)
    report.wall_ms = _timed(start)
    if stop_on_failure:
        for record in report.records:
            if not record.passed:
                payload = {"field": report.to_json()["field"], "record": record.to_json()}
                raise FirstFailure(f"verification failed: {json.dumps(payload, sort_keys=True)}", record)
    return report


__all__ = [
    "DEGENERATE_CASES", "FL_MODES", "SWEEP_MODES", "MatchRecord", "MatchReport", "SideCheck",
    "default_unit_reps", "run_task", "sweep", "sweep_tasks", "verify_degenerate", "verify_fl",
    "verify_functional_equations",
]
