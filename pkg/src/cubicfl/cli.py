"""Command-line front end.

Exit status: 0 when every verification passes, 1 when one fails, 2 on usage errors.
Budgets can be raised through the environment variables ``CUBICFL_BRUTE_BUDGET`` and
``CUBICFL_ORACLE_BUDGET``.
"""

from __future__ import annotations

import csv
import io
import json
import os
import random
import sys
import time
from dataclasses import asdict, dataclass, field

import click

from . import matcher, orbits, sums
from .cyclo import CycValue, complex_embed
from .errors import CostGuard, CubicFLError, InvalidField, NotCovered
from .padic import FieldParams, make_field

DEFAULT_UNITS = ("1", "2", "3", "rho", "rho^2", "-1")


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run; validated on construction and written into each report."""

    p: int = 7
    precision: int = 24
    normalization: str = "auto"
    val_range: tuple = (-2, 4)
    units: tuple = DEFAULT_UNITS
    display: str = "exact"
    brute_budget: int = 20_000_000
    oracle_budget: int = 5_000_000
    output: str | None = None
    fmt: str = "json"

    def __post_init__(self):
        if self.normalization not in ("auto",) + sums.NORMALIZATIONS:
            raise ValueError(f"normalization must be auto or one of {sums.NORMALIZATIONS}")
        if self.display not in ("exact", "float"):
            raise ValueError("display must be exact or float")
        if self.fmt not in ("json", "csv", "text"):
            raise ValueError("format must be json, csv or text")
        if self.val_range[0] > self.val_range[1] + 1:
            raise ValueError("empty valuation window must be written lo..lo-1")
        if self.brute_budget <= 0 or self.oracle_budget <= 0:
            raise ValueError("budgets must be positive")

    def field_params(self) -> FieldParams:
        return make_field(self.p, self.precision)

    def sum_params(self) -> sums.SumParams:
        fld = self.field_params()
        if self.normalization == "auto":
            return sums.default_params(fld)
        return sums.SumParams(fld, self.normalization)

    def to_json(self) -> dict:
        data = asdict(self)
        data["val_range"] = list(self.val_range)
        data["units"] = list(self.units)
        data.pop("output")
        return data


@dataclass
class TableReport:
    """Rows of named checks for the commands that are not orbital-integral matchings."""

    command: str
    rows: list = field(default_factory=list)
    info: dict = field(default_factory=dict)
    wall_ms: float = 0.0

    @property
    def failed(self) -> int:
        return sum(1 for row in self.rows if row.get("pass") is False)

    def to_json(self) -> dict:
        passed = sum(1 for row in self.rows if row.get("pass") is True)
        return {"command": self.command, "info": self.info, "rows": self.rows,
                "summary": {"total": len(self.rows), "passed": passed, "failed": self.failed},
                "timing": {"wall_ms": round(self.wall_ms, 3)}}


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------


def _complex_text(value: CycValue) -> str:
    z = complex_embed(value)
    re, im = (0.0 if abs(t) < 1e-9 else t for t in (z.real, z.imag))
    return f"{re:.12g}{im:+.12g}j"


def _value_text(value: CycValue, display: str) -> str:
    if display == "float" or not value.is_rational():
        approx = _complex_text(value)
        return approx if display == "float" else f"{value!r} ~ {approx}"
    return str(value.as_fraction())


def _match_csv(report: matcher.MatchReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["kind", "label", "inputs", "check", "lhs_exact", "lhs_complex", "rhs_exact",
                     "rhs_complex", "twist", "pass"])
    for record in report.records:
        inputs = json.dumps([[n, x.to_json()] for n, x in record.inputs], sort_keys=True)
        for check in record.checks:
            writer.writerow([record.kind, record.label, inputs, check.name,
                             json.dumps(check.lhs.to_json(), sort_keys=True), _complex_text(check.lhs),
                             json.dumps(check.rhs.to_json(), sort_keys=True), _complex_text(check.rhs),
                             "" if record.twist is None else record.twist.k, check.holds])
    return buf.getvalue()


def _table_csv(report: TableReport) -> str:
    buf = io.StringIO()
    keys = sorted({k for row in report.rows for k in row})
    writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    writer.writeheader()
    for row in report.rows:
        writer.writerow({k: json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v
                         for k, v in row.items()})
    return buf.getvalue()


def _match_text(report: matcher.MatchReport, display: str) -> str:
    lines = [f"p = {report.field.p}, normalization = {report.normalization}"]
    for record in report.records:
        status = "PASS" if record.passed else "FAIL"
        for check in record.checks:
            lines.append(f"{status} {record.kind}/{record.label} {check.name}: "
                         f"{_value_text(check.lhs, display)} | {_value_text(check.rhs, display)}")
    lines.append(f"total {report.total}, passed {report.passed}, failed {report.failed}")
    return "\n".join(lines) + "\n"


def _table_text(report: TableReport) -> str:
    lines = [f"{report.command}: {json.dumps(report.info, sort_keys=True)}"]
    for row in report.rows:
        lines.append(" ".join(f"{k}={row[k]}" for k in sorted(row)))
    data = report.to_json()["summary"]
    lines.append(f"total {data['total']}, passed {data['passed']}, failed {data['failed']}")
    return "\n".join(lines) + "\n"


def emit_report(report, fmt: str = "json", config: RunConfig | None = None) -> bytes:
    """Deterministic serialization; JSON keeps timings under "timing" only."""
    if fmt == "json":
        payload = report.to_json()
        if config is not None:
            payload["config"] = config.to_json()
        return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode()
    display = config.display if config else "exact"
    if isinstance(report, matcher.MatchReport):
        text = _match_csv(report) if fmt == "csv" else _match_text(report, display)
    else:
        text = _table_csv(report) if fmt == "csv" else _table_text(report)
    return text.encode()


def _deliver(ctx: click.Context, report, config: RunConfig, failed: int) -> None:
    blob = emit_report(report, config.fmt, config)
    if config.output:
        with open(config.output, "wb") as handle:
            handle.write(blob)
    else:
        click.echo(blob.decode(), nl=False)
    ctx.exit(1 if failed else 0)


# ---------------------------------------------------------------------------
# option parsing
# ---------------------------------------------------------------------------


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return int(raw) if raw else default


def _parse_window(text: str) -> tuple:
    try:
        lo, hi = (int(v) for v in text.replace("..", ",").split(","))
    except ValueError as exc:
        raise click.BadParameter(f"expected lo,hi but got {text!r}") from exc
    return lo, hi


def _build_config(p, precision, normalization, vals, units, display, fmt, output) -> RunConfig:
    try:
        config = RunConfig(p=p, precision=precision, normalization=normalization,
                           val_range=_parse_window(vals), units=tuple(u.strip() for u in units.split(",")),
                           display=display, fmt=fmt, output=output,
                           brute_budget=_env_int("CUBICFL_BRUTE_BUDGET", 20_000_000),
                           oracle_budget=_env_int("CUBICFL_ORACLE_BUDGET", 5_000_000))
        config.field_params()
    except (InvalidField, ValueError) as exc:
        raise click.UsageError(str(exc)) from exc
    return config


def _parse(fld: FieldParams, text: str):
    try:
        return fld.parse(text)
    except (ValueError, TypeError, CubicFLError) as exc:
        raise click.BadParameter(f"cannot parse {text!r}: {exc}") from exc


def common_options(func):
    options = [
        click.option("--p", "p", type=int, default=7, show_default=True, help="Residue characteristic."),
        click.option("--precision", type=int, default=24, show_default=True, help="p-adic digits."),
        click.option("--normalization", type=click.Choice(("auto",) + sums.NORMALIZATIONS), default="auto",
                     show_default=True, help="Orientation of the cubic residue character."),
        click.option("--vals", default="-2,4", show_default=True, help="Valuation window lo,hi."),
        click.option("--units", default=",".join(DEFAULT_UNITS), show_default=True,
                     help="Comma-separated unit representatives in u*rho^k syntax."),
        click.option("--display", type=click.Choice(["exact", "float"]), default="exact", show_default=True),
        click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="json",
                     show_default=True),
        click.option("--output", type=click.Path(dir_okay=False), default=None, help="Write the report here."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group()
def main():
    """Exact verification of the cubic big-cell and degenerate orbital-integral matchings."""


# ---------------------------------------------------------------------------
# orbital-integral commands
# ---------------------------------------------------------------------------


@main.command("fl-verify")
@common_options
@click.option("--a", "a_text", required=True, help="Element such as 3*rho^2*p^-1.")
@click.option("--b", "b_text", required=True)
@click.option("--mode", type=click.Choice(matcher.FL_MODES), default="closed-closed", show_default=True)
@click.option("--c-factor", type=int, default=-54, hidden=True)
@click.pass_context
def fl_verify(ctx, p, precision, normalization, vals, units, display, fmt, output, a_text, b_text, mode,
              c_factor):
    """Compare I(a, b) with (c, d)_3 J(c, d), c = -54 a, d = 54 b."""
    config = _build_config(p, precision, normalization, vals, units, display, fmt, output)
    params = config.sum_params()
    fld = params.field
    a, b = _parse(fld, a_text), _parse(fld, b_text)
    if a.is_zero() or b.is_zero():
        raise click.BadParameter("a and b must be nonzero")
    start = time.perf_counter()
    try:
        record = matcher.verify_fl(a, b, mode, params, budget=config.brute_budget, c_factor=c_factor)
    except CostGuard as exc:
        raise click.UsageError(f"budget exceeded: {exc}") from exc
    report = matcher.MatchReport(fld, params.symbol_normalization, [record],
                                 (time.perf_counter() - start) * 1000)
    _deliver(ctx, report, config, report.failed)


@main.command("fl-sweep")
@common_options
@click.option("--modes", default="closed-closed", show_default=True,
              help=f"Comma-separated subset of {', '.join(matcher.SWEEP_MODES)}.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.pass_context
def fl_sweep(ctx, p, precision, normalization, vals, units, display, fmt, output, modes, workers):
    """Run the requested verifications over the grid u p^m, w p^n."""
    config = _build_config(p, precision, normalization, vals, units, display, fmt, output)
    params = config.sum_params()
    fld = params.field
    mode_set = {m.strip() for m in modes.split(",") if m.strip()}
    unknown = mode_set - set(matcher.SWEEP_MODES)
    if unknown:
        raise click.UsageError(f"unknown modes {sorted(unknown)}")
    unit_values = [_parse(fld, u) for u in config.units]
    try:
        report = matcher.sweep(config.val_range, unit_values, mode_set, params=params, workers=workers,
                               budget=config.brute_budget, stop_on_failure=False)
    except CostGuard as exc:
        raise click.UsageError(f"budget exceeded: {exc}") from exc
    _deliver(ctx, report, config, report.failed)


@main.command("fl-degenerate")
@common_options
@click.option("--c", "c_text", default=None, help="Single element; otherwise the --vals x --units grid.")
@click.option("--which", type=click.Choice(matcher.DEGENERATE_CASES + ("all",)), default="all", show_default=True)
@click.option("--mode", type=click.Choice(["closed", "brute"]), default="closed", show_default=True)
@click.pass_context
def fl_degenerate(ctx, p, precision, normalization, vals, units, display, fmt, output, c_text, which, mode):
    """Degenerate matchings with their transfer factors."""
    config = _build_config(p, precision, normalization, vals, units, display, fmt, output)
    params = config.sum_params()
    fld = params.field
    if c_text is not None:
        cs = [_parse(fld, c_text)]
        if cs[0].is_zero():
            raise click.BadParameter("c must be nonzero")
    else:
        lo, hi = config.val_range
        cs = [_parse(fld, u) * fld.uniformizer**m for m in range(lo, hi + 1) for u in config.units]
    cases = matcher.DEGENERATE_CASES if which == "all" else (which,)
    start = time.perf_counter()
    records = []
    try:
        for case in cases:
            for c in cs:
                records.append(matcher.verify_degenerate(c, case, mode, params, budget=config.brute_budget))
    except CostGuard as exc:
        raise click.UsageError(f"budget exceeded: {exc}") from exc
    report = matcher.MatchReport(fld, params.symbol_normalization, records, (time.perf_counter() - start) * 1000)
    _deliver(ctx, report, config, report.failed)


# ---------------------------------------------------------------------------
# character sums
# ---------------------------------------------------------------------------


def _exact(value: CycValue) -> dict:
    return value.to_json()


@main.command("sums-table")
@common_options
@click.option("--y-vals", default="0,2", show_default=True, help="Valuation window for the symbol twist y.")
@click.pass_context
def sums_table(ctx, p, precision, normalization, vals, units, display, fmt, output, y_vals):
    """Closed form against coset sum for Kloosterman and cubic integrals on a grid."""
    config = _build_config(p, precision, normalization, vals, units, display, fmt, output)
    params = config.sum_params()
    fld = params.field
    unit_values = [_parse(fld, u) for u in config.units]
    lo, hi = config.val_range
    ylo, yhi = _parse_window(y_vals)
    pi = fld.uniformizer
    start = time.perf_counter()
    rows = []
    grid = [(m, n, u, w) for m in range(lo, hi + 1) for n in range(lo, hi + 1)
            for u in unit_values[:2] for w in unit_values[:2]]
    for m, n, u, w in grid:
        a, b = u * pi**m, w * pi**n
        for yv in range(ylo, yhi + 1):
            y = unit_values[-1] * pi**yv
            closed = sums.kloosterman_closed(y, a, b, params)
            brute = sums.kloosterman_brute(y, a, b, params)
            rows.append({"sum": "K", "val_a": m, "val_b": n, "val_y": yv, "closed": _exact(closed),
                         "brute": _exact(brute), "pass": closed == brute})
        for kind in ("C", "C0"):
            try:
                closed = sums.cubic_closed(kind, a, b)
            except NotCovered:
                continue
            brute = sums.cubic_brute(kind, a, b)
            rows.append({"sum": kind, "val_a": m, "val_b": n, "closed": _exact(closed),
                         "brute": _exact(brute), "pass": closed == brute})
    report = TableReport("sums-table", rows, {"p": fld.p, "normalization": params.symbol_normalization},
                         (time.perf_counter() - start) * 1000)
    _deliver(ctx, report, config, report.failed)


@main.command("identity-check")
@common_options
@click.option("--samples", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def identity_check(ctx, p, precision, normalization, vals, units, display, fmt, output, samples, seed):
    """Random instances of the cubic/Kloosterman identity and the triple cubic identity."""
    config = _build_config(p, precision, normalization, vals, units, display, fmt, output)
    params = config.sum_params()
    fld = params.field
    rng = random.Random(seed)
    start = time.perf_counter()
    rows = []
    for bullet in (1, 2):
        for index in range(samples):
            a, c, d, t = sums.random_di_parameters(fld, rng, bullet)
            lhs, rhs = sums.di_sides(a, c, d, t, params)
            rows.append({"identity": f"di-{bullet}", "index": index,
                         "inputs": [x.to_json() for x in (a, c, d, t)], "pass": lhs == rhs})
    for congruent in (True, False):
        for index in range(samples):
            a, b = sums.random_triple_parameters(fld, rng, congruent)
            lhs, rhs = sums.triple_cubic_sides(a, b)
            rows.append({"identity": "triple-" + ("congruent" if congruent else "other"), "index": index,
                         "inputs": [a.to_json(), b.to_json()], "pass": lhs == rhs})
    report = TableReport("identity-check", rows, {"p": fld.p, "seed": seed,
                                                  "normalization": params.symbol_normalization},
                         (time.perf_counter() - start) * 1000)
    _deliver(ctx, report, config, report.failed)


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------


def _orbit_field(q: int) -> orbits.OrbitField:
    try:
        return orbits.orbit_field(q)
    except InvalidField as exc:
        raise click.UsageError(str(exc)) from exc


@main.command("orbit-classify")
@click.option("--q", "q", type=int, default=7, show_default=True)
@click.option("--xi", "xi_text", required=True, help='Four pairs, e.g. "0,1;0,0;2,0;0,0".')
@click.option("--oracle/--no-oracle", default=False, help="Also run the exhaustive relevance oracle.")
@click.pass_context
def orbit_classify(ctx, q, xi_text, oracle):
    """Invariants, family, canonical representative and relevance of one vector."""
    fld = _orbit_field(q)
    try:
        xi = orbits.OrbitVector.parse(fld, xi_text)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc
    cls = orbits.classify(xi)
    payload = cls.to_json()
    failed = False
    if oracle:
        try:
            verdict = orbits.relevance_oracle(xi, budget=_env_int("CUBICFL_ORACLE_BUDGET", 5_000_000))
        except CostGuard as exc:
            raise click.UsageError(f"budget exceeded: {exc}") from exc
        payload["oracle"] = verdict
        failed = verdict != cls.relevant
    click.echo(json.dumps(payload, sort_keys=True, indent=2))
    ctx.exit(1 if failed else 0)


@main.command("orbit-census")
@click.option("--q", "q", type=int, default=7, show_default=True)
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def orbit_census(ctx, q, samples, seed):
    """Classify random vectors and check the classification along random group moves."""
    fld = _orbit_field(q)
    start = time.perf_counter()
    census = orbits.orbit_census(fld, samples, seed)
    census["timing"] = {"wall_ms": round((time.perf_counter() - start) * 1000, 3)}
    click.echo(json.dumps(census, sort_keys=True, indent=2))
    ctx.exit(1 if census["failures"] else 0)


def run_command(argv: list[str]) -> tuple[int, str]:
    """Run the CLI in-process; returns (exit status, captured stdout)."""
    from click.testing import CliRunner

    result = CliRunner().invoke(main, argv, catch_exceptions=False)
    return result.exit_code, result.output


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
