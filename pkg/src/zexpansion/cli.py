"""Command-line entry point: ``zexpansion <command> ...``.

Exit codes: 0 success, 1 computational failure, 2 usage or input error.
"""
from __future__ import annotations

import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from decimal import Decimal
from pathlib import Path

import click

from .checks import DEFAULT_EXPONENTS, check_integrals
from .hylleraas import enumerate_basis
from .numerics import DecimalParseError, NotPositiveDefiniteError, PrecisionConfig, format_decimal
from .operators import assemble, dump_matrices as write_matrices
from .perturbation import BasisDegeneracyError, run_recursion, to_series
from .reference import (
    FileFormatError,
    compare_table,
    format_coefficient_file,
    parse_coefficient_file,
    parse_reference_file,
    resolve_input,
)
from .series import (
    ChargeSpec,
    SeriesAnalysisError,
    domb_sykes_radius,
    parse_charge_list,
    ratio_radius,
    sum_energy,
)

DIGITS_ENV = "ZEXPANSION_DIGITS"
FORMATS = ("text", "csv", "json")


@dataclass
class RunConfig:
    command: str
    digits: int
    output_format: str = "text"
    omega: int | None = None
    alpha: str | None = None
    extra_alphas: list[str] = field(default_factory=list)
    order: int | None = None
    z_list: list[str] = field(default_factory=list)
    inputs: dict = field(default_factory=dict)
    output: str | None = None
    options: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v not in (None, [], {})}

    def header_lines(self) -> list[str]:
        return [f"{k}: {json.dumps(v, sort_keys=True)}" for k, v in self.as_dict().items()]


class InputError(Exception):
    pass


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _resolve(spec: str) -> Path:
    try:
        return resolve_input(spec)
    except FileNotFoundError as exc:
        raise InputError(str(exc)) from None


def write_output(text: str, output: str | None) -> None:
    """Write ``text`` to stdout or atomically to ``output`` (temp file + rename)."""
    if output in (None, "-"):
        click.echo(text, nl=False)
        return
    target = Path(output)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _commented(cfg: RunConfig) -> str:
    return "".join(f"# {line}\n" for line in cfg.header_lines())


def _table(rows: list[dict], columns: list[str], fmt: str, cfg: RunConfig) -> str:
    if fmt == "json":
        return json.dumps({"config": cfg.as_dict(), "rows": rows}, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)
        return _commented(cfg) + buf.getvalue()
    cells = [[str(r.get(c, "")) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) if cells else len(c) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return _commented(cfg) + "\n".join(lines) + "\n"


def _run(fn):
    """Map library exceptions onto the exit-code contract."""
    try:
        fn()
    except InputError as exc:
        _fail(2, str(exc))
    except (FileFormatError, DecimalParseError) as exc:
        _fail(2, str(exc))
    except (BasisDegeneracyError, NotPositiveDefiniteError, SeriesAnalysisError, ArithmeticError) as exc:
        _fail(1, str(exc))
    except ValueError as exc:
        _fail(1, str(exc))


digits_option = click.option(
    "--digits", type=click.IntRange(min=30), envvar=DIGITS_ENV, default=40, show_default=True,
    show_envvar=True, help="Working precision P in decimal digits.")
format_option = click.option("--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True)
output_option = click.option("--output", "-o", default="-", show_default=True, help="Output path ('-' for stdout).")


@click.group()
def main():
    """1/Z perturbation coefficients, energy sums and digit audits for two-electron ions."""


@main.command("compute-coeffs")
@click.option("--omega", type=click.IntRange(min=0), default=8, show_default=True, help="Pekeris shell size.")
@click.option("--order", type=click.IntRange(min=1), default=6, show_default=True)
@click.option("--alpha", default="1", show_default=True, help="Exponent of the reference shell.")
@click.option("--extra-alpha", "extra_alphas", multiple=True, default=("2", "4"), show_default=True,
              help="Exponent of an additional shell (repeatable).")
@click.option("--single-shell", is_flag=True, help="Use only the reference shell.")
@click.option("--check-digits/--no-check-digits", default=True, show_default=True,
              help="Rerun at P+10 digits to estimate trusted digits.")
@click.option("--dump-matrices", type=click.Path(dir_okay=False), default=None,
              help="Also write S, H0, V at full precision to this file.")
@digits_option
@output_option
def compute_coeffs(omega, order, alpha, extra_alphas, single_shell, check_digits, dump_matrices, digits, output):
    """Run the perturbation recursion and write a coefficient file."""
    extra = [] if single_shell else list(extra_alphas)
    cfg = RunConfig("compute-coeffs", digits, omega=omega, alpha=alpha, extra_alphas=extra, order=order,
                    output=output, options={"check_digits": check_digits})

    def go():
        prec = PrecisionConfig(digits)
        try:
            basis = enumerate_basis(omega, Decimal(alpha), [Decimal(a) for a in extra])
        except (ArithmeticError, ValueError) as exc:
            raise InputError(f"bad basis specification: {exc}") from None
        ops = assemble(basis, prec)
        if dump_matrices:
            buf = io.StringIO()
            write_matrices(ops, buf)
            write_output(_commented(cfg) + buf.getvalue(), dump_matrices)
        state = run_recursion(ops, order, prec)
        series = to_series(state, check_digits=check_digits)
        header = cfg.header_lines() + [f"basis: {basis.describe()}"]
        write_output(format_coefficient_file(series, header), output)
        diag = sys.stderr if output in (None, "-") else sys.stdout
        for (n, value), trusted in zip(series.entries, series.digits_trusted):
            t = "unchecked" if trusted is None else f"{trusted} stable digits (P vs P+10)"
            print(f"e_{n} = {format_decimal(value, min(25, digits))}  {t}", file=diag)

    _run(go)


@main.command("sum-energy")
@click.option("--input", "input_spec", required=True, help="Coefficient file (or bundled:<name>).")
@click.option("--z", "z_text", default="1..12", show_default=True, help="Charges: '2', '1..12', '1,2,5/2'.")
@click.option("--print-digits", type=click.IntRange(min=1), default=18, show_default=True,
              help="Significant digits of printed energies.")
@digits_option
@format_option
@output_option
def sum_energy_cmd(input_spec, z_text, print_digits, digits, fmt, output):
    """Sum E(Z) = Z^2 sum e_n Z^-n for each charge."""
    if print_digits > digits:
        _fail(2, f"--print-digits {print_digits} exceeds working precision {digits}")
    try:
        charges = parse_charge_list(z_text)
    except ValueError as exc:
        _fail(2, str(exc))
    cfg = RunConfig("sum-energy", digits, fmt, z_list=[str(z) for z in charges], inputs={"input": input_spec},
                    output=output, options={"print_digits": print_digits})

    def go():
        prec = PrecisionConfig(digits)
        series = parse_coefficient_file(_resolve(input_spec), prec)
        rows = []
        for Z in charges:
            r = sum_energy(series, ChargeSpec.of(Z, prec), prec)
            tail = "inf" if not r.tail_bound.is_finite() else format_decimal(r.tail_bound, 3)
            rows.append({"Z": str(Z), "energy": format_decimal(r.energy, print_digits),
                         "order_used": r.order_used, "tail_bound": tail})
        write_output(_table(rows, ["Z", "energy", "order_used", "tail_bound"], fmt, cfg), output)

    _run(go)


def _parse_window(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise click.BadParameter(f"expected LO:HI, got {text!r}") from None


@main.command("analyze-series")
@click.option("--input", "input_spec", required=True, help="Coefficient file (or bundled:<name>).")
@click.option("--method", type=click.Choice(["ratio", "domb-sykes", "both"]), default="both", show_default=True)
@click.option("--window", required=True, help="Inclusive index range LO:HI of the ratios used.")
@digits_option
@format_option
@output_option
def analyze_series(input_spec, method, window, digits, fmt, output):
    """Estimate the radius of convergence of a coefficient series."""
    lo, hi = _parse_window(window)
    cfg = RunConfig("analyze-series", digits, fmt, inputs={"input": input_spec}, output=output,
                    options={"method": method, "window": f"{lo}:{hi}"})

    def go():
        prec = PrecisionConfig(digits)
        series = parse_coefficient_file(_resolve(input_spec), prec)
        methods = {"ratio": [ratio_radius], "domb-sykes": [domb_sykes_radius],
                   "both": [ratio_radius, domb_sykes_radius]}[method]
        rows = []
        for fn in methods:
            est = fn(series, (lo, hi), prec)
            gamma = est.metadata.get("gamma")
            rows.append({"method": est.method, "window": f"{lo}:{hi}",
                         "lambda_star": format_decimal(est.lambda_star, 20),
                         "critical_charge": format_decimal(1 / est.lambda_star, 20) if est.lambda_star else "",
                         "residual": format_decimal(est.residual, 3),
                         "gamma": "" if gamma is None else format_decimal(gamma, 10)})
        cols = ["method", "window", "lambda_star", "critical_charge", "residual", "gamma"]
        write_output(_table(rows, cols, fmt, cfg), output)

    _run(go)


@main.command("compare")
@click.option("--coeffs", "coeff_spec", required=True, help="Coefficient file (or bundled:<name>).")
@click.option("--refs", "ref_spec", required=True, help="Reference energy file (or bundled:<name>).")
@click.option("--require", type=click.IntRange(min=0), default=None,
              help="Exit 1 if any comparable, un-annotated row matches fewer decimal digits.")
@digits_option
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@output_option
def compare_cmd(coeff_spec, ref_spec, require, digits, fmt, output):
    """Sum the series at each reference charge and count agreeing decimal digits."""
    cfg = RunConfig("compare", digits, fmt, inputs={"coeffs": coeff_spec, "refs": ref_spec}, output=output,
                    options={"require": require})

    def go():
        prec = PrecisionConfig(digits)
        series = parse_coefficient_file(_resolve(coeff_spec), prec)
        refs = parse_reference_file(_resolve(ref_spec))
        report = compare_table(series, refs, prec)
        text = report.to_json(cfg.as_dict()) if fmt == "json" else _commented(cfg) + report.to_text()
        write_output(text, output)
        if require is not None:
            short = [r.Z for r in report.rows if r.note is None
                     and r.agreement.matching_decimal_digits < require]
            if short:
                _fail(1, f"rows below {require} matching decimal digits: Z = {short}")

    _run(go)


@main.command("check-integrals")
@click.option("--max-power", type=click.IntRange(min=0), default=4, show_default=True)
@click.option("--quad-digits", type=click.IntRange(min=10), default=20, show_default=True)
@click.option("--required", type=click.IntRange(min=1), default=18, show_default=True,
              help="Minimum agreeing significant digits.")
@click.option("--nested", is_flag=True, help="Use full two-dimensional quadrature (slow).")
@digits_option
@format_option
@output_option
def check_integrals_cmd(max_power, quad_digits, required, nested, digits, fmt, output):
    """Compare closed-form radial integrals with numerical quadrature."""
    method = "nested" if nested else "ratio"
    cfg = RunConfig("check-integrals", digits, fmt, output=output,
                    options={"max_power": max_power, "quad_digits": quad_digits, "required": required,
                             "method": method, "exponents": [list(e) for e in DEFAULT_EXPONENTS]})
    failures = []

    def go():
        prec = PrecisionConfig(digits)
        rows = []
        for chk in check_integrals(max_power, cfg=prec, quad_digits=quad_digits, method=method):
            ok = chk.passed(required)
            if not ok:
                failures.append(chk)
            rows.append({"l": chk.powers[0], "m": chk.powers[1], "n": chk.powers[2],
                         "alpha": chk.exponents[0], "beta": chk.exponents[1],
                         "closed_form": format_decimal(chk.closed_form, quad_digits + 2),
                         "quadrature": chk.quadrature, "digits": chk.digits, "ok": "pass" if ok else "FAIL"})
        cols = ["l", "m", "n", "alpha", "beta", "closed_form", "quadrature", "digits", "ok"]
        write_output(_table(rows, cols, fmt, cfg), output)

    _run(go)
    summary = f"{'all' if not failures else len(failures)} checks {'passed' if not failures else 'FAILED'}"
    click.echo(summary, err=True)
    if failures:
        sys.exit(1)


if __name__ == "__main__":
    main()
