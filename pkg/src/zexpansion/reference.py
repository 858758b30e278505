"""Coefficient/reference file formats, digit-agreement audits and comparison reports.

Decimal strings are the exchange form everywhere; no value passes through a
binary float on its way in or out.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .numerics import DecimalParseError, PrecisionConfig, format_decimal, parse_decimal, significant_digits
from .perturbation import CoefficientSeries, Computed, Ingested
from .series import ChargeSpec, EnergyResult, sum_energy

__all__ = [
    "FileFormatError",
    "ReferenceRow",
    "ReferenceEnergyTable",
    "DigitAgreement",
    "ComparisonRow",
    "ComparisonReport",
    "BUNDLED",
    "bundled_path",
    "resolve_input",
    "parse_coefficient_text",
    "parse_coefficient_file",
    "format_coefficient_file",
    "parse_reference_text",
    "parse_reference_file",
    "digit_agreement",
    "compare_table",
]

BUNDLED = ("tableI.coeff", "tableII.refs", "tableII_perturbative.refs", "hminus_sums.refs",
           "synthetic_geometric.coeff")
BUNDLED_PREFIX = "bundled:"

# Sources whose published precision is far below the perturbative sums.
SOURCE_NOTES = {
    "thakkar-1977": "older variational value; agreement expected only to ~5 decimals",
}


class FileFormatError(ValueError):
    def __init__(self, source: str, line: int | None, message: str):
        self.source = source
        self.line = line
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


def bundled_path(name: str) -> Path:
    if name not in BUNDLED:
        raise FileNotFoundError(f"no bundled data file {name!r}; available: {', '.join(BUNDLED)}")
    return Path(str(resources.files("zexpansion") / "data" / name))


def resolve_input(spec: str) -> Path:
    """A filesystem path, or ``bundled:<name>`` for the packaged tables.

    A bare bundled name that does not exist as a local file also resolves to
    the packaged copy.
    """
    if spec.startswith(BUNDLED_PREFIX):
        return bundled_path(spec[len(BUNDLED_PREFIX):])
    path = Path(spec)
    if not path.is_file() and spec in BUNDLED:
        return bundled_path(spec)
    if not path.is_file():
        raise FileNotFoundError(f"input file not found: {spec}")
    return path


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _exact_cfg(literal: str, cfg: PrecisionConfig | None) -> PrecisionConfig:
    # never round an ingested literal: widen the precision to hold it
    need = significant_digits(literal)
    base = cfg.digits if cfg is not None else 40
    return PrecisionConfig(max(base, need, 30))


def _parse_value(literal: str, source: str, lineno: int, cfg) -> Decimal:
    try:
        return parse_decimal(literal, _exact_cfg(literal, cfg))
    except DecimalParseError as exc:
        raise FileFormatError(source, lineno, str(exc)) from None


def parse_coefficient_text(text: str, source: str, cfg: PrecisionConfig | None = None,
                           digits_trusted: Sequence[int | None] = ()) -> CoefficientSeries:
    """Parse ``n value`` lines; indices must run 0, 1, 2, ... without gaps."""
    values: list[Decimal] = []
    for lineno, line in _data_lines(text):
        head, *rest = line.split(None, 1)
        try:
            n = int(head)
        except ValueError:
            raise FileFormatError(source, lineno, f"bad index {head!r}") from None
        literal = "".join(rest[0].split()) if rest else ""
        if not literal:
            raise FileFormatError(source, lineno, f"missing value for n={n}")
        expected = len(values)
        if n < expected:
            raise FileFormatError(source, lineno, f"duplicate index n={n}")
        if n > expected:
            raise FileFormatError(source, lineno, f"gap in indices: missing n={expected}")
        values.append(_parse_value(literal, source, lineno, cfg))
    if not values:
        raise FileFormatError(source, None, "no coefficients found")
    return CoefficientSeries.from_values(values, Ingested(source), tuple(digits_trusted))


def parse_coefficient_file(path, cfg: PrecisionConfig | None = None,
                           digits_trusted: Sequence[int | None] = ()) -> CoefficientSeries:
    if isinstance(path, str):
        path = resolve_input(path)
    path = Path(path)
    return parse_coefficient_text(path.read_text(encoding="utf-8"), str(path), cfg, digits_trusted)


def _coefficient_literal(value: Decimal, series: CoefficientSeries) -> str:
    if isinstance(series.provenance, Computed):
        return format_decimal(value, series.provenance.digits)
    return format(value, "f")


def format_coefficient_file(series: CoefficientSeries, header: Iterable[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines.append(f"# provenance: {series.provenance.describe()}")
    if any(d is not None for d in series.digits_trusted):
        trusted = " ".join("-" if d is None else str(d) for d in series.digits_trusted)
        lines.append(f"# digits_trusted: {trusted}")
    lines.append("# format: n value")
    for n, value in series.entries:
        lines.append(f"{n} {_coefficient_literal(value, series)}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ReferenceRow:
    Z: int
    energy: str
    source: str


@dataclass(frozen=True)
class ReferenceEnergyTable:
    rows: tuple[ReferenceRow, ...]

    def __post_init__(self):
        seen = set()
        for row in self.rows:
            key = (row.Z, row.source)
            if key in seen:
                raise ValueError(f"duplicate Z={row.Z} for source {row.source!r}")
            seen.add(key)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


def parse_reference_text(text: str, source: str) -> ReferenceEnergyTable:
    rows = []
    seen = set()
    for lineno, line in _data_lines(text):
        parts = line.split()
        if len(parts) != 3:
            raise FileFormatError(source, lineno, "expected 'Z energy source-tag'")
        z_text, energy, tag = parts
        try:
            Z = int(z_text)
        except ValueError:
            raise FileFormatError(source, lineno, f"bad nuclear charge {z_text!r}") from None
        if Z < 1:
            raise FileFormatError(source, lineno, f"nuclear charge must be positive, got {Z}")
        _parse_value(energy, source, lineno, None)
        if (Z, tag) in seen:
            raise FileFormatError(source, lineno, f"duplicate Z={Z} for source {tag!r}")
        seen.add((Z, tag))
        rows.append(ReferenceRow(Z, energy, tag))
    return ReferenceEnergyTable(tuple(rows))


def parse_reference_file(path) -> ReferenceEnergyTable:
    if isinstance(path, str):
        path = resolve_input(path)
    path = Path(path)
    return parse_reference_text(path.read_text(encoding="utf-8"), str(path))


@dataclass(frozen=True)
class DigitAgreement:
    """Digit-level comparison of two decimal strings.

    ``matching_decimal_digits`` counts identical fraction digits before the
    first disagreement; ``first_disagreement_position`` is that 1-based
    fraction position (``None`` when one expansion is a prefix of the other).
    ``accuracy_digits`` is ``floor(-log10 |a - b|)``, the magnitude-based
    view (``None`` for equal values).
    """

    a: str
    b: str
    matching_decimal_digits: int
    first_disagreement_position: int | None
    comparable: bool = True
    flag: str | None = None
    accuracy_digits: int | None = None


def _fixed(text: str) -> str:
    literal = "".join(text.split())
    return format(parse_decimal(literal, _exact_cfg(literal, None)), "f")


def _accuracy_digits(diff: Decimal) -> int | None:
    """``floor(-log10 |diff|)``."""
    if not diff:
        return None
    diff = abs(diff)
    exp = diff.adjusted()
    on_power_of_ten = diff.scaleb(-exp) == 1
    return -exp if on_power_of_ten else -exp - 1


def digit_agreement(a: str, b: str) -> DigitAgreement:
    fa, fb = _fixed(a), _fixed(b)
    neg_a, neg_b = fa.startswith("-"), fb.startswith("-")
    ia, _, fra = fa.lstrip("-").partition(".")
    ib, _, frb = fb.lstrip("-").partition(".")
    accuracy = _accuracy_digits(Decimal(fa) - Decimal(fb))
    if neg_a != neg_b and (Decimal(fa) or Decimal(fb)):
        return DigitAgreement(a, b, 0, None, False, "sign mismatch", accuracy)
    if len(ia) != len(ib):
        return DigitAgreement(a, b, 0, None, False, "integer parts differ in magnitude", accuracy)
    if ia != ib:
        return DigitAgreement(a, b, 0, None, False, "integer parts differ", accuracy)
    count = 0
    for x, y in zip(fra, frb):
        if x != y:
            return DigitAgreement(a, b, count, count + 1, True, None, accuracy)
        count += 1
    return DigitAgreement(a, b, count, None, True, None, accuracy)


@dataclass(frozen=True)
class ComparisonRow:
    Z: int
    source: str
    reference: str
    computed: str
    result: EnergyResult = field(repr=False)
    agreement: DigitAgreement
    note: str | None = None

    def as_dict(self) -> dict:
        r = self.result
        tail = "inf" if not r.tail_bound.is_finite() else format_decimal(r.tail_bound, 6)
        return {
            "Z": self.Z,
            "source": self.source,
            "reference": self.reference,
            "computed": self.computed,
            "order_used": r.order_used,
            "tail_bound": tail,
            "matching_decimal_digits": self.agreement.matching_decimal_digits,
            "first_disagreement_position": self.agreement.first_disagreement_position,
            "accuracy_digits": self.agreement.accuracy_digits,
            "comparable": self.agreement.comparable,
            "flag": self.agreement.flag,
            "note": self.note,
        }


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]
    provenance: str
    digits: int

    def to_json(self, config: dict | None = None) -> str:
        doc = {"provenance": self.provenance, "digits": self.digits,
               "rows": [row.as_dict() for row in self.rows]}
        if config is not None:
            doc = {"config": config, **doc}
        return json.dumps(doc, indent=2) + "\n"

    def to_text(self) -> str:
        head = ("Z", "computed", "reference", "match", "acc", "tail", "source")
        body = []
        for row in self.rows:
            d = row.as_dict()
            body.append((str(row.Z), row.computed, row.reference, str(d["matching_decimal_digits"]),
                         "-" if d["accuracy_digits"] is None else str(d["accuracy_digits"]),
                         d["tail_bound"], row.source + (" *" if row.note else "")))
        widths = [max(len(r[i]) for r in [head] + body) for i in range(len(head))]
        out = ["  ".join(c.rjust(w) if i < 6 else c for i, (c, w) in enumerate(zip(r, widths))).rstrip()
               for r in [head] + body]
        notes = sorted({f"* {row.source}: {row.note}" for row in self.rows if row.note})
        return "\n".join(out + notes) + "\n"

    def write(self, stream: TextIO, fmt: str = "text", config: dict | None = None) -> None:
        stream.write(self.to_json(config) if fmt == "json" else self.to_text())


def _decimal_places(text: str) -> int:
    fixed = _fixed(text)
    return len(fixed.partition(".")[2])


def compare_table(series: CoefficientSeries, refs: ReferenceEnergyTable, cfg: PrecisionConfig) -> ComparisonReport:
    """Sum the series at every reference charge and audit the digits."""
    if not len(refs):
        raise ValueError("reference table is empty")
    rows = []
    for ref in refs:
        result = sum_energy(series, ChargeSpec.of(Fraction(ref.Z), cfg), cfg)
        places = _decimal_places(ref.energy)
        with cfg.local():
            rounded = result.energy.quantize(Decimal(1).scaleb(-places))
        computed = format(rounded, "f")
        rows.append(ComparisonRow(ref.Z, ref.source, ref.energy, computed, result,
                                  digit_agreement(computed, ref.energy), SOURCE_NOTES.get(ref.source)))
    return ComparisonReport(tuple(rows), series.provenance.describe(), cfg.digits)
