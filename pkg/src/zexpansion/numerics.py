"""Configurable-precision decimal scalars and dense linear algebra.

Every routine takes an explicit :class:`PrecisionConfig`; nothing here reads
or mutates the thread's ambient :mod:`decimal` context.
"""
from __future__ import annotations

import decimal
from contextlib import contextmanager
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterator, Sequence

__all__ = [
    "HPReal",
    "HPVector",
    "HPMatrix",
    "PrecisionConfig",
    "DecimalParseError",
    "NotPositiveDefiniteError",
    "parse_decimal",
    "format_decimal",
    "from_fraction",
    "dot",
    "matvec",
    "norm_inf",
    "matrix_norm_inf",
    "CholeskyFactor",
    "cholesky_factor",
    "cholesky_solve",
    "significant_digits",
    "matching_significant_digits",
]

HPReal = Decimal
HPVector = tuple  # tuple[Decimal, ...]
HPMatrix = tuple  # tuple[tuple[Decimal, ...], ...]

MIN_DIGITS = 30


@dataclass(frozen=True)
class PrecisionConfig:
    """Working precision in decimal digits, always round-half-even."""

    digits: int
    rounding: str = "round-half-even"

    def __post_init__(self):
        if not isinstance(self.digits, int) or self.digits < MIN_DIGITS:
            raise ValueError(f"digits must be an integer >= {MIN_DIGITS}, got {self.digits!r}")
        if self.rounding != "round-half-even":
            raise ValueError(f"unsupported rounding mode {self.rounding!r}")

    def context(self) -> decimal.Context:
        return decimal.Context(
            prec=self.digits,
            rounding=decimal.ROUND_HALF_EVEN,
            Emax=decimal.MAX_EMAX,
            Emin=decimal.MIN_EMIN,
            traps=[decimal.InvalidOperation, decimal.DivisionByZero, decimal.Overflow],
        )

    @contextmanager
    def local(self) -> Iterator[decimal.Context]:
        with decimal.localcontext(self.context()) as ctx:
            yield ctx

    def extended(self, extra: int) -> "PrecisionConfig":
        return PrecisionConfig(self.digits + extra, self.rounding)

    @property
    def tolerance(self) -> Decimal:
        """Accumulated-rounding slack ``10**(8 - P)`` used throughout."""
        return Decimal(1).scaleb(8 - self.digits)


class DecimalParseError(ValueError):
    def __init__(self, text: str, position: int, reason: str = "unexpected character"):
        self.text = text
        self.position = position
        shown = repr(text[position]) if position < len(text) else "end of input"
        super().__init__(f"malformed decimal {text!r}: {reason} ({shown} at position {position})")


class NotPositiveDefiniteError(ArithmeticError):
    def __init__(self, pivot: int, value: Decimal):
        self.pivot = pivot
        self.value = value
        super().__init__(
            f"matrix is not positive definite: pivot {pivot} = {value:.6E} "
            "(near-linear dependence; reduce the basis or raise the precision)"
        )


def _scan_decimal(s: str) -> int | None:
    """Return the index of the first offending character, or None if ``s`` is valid."""
    i, n = 0, len(s)
    if i < n and s[i] in "+-":
        i += 1
    int_start = i
    while i < n and s[i].isdigit() and s[i].isascii():
        i += 1
    int_digits = i - int_start
    frac_digits = 0
    if i < n and s[i] == ".":
        i += 1
        frac_start = i
        while i < n and s[i].isdigit() and s[i].isascii():
            i += 1
        frac_digits = i - frac_start
    if int_digits + frac_digits == 0:
        return i
    if i < n and s[i] in "eE":
        i += 1
        if i < n and s[i] in "+-":
            i += 1
        exp_start = i
        while i < n and s[i].isdigit() and s[i].isascii():
            i += 1
        if i == exp_start:
            return i
    return None if i == n else i


def parse_decimal(s: str, cfg: PrecisionConfig) -> Decimal:
    """Parse a plain decimal literal, rounding half-even to ``cfg.digits``.

    Accepts ``[sign] digits [. digits] [e[sign]digits]``.  Fractions such as
    ``"5/8"``, NaN, infinities and embedded whitespace are rejected.
    """
    bad = _scan_decimal(s)
    if bad is not None:
        raise DecimalParseError(s, bad)
    return cfg.context().create_decimal(s)


def significant_digits(s: str) -> int:
    """Number of significant digits in a decimal literal (leading zeros excluded)."""
    mantissa = s.lstrip("+-").split("e")[0].split("E")[0].replace(".", "")
    stripped = mantissa.lstrip("0")
    return max(len(stripped), 1)


def format_decimal(x: Decimal, digits: int, cfg: PrecisionConfig | None = None) -> str:
    """Render ``x`` in fixed-point notation with exactly ``digits`` significant digits."""
    limit = cfg.digits if cfg is not None else None
    if not isinstance(digits, int) or digits < 1 or (limit is not None and digits > limit):
        raise ValueError(f"digits must lie in [1, {limit or 'P'}], got {digits!r}")
    if not x.is_finite():
        raise ValueError(f"cannot format non-finite value {x}")
    ctx = decimal.Context(prec=digits, rounding=decimal.ROUND_HALF_EVEN,
                          Emax=decimal.MAX_EMAX, Emin=decimal.MIN_EMIN)
    r = ctx.plus(x)
    exp = (r.adjusted() if r else 0) - digits + 1
    wide = decimal.Context(prec=digits + 2, rounding=decimal.ROUND_HALF_EVEN,
                           Emax=decimal.MAX_EMAX, Emin=decimal.MIN_EMIN)
    r = r.quantize(Decimal(1).scaleb(exp), context=wide)
    text = format(r, "f")
    if text.startswith("-") and not r:
        text = text[1:]
    return text


def from_fraction(q, cfg: PrecisionConfig) -> Decimal:
    """Round an exact rational (``Fraction`` or ``mpq``) once to working precision."""
    ctx = cfg.context()
    return ctx.divide(Decimal(int(q.numerator)), Decimal(int(q.denominator)))


def dot(u: Sequence[Decimal], v: Sequence[Decimal], cfg: PrecisionConfig) -> Decimal:
    ctx = cfg.context()
    acc = Decimal(0)
    mul, add = ctx.multiply, ctx.add
    for a, b in zip(u, v):
        acc = add(acc, mul(a, b))
    return acc


def matvec(A: Sequence[Sequence[Decimal]], x: Sequence[Decimal], cfg: PrecisionConfig) -> HPVector:
    return tuple(dot(row, x, cfg) for row in A)


def norm_inf(x: Sequence[Decimal]) -> Decimal:
    return max((abs(v) for v in x), default=Decimal(0))


def matrix_norm_inf(A: Sequence[Sequence[Decimal]], cfg: PrecisionConfig) -> Decimal:
    ctx = cfg.context()
    best = Decimal(0)
    for row in A:
        s = Decimal(0)
        for v in row:
            s = ctx.add(s, abs(v))
        best = max(best, s)
    return best


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular factor ``L`` with ``A = L L^T``."""

    L: HPMatrix
    cfg: PrecisionConfig

    @property
    def n(self) -> int:
        return len(self.L)

    def solve(self, b: Sequence[Decimal]) -> HPVector:
        n = self.n
        if len(b) != n:
            raise ValueError(f"right-hand side has length {len(b)}, expected {n}")
        L = self.L
        ctx = self.cfg.context()
        mul, sub, div = ctx.multiply, ctx.subtract, ctx.divide
        y = [Decimal(0)] * n
        for i in range(n):
            s = ctx.plus(b[i])
            row = L[i]
            for k in range(i):
                s = sub(s, mul(row[k], y[k]))
            y[i] = div(s, row[i])
        x = [Decimal(0)] * n
        for i in range(n - 1, -1, -1):
            s = y[i]
            for k in range(i + 1, n):
                s = sub(s, mul(L[k][i], x[k]))
            x[i] = div(s, L[i][i])
        return tuple(x)


def cholesky_factor(A: Sequence[Sequence[Decimal]], cfg: PrecisionConfig) -> CholeskyFactor:
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("matrix must be square")
    ctx = cfg.context()
    mul, sub, div = ctx.multiply, ctx.subtract, ctx.divide
    L = [[Decimal(0)] * n for _ in range(n)]
    for j in range(n):
        Lj = L[j]
        s = ctx.plus(A[j][j])
        for k in range(j):
            s = sub(s, mul(Lj[k], Lj[k]))
        if s <= 0:
            raise NotPositiveDefiniteError(j, s)
        d = ctx.sqrt(s)
        Lj[j] = d
        for i in range(j + 1, n):
            Li = L[i]
            t = ctx.plus(A[i][j])
            for k in range(j):
                t = sub(t, mul(Li[k], Lj[k]))
            Li[j] = div(t, d)
    return CholeskyFactor(tuple(tuple(row) for row in L), cfg)


def cholesky_solve(A: Sequence[Sequence[Decimal]], B: Sequence[Decimal], cfg: PrecisionConfig) -> HPVector:
    """Solve ``A x = B`` for symmetric positive definite ``A``."""
    return cholesky_factor(A, cfg).solve(B)


def matching_significant_digits(a: Decimal, b: Decimal) -> int:
    """Leading significant digits shared by ``a`` and ``b`` (by relative difference)."""
    if a == b:
        return max(len(a.as_tuple().digits), len(b.as_tuple().digits))
    if (a < 0) != (b < 0) or not a or not b:
        return 0
    ctx = decimal.Context(prec=30)
    rel = ctx.divide(abs(ctx.subtract(a, b)), max(abs(a), abs(b)))
    return max(0, -rel.adjusted() - 1)
