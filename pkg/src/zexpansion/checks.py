"""Numerical-quadrature cross-check of the closed-form radial integrals.

The elementary ``r12`` integral is done analytically.  On each half of the
``(r1, r2)`` quadrant the ratio ``t = r_small / r_large`` separates from the
overall scale; ``method="nested"`` integrates both numerically, while the
default ``method="ratio"`` does the scale integral as a Gamma function and
leaves a one-dimensional tanh-sinh quadrature over ``t``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from decimal import Decimal

import mpmath

from .hylleraas import radial_integral
from .numerics import PrecisionConfig, matching_significant_digits

__all__ = ["IntegralCheck", "quadrature_integral", "check_integrals", "DEFAULT_EXPONENTS"]

DEFAULT_EXPONENTS = (("2", "2"), ("2", "3"), ("1.5", "2.5"))


def quadrature_integral(l: int, m: int, n: int, alpha, beta, dps: int = 30, method: str = "ratio") -> mpmath.mpf:
    ctx = mpmath.MPContext()
    ctx.dps = dps
    a, b = ctx.mpf(str(alpha)), ctx.mpf(str(beta))
    N = n + 2
    if method == "ratio":
        K = l + m + n + 5
        gamma = ctx.factorial(K)

        def lower_t(t):
            shape = t ** (m + 1) * ((1 + t) ** N - (1 - t) ** N) / N
            return shape * gamma / (a + b * t) ** (K + 1)

        def upper_t(t):
            shape = t ** (l + 1) * ((1 + t) ** N - (1 - t) ** N) / N
            return shape * gamma / (b + a * t) ** (K + 1)

        return ctx.quad(lower_t, [0, 1]) + ctx.quad(upper_t, [0, 1])
    if method != "nested":
        raise ValueError(f"unknown quadrature method {method!r}")

    # substitute r2 = t r1 (resp. r1 = t r2) with t in [0, 1]; r12 done analytically
    def lower(r, t):
        r1, r2 = r, t * r
        inner = ((r1 + r2) ** N - (r1 - r2) ** N) / N
        return r * r1 ** (l + 1) * r2 ** (m + 1) * inner * ctx.exp(-a * r1 - b * r2)

    def upper(r, t):
        r1, r2 = t * r, r
        inner = ((r1 + r2) ** N - (r2 - r1) ** N) / N
        return r * r1 ** (l + 1) * r2 ** (m + 1) * inner * ctx.exp(-a * r1 - b * r2)

    total = ctx.quad(lower, [0, ctx.inf], [0, 1]) + ctx.quad(upper, [0, ctx.inf], [0, 1])
    return total


@dataclass(frozen=True)
class IntegralCheck:
    powers: tuple[int, int, int]
    exponents: tuple[str, str]
    closed_form: Decimal
    quadrature: str
    digits: int

    def passed(self, required: int) -> bool:
        return self.digits >= required


def check_integrals(max_power: int = 4, exponents=DEFAULT_EXPONENTS, cfg: PrecisionConfig | None = None,
                    quad_digits: int = 20, min_power: int = 0, method: str = "ratio"):
    """Yield one :class:`IntegralCheck` per ``(l, m, n)`` and exponent pair.

    The quadrature runs with four guard digits and is reported to ``quad_digits``.
    """
    cfg = cfg or PrecisionConfig(40)
    powers = range(min_power, max_power + 1)
    for (alpha, beta), (l, m, n) in itertools.product(exponents, itertools.product(powers, repeat=3)):
        exact = radial_integral(l, m, n, Decimal(alpha), Decimal(beta), cfg)
        quad = quadrature_integral(l, m, n, alpha, beta, quad_digits + 4, method)
        quad_text = mpmath.nstr(quad, quad_digits, strip_zeros=False)
        agree = matching_significant_digits(exact, Decimal(quad_text))
        yield IntegralCheck((l, m, n), (alpha, beta), exact, quad_text, agree)
