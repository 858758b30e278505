"""Singlet Hylleraas basis and the closed-form three-body radial integral."""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from gmpy2 import mpq

from .numerics import PrecisionConfig, from_fraction

__all__ = [
    "HylleraasTerm",
    "BasisSet",
    "IntegralDomainError",
    "basis_size",
    "enumerate_basis",
    "radial_integral",
    "radial_integral_exact",
]


class IntegralDomainError(ValueError):
    pass


@dataclass(frozen=True)
class HylleraasTerm:
    """Symmetrized ``(r1^i r2^j + r1^j r2^i) r12^k exp(-alpha (r1 + r2))``, halved when ``i == j``."""

    i: int
    j: int
    k: int
    alpha: Decimal

    def __post_init__(self):
        if min(self.i, self.j, self.k) < 0:
            raise ValueError(f"negative power in {self.powers}")
        if self.i > self.j:
            raise ValueError(f"non-canonical term {self.powers}: need i <= j")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @property
    def powers(self) -> tuple[int, int, int]:
        return (self.i, self.j, self.k)

    @property
    def degree(self) -> int:
        return self.i + self.j + self.k

    def monomials(self) -> tuple[tuple[int, int, int], ...]:
        """Unsymmetrized ``(p1, p2, p12)`` monomials, each with unit weight."""
        if self.i == self.j:
            return ((self.i, self.i, self.k),)
        return ((self.i, self.j, self.k), (self.j, self.i, self.k))


def _shell_order(t: tuple[int, int, int]):
    i, j, k = t
    return (i + j + k, k, j, i)


def _canonical_triples(omega: int) -> list[tuple[int, int, int]]:
    out = []
    for s in range(omega + 1):
        for k in range(s + 1):
            for i in range((s - k) // 2 + 1):
                out.append((i, s - k - i, k))
    return sorted(out, key=_shell_order)


def basis_size(omega: int) -> int:
    """Number of canonical triples ``i <= j`` with ``i + j + k <= omega``."""
    if omega < 0:
        raise ValueError("omega must be >= 0")
    return sum((s - k) // 2 + 1 for s in range(omega + 1) for k in range(s + 1))


@dataclass(frozen=True)
class BasisSet:
    """Pekeris-shell basis.

    The first block uses ``alpha``; each exponent in ``extra_alphas`` appends
    another complete shell of the same ``omega``.  Term 0 is always
    ``exp(-alpha (r1 + r2))``.
    """

    terms: tuple[HylleraasTerm, ...]
    omega: int
    alpha: Decimal
    extra_alphas: tuple[Decimal, ...] = ()

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __getitem__(self, idx):
        return self.terms[idx]

    def describe(self) -> str:
        ex = ",".join(str(a) for a in self.extra_alphas) or "none"
        return f"omega={self.omega} alpha={self.alpha} extra_alphas={ex} size={len(self.terms)}"


def _positive(value) -> Decimal:
    value = Decimal(value)
    if not value.is_finite() or not value > 0:
        raise ValueError(f"exponent must be positive, got {value}")
    return value


def enumerate_basis(omega: int, alpha, extra_alphas=()) -> BasisSet:
    """All canonical triples with ``i + j + k <= omega``, ordered by ``(i+j+k, k, j, i)``."""
    if omega < 0:
        raise ValueError("omega must be >= 0")
    alpha = _positive(alpha)
    extra = tuple(_positive(a) for a in extra_alphas)
    if alpha in extra or len(set(extra)) != len(extra):
        raise ValueError("exponent shells must be distinct")
    triples = _canonical_triples(omega)
    terms = tuple(HylleraasTerm(i, j, k, a) for a in (alpha,) + extra for i, j, k in triples)
    return BasisSet(terms, omega, alpha, extra)


def _wedge(p: int, q: int, inner, outer):
    # int_0^inf dx x^q e^{-outer x} int_x^inf dy y^p e^{-inner y}
    total = inner + outer
    fp = factorial(p)
    acc = mpq(0)
    for t in range(p + 1):
        acc += mpq(fp // factorial(t) * factorial(q + t)) / (inner ** (p - t + 1) * total ** (q + t + 1))
    return acc


@lru_cache(maxsize=None)
def integral_mpq(l: int, m: int, n: int, alpha, beta):
    """Exact radial integral for ``mpq`` exponents (cached)."""
    if min(l, m, n) < -1:
        raise IntegralDomainError(f"divergent or unsupported powers (l, m, n) = {(l, m, n)}")
    if alpha <= 0 or beta <= 0:
        raise IntegralDomainError("exponents must be positive")
    N = n + 2
    a, b = l + 1, m + 1
    # (r1 + r2)^N part factorizes into two Laplace integrals
    plus = mpq(0)
    for k in range(N + 1):
        plus += mpq(comb(N, k) * factorial(a + k) * factorial(b + N - k)) / (
            alpha ** (a + k + 1) * beta ** (b + N - k + 1))
    # |r1 - r2|^N part, split at r1 = r2
    minus = mpq(0)
    for k in range(N + 1):
        c = -comb(N, k) if (N - k) % 2 else comb(N, k)
        minus += c * _wedge(a + k, b + N - k, alpha, beta)
        minus += c * _wedge(b + k, a + N - k, beta, alpha)
    return (plus - minus) / N


def radial_integral_exact(l: int, m: int, n: int, alpha, beta) -> Fraction:
    """Exact value of

    ``int dr1 dr2 dr12 r1^(l+1) r2^(m+1) r12^(n+1) exp(-alpha r1 - beta r2)``

    over the triangle domain ``|r1 - r2| <= r12 <= r1 + r2``, for rational
    (or exactly decimal) exponents.  Any ``l, m, n >= -1`` converges.
    """
    q = integral_mpq(l, m, n, mpq(Fraction(alpha)), mpq(Fraction(beta)))
    return Fraction(int(q.numerator), int(q.denominator))


def _exact(x) -> Fraction:
    if isinstance(x, (int, Fraction, Decimal)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(Decimal(x))
    raise TypeError(f"exponent must be int, Fraction, Decimal or str, not {type(x).__name__}")


def radial_integral(l: int, m: int, n: int, alpha, beta, cfg: PrecisionConfig) -> Decimal:
    """Closed-form radial integral, rounded once to working precision.

    The six-dimensional S-state integral of
    ``r1^l r2^m r12^n exp(-alpha r1 - beta r2)`` is ``8 pi^2`` times this.
    """
    fa, fb = _exact(alpha), _exact(beta)
    return from_fraction(radial_integral_exact(l, m, n, fa, fb), cfg)
