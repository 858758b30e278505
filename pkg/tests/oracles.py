"""Independent reference computations used only by the tests.

Nothing here imports the production integral or recursion code: matrices are
built by sympy (Laplacian form of the kinetic energy, symbolic integration in
r1, r2, r12), and the low-order coefficients come from an exact bordered
linear solve plus the 2n+1 rule for e_3.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

import sympy as sp

r1, r2, r12 = sp.symbols("r1 r2 r12", positive=True)


def brute_force_triples(omega: int) -> list[tuple[int, int, int]]:
    out = [(i, j, k) for i, j, k in itertools.product(range(omega + 1), repeat=3)
           if i <= j and i + j + k <= omega]
    return sorted(out, key=lambda t: (sum(t), t[2], t[1], t[0]))


@lru_cache(maxsize=None)
def monomial_integral(p1: int, p2: int, p12: int, a: Fraction) -> Fraction:
    """Integral of r1^p1 r2^p2 r12^p12 exp(-a (r1 + r2)) against r1 r2 r12 dr1 dr2 dr12."""
    a_ = sp.Rational(a.numerator, a.denominator)
    total = sp.Integer(0)
    for q1, q2 in ((p1, p2), (p2, p1)):  # region r2 < r1, then its mirror image
        inner = sp.integrate(r12 ** (p12 + 1), (r12, r1 - r2, r1 + r2))
        mid = sp.integrate(sp.expand(inner * r2 ** (q2 + 1)) * sp.exp(-a_ * r2), (r2, 0, r1))
        outer = sp.integrate(sp.expand(mid * r1 ** (q1 + 1) * sp.exp(-a_ * r1)), (r1, 0, sp.oo))
        total += outer
    q = sp.nsimplify(sp.simplify(total))
    return Fraction(int(q.p), int(q.q))


def _laplacian(f):
    c1 = (r1 ** 2 + r12 ** 2 - r2 ** 2) / (2 * r1 * r12)
    c2 = (r2 ** 2 + r12 ** 2 - r1 ** 2) / (2 * r2 * r12)
    lap1 = sp.diff(f, r1, 2) + 2 / r1 * sp.diff(f, r1) + sp.diff(f, r12, 2) + 2 / r12 * sp.diff(f, r12) \
        + 2 * c1 * sp.diff(f, r1, r12)
    lap2 = sp.diff(f, r2, 2) + 2 / r2 * sp.diff(f, r2) + sp.diff(f, r12, 2) + 2 / r12 * sp.diff(f, r12) \
        + 2 * c2 * sp.diff(f, r2, r12)
    return lap1 + lap2


def _poly(i, j, k):
    if i == j:
        return r1 ** i * r2 ** i * r12 ** k
    return (r1 ** i * r2 ** j + r1 ** j * r2 ** i) * r12 ** k


def _integrate_laurent(expr, a: Fraction) -> Fraction:
    total = Fraction(0)
    for term, coeff in sp.expand(expr).as_coefficients_dict().items():
        powers = sp.Poly(term * r1 ** 8 * r2 ** 8 * r12 ** 8, r1, r2, r12).monoms()[0]
        p1, p2, p12 = (e - 8 for e in powers)
        c = sp.Rational(coeff)
        total += Fraction(int(c.p), int(c.q)) * monomial_integral(p1, p2, p12, a)
    return total


def symbolic_matrices(triples, alpha: int = 1):
    """Exact ``(S, H0, V)`` as lists of Fractions for a single-exponent basis."""
    exp = sp.exp(-alpha * (r1 + r2))
    polys = [_poly(*t) for t in triples]
    h_polys = []
    for p in polys:
        f = p * exp
        hf = -sp.Rational(1, 2) * _laplacian(f) - (1 / r1 + 1 / r2) * f
        h_polys.append(sp.expand(sp.simplify(hf / exp)))
    a = Fraction(2 * alpha)
    n = len(triples)
    S = [[None] * n for _ in range(n)]
    H = [[None] * n for _ in range(n)]
    V = [[None] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            S[x][y] = _integrate_laurent(polys[x] * polys[y], a)
            V[x][y] = _integrate_laurent(polys[x] * polys[y] / r12, a)
            H[x][y] = _integrate_laurent(polys[x] * h_polys[y], a)
    return S, H, V


def exact_low_order(S, H, V):
    """``e0 .. e3`` for reference vector ``e_0``: bordered solve for psi1, 2n+1 rule for e3."""
    n = len(S)
    Sm, Hm, Vm = (sp.Matrix(n, n, lambda i, j: sp.Rational(M[i][j].numerator, M[i][j].denominator))
                  for M in (S, H, V))
    c0 = sp.zeros(n, 1)
    c0[0] = 1
    s00 = (c0.T * Sm * c0)[0]
    e0 = (c0.T * Hm * c0)[0] / s00
    e1 = (c0.T * Vm * c0)[0] / s00
    # [(H0 - e0 S)  S c0] [c1]   [-(V - e1 S) c0]
    # [ c0^T S       0  ] [mu] = [      0       ]
    K = (Hm - e0 * Sm).row_join(Sm * c0).col_join((c0.T * Sm).row_join(sp.zeros(1, 1)))
    rhs = (-(Vm - e1 * Sm) * c0).col_join(sp.zeros(1, 1))
    sol = K.LUsolve(rhs)
    c1 = sol[:n, 0]
    e2 = (c0.T * Vm * c1)[0] / s00
    e3 = (c1.T * (Vm - e1 * Sm) * c1)[0] / s00
    return [Fraction(int(sp.Rational(e).p), int(sp.Rational(e).q)) for e in (e0, e1, e2, e3)]


def hilbert_system(n: int):
    A = [[Fraction(1, i + j + 1) for j in range(n)] for i in range(n)]
    b = [Fraction(1)] * n
    # exact solve by Gaussian elimination in rationals
    M = [row[:] + [rhs] for row, rhs in zip(A, b)]
    for c in range(n):
        piv = M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / piv
            M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    x = [Fraction(0)] * n
    for r in reversed(range(n)):
        x[r] = (M[r][n] - sum(M[r][k] * x[k] for k in range(r + 1, n))) / M[r][r]
    return A, b, x
