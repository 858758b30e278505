"""Overlap, unperturbed Hamiltonian and 1/r12 matrices over a Hylleraas basis.

Matrix elements are accumulated as exact rationals and rounded once.  The
common ``8 pi^2`` angular factor is dropped from all three matrices.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache
from typing import TextIO

from gmpy2 import mpq

from .hylleraas import BasisSet, HylleraasTerm, integral_mpq
from .numerics import HPMatrix, PrecisionConfig, format_decimal, from_fraction

__all__ = ["OperatorMatrices", "assemble", "exact_elements", "dump_matrices"]

# Laurent polynomial in (r1, r2, r12): {(p1, p2, p12): coefficient}
Poly = dict


def _mul(a: Poly, b: Poly) -> Poly:
    out = defaultdict(mpq)
    for (p, q, s), c in a.items():
        for (p2, q2, s2), c2 in b.items():
            out[(p + p2, q + q2, s + s2)] += c * c2
    return out


def _add(*polys: Poly) -> Poly:
    out = defaultdict(mpq)
    for poly in polys:
        for key, c in poly.items():
            out[key] += c
    return out


_HALF = mpq(1, 2)
# (r1^2 + r12^2 - r2^2) / (2 r1 r12), i.e. r1_hat . r12_hat, and its 1<->2 image
_COS1 = {(1, 0, -1): _HALF, (-1, 0, 1): _HALF, (-1, 2, -1): -_HALF}
_COS2 = {(0, 1, -1): _HALF, (0, -1, 1): _HALF, (2, -1, -1): -_HALF}

_NUCLEAR = {(-1, 0, 0): mpq(-1), (0, -1, 0): mpq(-1)}


def _log_d1(p1, alpha):
    # (d/dr1 of r1^p1 e^{-alpha r1}) / (r1^p1 e^{-alpha r1})
    return {(-1, 0, 0): mpq(p1), (0, 0, 0): -alpha}


def _log_d2(p2, alpha):
    return {(0, -1, 0): mpq(p2), (0, 0, 0): -alpha}


def _log_d12(p12):
    return {(0, 0, -1): mpq(p12)}


@lru_cache(maxsize=None)
def _hamiltonian_poly(f, g, alpha_f, alpha_g) -> tuple:
    """``H0`` integrand as a multiplier of ``f*g``: gradient-form kinetic plus nuclear attraction."""
    (a1, a2, a12), (b1, b2, b12) = f, g
    f1, f2, f12 = _log_d1(a1, alpha_f), _log_d2(a2, alpha_f), _log_d12(a12)
    g1, g2, g12 = _log_d1(b1, alpha_g), _log_d2(b2, alpha_g), _log_d12(b12)
    radial12 = _mul(f12, g12)
    grad1 = _add(_mul(f1, g1), radial12, _mul(_COS1, _add(_mul(f1, g12), _mul(f12, g1))))
    grad2 = _add(_mul(f2, g2), radial12, _mul(_COS2, _add(_mul(f2, g12), _mul(f12, g2))))
    kinetic = {key: c * _HALF for key, c in _add(grad1, grad2).items()}
    total = _add(kinetic, _NUCLEAR)
    return tuple(sorted((key, c) for key, c in total.items() if c))


@lru_cache(maxsize=None)
def _monomial_elements(f, g, alpha_f, alpha_g):
    e = alpha_f + alpha_g
    p1, p2, p12 = f[0] + g[0], f[1] + g[1], f[2] + g[2]
    s = integral_mpq(p1, p2, p12, e, e)
    v = integral_mpq(p1, p2, p12 - 1, e, e)
    h = mpq(0)
    for (d1, d2, d12), c in _hamiltonian_poly(f, g, alpha_f, alpha_g):
        h += c * integral_mpq(p1 + d1, p2 + d2, p12 + d12, e, e)
    return s, h, v


def _exact_mpq(fa: HylleraasTerm, fb: HylleraasTerm):
    alpha_a, alpha_b = mpq(Fraction(fa.alpha)), mpq(Fraction(fb.alpha))
    s = h = v = mpq(0)
    for pa in fa.monomials():
        for pb in fb.monomials():
            ds, dh, dv = _monomial_elements(pa, pb, alpha_a, alpha_b)
            s += ds
            h += dh
            v += dv
    return s, h, v


def exact_elements(fa: HylleraasTerm, fb: HylleraasTerm) -> tuple[Fraction, Fraction, Fraction]:
    """Exact ``(S, H0, V)`` matrix elements between two basis functions."""
    return tuple(Fraction(int(q.numerator), int(q.denominator)) for q in _exact_mpq(fa, fb))


@dataclass(frozen=True)
class OperatorMatrices:
    S: HPMatrix
    H0: HPMatrix
    V: HPMatrix
    basis: BasisSet
    cfg: PrecisionConfig

    @property
    def size(self) -> int:
        return len(self.S)


def assemble(basis: BasisSet, cfg: PrecisionConfig) -> OperatorMatrices:
    """Build ``S``, ``H0`` and ``V`` of the scaled Hamiltonian ``H0 + lambda V``."""
    n = len(basis)
    if n == 0:
        raise ValueError("empty basis")
    S = [[Decimal(0)] * n for _ in range(n)]
    H = [[Decimal(0)] * n for _ in range(n)]
    V = [[Decimal(0)] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            s, h, v = (from_fraction(q, cfg) for q in _exact_mpq(basis[a], basis[b]))
            S[a][b] = S[b][a] = s
            H[a][b] = H[b][a] = h
            V[a][b] = V[b][a] = v

    def freeze(M):
        return tuple(tuple(row) for row in M)

    return OperatorMatrices(freeze(S), freeze(H), freeze(V), basis, cfg)


def dump_matrices(ops: OperatorMatrices, stream: TextIO) -> None:
    """Row-major text dump at full working precision."""
    P = ops.cfg.digits
    stream.write(f"# basis {ops.basis.describe()} digits={P}\n")
    for t in ops.basis:
        stream.write(f"# term {t.i} {t.j} {t.k} alpha={t.alpha}\n")
    for name in ("S", "H0", "V"):
        stream.write(f"[{name}]\n")
        for row in getattr(ops, name):
            stream.write(" ".join(format_decimal(x, P) for x in row) + "\n")
