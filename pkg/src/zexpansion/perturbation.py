"""Rayleigh-Schroedinger recursion for the 1/Z coefficients in a finite basis.

Corrections are kept in intermediate normalization: every ``c[n]`` with
``n >= 1`` is S-orthogonal to the reference vector ``c[0] = (1, 0, ..., 0)``.
The S-orthogonal complement is spanned by ``q_a = e_a - (S[0][a] / S[0][0]) e_0``
for ``a >= 1``; the shifted Hamiltonian restricted to it is positive definite
and is factorized once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Sequence

from .numerics import (
    CholeskyFactor,
    HPVector,
    NotPositiveDefiniteError,
    PrecisionConfig,
    cholesky_factor,
    matching_significant_digits,
    matvec,
)
from .hylleraas import enumerate_basis
from .operators import OperatorMatrices, assemble

__all__ = [
    "BasisDegeneracyError",
    "PerturbationState",
    "Computed",
    "Ingested",
    "CoefficientSeries",
    "run_recursion",
    "to_series",
    "restricted_system",
    "compute_coefficients",
    "DEFAULT_EXTRA_ALPHAS",
]

# Extra exponent shells (a 1, 2, 4 ladder); a single alpha = 1 shell converges too
# slowly for e_2 beyond ~6 digits at desk-scale omega.
DEFAULT_EXTRA_ALPHAS = (Decimal(2), Decimal(4))


class BasisDegeneracyError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Computed:
    omega: int
    alpha: Decimal
    digits: int
    extra_alphas: tuple[Decimal, ...] = ()

    def describe(self) -> str:
        ex = ",".join(str(a) for a in self.extra_alphas) or "none"
        return f"computed omega={self.omega} alpha={self.alpha} extra_alphas={ex} digits={self.digits}"


@dataclass(frozen=True)
class Ingested:
    source: str

    def describe(self) -> str:
        return f"ingested {self.source}"


@dataclass(frozen=True)
class CoefficientSeries:
    """Ordered ``(n, e_n)`` pairs with a single provenance.

    ``digits_trusted`` holds one entry per coefficient; ``None`` means unknown.
    """

    entries: tuple[tuple[int, Decimal], ...]
    provenance: Computed | Ingested
    digits_trusted: tuple[int | None, ...] = ()

    def __post_init__(self):
        if not self.entries:
            raise ValueError("coefficient series is empty")
        if not isinstance(self.provenance, (Computed, Ingested)):
            raise TypeError("provenance must be Computed or Ingested")
        for pos, (n, _) in enumerate(self.entries):
            if n != pos:
                raise ValueError(f"indices must be contiguous from 0; found n={n} at position {pos}")
        if not self.digits_trusted:
            object.__setattr__(self, "digits_trusted", (None,) * len(self.entries))
        elif len(self.digits_trusted) != len(self.entries):
            raise ValueError("digits_trusted must have one entry per coefficient")

    @classmethod
    def from_values(cls, values: Sequence[Decimal], provenance, digits_trusted=()):
        return cls(tuple(enumerate(values)), provenance, tuple(digits_trusted))

    @property
    def values(self) -> tuple[Decimal, ...]:
        return tuple(v for _, v in self.entries)

    @property
    def order(self) -> int:
        return len(self.entries) - 1

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, n) -> Decimal:
        return self.entries[n][1]

    def truncated(self, order: int) -> "CoefficientSeries":
        return CoefficientSeries(self.entries[: order + 1], self.provenance,
                                 self.digits_trusted[: order + 1])


@dataclass(frozen=True)
class PerturbationState:
    order_computed: int
    coeffs: tuple[Decimal, ...]
    wavefns: tuple[HPVector, ...]
    ops: OperatorMatrices = field(repr=False)

    @property
    def cfg(self) -> PrecisionConfig:
        return self.ops.cfg


@dataclass(frozen=True)
class _Restricted:
    shifts: HPVector  # s_a = S[0][a] / S[0][0]; shifts[0] unused
    factor: CholeskyFactor
    e0: Decimal


def restricted_system(ops: OperatorMatrices, cfg: PrecisionConfig) -> tuple[Decimal, HPVector, list[list[Decimal]]]:
    """``(e0, shifts, A)`` where ``A = Q^T (H0 - e0 S) Q`` on the complement of ``c[0]``."""
    S, H = ops.S, ops.H0
    n = ops.size
    with cfg.local():
        s00 = S[0][0]
        e0 = H[0][0] / s00
        shifts = (Decimal(0),) + tuple(S[0][a] / s00 for a in range(1, n))
        M = [[H[a][b] - e0 * S[a][b] for b in range(n)] for a in range(n)]
        A = []
        for a in range(1, n):
            sa = shifts[a]
            row = []
            for b in range(1, n):
                sb = shifts[b]
                row.append(M[a][b] - sa * M[0][b] - sb * M[a][0] + sa * sb * M[0][0])
            A.append(row)
        # rounding order differs between (a, b) and (b, a); keep the upper triangle
        for a in range(len(A)):
            for b in range(a):
                A[a][b] = A[b][a]
    return e0, shifts, A


def _prepare(ops: OperatorMatrices, cfg: PrecisionConfig) -> _Restricted:
    e0, shifts, A = restricted_system(ops, cfg)
    if not A:
        return _Restricted(shifts, CholeskyFactor((), cfg), e0)
    try:
        factor = cholesky_factor(A, cfg)
    except NotPositiveDefiniteError as exc:
        raise BasisDegeneracyError(
            f"restricted system is not positive definite at pivot {exc.pivot + 1} "
            f"(basis omega={ops.basis.omega}, digits={cfg.digits}); "
            "use a smaller omega or more digits"
        ) from exc
    return _Restricted(shifts, factor, e0)


def _solve_complement(rhs: Sequence[Decimal], sys_: _Restricted, cfg: PrecisionConfig) -> HPVector:
    n = len(rhs)
    if n == 1:
        return (Decimal(0),)
    s = sys_.shifts
    with cfg.local():
        projected = [rhs[a] - s[a] * rhs[0] for a in range(1, n)]  # Q^T rhs
    y = sys_.factor.solve(projected)
    with cfg.local():
        c0 = Decimal(0)
        for a in range(1, n):
            c0 -= s[a] * y[a - 1]
    return (c0,) + tuple(y)


def run_recursion(ops: OperatorMatrices, order: int, cfg: PrecisionConfig | None = None) -> PerturbationState:
    """Coefficients ``e_0 .. e_order`` of the 1/Z expansion in the basis of ``ops``.

    Raises :class:`BasisDegeneracyError` if the shifted Hamiltonian restricted to
    the complement of the reference function is not positive definite.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    cfg = cfg or ops.cfg
    S, V = ops.S, ops.V
    n = ops.size
    sys_ = _prepare(ops, cfg)
    ref = (Decimal(1),) + (Decimal(0),) * (n - 1)
    s00 = S[0][0]
    coeffs = [sys_.e0]
    wavefns = [ref]
    S_c = [matvec(S, ref, cfg)]  # S c[k], cached
    for k in range(1, order + 1):
        V_prev = matvec(V, wavefns[k - 1], cfg)
        with cfg.local():
            e_k = V_prev[0] / s00
        coeffs.append(e_k)
        if k == order:
            break
        with cfg.local():
            rhs = [-x for x in V_prev]
            for m in range(1, k + 1):
                em = coeffs[m]
                Sc = S_c[k - m]
                rhs = [r + em * x for r, x in zip(rhs, Sc)]
        c_k = _solve_complement(rhs, sys_, cfg)
        wavefns.append(c_k)
        S_c.append(matvec(S, c_k, cfg))
    return PerturbationState(order, tuple(coeffs), tuple(wavefns), ops)


def to_series(state: PerturbationState, check_digits: bool = True, extra_digits: int = 10) -> CoefficientSeries:
    """Wrap a recursion result as a series.

    With ``check_digits`` the whole pipeline is rerun with ``extra_digits`` more
    working digits; ``digits_trusted`` counts the leading significant digits on
    which both runs agree, capped at the working precision.
    """
    cfg = state.cfg
    basis = state.ops.basis
    prov = Computed(basis.omega, basis.alpha, cfg.digits, basis.extra_alphas)
    trusted: tuple[int | None, ...] = ()
    if check_digits:
        hi_cfg = cfg.extended(extra_digits)
        hi = run_recursion(assemble(basis, hi_cfg), state.order_computed, hi_cfg)
        # identical results (e.g. exact e_0, e_1) are trusted to the full precision
        trusted = tuple(cfg.digits if a == b else min(matching_significant_digits(a, b), cfg.digits)
                        for a, b in zip(state.coeffs, hi.coeffs))
    return CoefficientSeries.from_values(state.coeffs, prov, trusted)


def compute_coefficients(omega: int, order: int, cfg: PrecisionConfig, alpha=1,
                         extra_alphas=DEFAULT_EXTRA_ALPHAS, check_digits: bool = True):
    """Basis, matrices, recursion and series in one call; returns ``(state, series)``."""
    basis = enumerate_basis(omega, alpha, extra_alphas)
    state = run_recursion(assemble(basis, cfg), order, cfg)
    return state, to_series(state, check_digits=check_digits)
