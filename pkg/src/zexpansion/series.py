"""Summation of the 1/Z series and radius-of-convergence estimates."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction

from .numerics import PrecisionConfig, from_fraction
from .perturbation import CoefficientSeries

__all__ = [
    "ChargeSpec",
    "EnergyResult",
    "RadiusEstimate",
    "SeriesAnalysisError",
    "parse_charge",
    "parse_charge_list",
    "sum_energy",
    "sum_scaled",
    "sum_naive",
    "tail_bound",
    "ratio_radius",
    "domb_sykes_radius",
]

INFINITY = Decimal("Infinity")


class SeriesAnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class ChargeSpec:
    Z: Fraction
    lam: Decimal

    @classmethod
    def of(cls, Z, cfg: PrecisionConfig) -> "ChargeSpec":
        Z = Fraction(Z)
        if Z <= 0:
            raise ValueError(f"nuclear charge must be positive, got {Z}")
        return cls(Z, from_fraction(1 / Z, cfg))

    @property
    def label(self) -> str:
        return str(self.Z)


def parse_charge(text: str) -> Fraction:
    """``"2"``, ``"1.5"`` or ``"3/2"``."""
    try:
        Z = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational nuclear charge: {text!r}") from None
    if Z <= 0:
        raise ValueError(f"nuclear charge must be positive, got {text!r}")
    return Z


def parse_charge_list(text: str) -> list[Fraction]:
    """Comma-separated charges; ``a..b`` expands to the integers from a to b."""
    out: list[Fraction] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo_i, hi_i = int(lo), int(hi)
            if lo_i < 1 or hi_i < lo_i:
                raise ValueError(f"bad charge range {part!r}")
            out.extend(Fraction(z) for z in range(lo_i, hi_i + 1))
        elif part:
            out.append(parse_charge(part))
    if not out:
        raise ValueError("empty charge list")
    return out


@dataclass(frozen=True)
class EnergyResult:
    energy: Decimal
    order_used: int
    tail_bound: Decimal
    charge: ChargeSpec


def sum_scaled(values, lam: Decimal, cfg: PrecisionConfig) -> Decimal:
    """Horner evaluation of ``sum e_n lam^n``."""
    if not values:
        raise SeriesAnalysisError("empty series")
    with cfg.local():
        acc = Decimal(0)
        for e in reversed(values):
            acc = acc * lam + e
    return acc


def sum_naive(values, lam: Decimal, cfg: PrecisionConfig) -> Decimal:
    """Term-by-term evaluation, ascending order; a cross-check for :func:`sum_scaled`."""
    with cfg.local():
        acc = Decimal(0)
        power = Decimal(1)
        for e in values:
            acc += e * power
            power *= lam
    return acc


def tail_bound(values, charge: ChargeSpec, cfg: PrecisionConfig) -> Decimal:
    """Geometric tail heuristic ``Z^2 |e_N| lam^(N+1) / (1 - lam rho)``, ``rho = |e_N / e_(N-1)|``.

    Infinite when ``lam * rho >= 1``.
    """
    N = len(values) - 1
    lam = charge.lam
    with cfg.local():
        Z2 = from_fraction(charge.Z ** 2, cfg)
        last = abs(values[N])
        if N >= 1 and values[N - 1]:
            rho = last / abs(values[N - 1])
        else:
            rho = Decimal(0)
        denom = 1 - lam * rho
        if denom <= 0:
            return INFINITY
        return Z2 * last * lam ** (N + 1) / denom


def sum_energy(series: CoefficientSeries, charge: ChargeSpec, cfg: PrecisionConfig,
               radius: "RadiusEstimate | None" = None) -> EnergyResult:
    """``E(Z) = Z^2 sum_n e_n Z^-n`` with a reported truncation estimate."""
    values = series.values
    if not values:
        raise SeriesAnalysisError("empty series")
    if radius is not None and charge.lam >= radius.lambda_star:
        warnings.warn(f"lambda = 1/{charge.label} lies outside the estimated radius "
                      f"{radius.lambda_star:.6f}; the partial sum may be meaningless", stacklevel=2)
    scaled = sum_scaled(values, charge.lam, cfg)
    with cfg.local():
        energy = from_fraction(charge.Z ** 2, cfg) * scaled
    return EnergyResult(energy, len(values) - 1, tail_bound(values, charge, cfg), charge)


@dataclass(frozen=True)
class RadiusEstimate:
    lambda_star: Decimal
    method: str
    window: tuple[int, int]
    residual: Decimal
    metadata: dict = field(default_factory=dict, compare=False)


def _window_ratios(series: CoefficientSeries, window, cfg: PrecisionConfig, invert: bool):
    lo, hi = window
    if lo < 1 or hi > series.order or lo > hi:
        raise SeriesAnalysisError(f"window {lo}:{hi} outside the series (orders 1..{series.order})")
    if hi - lo + 1 < 3:
        raise SeriesAnalysisError(f"window {lo}:{hi} holds fewer than 3 ratios")
    values = series.values
    out = []
    with cfg.local():
        for n in range(lo, hi + 1):
            prev, cur = values[n - 1], values[n]
            if not prev or not cur:
                raise SeriesAnalysisError(f"zero coefficient inside window at n={n - 1 if not prev else n}")
            out.append((n, abs(prev / cur) if invert else abs(cur / prev)))
    return out


def ratio_radius(series: CoefficientSeries, window, cfg: PrecisionConfig) -> RadiusEstimate:
    """Mean of ``|e_(n-1) / e_n|`` over ``n`` in the inclusive window."""
    ratios = _window_ratios(series, window, cfg, invert=True)
    with cfg.local():
        mean = sum((r for _, r in ratios), Decimal(0)) / len(ratios)
        residual = max(abs(r - mean) for _, r in ratios)
    return RadiusEstimate(mean, "ratio", tuple(window), residual)


def domb_sykes_radius(series: CoefficientSeries, window, cfg: PrecisionConfig) -> RadiusEstimate:
    """Least-squares fit of ``|e_n / e_(n-1)| = (1 / lambda*) (1 - (1 + gamma) / n)``.

    Linear in ``1/n``: intercept ``1/lambda*``, slope ``-(1 + gamma)/lambda*``.
    """
    ratios = _window_ratios(series, window, cfg, invert=False)
    with cfg.local():
        k = len(ratios)
        xs = [Decimal(1) / n for n, _ in ratios]
        ys = [r for _, r in ratios]
        sx = sum(xs, Decimal(0))
        sy = sum(ys, Decimal(0))
        sxx = sum((x * x for x in xs), Decimal(0))
        sxy = sum((x * y for x, y in zip(xs, ys)), Decimal(0))
        det = k * sxx - sx * sx
        if det <= cfg.tolerance * (k * sxx):
            raise SeriesAnalysisError("rank-deficient Domb-Sykes fit")
        slope = (k * sxy - sx * sy) / det
        intercept = (sy - slope * sx) / k
        if intercept <= 0:
            raise SeriesAnalysisError(f"non-positive fitted intercept {intercept:.6E}; no finite radius")
        lambda_star = 1 / intercept
        gamma = -slope / intercept - 1
        residual = max(abs(y - (intercept + slope * x)) for x, y in zip(xs, ys))
    return RadiusEstimate(lambda_star, "domb_sykes", tuple(window), residual,
                          {"gamma": gamma, "slope": slope, "intercept": intercept})
