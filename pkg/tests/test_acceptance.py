"""One check per acceptance criterion; each prints a PASS/FAIL line at the stated tolerance."""
import time
from decimal import Decimal

from zexpansion.checks import check_integrals
from zexpansion.hylleraas import enumerate_basis
from zexpansion.numerics import PrecisionConfig, matching_significant_digits
from zexpansion.operators import assemble
from zexpansion.perturbation import DEFAULT_EXTRA_ALPHAS, run_recursion
from zexpansion.reference import compare_table, digit_agreement, parse_coefficient_file, parse_reference_file
from zexpansion.series import ChargeSpec, domb_sykes_radius, ratio_radius, sum_energy
from conftest import E2_EXACT, record_criterion
from test_series import geometric, synthetic

from fractions import Fraction


def sig_digits(a: Decimal, b: Decimal, cap: int) -> int:
    return cap if a == b else matching_significant_digits(a, b)


def test_criterion_1_analytic_constants():
    cfg = PrecisionConfig(40)
    worst, slowest = 99, 0.0
    for omega in range(0, 5):
        for extra in ((), DEFAULT_EXTRA_ALPHAS):
            if omega >= 3 and extra:
                continue
            t = time.perf_counter()
            e0, e1 = run_recursion(assemble(enumerate_basis(omega, 1, extra), cfg), 1, cfg).coeffs
            slowest = max(slowest, time.perf_counter() - t)
            worst = min(worst, sig_digits(e0, Decimal(-1), 40), sig_digits(e1, Decimal("0.625"), 40))
    ok = worst >= cfg.digits - 8 and slowest < 1.0
    assert record_criterion(1, ok, f"e0=-1, e1=0.625 to >= {worst} digits (need 32); slowest run {slowest:.2f}s")


def test_criterion_2_second_order(omega8):
    state, _ = omega8
    e2 = state.coeffs[2]
    digits = matching_significant_digits(e2, E2_EXACT)
    cfg = PrecisionConfig(40)
    trail = [run_recursion(assemble(enumerate_basis(w, 1, DEFAULT_EXTRA_ALPHAS), cfg), 2, cfg).coeffs[2]
             for w in (2, 4, 6)] + [e2]
    monotone = all(b <= a for a, b in zip(trail, trail[1:]))
    ok = e2 >= E2_EXACT and digits >= 8 and monotone
    assert record_criterion(2, ok, f"e2={e2:.16f}, {digits} digits vs exact, upper bound "
                                   f"{e2 >= E2_EXACT}, non-increasing over omega 2,4,6,8 {monotone}")


def test_criterion_3_higher_coefficients(omega8):
    state, _ = omega8
    table = parse_coefficient_file("bundled:tableI.coeff")
    digits = [matching_significant_digits(state.coeffs[n], table[n]) for n in range(3, 7)]
    signs = all((state.coeffs[n] > 0) == (table[n] > 0) for n in range(3, 7))
    ok = min(digits) >= 5 and signs
    assert record_criterion(3, ok, f"e3..e6 significant digits vs table {digits} (need 5), signs match {signs}")


def test_criterion_4_series_summation():
    cfg = PrecisionConfig(40)
    t = time.perf_counter()
    series = parse_coefficient_file("bundled:tableI.coeff", cfg)
    z10 = sum_energy(series, ChargeSpec.of(10, cfg), cfg).energy
    z10_err = abs(z10 - Decimal("-93.906806515037544"))
    report = compare_table(series, parse_reference_file("bundled:tableII.refs"), cfg)
    agreement = {r.Z: r.agreement.matching_decimal_digits for r in report.rows if 2 <= r.Z <= 10}
    elapsed = time.perf_counter() - t
    short = {z: d for z, d in agreement.items() if d < 12}
    ok = z10_err <= Decimal("1e-12") and not short and elapsed < 1.0
    assert record_criterion(4, ok, f"Z=10 error {z10_err:.1E} (<= 1E-12 {z10_err <= Decimal('1e-12')}); "
                                   f"Z below 12 matching decimals: {short or 'none'}; {elapsed:.2f}s")


def test_criterion_5_digit_comparator():
    values = ("-0.527751016544160", "-0.527751016544266", "-0.527751016544377")
    counts = [digit_agreement(a, b).matching_decimal_digits
              for i, a in enumerate(values) for b in values[i + 1:]]
    assert record_criterion(5, counts == [12, 12, 12], f"pairwise agreement {counts}")


def test_criterion_6_radius_estimators():
    cfg = PrecisionConfig(40)
    ds = domb_sykes_radius(synthetic("1.097", "1.2", 150), (30, 150), cfg)
    ds_err = abs(ds.lambda_star - Decimal("1.097"))
    geo = geometric(Fraction(1, 2), 30)
    ratio_exact = ratio_radius(geo, (5, 20), cfg).lambda_star == 2
    ds_geo = abs(domb_sykes_radius(geo, (5, 20), cfg).lambda_star - 2)
    ok = ds_err <= Decimal("1e-3") and ratio_exact and ds_geo <= cfg.tolerance
    assert record_criterion(6, ok, f"Domb-Sykes synthetic error {ds_err:.2E}; geometric: ratio exact "
                                   f"{ratio_exact}, Domb-Sykes error {ds_geo:.1E}")


def test_criterion_7_integral_oracle_and_stability(omega8):
    checks = list(check_integrals(max_power=4, cfg=PrecisionConfig(40), quad_digits=20))
    worst = min(c.digits for c in checks)
    _, series = omega8
    trusted = series.digits_trusted[2:7]
    ok = len(checks) == 375 and worst >= 18 and min(trusted) >= 10
    assert record_criterion(7, ok, f"{len(checks)} integrals, worst agreement {worst} digits (need 18); "
                                   f"stable digits e2..e6 {list(trusted)} (need 10)")
