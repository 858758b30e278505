"""High-precision 1/Z perturbation expansion for two-electron ions.

Typical use::

    from zexpansion import PrecisionConfig, compute_coefficients
    state, series = compute_coefficients(omega=8, order=6, cfg=PrecisionConfig(40))
"""
from .numerics import PrecisionConfig, format_decimal, parse_decimal
from .hylleraas import BasisSet, HylleraasTerm, enumerate_basis, radial_integral
from .operators import OperatorMatrices, assemble
from .perturbation import CoefficientSeries, Computed, Ingested, compute_coefficients, run_recursion, to_series
from .series import ChargeSpec, domb_sykes_radius, ratio_radius, sum_energy
from .reference import compare_table, digit_agreement, parse_coefficient_file, parse_reference_file

__version__ = "0.1.0"

__all__ = [
    "PrecisionConfig", "format_decimal", "parse_decimal",
    "BasisSet", "HylleraasTerm", "enumerate_basis", "radial_integral",
    "OperatorMatrices", "assemble",
    "CoefficientSeries", "Computed", "Ingested", "compute_coefficients", "run_recursion", "to_series",
    "ChargeSpec", "domb_sykes_radius", "ratio_radius", "sum_energy",
    "compare_table", "digit_agreement", "parse_coefficient_file", "parse_reference_file",
]
