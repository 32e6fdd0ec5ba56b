"""Best L2 rational approximation to Cauchy transforms on the unit circle:
critical points, multipoint Padé approximants and their certification."""

from __future__ import annotations

__version__ = "0.1.0"

from .cauchy import MeasureM, RationalPart, TargetFunction, target_from_json, target_to_json
from .certify import (
    AsymptoticsReport,
    CriterionReport,
    SignedMeasureSamples,
    build_comparison_scheme,
    check_comparison_criterion,
    dvp_lower_bound,
    green_equilibrium,
    hankel_sigma,
    hankel_symbol,
    outer_factor,
    pole_diagnostics,
    verify_strong_asymptotics,
)
from .config import DEFAULT, Tolerances
from .critical import CriticalPointRecord, gradient, hessian, multi_start, phi_n, solve_critical
from .hardy import ComplexPoly, MonicPoly, inner_product, project_Vq, sigma_involution, winding_number
from .pade import InterpolationScheme, InterpolationSet, PadeApproximant, build_pade

__all__ = [name for name in dir() if not name.startswith("_")]
