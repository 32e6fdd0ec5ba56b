"""Numerical tolerances shared across the package.

The underlying mathematics is exact; every threshold below is a numerical
choice. Override per run through :func:`with_overrides` rather than mutating
the defaults.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    tau_zero: float = 1e-13
    tau_margin: float = 1e-8
    tau_series: float = 1e-9
    tau_gcd: float = 1e-8
    gram_cond_warn: float = 1e12
    # critical point solver
    tol_crit: float = 1e-10
    fixed_point_tol: float = 1e-12
    fixed_point_maxiter: int = 200
    newton_switch: float = 1e-4
    newton_maxiter: int = 60
    boundary_margin: float = 1e-6
    dedup_distance: float = 1e-6
    # quadrature
    quad_nodes: int = 256
    quad_agree: float = 1e-11
    quad_max_nodes: int = 8192
    # class M check: bound on the total variation of arg(density)
    arg_variation_max: float = 20.0
    # certification
    criterion_grid: int = 4096
    hankel_stable: float = 1e-6

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT = Tolerances()


def with_overrides(overrides: dict | None = None, base: Tolerances = DEFAULT) -> Tolerances:
    if not overrides:
        return base
    unknown = set(overrides) - set(asdict(base))
    if unknown:
        raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
    return replace(base, **overrides)
