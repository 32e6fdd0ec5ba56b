from __future__ import annotations

import numpy as np
import pytest

from ratl2.cauchy import MeasureM, RationalPart, TargetFunction, cheb_nodes
from ratl2.certify import (
    AsymptoticsReport,
    CriterionReport,
    SignedMeasureSamples,
    build_comparison_scheme,
    check_comparison_criterion,
    comparison_data,
    comparison_interpolant,
    dvp_lower_bound,
    green_equilibrium,
    hankel_sigma,
    hankel_symbol,
    outer_factor,
    pole_diagnostics,
    verify_strong_asymptotics,
)
from ratl2.critical import CriticalPointRecord, multi_start, solve_critical
from ratl2.errors import OrderingError, PreconditionError, TruncationError
from ratl2.hardy import ComplexPoly, MonicPoly, unit_roots, winding_number_adaptive
from ratl2.pade import InterpolationScheme, InterpolationSet, build_pade


@pytest.fixture(scope="module")
def markov_records(markov):
    return {n: solve_critical(markov, n, start=0) for n in range(1, 7)}


def fake_record(roots):
    q = MonicPoly.from_roots(roots)
    return CriticalPointRecord(q, ComplexPoly([1.0]), 0.0, 0.0, np.zeros(0), None, True,
                               np.asarray(roots, dtype=complex), 0)


# --- comparison criterion -------------------------------------------------


def test_criterion_with_critical_interpolant_is_zero(markov, markov_records):
    rec = markov_records[3]
    rep = check_comparison_criterion(markov, rec, rec)
    assert rep.min_ratio == 0 and not rep.passed


def test_criterion_markov_degree_four(markov, markov_records):
    rec = markov_records[4]
    Pi = comparison_interpolant(markov, rec)
    assert Pi.n == 3
    rep = check_comparison_criterion(markov, rec, Pi)
    # argument-principle oracle on a much finer grid
    oracle = winding_number_adaptive(lambda z: Pi.error(z), M=1 << 15)
    assert rep.winding == oracle == -7


def test_criterion_degree_one(half):
    rec = solve_critical(half, 1, start=0)
    Pi0 = build_pade(half, InterpolationSet())
    rep = check_comparison_criterion(half, rec, Pi0)
    assert rep.winding == -1
    z = unit_roots(1 << 14)
    assert winding_number_adaptive(half, M=1 << 14) == -1 and np.all(Pi0(z) == 0)


def test_criterion_report_invariant():
    with pytest.raises(ValueError):
        CriterionReport(3, 1.5, -5, True)
    csv = CriterionReport.csv([CriterionReport(3, 2.5, -5, True), CriterionReport(2, 1.0, -3, False)])
    assert csv.splitlines() == ["n,min_ratio,winding,passed", "2,1.0,-3,false", "3,2.5,-5,true"]


def test_criterion_rejects_reducible(markov):
    rec = fake_record([0.1, 0.2])
    rec.irreducible = False
    with pytest.raises(PreconditionError):
        check_comparison_criterion(markov, rec, rec)


# --- outer factor and Hankel ----------------------------------------------


def test_outer_factor_fixed_point():
    tau = unit_roots(512)
    g = lambda z: 2 + np.exp(0.3 * z) + 0.5 * z**2  # noqa: E731  zero-free in the closed disk, g(0) > 0
    o = outer_factor(g(tau))
    assert np.max(np.abs(o.grid.samples - g(tau))) < 1e-9
    z = np.array([0.0, 0.5j, -0.7 + 0.1j])
    assert np.max(np.abs(o(z) - g(z))) < 1e-9


def test_outer_factor_of_inner_parts():
    tau = unit_roots(512)
    assert np.max(np.abs(outer_factor(tau).grid.samples - 1)) < 1e-12
    g = lambda z: 3 + z  # noqa: E731
    w = (tau - 0.5) * g(tau)
    o = outer_factor(w)
    assert np.max(np.abs(np.abs(o.grid.samples) - np.abs(w))) < 1e-9


def test_hankel_single_pole():
    c = 0.7 - 0.2j
    sv = hankel_sigma(np.r_[c, np.zeros(4095)], 1)
    assert sv[0] == pytest.approx(abs(c)) and sv[1] < 1e-14


def test_hankel_kronecker_rank(rng):
    xi = np.array([0.5, -0.3 + 0.2j, 0.1j])
    res = rng.normal(size=3) + 1j * rng.normal(size=3)
    k = np.arange(4096)
    coeffs = (xi[None, :] ** k[:, None]) @ res
    sv = hankel_sigma(coeffs, 3)
    assert np.all(sv[:3] > 1e-6) and np.all(sv[3:] < 1e-12 * sv[0])
    assert np.all(np.diff(sv) <= 1e-12) and np.all(sv >= 0)


def test_hankel_truncation_error():
    with pytest.raises(TruncationError):
        hankel_sigma(0.99 ** np.arange(300), 1)
    with pytest.raises(TruncationError):
        hankel_sigma(np.ones(4096), 4, N=16)


def test_hankel_symbol_coefficients_match_fft(markov, markov_records):
    hs = hankel_symbol(markov, markov_records[3])
    fft = np.fft.fft(hs.samples)[::-1] / hs.M
    assert np.allclose(hs.coefficients(40), fft[:40], atol=1e-9 * np.max(np.abs(fft)))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_criterion_and_hankel_chain(markov, markov_records, n):
    rec = markov_records[n]
    Pi = comparison_interpolant(markov, rec)
    rep = check_comparison_criterion(markov, rec, Pi)
    hs = hankel_symbol(markov, rec)
    sigma = hankel_sigma(hs.coefficients, n)[n - 1]
    assert rep.passed and sigma > 2
    bound = dvp_lower_bound(hs.samples, None, n, difference=hs.difference(Pi, markov))
    assert bound.applicable and bound.value > 2
    assert sigma >= bound.value - 1e-6
    # inf |s - g| equals the criterion ratio on the circle
    assert bound.value == pytest.approx(rep.min_ratio, rel=1e-8)


def test_dvp_trivial_and_inapplicable(markov, markov_records):
    hs = hankel_symbol(markov, markov_records[2])
    triv = dvp_lower_bound(hs.samples, hs.samples, 2)
    assert triv.trivial and triv.value == 0
    g = hs.g_samples(lambda z: np.zeros_like(z), markov)
    out = dvp_lower_bound(hs.samples, g, 2)
    assert not out.applicable and out.value is None


# --- strong asymptotics and poles -----------------------------------------


def test_strong_asymptotics_constant_density(half):
    rep = verify_strong_asymptotics(half, InterpolationScheme.at_infinity(8), contour=2.0, M=128)
    dev = rep.deviations
    assert np.all(np.diff(dev) < 0) and dev[-1] < 0.05
    assert rep.to_csv().splitlines()[0] == "n,sup_error,predicted,ratio_deviation"


def test_strong_asymptotics_with_pole():
    F = TargetFunction(MeasureM.constant(-0.5, 0.5), RationalPart.simple(2.0))
    rep = verify_strong_asymptotics(F, InterpolationScheme.at_infinity(8, 2), contour=3.0, M=128)
    assert np.all(np.diff(rep.deviations) < 0) and rep.deviations[-1] < 0.05


def test_strong_asymptotics_scale_invariance(twisted):
    scaled = TargetFunction(MeasureM.from_expr(-0.4, 0.4, "2.5*exp(0.3j*t)"))
    S = InterpolationScheme.at_infinity(4, 2)
    r1 = verify_strong_asymptotics(twisted, S, M=64)
    r2 = verify_strong_asymptotics(scaled, S, M=64)
    for a, b in zip(r1.rows, r2.rows):
        assert b.sup_error == pytest.approx(2.5 * a.sup_error, rel=1e-9)
        assert b.predicted == pytest.approx(2.5 * a.predicted, rel=1e-9)
        assert b.ratio_deviation == pytest.approx(a.ratio_deviation, rel=1e-9, abs=1e-15)


def test_strong_asymptotics_rows_ordered():
    with pytest.raises(ValueError):
        AsymptoticsReport((type("R", (), {"n": 3})(), type("R", (), {"n": 2})()))


def test_strong_asymptotics_from_critical_points(markov, markov_records):
    recs = [markov_records[n] for n in (2, 4, 6)]
    dev = verify_strong_asymptotics(markov, recs, M=64).deviations
    assert np.all(np.diff(dev) < 0)


def test_pole_diagnostics_markov(markov, markov_records):
    rep = pole_diagnostics(list(markov_records.values()), -0.4, 0.4)
    assert all(r.sum_abs_im < 1e-10 for r in rep.rows)
    ks = [r.ks_distance for r in rep.rows]
    assert np.all(np.diff(ks) < 0)
    assert rep.to_csv().splitlines()[0] == "n,sum_abs_im,max_abs_im,ks_distance"


def test_pole_diagnostics_twisted_bounded(twisted):
    recs = [solve_critical(twisted, n, start=0) for n in range(2, 9)]
    s = np.array([r.sum_abs_im for r in pole_diagnostics(recs, -0.4, 0.4).rows])
    assert np.all(s < 0.1) and s[-1] <= 2 * s.min() + 1e-3


# --- Green equilibrium ----------------------------------------------------


def _discrete_green_cdf(a, b, cells=400):
    """Oracle: piecewise-constant density on Chebyshev-spaced cells with the
    Green potential constant at cell midpoints (log kernel integrated exactly)."""
    edges = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(np.linspace(0, np.pi, cells + 1))
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)

    def prim(u):  # antiderivative of log|u|
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(u == 0, 0.0, u * np.log(np.abs(u)) - u)

    X = mid[:, None]
    logpart = prim(X - lo[None, :]) - prim(X - hi[None, :])
    # smooth part log|1 - x t| by 8-point Gauss-Legendre per cell
    gx, gw = np.polynomial.legendre.leggauss(8)
    t = 0.5 * (lo + hi)[:, None] + 0.5 * (hi - lo)[:, None] * gx[None, :]
    w = 0.5 * (hi - lo)[:, None] * gw[None, :]
    smooth = np.einsum("jk,ijk->ij", w, np.log(np.abs(1 - X[:, :, None] * t[None, :, :])))
    G = smooth - logpart  # potential of unit density on each cell
    A = np.zeros((cells + 1, cells + 1))
    A[:cells, :cells] = G
    A[:cells, cells] = -1
    A[cells, :cells] = hi - lo
    rhs = np.zeros(cells + 1)
    rhs[cells] = 1
    dens = np.linalg.solve(A, rhs)[:cells]
    return hi, np.cumsum(dens * (hi - lo))


def test_green_equilibrium_matches_discrete_oracle():
    g = green_equilibrium(-0.3, 0.6)
    x, cdf = _discrete_green_cdf(-0.3, 0.6)
    assert np.max(np.abs(g.cdf(x) - cdf)) < 2e-4


def test_green_equilibrium_symmetric_and_normalised():
    g = green_equilibrium(-0.4, 0.4)
    assert g.mass == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(g.density, g.density[::-1], rtol=1e-10)
    assert g.cdf(0.0) == pytest.approx(0.5, abs=1e-12) and g.cdf(0.4) == pytest.approx(1.0)


def test_green_equilibrium_small_interval_is_arcsine():
    a, b = 0.3, 0.4
    g = green_equilibrium(a, b)
    t = cheb_nodes(512, a, b)
    assert np.mean(np.abs(g.weight(t) - 1)) < 0.05


def test_green_equilibrium_requires_interval():
    with pytest.raises(Exception, match="a < b required"):
        green_equilibrium(0.4, 0.1)


# --- comparison nodes -----------------------------------------------------


def test_signed_measure_mass():
    nu = SignedMeasureSamples.arcsine(-0.4, 0.4)
    assert nu.mass == pytest.approx(2.0, abs=1e-12)
    assert nu.cdf(0.0) == pytest.approx(1.0)
    h = SignedMeasureSamples.from_callable(-0.4, 0.4, lambda t: 2 + 5 * t)
    assert h.mass == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(PreconditionError):
        build_comparison_scheme(SignedMeasureSamples.arcsine(-0.4, 0.4, mass=1.0), fake_record([0.1, 0.2]))


def test_comparison_coefficients_and_points():
    a, b = -0.4, 0.4
    xi = np.linspace(-0.3, 0.3, 6)
    nu = SignedMeasureSamples.arcsine(a, b)
    d = comparison_data(nu, fake_record(xi))
    assert np.allclose(d.a + d.b, 2.0)
    assert d.c.sum() == pytest.approx(2.0)
    assert d.nodes.n == 5
    y = d.y.real
    assert np.all((y > xi[:-1]) & (y < xi[1:]))
    assert np.all(np.abs(d.y - xi[:-1]) <= nu.total_variation / 2 * np.abs(np.diff(xi)) + 1e-15)


def test_comparison_counts_off_interval_roots(markov):
    rec = fake_record([-0.2, 0.0 + 0.01j, 0.25, 0.6])
    E = build_comparison_scheme(SignedMeasureSamples.arcsine(-0.4, 0.4), rec)
    assert E.n == 3
    assert np.any(np.isclose(E.finite, 1 / 0.6))


def test_comparison_equivariant_and_ties():
    nu = SignedMeasureSamples.arcsine(-0.4, 0.4)
    roots = [-0.2, 0.1 + 0.01j, 0.1 + 0.05j, 0.3]
    E1 = build_comparison_scheme(nu, fake_record(roots))
    E2 = build_comparison_scheme(nu, fake_record(roots[::-1]))
    assert np.allclose(np.sort_complex(E1.finite), np.sort_complex(E2.finite))
    with pytest.raises(OrderingError) as info:
        build_comparison_scheme(nu, fake_record([-0.2, 0.1 + 0.02j, 0.1 - 0.02j]))
    assert len(info.value.indices) == 2


def test_multi_start_twisted(twisted):
    res = multi_start(twisted, 3, 10, seed=5)
    assert res.converged_fraction >= 0.9
