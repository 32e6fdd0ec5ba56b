"""Certification of critical points and checks of the asymptotic theory.

* the comparison criterion: a lower-degree interpolant ``Pi`` whose error
  on the unit circle stays more than twice away from the critical error,
  with the right winding, makes the critical point a nondegenerate local
  minimum;
* the Hankel operator with symbol ``s_q = L_q/(o_q q q~)``, its singular
  values and the winding-gated lower bound ``inf |s_q - g|``;
* strong asymptotics of Padé errors and pole diagnostics against the Green
  equilibrium distribution of the segment;
* the interpolation nodes built from a critical point and a signed measure
  of mass 2 on the segment.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy.linalg import hankel

from . import _backend as bk
from .cauchy import (
    TargetFunction,
    cheb_coefficients,
    cheb_nodes,
    density_szego,
    joukowski_inverse_phi,
    phi_mp,
    szego_function,
    w_branch_mp,
)
from .config import DEFAULT, Tolerances
from .critical import CriticalPointRecord, compute_uq, critical_error_samples
from .errors import (
    CriterionInapplicable,
    DomainError,
    OrderingError,
    PreconditionError,
    ResolutionError,
    TruncationError,
    VanishingOnCircleError,
)
from .hardy import CircleGrid, MonicPoly, fourier, reflected, unit_roots, winding_number, winding_number_adaptive
from .pade import InterpolationScheme, InterpolationSet, PadeApproximant, blaschke_product_Rn_mp, build_pade


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow(r)
    return buf.getvalue()


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


# ---------------------------------------------------------------------------
# comparison criterion


@dataclass(frozen=True)
class CriterionReport:
    n: int
    min_ratio: float
    winding: int
    passed: bool
    grid_size: int = 0

    def __post_init__(self):
        if self.passed and not (self.min_ratio > 2.0 and self.winding == 1 - 2 * self.n):
            raise ValueError("passed requires min_ratio > 2 and winding = 1 - 2n")

    def to_json(self) -> dict:
        return {"n": self.n, "min_ratio": float(self.min_ratio), "winding": int(self.winding),
                "passed": bool(self.passed), "grid_size": int(self.grid_size)}

    @staticmethod
    def csv(reports: Sequence["CriterionReport"]) -> str:
        rows = [[_fmt(r.n), _fmt(r.min_ratio), _fmt(r.winding), _fmt(r.passed)]
                for r in sorted(reports, key=lambda r: r.n)]
        return _csv(["n", "min_ratio", "winding", "passed"], rows)


def _error_callable(F: TargetFunction, Pi) -> Callable:
    if isinstance(Pi, CriticalPointRecord):
        P = build_pade(F, InterpolationSet.from_points(reflected(Pi.q.roots())))
        return P.error
    if isinstance(Pi, PadeApproximant):
        return lambda z: Pi.error(z, F)
    if callable(Pi):
        return lambda z: F(z) - Pi(z)
    raise TypeError("Pi must be a PadeApproximant, a CriticalPointRecord or a callable")


def critical_error(F: TargetFunction, record: CriticalPointRecord, M: int,
                   tol: Tolerances = DEFAULT) -> np.ndarray:
    """``F - L_q/q`` at the M-th roots of unity."""
    data = compute_uq(F, record.q, M=M, tol=tol)
    return critical_error_samples(F, record.q, data, tol)


def check_comparison_criterion(F: TargetFunction, record: CriticalPointRecord, Pi,
                               grid_size: int = DEFAULT.criterion_grid,
                               tol: Tolerances = DEFAULT) -> CriterionReport:
    """Evaluate ``min_T |1 - (F - Pi)/(F - L_q/q)|`` and ``wn(F - Pi)``.

    ``Pi`` is a Padé approximant (of degree n-1 for the criterion to apply),
    a callable, or a critical point record (then ``Pi = L_q/q`` and the ratio
    is 0). A failed check says nothing about the critical point itself.
    """
    if not record.irreducible:
        raise PreconditionError("the critical point record is reducible")
    n = record.degree
    e_q = critical_error(F, record, grid_size, tol)
    scale = max(1.0, float(np.max(np.abs(F.on_circle(grid_size)))))
    if np.min(np.abs(e_q)) <= tol.tau_zero * scale:
        raise CriterionInapplicable("F - L_q/q vanishes on the unit circle")
    if isinstance(Pi, CriticalPointRecord) and Pi is record:
        e_pi = e_q
    else:
        e_pi = _error_callable(F, Pi)(unit_roots(grid_size))
    min_ratio = float(np.min(np.abs((e_q - e_pi) / e_q)))
    err = _error_callable(F, Pi)
    try:
        wn = winding_number_adaptive(err, M=grid_size, tol=tol)
    except VanishingOnCircleError as exc:
        raise CriterionInapplicable(f"F - Pi vanishes on the unit circle: {exc}") from exc
    passed = bool(min_ratio > 2.0 and wn == 1 - 2 * n)
    return CriterionReport(n, min_ratio, wn, passed, grid_size)


# ---------------------------------------------------------------------------
# outer factor and Hankel operator


@dataclass(frozen=True)
class OuterFactor:
    """Outer function with prescribed modulus on the unit circle.

    ``log_coeffs[k]`` are the Taylor coefficients of ``log o`` at 0.
    """

    grid: CircleGrid
    log_coeffs: np.ndarray = field(repr=False)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) > 1.0 + 1e-12):
            raise DomainError("the outer factor is evaluated in the closed unit disk")
        acc = np.zeros_like(z)
        for c in self.log_coeffs[::-1]:
            acc = acc * z + c
        return np.exp(acc)


def outer_factor(w, tol: Tolerances = DEFAULT) -> OuterFactor:
    """Outer factor of a function known by its samples on the unit circle.

    Only ``|w|`` enters: ``log o`` is the analytic completion of ``log |w|``
    (constant term plus twice the positive frequencies), so ``o(0) > 0``.
    """
    s = np.asarray(w.samples if isinstance(w, CircleGrid) else w, dtype=complex)
    mod = np.abs(s)
    if np.min(mod) <= tol.tau_zero * max(1.0, float(np.max(mod))):
        raise CriterionInapplicable("w vanishes on the unit circle; no outer factor")
    M = s.size
    c = fourier(np.log(mod))
    h = np.zeros(M // 2, dtype=complex)
    h[0] = c[0].real
    h[1:] = 2.0 * c[1 : M // 2]
    vals = np.exp(np.fft.ifft(np.concatenate([h, np.zeros(M - M // 2)])) * M)
    return OuterFactor(CircleGrid(vals), h)


def hankel_sigma(symbol_coeffs, n: int, N: int | None = None, stable: float = DEFAULT.hankel_stable,
                 max_N: int = 4096) -> np.ndarray:
    """Singular values of the Hankel matrix ``[s_{-(i+j+1)}]`` of size N.

    ``symbol_coeffs`` is an array ``[s_{-1}, s_{-2}, ...]`` or a callable
    returning that array for a requested length. N starts at
    ``max(8n, 128)`` and doubles until the leading n singular values move by
    less than ``stable`` (relative to ``max(1, sigma_k)``).
    """
    if callable(symbol_coeffs):
        coeff = symbol_coeffs
    else:
        arr = np.asarray(symbol_coeffs, dtype=complex)

        def coeff(m):
            if m > arr.size:
                raise TruncationError(f"need {m} negative Fourier coefficients, have {arr.size}")
            return arr[:m]

    N = max(8 * n, 128) if N is None else N
    if N < 8 * n:
        raise TruncationError(f"truncation N={N} is below 8n={8 * n}")
    prev = None
    while True:
        c = coeff(2 * N - 1)
        sv = np.linalg.svd(hankel(c[:N], c[N - 1 : 2 * N - 1]), compute_uv=False)
        if prev is not None:
            k = min(n, sv.size)
            gap = np.abs(sv[:k] - prev[:k]) / np.maximum(1.0, prev[:k])
            if np.all(gap <= stable):
                return sv
        prev = sv
        if 2 * N > max_N:
            raise TruncationError(f"leading singular values not stable up to N={N}")
        try:
            coeff(4 * N - 1)
        except TruncationError as exc:
            raise TruncationError(f"leading singular values not stable at N={N}: {exc}") from exc
        N *= 2


@dataclass(frozen=True)
class HankelSymbol:
    """``s_q = L_q/(o_q q q~)`` for a critical point, with grid data.

    ``error`` holds ``F - L_q/q`` and ``outer`` the outer factor of
    ``|F - L_q/q|/|q|`` on the grid.
    """

    record: CriticalPointRecord
    outer: OuterFactor
    error: np.ndarray = field(repr=False)
    samples: np.ndarray = field(repr=False)
    qt_samples: np.ndarray = field(repr=False)

    @property
    def M(self) -> int:
        return self.samples.size

    def coefficients(self, m: int) -> np.ndarray:
        """``[s_{-1}, ..., s_{-m}]`` as sums of residues at the zeros of q."""
        q = self.record.q
        xi = q.roots()
        n = q.n
        dq = np.polynomial.polynomial.polyder(np.asarray(q.coeffs))
        dqx = np.polynomial.polynomial.polyval(xi, dq)
        if np.min(np.abs(dqx)) < 1e-8:
            c = fourier(self.samples)
            if m > self.M // 2:
                raise TruncationError("grid too small for the requested coefficients")
            return c[::-1][:m]
        qt = xi**n * np.conj(q(1.0 / np.conj(xi)))
        res = self.record.L(xi) / (dqx * qt * self.outer(xi))
        k = np.arange(m)
        return (xi[None, :] ** k[:, None]) @ res

    def g_samples(self, Pi, F: TargetFunction) -> np.ndarray:
        """``Pi/(q~ o_q)`` on the grid."""
        tau = unit_roots(self.M)
        return Pi(tau) / (self.qt_samples * self.outer.grid.samples)

    def difference(self, Pi, F: TargetFunction) -> np.ndarray:
        """``s_q - Pi/(q~ o_q)`` on the grid, from the two error formulas."""
        e_pi = _error_callable(F, Pi)(unit_roots(self.M))
        return (e_pi - self.error) / (self.outer.grid.samples * self.qt_samples)


def hankel_symbol(F: TargetFunction, record: CriticalPointRecord, M: int = DEFAULT.criterion_grid,
                  tol: Tolerances = DEFAULT) -> HankelSymbol:
    q = record.q
    e = critical_error(F, record, M, tol)
    tau = unit_roots(M)
    qs = q(tau)
    qt = tau**q.n * np.conj(qs)
    o = outer_factor(np.abs(e) / np.abs(qs), tol)
    s = record.L(tau) / (o.grid.samples * qs * qt)
    return HankelSymbol(record, o, e, s, qt)


@dataclass(frozen=True)
class DVPBound:
    value: float | None
    winding: int
    applicable: bool
    trivial: bool = False


def dvp_lower_bound(symbol_samples, g_samples, n: int, difference=None,
                    tol: Tolerances = DEFAULT) -> DVPBound:
    """``inf_T |s - g|`` when ``wn(s - g) <= 1 - 2n``; otherwise inapplicable.

    ``difference`` may carry ``s - g`` computed without cancellation.
    """
    s = np.asarray(symbol_samples, dtype=complex)
    d = np.asarray(difference, dtype=complex) if difference is not None else s - np.asarray(g_samples)
    trivial = difference is None and np.array_equal(s, np.asarray(g_samples))
    if trivial:
        return DVPBound(0.0, 0, False, True)
    try:
        wn = winding_number(d, tol)
    except (VanishingOnCircleError, ResolutionError):
        return DVPBound(None, 0, False)
    if wn > 1 - 2 * n:
        return DVPBound(None, wn, False)
    return DVPBound(float(np.min(np.abs(d))), wn, True)


# ---------------------------------------------------------------------------
# strong asymptotics


@dataclass(frozen=True)
class AsymptoticsRow:
    n: int
    sup_error: float
    predicted: float
    ratio_deviation: float


@dataclass(frozen=True)
class AsymptoticsReport:
    rows: tuple

    def __post_init__(self):
        ns = [r.n for r in self.rows]
        if ns != sorted(ns):
            raise ValueError("rows must be ordered by n")

    def to_json(self) -> dict:
        return {"rows": [{"n": r.n, "sup_error": r.sup_error, "predicted": r.predicted,
                          "ratio_deviation": r.ratio_deviation} for r in self.rows]}

    def to_csv(self) -> str:
        return _csv(["n", "sup_error", "predicted", "ratio_deviation"],
                    [[_fmt(r.n), _fmt(r.sup_error), _fmt(r.predicted), _fmt(r.ratio_deviation)]
                     for r in self.rows])

    @property
    def deviations(self) -> np.ndarray:
        return np.array([r.ratio_deviation for r in self.rows])


def _szego(F: TargetFunction):
    mu = F.measure
    if mu.density is not None:
        return density_szego(mu)
    return szego_function(mu.values(), mu.a, mu.b, K=mu.K)


def verify_strong_asymptotics(F: TargetFunction, source, n_range: Sequence[int] | None = None,
                              contour=None, M: int = 512, dps: int | None = None,
                              tol: Tolerances = DEFAULT) -> AsymptoticsReport:
    """Compare ``(F - Pi_n) w`` with ``2 G (D R_n / R)^2`` on a contour.

    ``source`` is an :class:`InterpolationScheme` or a sequence of critical
    point records (their reflected zeros are the nodes). ``contour`` is an
    array of points or a radius (default 2). Errors are evaluated in mpmath
    with enough digits for the smallest predicted error.
    """
    if F.measure is None:
        raise PreconditionError("strong asymptotics need a measure part")
    a, b = F.interval
    if contour is None or np.isscalar(contour):
        rad = 2.0 if contour is None else float(contour)
        z = rad * np.exp(2j * np.pi * (np.arange(M) + 0.5) / M)
    else:
        z = np.asarray(contour, dtype=complex).reshape(-1)
    if np.min(F.distance_to_singularities(z)) <= tol.tau_margin:
        raise DomainError("contour touches [a, b] or a pole of the rational part")
    if isinstance(source, InterpolationScheme):
        ns = list(n_range) if n_range is not None else source.degrees
        sets = {n: source[n] for n in ns}
    else:
        recs = {r.degree: r for r in source}
        ns = list(n_range) if n_range is not None else sorted(recs)
        sets = {n: InterpolationSet.from_points(reflected(recs[n].q.roots())) for n in ns}
    ns = sorted(ns)
    sz = _szego(F)
    phi_abs = np.abs(joukowski_inverse_phi(z, a, b))
    poles = [loc for loc, mult in F.rational.poles for _ in range(mult)]
    rows = []
    for n in ns:
        E = sets[n]
        digits = dps or int(20 + 2 * n * max(0.0, -math.log10(float(np.min(phi_abs)))) + 4 * len(poles))
        P = build_pade(F, E, dps=digits, tol=tol)
        ctx = P._core.ctx
        zz = bk.to_mp(z, ctx)
        err = P.error_mp(z)
        w = w_branch_mp(zz, a, b, ctx)
        u = phi_mp(zz, a, b, ctx)
        R = u * 0 + 1
        for p in poles:
            pp = phi_mp(ctx.mpc(complex(p)), a, b, ctx)
            R = R * (u - pp) / (1 - u * pp)
        Rn = blaschke_product_Rn_mp(E, zz, a, b, ctx)
        D = sz.mp(zz, ctx)
        pred = 2 * ctx.mpc(sz.gm) * (D * Rn / R) ** 2
        act = err * w
        ratio = act / pred
        rows.append(AsymptoticsRow(
            n,
            float(max(abs(x) for x in act)),
            float(max(abs(x) for x in pred)),
            float(max(abs(x - 1) for x in ratio)),
        ))
    return AsymptoticsReport(tuple(rows))


# ---------------------------------------------------------------------------
# Green equilibrium and pole diagnostics


def _cheb_cell_antiderivative(coeffs, theta):
    """``A(theta) = c_0 theta + sum_k c_k sin(k theta)/k``."""
    theta = np.asarray(theta, dtype=float)
    out = coeffs[0] * theta
    for k in range(1, len(coeffs)):
        out = out + coeffs[k] * np.sin(k * theta) / k
    return out


def _theta(x, a, b):
    s = np.clip((2.0 * np.asarray(x, dtype=float) - a - b) / (b - a), -1.0, 1.0)
    return np.arccos(s)


@dataclass(frozen=True)
class GreenEquilibrium:
    """Green equilibrium distribution of ``[a, b]`` relative to the unit disk.

    The density is ``f(t) d omega(t)`` with ``f = sum coeffs[k] T_k`` in the
    variable of ``[a, b]``; ``grid``/``density`` sample it against dt.
    """

    a: float
    b: float
    coeffs: np.ndarray = field(repr=False)
    grid: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)
    flatness: float = 0.0

    @property
    def mass(self) -> float:
        return float(self.coeffs[0].real)

    def weight(self, t) -> np.ndarray:
        """``f(t)``, the density relative to the arcsine distribution."""
        s = (2.0 * np.asarray(t, dtype=float) - self.a - self.b) / (self.b - self.a)
        return np.polynomial.chebyshev.chebval(s, self.coeffs.real)

    def cdf(self, x) -> np.ndarray:
        th = _theta(x, self.a, self.b)
        c = self.coeffs.real
        return (_cheb_cell_antiderivative(c, np.pi) - _cheb_cell_antiderivative(c, th)) / np.pi


def _green_potential_matrix(x, a, b, K, Kq):
    """Green potentials of ``T_k d omega`` at points x."""
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    s = (x - c) / h
    T = np.polynomial.chebyshev.chebvander(s, K - 1)
    V = np.empty_like(T)
    V[:, 0] = math.log(2.0 / h)
    V[:, 1:] = T[:, 1:] / np.arange(1, K)
    # smooth part log|1 - x t| by Gauss-Chebyshev quadrature
    tq = cheb_nodes(Kq, a, b)
    Tq = np.polynomial.chebyshev.chebvander((tq - c) / h, K - 1)
    Lg = np.log(np.abs(1.0 - x[:, None] * tq[None, :]))
    return V + Lg @ Tq / Kq


def green_equilibrium(a: float, b: float, grid_size: int = 400, K: int = 48,
                      flat_tol: float = 1e-3) -> GreenEquilibrium:
    """Probability measure on ``[a, b]`` with constant Green potential there.

    Solved by Chebyshev collocation of the stationarity condition; the
    potential is then checked for flatness on ``grid_size`` points.
    """
    if not (-1.0 < a < b < 1.0):
        raise DomainError("a < b required with [a, b] inside (-1, 1)")
    x = cheb_nodes(K, a, b)
    A = _green_potential_matrix(x, a, b, K, 4 * K)
    # unknowns: coeffs f_0..f_{K-1} and the constant; f_0 = 1 fixes the mass
    sys = np.zeros((K + 1, K + 1))
    sys[:K, :K] = A
    sys[:K, K] = -1.0
    sys[K, 0] = 1.0
    rhs = np.zeros(K + 1)
    rhs[K] = 1.0
    sol = np.linalg.solve(sys, rhs)
    coeffs, const = sol[:K], sol[K]
    xs = a + (b - a) * (np.arange(grid_size) + 0.5) / grid_size
    pot = _green_potential_matrix(xs, a, b, K, 4 * K) @ coeffs
    flat = float(np.max(np.abs(pot - const)) / max(1.0, abs(const)))
    if flat > flat_tol:
        raise ResolutionError(f"Green potential deviates by {flat:.2e} from a constant")
    s = (2.0 * xs - a - b) / (b - a)
    dens = np.polynomial.chebyshev.chebval(s, coeffs) / (np.pi * np.sqrt((xs - a) * (b - xs)))
    return GreenEquilibrium(a, b, coeffs, xs, dens, flat)


@dataclass(frozen=True)
class PoleRow:
    n: int
    sum_abs_im: float
    max_abs_im: float
    ks_distance: float
    histogram: tuple = ()


@dataclass(frozen=True)
class PoleReport:
    rows: tuple
    edges: tuple = ()

    def to_json(self) -> dict:
        return {"edges": list(self.edges),
                "rows": [{"n": r.n, "sum_abs_im": r.sum_abs_im, "max_abs_im": r.max_abs_im,
                          "ks_distance": r.ks_distance, "histogram": list(r.histogram)} for r in self.rows]}

    def to_csv(self) -> str:
        return _csv(["n", "sum_abs_im", "max_abs_im", "ks_distance"],
                    [[_fmt(r.n), _fmt(r.sum_abs_im), _fmt(r.max_abs_im), _fmt(r.ks_distance)]
                     for r in self.rows])


def ks_distance(points, green: GreenEquilibrium) -> float:
    """Sup distance between the empirical CDF of real points and the Green CDF."""
    x = np.sort(np.asarray(points, dtype=float))
    if x.size == 0:
        return 1.0
    G = green.cdf(x)
    k = np.arange(1, x.size + 1) / x.size
    return float(max(np.max(np.abs(k - G)), np.max(np.abs(k - 1.0 / x.size - G))))


def pole_diagnostics(records: Sequence[CriticalPointRecord], a: float, b: float, exclude: int = 0,
                     bins: int = 10, green: GreenEquilibrium | None = None) -> PoleReport:
    """Imaginary-part sums, histograms and KS distance of pole real parts.

    ``exclude`` drops that many poles farthest from ``[a, b]`` (those
    attracted by the poles of a rational part).
    """
    green = green or green_equilibrium(a, b)
    edges = np.linspace(a, b, bins + 1)
    rows = []
    for rec in sorted(records, key=lambda r: r.degree):
        p = np.asarray(rec.poles if len(rec.poles) else rec.q.roots(), dtype=complex)
        if exclude:
            d = np.abs(p - np.clip(p.real, a, b))
            p = p[np.argsort(d, kind="stable")][: max(0, p.size - exclude)]
        im = np.abs(p.imag)
        hist, _ = np.histogram(np.clip(p.real, a, b), bins=edges)
        rows.append(PoleRow(rec.degree, float(np.sum(im)), float(np.max(im)) if im.size else 0.0,
                            ks_distance(p.real, green), tuple(int(v) for v in hist)))
    return PoleReport(tuple(rows), tuple(float(e) for e in edges))


# ---------------------------------------------------------------------------
# nodes from a critical point


@dataclass(frozen=True)
class SignedMeasureSamples:
    """Signed measure ``h d omega`` on ``[a, b]``.

    ``values`` are samples of the real weight ``h`` at ``cheb_nodes(K, a, b)``
    (``K = values.size``); cell masses are exact for the interpolant of h.
    """

    a: float
    b: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError("a < b required")
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size == 0:
            raise ValueError("at least one sample is needed")
        object.__setattr__(self, "values", v)

    @classmethod
    def arcsine(cls, a: float, b: float, mass: float = 2.0, K: int = 8) -> "SignedMeasureSamples":
        return cls(a, b, np.full(K, mass))

    @classmethod
    def from_callable(cls, a: float, b: float, h: Callable, K: int = 64) -> "SignedMeasureSamples":
        return cls(a, b, np.asarray(h(cheb_nodes(K, a, b)), dtype=float))

    @property
    def grid(self) -> np.ndarray:
        return cheb_nodes(self.values.size, self.a, self.b)

    @property
    def coeffs(self) -> np.ndarray:
        return cheb_coefficients(self.values).real

    @property
    def mass(self) -> float:
        return float(self.coeffs[0])

    @property
    def total_variation(self) -> float:
        return float(np.mean(np.abs(self.values)))

    def cdf(self, x) -> np.ndarray:
        """``nu([a, x])``."""
        c = self.coeffs
        th = _theta(x, self.a, self.b)
        return (_cheb_cell_antiderivative(c, np.pi) - _cheb_cell_antiderivative(c, th)) / np.pi

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "values": [float(v) for v in self.values]}

    @classmethod
    def from_json(cls, doc: dict) -> "SignedMeasureSamples":
        return cls(float(doc["a"]), float(doc["b"]), np.asarray(doc["values"], dtype=float))


@dataclass(frozen=True)
class ComparisonData:
    """Ordered interval zeros ``xi``, the cell masses and the auxiliary points."""

    xi: np.ndarray
    others: np.ndarray
    c: np.ndarray
    b: np.ndarray
    a: np.ndarray
    y: np.ndarray
    nodes: InterpolationSet


def _order_roots(roots, a, b, m, poles, tie_tol):
    r = np.asarray(roots, dtype=complex)
    idx = np.arange(r.size)
    far = np.zeros(0, dtype=int)
    if m:
        d = np.min(np.abs(r[:, None] - np.asarray(poles)[None, :]), axis=1)
        far = idx[np.argsort(d, kind="stable")[:m]]
    rest = np.setdiff1d(idx, far)
    inside = [i for i in rest if a < r[i].real < b]
    outside = [i for i in rest if not a < r[i].real < b]
    inside.sort(key=lambda i: (r[i].real, abs(r[i].imag)))
    ordered, extra = [], list(outside)
    k = 0
    while k < len(inside):
        block = [inside[k]]
        while k + len(block) < len(inside) and \
                abs(r[inside[k + len(block)]].real - r[inside[k]].real) <= tie_tol:
            block.append(inside[k + len(block)])
        k += len(block)
        if len(block) > 1:
            ims = np.array([abs(r[i].imag) for i in block])
            best = np.flatnonzero(ims <= ims.min() + tie_tol)
            distinct = {complex(round(r[block[j]].real, 12), round(r[block[j]].imag, 12)) for j in best}
            if len(distinct) > 1:
                amb = [int(block[j]) for j in best]
                raise OrderingError(f"zeros {amb} share a real part and cannot be ordered", amb)
            block.sort(key=lambda i: abs(r[i].imag))
        ordered.append(block[0])
        extra.extend(block[1:])
    extra.extend(far.tolist())
    return r[ordered], r[extra]


def comparison_data(nu: SignedMeasureSamples, record: CriticalPointRecord, m: int = 0,
                    poles=(), tie_tol: float = 1e-10) -> ComparisonData:
    if abs(nu.mass - 2.0) > 1e-9:
        raise PreconditionError(f"the signed measure must have mass 2, got {nu.mass:.12g}")
    xi, others = _order_roots(record.q.roots(), nu.a, nu.b, m, poles, tie_tol)
    d = xi.size
    x = xi.real
    mids = 0.5 * (x[:-1] + x[1:])
    cuts = np.concatenate([[nu.a], mids, [nu.b]])
    F = nu.cdf(cuts)
    c = np.diff(F)
    bj = F[1:-1] - F[0]  # nu([a, mid_j))
    aj = 2.0 - bj
    y = 0.5 * (aj * xi[:-1] + bj * xi[1:]) if d > 1 else np.zeros(0, dtype=complex)
    with np.errstate(divide="ignore"):
        pts = np.concatenate([1.0 / np.conj(y), 1.0 / np.conj(others)])
    pts = np.where(np.abs(pts) > 1e300, np.inf, pts)
    nodes = InterpolationSet.from_points(pts)
    return ComparisonData(xi, others, c, bj, aj, y, nodes)


def build_comparison_scheme(nu_check: SignedMeasureSamples, record: CriticalPointRecord, m: int = 0,
                            poles=(), tie_tol: float = 1e-10) -> InterpolationSet:
    """n-1 nodes for the comparison interpolant of a degree-n critical point.

    The d zeros with real part in ``(a, b)`` are ordered by real part; with
    half-point cells ``c_j`` of ``nu_check``, ``b_j = c_1 + ... + c_j`` and
    ``a_j = 2 - b_j`` the points ``y_j = (a_j xi_j + b_j xi_{j+1})/2`` give
    nodes ``1/conj(y_j)``; the remaining zeros contribute ``1/conj(xi)``.
    ``m`` zeros nearest to ``poles`` (the rational part) are set apart first.
    """
    return comparison_data(nu_check, record, m, poles, tie_tol).nodes


def comparison_interpolant(F: TargetFunction, record: CriticalPointRecord,
                           nu: SignedMeasureSamples | None = None, **kw) -> PadeApproximant:
    """Padé approximant of degree n-1 on the comparison nodes (default ``nu = 2 omega``)."""
    a, b = F.interval
    nu = nu or SignedMeasureSamples.arcsine(a, b)
    m = F.rational.degree if F.rational is not None else 0
    E = build_comparison_scheme(nu, record, m=m, poles=F.poles)
    return build_pade(F, E, **kw)


def comparison_scheme(F: TargetFunction, records: Sequence[CriticalPointRecord],
                      nu: SignedMeasureSamples | None = None) -> InterpolationScheme:
    a, b = F.interval
    nu = nu or SignedMeasureSamples.arcsine(a, b)
    m = F.rational.degree if F.rational is not None else 0
    sets = [build_comparison_scheme(nu, r, m=m, poles=F.poles) for r in records if r.degree > 1]
    return InterpolationScheme(tuple(sets), provenance="comparison-construction")
