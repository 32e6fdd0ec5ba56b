"""Diagonal multipoint Padé approximants, interpolation schemes and the
products ``R_n``.

The default construction works with the orthogonality relations satisfied
by the denominator. With ``Q`` the polynomial vanishing at the doubled
finite nodes, the remainder ``(l F - p)/Q`` equals

    I(z) = int l(t) dmu(t) / (Q(t)(z - t)) + sum over poles lam of r
           of Res_{s=lam} l(s) r(s) / (Q(s)(z - s)),

and the decay at infinity turns into ``n`` linear conditions on ``l``. The
error is then available as ``F - p/l = Q I / l`` without cancellation,
which matters once it drops far below the size of ``F``. Passing ``dps``
runs the same construction in mpmath arithmetic.

``method="collocation"`` solves the raw interpolation conditions in the
monomial basis instead and serves as an independent check for small n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from numpy.polynomial import Chebyshev, Polynomial

from . import _backend as bk
from .cauchy import TargetFunction, cheb_nodes, joukowski_inverse_phi, phi_mp
from .config import DEFAULT, Tolerances
from .errors import DomainError, PoleCollisionError
from .hardy import ComplexPoly, MonicPoly, poly_degree, unit_roots


# ---------------------------------------------------------------------------
# node sets


def _as_point(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


@dataclass(frozen=True)
class InterpolationSet:
    """Finite nodes (with repetition) plus a number of nodes at infinity."""

    points: tuple = ()
    at_infinity: int = 0

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        if any(not np.isfinite(p) for p in pts):
            raise ValueError("use at_infinity for nodes at infinity")
        if self.at_infinity < 0:
            raise ValueError("at_infinity must be >= 0")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, pts) -> "InterpolationSet":
        pts = [complex(p) for p in np.asarray(pts, dtype=complex).reshape(-1)]
        finite = [p for p in pts if np.isfinite(p)]
        return cls(tuple(finite), len(pts) - len(finite))

    @classmethod
    def infinity(cls, n: int) -> "InterpolationSet":
        return cls((), n)

    @property
    def n(self) -> int:
        return len(self.points) + self.at_infinity

    @property
    def finite(self) -> np.ndarray:
        return np.array(self.points, dtype=complex)

    @property
    def v(self) -> MonicPoly:
        return MonicPoly.from_roots(self.finite)

    def all_points(self) -> np.ndarray:
        return np.concatenate([self.finite, np.full(self.at_infinity, np.inf + 0j)])

    def validate(self, F: TargetFunction, tol: Tolerances = DEFAULT):
        if not self.points:
            return
        d = F.distance_to_singularities(self.finite)
        if np.min(d) <= tol.tau_margin:
            k = int(np.argmin(d))
            raise DomainError(f"node {self.points[k]} lies within {d[k]:.2e} of [a, b] or a pole")

    def to_json(self) -> dict:
        return {"points": [[p.real, p.imag] for p in self.points], "at_infinity": self.at_infinity}

    @classmethod
    def from_json(cls, doc: dict) -> "InterpolationSet":
        return cls(tuple(_as_point(p) for p in doc.get("points", [])), int(doc.get("at_infinity", 0)))


PROVENANCES = ("user", "reflected-critical", "comparison-construction")


@dataclass(frozen=True)
class InterpolationScheme:
    """Node sets indexed by their size ``n``."""

    sets: tuple
    provenance: str = "user"

    def __post_init__(self):
        sets = tuple(self.sets)
        sizes = [E.n for E in sets]
        if len(set(sizes)) != len(sizes):
            raise ValueError("scheme holds two sets of the same size")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")
        object.__setattr__(self, "sets", tuple(sorted(sets, key=lambda E: E.n)))

    def __getitem__(self, n: int) -> InterpolationSet:
        for E in self.sets:
            if E.n == n:
                return E
        raise KeyError(f"no set of size {n}")

    @property
    def degrees(self) -> list[int]:
        return [E.n for E in self.sets]

    @classmethod
    def at_infinity(cls, n_max: int, n_min: int = 1) -> "InterpolationScheme":
        return cls(tuple(InterpolationSet.infinity(n) for n in range(n_min, n_max + 1)))

    @classmethod
    def from_critical(cls, records) -> "InterpolationScheme":
        """Reflections ``1/conj(xi)`` of critical-point poles."""
        from .hardy import reflected

        sets = [InterpolationSet.from_points(reflected(r.poles)) for r in records]
        return cls(tuple(sets), "reflected-critical")

    def to_json(self) -> dict:
        return {"sets": [E.to_json() for E in self.sets], "provenance": self.provenance}

    @classmethod
    def from_json(cls, doc: dict) -> "InterpolationScheme":
        return cls(tuple(InterpolationSet.from_json(s) for s in doc["sets"]), doc.get("provenance", "user"))


# ---------------------------------------------------------------------------
# truncated Taylor arithmetic (works for complex and mpmath scalars)


def _series_mul(a, b, m):
    out = [a[0] * 0 for _ in range(m)]
    for i in range(min(m, len(a))):
        for j in range(min(m - i, len(b))):
            out[i + j] = out[i + j] + a[i] * b[j]
    return out


def _series_inv(a, m):
    out = [a[0] * 0 for _ in range(m)]
    out[0] = 1 / a[0]
    for k in range(1, m):
        s = a[0] * 0
        for j in range(1, min(k, len(a) - 1) + 1):
            s = s + a[j] * out[k - j]
        out[k] = -s / a[0]
    return out


def _q_factor(s, e):
    """Normalised linear factor of Q: ``s - e`` near the disk, ``1 - s/e`` far out."""
    return s - e if abs(e) <= 1 else 1 - s / e


def _q_factor_series(lam, e, m):
    if abs(e) <= 1:
        return [lam - e, 1 + 0 * lam] + [0 * lam] * (m - 2)
    return [1 - lam / e, -1 / e + 0 * lam] + [0 * lam] * (m - 2)


# ---------------------------------------------------------------------------
# core


@dataclass
class _Core:
    """Arrays defining the orthogonality system, in complex or mpmath arithmetic."""

    n: int
    c: object  # basis interval centre
    h: object  # basis interval half-length
    nodes: list  # finite interpolation nodes, each listed twice
    t: object = None  # quadrature nodes
    wmu: object = None  # quadrature weights times density
    residues: list = field(default_factory=list)  # (lam, principal part coeffs)
    ctx: object = None

    def cheb(self, s, kmax):
        """T_0..T_kmax at the mapped points, list of arrays."""
        x = (s - self.c) / self.h
        out = [x * 0 + 1, x]
        for _ in range(2, kmax + 1):
            out.append(2 * x * out[-1] - out[-2])
        return out[: kmax + 1]

    def Q(self, s):
        out = s * 0 + 1
        for e in self.nodes:
            out = out * _q_factor(s, e)
        return out

    def _cheb_series(self, lam, kmax, m):
        x = [(lam - self.c) / self.h, 1 / self.h + 0 * lam] + [0 * lam] * (m - 2)
        x = x[:m]
        T = [[1 + 0 * lam] + [0 * lam] * (m - 1), x]
        for _ in range(2, kmax + 1):
            two_x_t = [2 * v for v in _series_mul(x, T[-1], m)]
            T.append([u - v for u, v in zip(two_x_t, T[-2])])
        return T[: kmax + 1]

    def _invQ_series(self, lam, m):
        acc = [1 + 0 * lam] + [0 * lam] * (m - 1)
        for e in self.nodes:
            acc = _series_mul(acc, _q_factor_series(lam, e, m)[:m], m)
        return _series_inv(acc, m)

    def matrix(self):
        n = self.n
        rows = []
        if self.t is not None:
            Tt = self.cheb(self.t, n)
            wq = self.wmu / self.Q(self.t)
        for k in range(n):
            row = []
            for j in range(n + 1):
                val = 0
                if self.t is not None:
                    val = np.sum(Tt[k] * Tt[j] * wq)
                row.append(val)
            rows.append(row)
        for lam, cs in self.residues:
            m = max(len(cs), 1)
            m2 = max(m, 2)
            T = self._cheb_series(lam, n, m2)
            iq = self._invQ_series(lam, m2)
            for k in range(n):
                for j in range(n + 1):
                    g = _series_mul(_series_mul(T[k], T[j], m2), iq, m2)
                    rows[k][j] = rows[k][j] + sum(cp * g[p] for p, cp in enumerate(cs))
        if self.ctx is None:
            return np.array(rows, dtype=complex)
        return np.array(rows, dtype=object)

    def ell(self, coef, s):
        T = self.cheb(s, self.n)
        out = s * 0
        for j in range(self.n + 1):
            out = out + coef[j] * T[j]
        return out

    def remainder(self, coef, z):
        """``I(z) = (l F - p)/Q`` at the points z (1-d array)."""
        out = z * 0
        if self.t is not None:
            g = self.ell(coef, self.t) * self.wmu / self.Q(self.t)
            for i in range(len(z)):
                out[i] = np.sum(g / (z[i] - self.t))
        for lam, cs in self.residues:
            m = max(len(cs), 2)
            T = self._cheb_series(lam, self.n, m)
            lser = [0 * lam] * m
            for j in range(self.n + 1):
                lser = [u + coef[j] * v for u, v in zip(lser, T[j])]
            g = _series_mul(lser, self._invQ_series(lam, m), m)
            for i in range(len(z)):
                d = z[i] - lam
                kern = [1 / d ** (k + 1) for k in range(m)]
                gk = _series_mul(g, kern, m)
                out[i] = out[i] + sum(cp * gk[p] for p, cp in enumerate(cs))
        return out


def _make_core(F: TargetFunction, E: InterpolationSet, K: int | None, ctx=None) -> _Core:
    n = E.n
    lo, hi = F.interval
    nodes = [e for e in E.points for _ in range(2)]
    if ctx is None:
        core = _Core(n, 0.5 * (lo + hi), 0.5 * (hi - lo), nodes)
        if F.measure is not None:
            core.t = F.measure.nodes(K)
            core.wmu = F.measure.values(K) / K
        core.residues = [(lam, list(cs)) for (lam, _), cs in zip(F.rational.poles, F.rational.coeffs)]
        return core
    mp = lambda v: ctx.mpc(complex(v))  # noqa: E731
    core = _Core(n, ctx.mpf(lo + hi) / 2, ctx.mpf(hi - lo) / 2, [mp(e) for e in nodes], ctx=ctx)
    if F.measure is not None:
        t, v = F.measure.values_mp(K, ctx)
        core.t = t
        core.wmu = v / K
    core.residues = [(mp(lam), [mp(c) for c in cs]) for (lam, _), cs in zip(F.rational.poles, F.rational.coeffs)]
    return core


def _solve_core(core: _Core):
    A = core.matrix()
    # column equilibration keeps residue columns from swamping quadrature ones
    if core.ctx is None:
        scale = np.linalg.norm(A, axis=0)
        scale[scale == 0] = 1.0
        v, S = bk.null_vector(A / scale)
        coef = v / scale
        coef = coef / coef[np.argmax(np.abs(coef))]
        return coef, np.asarray(S, dtype=float)
    ctx = core.ctx
    scale = np.array([ctx.sqrt(ctx.fsum(abs(a) ** 2 for a in A[:, j])) or ctx.mpf(1) for j in range(A.shape[1])],
                     dtype=object)
    v, S = bk.null_vector(A / scale[None, :], ctx)
    coef = v / scale
    big = max(range(len(coef)), key=lambda j: abs(coef[j]))
    coef = coef / coef[big]
    return coef, np.array([float(s) for s in S])


def _nullity(S, n, rel=1e-10) -> int:
    S = np.asarray(S, dtype=float)
    if S.size == 0 or S[0] == 0:
        return n + 1
    rank = int(np.sum(S > rel * S[0]))
    return n + 1 - rank


def _cheb_to_monomial(coef, c, h) -> np.ndarray:
    ch = Chebyshev(np.asarray(coef, dtype=complex), domain=[c - h, c + h])
    return ch.convert(kind=Polynomial).coef


def _p_from_remainder(F, core, coef, ell_mono) -> np.ndarray:
    """Coefficients of ``p = l F - Q I`` from samples on a circle avoiding singularities."""
    n = core.n
    if n == 0:
        return np.zeros(1, dtype=complex)
    lo, hi = F.interval
    sing = [abs(l) for l in F.poles]
    base = max(abs(lo), abs(hi)) if F.measure is not None else 0.0
    best, R = -1.0, 1.0
    for cand in (1.0, 1.2, 0.9, 1.5, 2.0, 3.0, 0.75, 5.0):
        if cand <= base + 0.02:
            continue
        gap = min([abs(cand - s) for s in sing] + [cand - base]) / cand
        if gap > best:
            best, R = gap, cand
    M = max(64, 4 * n)
    z = R * unit_roots(M)
    vals = np.polynomial.polynomial.polyval(z, ell_mono) * F(z) - core.Q(z) * core.remainder(coef, z)
    c = np.fft.fft(vals) / M
    return c[:n] / R ** np.arange(n)


def _reduce(p: np.ndarray, ell: np.ndarray, tau_gcd: float):
    """Remove common roots of p and l (root-cluster matching)."""
    pr = ComplexPoly(p).roots()
    lr = ComplexPoly(ell).roots()
    common = []
    used = np.zeros(pr.size, dtype=bool)
    for r in lr:
        if pr.size == 0:
            break
        d = np.abs(pr - r)
        d[used] = np.inf
        k = int(np.argmin(d))
        if d[k] <= tau_gcd * max(1.0, abs(r)):
            used[k] = True
            common.append(r)
    if not common:
        return p, ell, 0
    for r in common:
        p, _ = np.polynomial.polynomial.polydiv(p, [-r, 1.0])
        ell, _ = np.polynomial.polynomial.polydiv(ell, [-r, 1.0])
    return p, ell, len(common)


def _normalise(ell: np.ndarray, tau_zero: float):
    ell = ell / ell[np.argmax(np.abs(ell))]
    d = poly_degree(ell)
    if d >= 0 and abs(ell[-1]) > tau_zero:
        return ell / ell[-1], ell[-1]
    return ell, 1.0


@dataclass(frozen=True)
class PadeApproximant:
    """``Pi_n = p / l`` of type (n-1, n).

    ``p`` and ``ell`` are coprime-reduced monomial coefficients; the
    unreduced orthogonality data is kept for the cancellation-free error
    ``F - Pi_n = Q I / l``.
    """

    p: ComplexPoly
    ell: ComplexPoly
    n: int
    E: InterpolationSet
    singular_values: np.ndarray = field(repr=False)
    flags: tuple = ()
    gcd_degree: int = 0
    method: str = "orthogonality"
    _core: object = field(default=None, repr=False, compare=False)
    _coef: object = field(default=None, repr=False, compare=False)
    _lscale: object = field(default=1.0, repr=False, compare=False)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.p(z) / self.ell(z)

    @property
    def poles(self) -> np.ndarray:
        return self.ell.roots()

    @property
    def degenerate(self) -> bool:
        return "degenerate" in self.flags

    def error(self, z, F: TargetFunction | None = None):
        """``F - Pi_n`` at z. Uses the remainder formula when available."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if self._core is None:
            if F is None:
                raise ValueError("collocation approximant needs F to evaluate the error")
            return F(z) - self(z)
        core = self._core
        if core.ctx is not None:
            return bk.to_complex(self.error_mp(z))
        return core.Q(z) * core.remainder(self._coef, z) / core.ell(self._coef, z)

    def error_mp(self, z):
        """Error in the arithmetic of the core (object array for mpmath cores)."""
        core = self._core
        if core is None or core.ctx is None:
            raise ValueError("approximant was not built in extended precision")
        zz = bk.to_mp(np.atleast_1d(z), core.ctx)
        return core.Q(zz) * core.remainder(self._coef, zz) / core.ell(self._coef, zz)

    def residuals(self, F: TargetFunction, tol: Tolerances = DEFAULT) -> dict:
        """Interpolation residuals: scaled ``(l F - p)`` and derivative at finite
        nodes, and leading Laurent coefficients of ``(l F - p)/Q`` at infinity."""
        core = self._core if self._core is not None and self._core.ctx is None else None
        out = {"nodes": 0.0, "infinity": 0.0}
        pts = self.E.finite
        if pts.size:
            lf = self.ell(pts) * F(pts) - self.p(pts)
            scale = np.abs(self.ell(pts) * F(pts)) + np.abs(self.p(pts)) + 1e-300
            out["nodes"] = float(np.max(np.abs(lf) / scale))
        # Laurent coefficients of (lF - p)/Q on a large circle
        R = 4.0 * max([1.0] + [abs(e) for e in pts] + [abs(l) for l in F.poles])
        M = 256
        z = R * unit_roots(M)
        if core is not None:
            g = core.remainder(self._coef, z)
            gscale = np.max(np.abs(core.cheb(z, self.n)[-1] * F(z) / core.Q(z)))
        else:
            Qz = np.ones(M, dtype=complex)
            for e in pts:
                Qz = Qz * _q_factor(z, e) ** 2
            g = (self.ell(z) * F(z) - self.p(z)) / Qz
            gscale = np.max(np.abs(self.ell(z) * F(z) / Qz))
        c = np.fft.fft(g) / M  # c[M-k] ~ coefficient of z^-k times R^-k
        lead = np.array([c[(M - k) % M] * R**k for k in range(0, self.n + 1)])
        out["infinity"] = float(np.max(np.abs(lead)) / (gscale * R ** self.n + 1e-300))
        return out


def build_pade(F: TargetFunction, E: InterpolationSet, method: str = "orthogonality",
               K: int | None = None, dps: int | None = None,
               tol: Tolerances = DEFAULT) -> PadeApproximant:
    """n-th diagonal Padé approximant of F at the doubled nodes of E (n = |E|).

    ``dps`` switches the orthogonality construction to mpmath with that many
    digits; the double-precision ``p`` and ``ell`` are still returned and
    :meth:`PadeApproximant.error_mp` exposes the extended-precision error.
    """
    E.validate(F, tol)
    n = E.n
    if n == 0:
        return PadeApproximant(ComplexPoly([0.0]), ComplexPoly([1.0]), 0, E, np.zeros(0))
    if method == "collocation":
        return _build_collocation(F, E, tol)
    if method != "orthogonality":
        raise ValueError(f"unknown method {method!r}")
    flags = []
    if dps is not None:
        ctx = mpmath.MPContext()
        ctx.dps = dps
        Kmp = K or (2 * n + int(1.5 * dps) + 16)
        core = _make_core(F, E, Kmp, ctx)
        coef_mp, S = _solve_core(core)
        coef = bk.to_complex(coef_mp)
        store = coef_mp
    else:
        K = K or (F.measure.K if F.measure is not None else 0)
        core = _make_core(F, E, K, None)
        coef, S = _solve_core(core)
        # refine the quadrature until the denominator settles
        while F.measure is not None and 2 * K <= tol.quad_max_nodes:
            core2 = _make_core(F, E, 2 * K, None)
            coef2, S2 = _solve_core(core2)
            settled = np.max(np.abs(coef2 - coef)) <= 1e-13 * np.max(np.abs(coef2))
            core, coef, S, K = core2, coef2, S2, 2 * K
            if settled:
                break
        store = coef
    if _nullity(S, n) > 1:
        flags.append("degenerate")
    lo, hi = F.interval
    ell_full = _cheb_to_monomial(coef, 0.5 * (lo + hi), 0.5 * (hi - lo))
    dcore = core if dps is None else _make_core(F, E, K or (F.measure.K if F.measure else 0), None)
    p_full = _p_from_remainder(F, dcore, coef, ell_full)
    p, ell, g = _reduce(p_full, ell_full, tol.tau_gcd)
    ell, lead = _normalise(ell, tol.tau_zero)
    p = _rescale_like(p, ell, p_full, ell_full, g)
    if g:
        flags.append(f"reduced-by-{g}")
    return PadeApproximant(ComplexPoly(p), ComplexPoly(ell), n, E, np.asarray(S), tuple(flags), g,
                           "orthogonality", core, store)


def _rescale_like(p, ell, p_full, ell_full, g):
    """Scale p so that p/ell equals p_full/ell_full."""
    z0 = 1.7 + 0.3j
    target = np.polynomial.polynomial.polyval(z0, p_full) / np.polynomial.polynomial.polyval(z0, ell_full)
    num = np.polynomial.polynomial.polyval(z0, p)
    den = np.polynomial.polynomial.polyval(z0, ell)
    if num == 0:
        return p
    return p * (target * den / num)


def _build_collocation(F: TargetFunction, E: InterpolationSet, tol: Tolerances) -> PadeApproximant:
    n = E.n
    nf = len(E.points)
    rows = []
    # finite nodes: derivatives 0 and 1 of (l F - p) per occurrence, grouped
    # by distinct location so repeated nodes give higher contact
    uniq: dict = {}
    for e in E.points:
        key = min(uniq, key=lambda u: abs(u - e), default=None)
        if key is not None and abs(key - e) <= 1e-12 * max(1.0, abs(e)):
            uniq[key] += 2
        else:
            uniq[e] = 2
    for e, mult in uniq.items():
        Fd = [complex(F.derivative(np.array([e]), d)[0]) / math.factorial(d) for d in range(mult)]
        for d in range(mult):
            row = np.zeros(2 * n + 1, dtype=complex)
            # Taylor coefficient d of z^i F at e
            for i in range(n + 1):
                acc = 0j
                for r in range(min(i, d) + 1):
                    acc += math.comb(i, r) * e ** (i - r) * Fd[d - r]
                row[i] = acc
            # minus Taylor coefficient d of p at e
            for i in range(n):
                if i >= d:
                    row[n + 1 + i] = -math.comb(i, d) * e ** (i - d)
            rows.append(row)
    # infinity: coefficients of z^j of l F - p vanish for j = 2 nf - n .. n-1
    a = F.laurent(n + 2).coeffs
    for j in range(2 * nf - n, n):
        row = np.zeros(2 * n + 1, dtype=complex)
        for i in range(n + 1):
            k = i - j
            if 1 <= k <= a.size:
                row[i] = a[k - 1]
        if j >= 0:
            row[n + 1 + j] = -1.0
        rows.append(row)
    A = np.array(rows)
    v, S = bk.null_vector(A)
    ell_full, p_full = v[: n + 1], v[n + 1 :]
    flags = ["degenerate"] if _nullity(S, n) > 1 else []
    p, ell, g = _reduce(p_full, ell_full, tol.tau_gcd)
    ell, _ = _normalise(ell, tol.tau_zero)
    p = _rescale_like(p, ell, p_full, ell_full, g)
    return PadeApproximant(ComplexPoly(p), ComplexPoly(ell), n, E, S, tuple(flags), g, "collocation")


# ---------------------------------------------------------------------------
# R_n and admissibility


def blaschke_product_Rn(E: InterpolationSet, z, a: float, b: float, side: str | None = None,
                        tol: Tolerances = DEFAULT):
    """``prod_e (phi(z) - phi(e)) / (1 - phi(z) phi(e))``; a node at infinity contributes ``phi(z)``."""
    z = np.asarray(z, dtype=complex)
    u = joukowski_inverse_phi(z, a, b, side)
    out = np.ones(z.shape, dtype=complex)
    for e in E.points:
        pe = complex(joukowski_inverse_phi(e, a, b))
        den = 1.0 - u * pe
        if np.any(np.abs(den) <= tol.tau_zero):
            raise PoleCollisionError(f"factor for node {e} has a vanishing denominator")
        out = out * (u - pe) / den
    return out * u ** E.at_infinity


def blaschke_product_Rn_mp(E: InterpolationSet, z, a: float, b: float, ctx):
    u = phi_mp(z, a, b, ctx)
    out = u * 0 + 1
    for e in E.points:
        pe = phi_mp(ctx.mpc(complex(e)), a, b, ctx)
        out = out * (u - pe) / (1 - u * pe)
    return out * u ** E.at_infinity


def _mobius(points, z0):
    pts = np.asarray(points, dtype=complex)
    out = np.zeros(pts.shape, dtype=complex)
    fin = np.isfinite(pts)
    out[fin] = 1.0 / (pts[fin] - z0)
    return out  # infinity maps to 0


def _transport_1d_complex(x, y) -> float:
    """Wasserstein-1 distance between two uniform point clouds in the plane,
    computed exactly by an assignment on a common refinement."""
    from scipy.optimize import linear_sum_assignment

    if x.size == 0 or y.size == 0:
        return 0.0
    m = math.lcm(x.size, y.size)
    xr = np.repeat(x, m // x.size)
    yr = np.repeat(y, m // y.size)
    cost = np.abs(xr[:, None] - yr[None, :])
    i, j = linear_sum_assignment(cost)
    return float(cost[i, j].mean())


def admissibility_report(S: InterpolationScheme, a: float, b: float, n_max: int | None = None,
                         F: TargetFunction | None = None, z0: complex | None = None) -> dict:
    """Diagnostics: conjugate-asymmetry sums, distance to the singular set,
    and transport distances between consecutive counting measures after the
    Möbius map ``1/(z - z0)``."""
    sets = [E for E in S.sets if n_max is None or E.n <= n_max]
    if z0 is None:
        # the scheme avoids [a, b], so a point next to its centre is safe
        z0 = complex(0.5 * (a + b), 1e-3)
    sym = []
    for E in sets:
        f = E.finite
        s = 0.0
        if f.size:
            s = float(np.sum(np.abs(joukowski_inverse_phi(f, a, b) - joukowski_inverse_phi(np.conj(f), a, b))))
        sym.append(s)
    dist = np.inf
    for E in sets:
        if E.points:
            if F is not None:
                dist = min(dist, float(np.min(F.distance_to_singularities(E.finite))))
            else:
                x = np.clip(E.finite.real, a, b)
                dist = min(dist, float(np.min(np.abs(E.finite - x))))
    transport = []
    for E1, E2 in zip(sets, sets[1:]):
        transport.append(_transport_1d_complex(_mobius(E1.all_points(), z0), _mobius(E2.all_points(), z0)))
    return {
        "degrees": [E.n for E in sets],
        "symmetry_sums": sym,
        "max_symmetry_sum": max(sym) if sym else 0.0,
        "min_distance": dist,
        "transport": transport,
    }
