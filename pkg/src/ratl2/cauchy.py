"""Complex Cauchy transforms of densities against the arcsine distribution.

A target is ``F = f_mu + r`` where ``d mu = mu_dot d omega`` on ``[a, b]``,
``omega`` is the arcsine distribution of that segment and ``r`` is rational.
Integrals against ``omega`` are Gauss-Chebyshev node averages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import mpmath
import numpy as np
from numpy.polynomial import chebyshev as C
from scipy import fft as sfft

from . import _backend as bk
from .config import DEFAULT, Tolerances
from .errors import BranchError, ClassViolationError, DomainError, ResolutionError
from .hardy import LaurentTail

_EXPR_NAMES = ("exp", "sin", "cos", "sqrt", "log", "sinh", "cosh", "tan", "arctan")


def cheb_nodes(K: int, a: float = -1.0, b: float = 1.0) -> np.ndarray:
    """Gauss-Chebyshev nodes ``c + h cos((2j-1) pi / 2K)``, j = 1..K."""
    theta = (2 * np.arange(1, K + 1) - 1) * np.pi / (2 * K)
    return 0.5 * (a + b) + 0.5 * (b - a) * np.cos(theta)


def cheb_nodes_mp(K: int, a, b, ctx) -> np.ndarray:
    a, b = ctx.mpf(a), ctx.mpf(b)
    out = np.empty(K, dtype=object)
    for j in range(1, K + 1):
        out[j - 1] = ctx.mpc((a + b) / 2 + (b - a) / 2 * ctx.cos((2 * j - 1) * ctx.pi / (2 * K)))
    return out


def cheb_coefficients(values) -> np.ndarray:
    """Chebyshev coefficients of the interpolant through values at ``cheb_nodes``."""
    v = np.asarray(values, dtype=complex)
    K = v.size
    c = (sfft.dct(v.real, type=2) + 1j * sfft.dct(v.imag, type=2)) / K
    c[0] /= 2
    return c


def cheb_coefficients_mp(values, ctx) -> np.ndarray:
    K = len(values)
    out = np.empty(K, dtype=object)
    cosines = [[ctx.cos(k * (2 * j + 1) * ctx.pi / (2 * K)) for j in range(K)] for k in range(K)]
    for k in range(K):
        s = ctx.fsum(values[j] * cosines[k][j] for j in range(K))
        out[k] = 2 * s / K if k else s / K
    return out


# ---------------------------------------------------------------------------
# square root branch and conformal map


def _cut_check(z, a, b, side):
    z = np.asarray(z, dtype=complex)
    on_cut = (z.imag == 0.0) & (z.real >= a) & (z.real <= b)
    if np.any(on_cut) and side is None:
        raise BranchError("point on the cut [a, b]; pass side='+' or side='-'")
    return z, on_cut


def w_branch(z, a: float, b: float, side: str | None = None):
    """``sqrt((z-a)(z-b))`` with cut ``[a, b]``, positive on ``(b, inf)``."""
    z, on_cut = _cut_check(z, a, b, side)
    w = np.sqrt(z - a) * np.sqrt(z - b)
    if side == "-" and np.any(on_cut):
        w = np.where(on_cut, np.conj(w), w)
    return w


def joukowski_inverse_phi(z, a: float, b: float, side: str | None = None):
    """Conformal map of the complement of ``[a, b]`` onto the disk,
    ``phi(inf) = 0`` and ``phi'(inf) > 0``."""
    z = np.asarray(z, dtype=complex)
    h = 0.5 * (b - a)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = h / (z - 0.5 * (a + b) + w_branch(z, a, b, side))
    return np.where(np.isinf(z), 0.0, out)


def phi_inverse(u, a: float, b: float):
    """Joukowski relation ``z = (a+b)/2 + (b-a)/4 (u + 1/u)``."""
    u = np.asarray(u, dtype=complex)
    return 0.5 * (a + b) + 0.25 * (b - a) * (u + 1.0 / u)


def w_branch_mp(z, a, b, ctx):
    return bk.sqrt(z - a, ctx) * bk.sqrt(z - b, ctx)


def phi_mp(z, a, b, ctx):
    h = ctx.mpf(b - a) / 2
    return h / (z - ctx.mpf(a + b) / 2 + w_branch_mp(z, a, b, ctx))


# ---------------------------------------------------------------------------
# densities


def unwrap_argument(samples, max_jump: float = np.pi / 2) -> tuple[np.ndarray, float]:
    """Continuous argument along the sample order and its total variation."""
    s = np.asarray(samples, dtype=complex)
    if np.any(np.abs(s) <= DEFAULT.tau_zero):
        raise ClassViolationError("density vanishes at a sample")
    steps = np.angle(s[1:] / s[:-1])
    if steps.size and np.max(np.abs(steps)) >= max_jump:
        raise ResolutionError(f"argument jumps by {np.max(np.abs(steps)):.3f} rad between samples")
    arg = np.angle(s[0]) + np.concatenate([[0.0], np.cumsum(steps)])
    return arg, float(np.sum(np.abs(steps)))


def _eval_expr(expr: str, t, ctx=None):
    if ctx is None:
        ns = {name: getattr(np, name) for name in _EXPR_NAMES}
        ns.update(pi=np.pi, abs=np.abs, t=t)
        val = eval(expr, {"__builtins__": {}}, ns)  # noqa: S307 - restricted namespace
        return np.broadcast_to(np.asarray(val, dtype=complex), np.shape(t)).copy()
    ns = {name: getattr(ctx, "atan" if name == "arctan" else name) for name in _EXPR_NAMES}
    ns.update(pi=ctx.pi, abs=ctx.fabs)
    out = np.empty(len(t), dtype=object)
    for i, ti in enumerate(t):
        ns["t"] = ti
        out[i] = ctx.mpc(eval(expr, {"__builtins__": {}}, ns))  # noqa: S307
    return out


@dataclass(frozen=True)
class MeasureM:
    """Density ``mu_dot`` on ``[a, b]`` with respect to the arcsine distribution."""

    a: float
    b: float
    density: Callable = field(compare=False)
    expr: str | None = None
    samples: tuple | None = None
    K: int = DEFAULT.quad_nodes

    def __post_init__(self):
        if not (self.a < self.b):
            raise DomainError("a < b required")
        if not (-1.0 < self.a and self.b < 1.0):
            raise DomainError("[a, b] must lie inside (-1, 1)")

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, a, b, value=1.0, K=DEFAULT.quad_nodes):
        v = complex(value)
        return cls(a, b, lambda t: np.full(np.shape(t), v, dtype=complex),
                   expr=repr(v) if v.imag else repr(v.real), K=K)

    @classmethod
    def from_expr(cls, a, b, expr: str, K=DEFAULT.quad_nodes):
        return cls(a, b, lambda t: _eval_expr(expr, np.asarray(t)), expr=expr, K=K)

    @classmethod
    def from_samples(cls, a, b, values):
        """Values at the Gauss-Chebyshev nodes of ``[a, b]`` (``cheb_nodes`` order)."""
        vals = np.asarray(values, dtype=complex)
        coef = cheb_coefficients(vals)
        h, c = 0.5 * (b - a), 0.5 * (a + b)

        def density(t):
            return C.chebval((np.asarray(t) - c) / h, coef)

        return cls(a, b, density, samples=tuple(vals), K=vals.size)

    @classmethod
    def from_callable(cls, a, b, fn, K=DEFAULT.quad_nodes):
        return cls(a, b, fn, K=K)

    # evaluation ---------------------------------------------------------
    @property
    def center(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def half_length(self) -> float:
        return 0.5 * (self.b - self.a)

    def nodes(self, K: int | None = None) -> np.ndarray:
        return cheb_nodes(K or self.K, self.a, self.b)

    def values(self, K: int | None = None) -> np.ndarray:
        K = K or self.K
        if self.samples is not None and K == len(self.samples):
            return np.asarray(self.samples, dtype=complex)
        return np.asarray(self.density(self.nodes(K)), dtype=complex)

    def values_mp(self, K: int, ctx) -> tuple[np.ndarray, np.ndarray]:
        t = cheb_nodes_mp(K, self.a, self.b, ctx)
        if self.expr is not None:
            return t, _eval_expr(self.expr, t, ctx)
        # float evaluator: the density is known only to double precision
        return t, bk.to_mp(self.density(bk.to_complex(t).real), ctx)

    def validate(self, tol: Tolerances = DEFAULT) -> float:
        """Class checks on samples: non-vanishing and bounded argument variation.

        Returns the total variation of the argument. Dini continuity is an
        assumption that cannot be tested on samples.
        """
        vals = self.values()[::-1]  # ascending t
        if np.min(np.abs(vals)) <= tol.tau_zero:
            raise ClassViolationError(f"density vanishes (min |mu_dot| = {np.min(np.abs(vals)):.2e})")
        _, tv = unwrap_argument(vals)
        if tv >= tol.arg_variation_max:
            raise ClassViolationError(f"argument variation {tv:.3f} exceeds {tol.arg_variation_max}")
        return tv

    def integrate(self, g, K: int | None = None):
        """``int g(t) mu_dot(t) d omega(t)`` for a vectorised ``g``."""
        K = K or self.K
        t = self.nodes(K)
        return np.mean(g(t) * self.values(K))


# ---------------------------------------------------------------------------
# rational part


@dataclass(frozen=True)
class RationalPart:
    """``r(z) = sum over poles lam of sum_p c_p / (z - lam)**p``."""

    poles: tuple = ()  # ((complex location, multiplicity), ...)
    coeffs: tuple = ()  # one tuple of principal-part coefficients per pole

    def __post_init__(self):
        poles = tuple((complex(loc), int(m)) for loc, m in self.poles)
        coeffs = tuple(tuple(complex(c) for c in cs) for cs in self.coeffs)
        if len(poles) != len(coeffs):
            raise ValueError("one coefficient list per pole required")
        for (loc, m), cs in zip(poles, coeffs):
            if m < 1 or m > 5:
                raise ValueError(f"pole multiplicity {m} outside 1..5")
            if len(cs) != m:
                raise ValueError("principal part length must equal the multiplicity")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def simple(cls, pole, coeff=1.0):
        return cls(((pole, 1),), ((coeff,),))

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.poles)

    @property
    def locations(self) -> np.ndarray:
        return np.array([loc for loc, _ in self.poles], dtype=complex)

    def derivative(self, z, order: int = 0):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for (lam, _), cs in zip(self.poles, self.coeffs):
            for p, c in enumerate(cs, start=1):
                # d^k/dz^k (z-lam)^-p = (-1)^k (p)_k (z-lam)^-(p+k)
                fac = (-1) ** order * math.prod(range(p, p + order))
                out = out + c * fac / (z - lam) ** (p + order)
        return out

    def __call__(self, z):
        return self.derivative(z, 0)

    def laurent(self, N: int) -> np.ndarray:
        """Coefficients of ``z**-k``, k = 1..N, of the expansion at infinity."""
        out = np.zeros(N, dtype=complex)
        k = np.arange(1, N + 1)
        for (lam, _), cs in zip(self.poles, self.coeffs):
            for p, c in enumerate(cs, start=1):
                # (z-lam)^-p = sum_{k>=p} binom(k-1, p-1) lam^(k-p) z^-k
                mask = k >= p
                binom = np.array([math.comb(int(kk) - 1, p - 1) for kk in k[mask]], dtype=float)
                out[mask] += c * binom * lam ** (k[mask] - p)
        return out


# ---------------------------------------------------------------------------
# target


@dataclass(frozen=True)
class TargetFunction:
    """``F = f_mu + r``; either part may be absent (not both)."""

    measure: MeasureM | None = None
    rational: RationalPart = field(default_factory=RationalPart)
    tol: Tolerances = field(default=DEFAULT, compare=False)

    def __post_init__(self):
        if self.measure is None and not self.rational.poles:
            raise ValueError("target needs a measure or a rational part")
        if self.measure is not None:
            for lam in self.rational.locations:
                if lam.imag == 0.0 and self.measure.a <= lam.real <= self.measure.b:
                    raise DomainError(f"pole {lam} lies on the support [a, b]")

    @property
    def poles(self) -> np.ndarray:
        return self.rational.locations

    @property
    def interval(self) -> tuple[float, float]:
        if self.measure is None:
            return (-1.0, 1.0)
        return (self.measure.a, self.measure.b)

    @property
    def in_exterior_hardy_space(self) -> bool:
        return bool(np.all(np.abs(self.poles) < 1.0))

    @property
    def rho(self) -> float:
        """Radius beyond which F is analytic (relevant when all poles are in the disk)."""
        r = 0.0
        if self.measure is not None:
            r = max(abs(self.measure.a), abs(self.measure.b))
        if self.poles.size:
            r = max(r, float(np.max(np.abs(self.poles))))
        return r

    def require_hardy(self):
        if not self.in_exterior_hardy_space:
            raise DomainError("rational part has poles outside the unit disk; F is not in the exterior Hardy space")

    def distance_to_singularities(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        d = np.full(z.shape, np.inf)
        if self.measure is not None:
            x = np.clip(z.real, self.measure.a, self.measure.b)
            d = np.minimum(d, np.abs(z - x))
        for lam in self.poles:
            d = np.minimum(d, np.abs(z - lam))
        return d

    def _check_domain(self, z):
        d = self.distance_to_singularities(z)
        finite = np.isfinite(np.asarray(z, dtype=complex))
        if np.any(finite & (d <= self.tol.tau_margin)):
            raise DomainError(f"evaluation point at distance {np.min(d):.2e} from [a, b] or a pole")

    def _cauchy_K(self, z, order, K):
        t = self.measure.nodes(K)
        v = self.measure.values(K)
        z = np.asarray(z, dtype=complex)
        fac = (-1) ** order * math.factorial(order)
        flat = z.reshape(-1)
        out = np.empty(flat.shape, dtype=complex)
        chunk = max(1, 2_000_000 // K)
        for s in range(0, flat.size, chunk):
            zz = flat[s:s + chunk, None]
            out[s:s + chunk] = fac * np.mean(v[None, :] / (zz - t[None, :]) ** (order + 1), axis=1)
        return out.reshape(z.shape)

    def cauchy(self, z, order: int = 0):
        """Derivative of order ``order`` of ``f_mu`` by Gauss-Chebyshev quadrature,
        doubling the node count until two passes agree."""
        if self.measure is None:
            return np.zeros(np.shape(z), dtype=complex)
        K = self.measure.K
        prev = self._cauchy_K(z, order, K)
        if self.measure.samples is not None and self.measure.expr is None:
            # sampled density: the interpolant is resolved by its own node count
            pass
        while True:
            K2 = 2 * K
            if K2 > self.tol.quad_max_nodes:
                return prev
            cur = self._cauchy_K(z, order, K2)
            scale = np.maximum(np.abs(cur), 1e-300)
            if np.all(np.abs(cur - prev) <= self.tol.quad_agree * scale):
                return cur
            prev, K = cur, K2

    def derivative(self, z, order: int = 0):
        z = np.asarray(z, dtype=complex)
        self._check_domain(z)
        out = self.cauchy(z, order) if self.measure is not None else np.zeros(z.shape, dtype=complex)
        if self.rational.poles:
            out = out + self.rational.derivative(z, order)
        return out

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.isinf(z)):
            out = np.zeros(z.shape, dtype=complex)
            fin = np.isfinite(z)
            out[fin] = self.derivative(z[fin])
            return out
        return self.derivative(z)

    def moments(self, k_max: int, K: int | None = None) -> np.ndarray:
        if self.measure is None:
            return np.zeros(k_max + 1, dtype=complex)
        return moments(self, k_max, K)

    def laurent(self, N: int | None = None) -> LaurentTail:
        """Exterior Laurent expansion ``sum a_k z**-k``, truncated at N."""
        N = N or 256
        a = np.zeros(N, dtype=complex)
        if self.measure is not None:
            a += moments(self, N - 1, max(self.measure.K, 2 * N))
        if self.rational.poles:
            a += self.rational.laurent(N)
        return LaurentTail(a, rho=self.rho, exact_eval=self)

    def on_circle(self, M: int) -> np.ndarray:
        return _circle_cache(self, M)


_CIRCLE_CACHE: dict = {}


def _circle_cache(F: TargetFunction, M: int) -> np.ndarray:
    key = (id(F), M)
    hit = _CIRCLE_CACHE.get(key)
    if hit is not None and hit[0] is F:
        return hit[1]
    vals = F(np.exp(2j * np.pi * np.arange(M) / M))
    vals.setflags(write=False)
    if len(_CIRCLE_CACHE) > 64:
        _CIRCLE_CACHE.clear()
    _CIRCLE_CACHE[key] = (F, vals)
    return vals


def eval_cauchy(F: TargetFunction, z):
    return F(z)


def moments(F: TargetFunction, k_max: int, K: int | None = None) -> np.ndarray:
    """``m_k = int t^k mu_dot d omega`` for k = 0..k_max."""
    mu = F.measure
    K = K or mu.K
    if k_max > K // 2:
        raise ResolutionError(f"k_max = {k_max} needs at least {2 * k_max} quadrature nodes (have {K})")
    t = mu.nodes(K)
    v = mu.values(K)
    powers = np.ones_like(t)
    out = np.empty(k_max + 1, dtype=complex)
    for k in range(k_max + 1):
        out[k] = np.mean(powers * v)
        powers = powers * t
    return out


# ---------------------------------------------------------------------------
# geometric mean and Szego function


def _log_samples(h, a, b, K):
    vals = np.asarray(h(cheb_nodes(K, a, b)) if callable(h) else h, dtype=complex)
    if np.min(np.abs(vals)) <= DEFAULT.tau_zero:
        raise ClassViolationError("function vanishes on [a, b]")
    arg, _ = unwrap_argument(vals)
    return np.log(np.abs(vals)) + 1j * arg


def geometric_mean(h, a: float, b: float, K: int = DEFAULT.quad_nodes, log_shift: complex = 0.0) -> complex:
    """``exp(int log h d omega)`` with a continuous branch of ``log h``."""
    return complex(np.exp(np.mean(_log_samples(h, a, b, K) + log_shift)))


@dataclass(frozen=True)
class SzegoData:
    """Geometric mean ``gm`` and the Szego function as a callable on the
    complement of ``[a, b]``.

    The exponent is ``(1/2) sum_{k>=1} c_k phi(z)**k`` with ``c_k`` the
    Chebyshev coefficients of ``log h``; this is the closed form of the
    defining Cauchy integrals and remains accurate up to the cut.
    """

    a: float
    b: float
    gm: complex
    log_coeffs: np.ndarray = field(repr=False)

    def __call__(self, z, side: str | None = None):
        u = joukowski_inverse_phi(z, self.a, self.b, side)
        return np.exp(0.5 * _horner_tail(self.log_coeffs, u))

    def mp(self, z, ctx):
        u = phi_mp(z, self.a, self.b, ctx)
        c = bk.to_mp(self.log_coeffs, ctx)
        acc = bk.zeros(u.shape, u, ctx)
        for ck in c[:0:-1]:
            acc = (acc + ck) * u
        return bk.exp(acc / 2, ctx)


def _horner_tail(c, u):
    u = np.asarray(u, dtype=complex)
    acc = np.zeros_like(u)
    for ck in c[:0:-1]:
        acc = (acc + ck) * u
    return acc


def szego_function(h, a: float, b: float, K: int = DEFAULT.quad_nodes, max_K: int = 8192) -> SzegoData:
    """Szego data of a non-vanishing ``h`` on ``[a, b]``.

    ``h`` is a vectorised callable or values at ``cheb_nodes(K)``. The node
    count doubles until the Chebyshev tail of ``log h`` is negligible.
    """
    while True:
        logs = _log_samples(h, a, b, K)
        c = cheb_coefficients(logs)
        tail = np.max(np.abs(c[-max(4, K // 16):]))
        if not callable(h) or tail <= 1e-14 * max(1.0, np.max(np.abs(c))) or 2 * K > max_K:
            break
        K *= 2
    return SzegoData(a, b, complex(np.exp(c[0])), c)


def szego_quadrature(h, a: float, b: float, z, K: int = 1024):
    """Direct quadrature of the defining integrals (valid away from the cut)."""
    logs = _log_samples(h, a, b, K)
    t = cheb_nodes(K, a, b)
    z = np.asarray(z, dtype=complex)
    w = w_branch(z, a, b)
    inner = np.mean(logs[None, :] / (z.reshape(-1, 1) - t[None, :]), axis=1).reshape(z.shape)
    return np.exp(0.5 * w * inner - 0.5 * np.mean(logs))


def density_szego(mu: MeasureM) -> SzegoData:
    fn = mu.density
    return szego_function(fn, mu.a, mu.b, K=mu.K)


# ---------------------------------------------------------------------------
# JSON interface


def _c(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def target_from_json(doc: dict, tol: Tolerances = DEFAULT) -> TargetFunction:
    """Build a target from ``{"a", "b", "density": {...}, "rational": [...]}``."""
    measure = None
    dens = doc.get("density")
    if dens is not None:
        for key in ("a", "b"):
            if key not in doc:
                raise ValueError(f"missing field {key!r}")
        a, b = float(doc["a"]), float(doc["b"])
        if not a < b:
            raise DomainError(f"a < b required (got a = {a}, b = {b})")
        if not (-1.0 < a and b < 1.0):
            raise DomainError(f"[a, b] must lie inside (-1, 1) (got [{a}, {b}])")
        kind = dens.get("kind")
        if kind == "samples":
            measure = MeasureM.from_samples(a, b, [_c(v) for v in dens["values"]])
        elif kind == "expr":
            measure = MeasureM.from_expr(a, b, str(dens["expr"]), K=int(dens.get("K", tol.quad_nodes)))
        else:
            raise ValueError(f"density kind must be 'samples' or 'expr', got {kind!r}")
    poles, coeffs = [], []
    for item in doc.get("rational", []) or []:
        m = int(item.get("mult", 1))
        poles.append((_c(item["pole"]), m))
        coeffs.append([_c(c) for c in item.get("coeffs", [[1.0, 0.0]] * m)])
    return TargetFunction(measure, RationalPart(tuple(poles), tuple(coeffs)), tol=tol)


def target_to_json(F: TargetFunction) -> dict:
    doc: dict = {}
    mu = F.measure
    if mu is not None:
        doc["a"], doc["b"] = mu.a, mu.b
        if mu.expr is not None:
            doc["density"] = {"kind": "expr", "expr": mu.expr, "K": mu.K}
        else:
            vals = mu.values(mu.K)
            doc["density"] = {"kind": "samples", "values": [[v.real, v.imag] for v in vals]}
    else:
        doc["density"] = None
    doc["rational"] = [
        {"pole": [lam.real, lam.imag], "mult": m, "coeffs": [[c.real, c.imag] for c in cs]}
        for (lam, m), cs in zip(F.rational.poles, F.rational.coeffs)
    ]
    return doc
