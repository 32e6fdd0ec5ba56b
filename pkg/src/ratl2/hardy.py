"""Hardy-space primitives on the unit circle.

Functions in the exterior Hardy space are represented either by their
Laurent coefficients ``a_k`` of ``z**-k`` (:class:`LaurentTail`) or by samples
on a uniform grid of the circle (:class:`CircleGrid`). Functions in the
interior Hardy space use :class:`PowerSeries`. Polynomials are stored with
ascending coefficients.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import linalg

from .config import DEFAULT, Tolerances
from .errors import (
    ConditioningWarning,
    DegreeError,
    DimensionError,
    DomainError,
    ResolutionError,
    VanishingOnCircleError,
)


def _frozen(a, dtype=complex) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class ComplexPoly:
    """Polynomial with complex coefficients in ascending order."""

    coeffs: np.ndarray
    notes: tuple = ()

    def __post_init__(self):
        c = _frozen(self.coeffs)
        if c.size == 0:
            c = _frozen([0.0])
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return poly_degree(self.coeffs)

    def __call__(self, z):
        return P.polyval(np.asarray(z, dtype=complex), self.coeffs)

    def trimmed(self) -> "ComplexPoly":
        d = self.degree
        return ComplexPoly(self.coeffs[: max(d, 0) + 1])

    def roots(self) -> np.ndarray:
        t = self.trimmed().coeffs
        if t.size < 2:
            return np.zeros(0, dtype=complex)
        return P.polyroots(t)

    def padded(self, k: int) -> np.ndarray:
        out = np.zeros(k + 1, dtype=complex)
        m = min(k + 1, self.coeffs.size)
        out[:m] = self.coeffs[:m]
        return out

    def __mul__(self, other):
        if isinstance(other, ComplexPoly):
            return ComplexPoly(P.polymul(self.coeffs, other.coeffs))
        return ComplexPoly(self.coeffs * other)

    __rmul__ = __mul__

    def __add__(self, other):
        return ComplexPoly(P.polyadd(self.coeffs, other.coeffs))

    def __sub__(self, other):
        return ComplexPoly(P.polysub(self.coeffs, other.coeffs))


def poly_degree(coeffs, tau_zero: float = DEFAULT.tau_zero) -> int:
    """Degree after discarding trailing coefficients below ``tau_zero*||c||``."""
    c = np.asarray(coeffs, dtype=complex)
    scale = np.linalg.norm(c)
    if scale == 0.0:
        return -1
    nz = np.nonzero(np.abs(c) > tau_zero * scale)[0]
    return int(nz[-1]) if nz.size else -1


@dataclass(frozen=True)
class MonicPoly(ComplexPoly):
    """Monic polynomial; ``zeros_in_disk`` reports whether all roots have modulus < 1."""

    def __post_init__(self):
        super().__post_init__()
        c = np.array(self.coeffs)
        d = poly_degree(c)
        if d < 0:
            raise DegreeError("monic polynomial cannot be zero")
        c = c[: d + 1] / c[d]
        c[d] = 1.0
        object.__setattr__(self, "coeffs", _frozen(c))

    @classmethod
    def from_roots(cls, roots) -> "MonicPoly":
        roots = np.asarray(roots, dtype=complex).reshape(-1)
        if roots.size == 0:
            return cls([1.0])
        return cls(P.polyfromroots(roots))

    @property
    def n(self) -> int:
        return self.coeffs.size - 1

    @property
    def zeros_in_disk(self) -> bool:
        return bool(np.all(np.abs(self.roots()) < 1.0))

    def free_coeffs(self) -> np.ndarray:
        """Coordinates ``q_0..q_{n-1}`` (leading coefficient excluded)."""
        return np.array(self.coeffs[:-1])

    @classmethod
    def from_free(cls, free) -> "MonicPoly":
        return cls(np.append(np.asarray(free, dtype=complex), 1.0))


def reciprocal_poly(p: ComplexPoly, k: int) -> ComplexPoly:
    """``z**k * conj(p(1/conj(z)))``: coefficients reversed and conjugated."""
    c = p.coeffs if isinstance(p, ComplexPoly) else np.asarray(p, dtype=complex)
    d = poly_degree(c)
    if d > k:
        raise DegreeError(f"deg p = {d} exceeds k = {k}")
    padded = np.zeros(k + 1, dtype=complex)
    padded[: min(c.size, k + 1)] = c[: k + 1]
    return ComplexPoly(np.conj(padded[::-1]))


def reflected(roots) -> np.ndarray:
    """Reflections ``1/conj(r)`` across the unit circle (``inf`` for r = 0)."""
    r = np.asarray(roots, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 1.0 / np.conj(r)
    out[r == 0] = np.inf
    return out


# ---------------------------------------------------------------------------
# function representations


@dataclass(frozen=True)
class LaurentTail:
    """``sum_k a_k z**-k`` for k = 1..N, analytic in ``|z| > rho``."""

    coeffs: np.ndarray
    rho: float = 0.0
    exact_eval: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs))

    @property
    def N(self) -> int:
        return self.coeffs.size

    def series(self, z):
        z = np.asarray(z, dtype=complex)
        # Horner in 1/z
        w = 1.0 / z
        acc = np.zeros_like(z)
        for a in self.coeffs[::-1]:
            acc = (acc + a) * w
        return acc

    def __call__(self, z):
        if self.exact_eval is not None:
            return self.exact_eval(z)
        return self.series(z)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def check_series(self, tol: float = DEFAULT.tau_series, M: int = 256) -> float:
        """Max discrepancy between truncated series and exact evaluator on |z|=2."""
        if self.exact_eval is None:
            return 0.0
        z = 2.0 * unit_roots(M)
        err = float(np.max(np.abs(self.series(z) - self.exact_eval(z))))
        if err > tol:
            raise ResolutionError(f"truncated Laurent series off by {err:.2e} on |z|=2")
        return err

    def on_grid(self, M: int) -> "CircleGrid":
        return CircleGrid(self(unit_roots(M)))


@dataclass(frozen=True)
class PowerSeries:
    """``sum_k c_k z**k`` for k = 0..N-1 (interior Hardy space)."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs))

    def __call__(self, z):
        return P.polyval(np.asarray(z, dtype=complex), self.coeffs)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True)
class CircleGrid:
    """Samples at ``tau_j = exp(2 pi i j / M)``."""

    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen(self.samples))

    @property
    def size(self) -> int:
        return self.samples.size

    @property
    def tau(self) -> np.ndarray:
        return unit_roots(self.size)

    def norm(self) -> float:
        return math.sqrt(float(np.mean(np.abs(self.samples) ** 2)))


def unit_roots(M: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(M) / M)


def grid_size(n: int = 0, rho: float = 0.0, tol: float = 1e-17, minimum: int = 256) -> int:
    """Power of two large enough that aliasing of a function analytic in
    ``rho < |z| < 1/rho`` stays below ``tol``."""
    need = max(minimum, 16 * n)
    if rho > 0.0:
        if rho >= 1.0:
            raise DomainError("analyticity radius must be < 1")
        need = max(need, int(math.ceil(math.log(tol) / math.log(rho))) + 1)
    return 1 << (need - 1).bit_length()


def fourier(samples) -> np.ndarray:
    """Fourier coefficients ``c_k`` at FFT index ``k mod M``."""
    s = np.asarray(samples)
    return np.fft.fft(s) / s.size


def split_coefficients(samples) -> tuple[np.ndarray, np.ndarray]:
    """Return (``c_{-1}, c_{-2}, ...``, ``c_0, c_1, ...``), each of length M/2."""
    c = fourier(samples)
    M = c.size
    neg = c[::-1][: M // 2]
    pos = c[: M // 2]
    return neg, pos


def project_minus(samples) -> np.ndarray:
    """Samples of the negative-frequency part (projection onto the exterior space)."""
    c = np.fft.fft(np.asarray(samples, dtype=complex))
    M = c.size
    c[: M // 2] = 0.0
    return np.fft.ifft(c)


def project_plus(samples) -> np.ndarray:
    c = np.fft.fft(np.asarray(samples, dtype=complex))
    M = c.size
    c[M // 2 :] = 0.0
    return np.fft.ifft(c)


# ---------------------------------------------------------------------------
# operations


def inner_product(f, g) -> complex:
    """Scalar product ``<f, g> = int f conj(g) |dtau|/2pi`` (conjugate-linear in g)."""
    if isinstance(f, CircleGrid) and isinstance(g, CircleGrid):
        if f.size != g.size:
            raise DimensionError(f"grid sizes differ: {f.size} vs {g.size}")
        return complex(np.mean(f.samples * np.conj(g.samples)))
    if type(f) is not type(g) or not isinstance(f, (LaurentTail, PowerSeries)):
        raise DimensionError("operands must share a representation")
    N = max(f.coeffs.size, g.coeffs.size)
    a = np.zeros(N, dtype=complex)
    b = np.zeros(N, dtype=complex)
    a[: f.coeffs.size] = f.coeffs
    b[: g.coeffs.size] = g.coeffs
    return complex(np.sum(a * np.conj(b)))


def sigma_involution(f):
    """``f^sigma(z) = (1/z) conj(f(1/conj z))``; swaps interior and exterior spaces."""
    if isinstance(f, LaurentTail):
        return PowerSeries(np.conj(f.coeffs))
    if isinstance(f, PowerSeries):
        return LaurentTail(np.conj(f.coeffs))
    if isinstance(f, CircleGrid):
        return CircleGrid(np.conj(f.tau * f.samples))
    raise TypeError(f"cannot apply sigma to {type(f).__name__}")


def sigma_samples(samples) -> np.ndarray:
    s = np.asarray(samples)
    return np.conj(unit_roots(s.size) * s)


def _require_interior(q: MonicPoly, tol: Tolerances):
    roots = q.roots()
    if roots.size and np.max(np.abs(roots)) >= 1.0 - tol.tau_margin:
        raise DomainError(
            f"denominator has a root of modulus {np.max(np.abs(roots)):.12f} >= 1 - {tol.tau_margin:g}"
        )
    return roots


def _samples_of(f, M: int) -> np.ndarray:
    if isinstance(f, CircleGrid):
        if f.size != M:
            raise DimensionError(f"grid of size {f.size} where {M} was required")
        return np.asarray(f.samples)
    return np.asarray(f(unit_roots(M)), dtype=complex)


def project_Vq(f, q: MonicPoly, M: int | None = None, method: str = "gram",
               tol: Tolerances = DEFAULT) -> ComplexPoly:
    """Numerator ``L_q`` of the orthogonal projection of ``f`` onto ``P_{n-1}/q``.

    ``method="gram"`` solves the n-by-n Gram system with entries
    ``<z^k/q, z^j/q>``. ``method="fft"`` uses ``L_q = q~ P_+(f q / q~)``,
    which needs no linear solve.
    """
    n = q.n
    if n < 1:
        raise DegreeError("deg q must be >= 1")
    roots = _require_interior(q, tol)
    if M is None:
        rho = max(float(np.max(np.abs(roots))), getattr(f, "rho", 0.0) or 0.0)
        M = grid_size(n, rho)
    tau = unit_roots(M)
    fs = _samples_of(f, M)
    qs = q(tau)
    if method == "fft":
        qt = tau**n * np.conj(qs)
        h = project_plus(fs * qs / qt) * qt
        c = fourier(h)[:n]
        return ComplexPoly(c)
    if method != "gram":
        raise ValueError(f"unknown method {method!r}")
    basis = tau[None, :] ** np.arange(n)[:, None] / qs[None, :]
    G = basis.conj() @ basis.T / M  # G[j,k] = <z^k/q, z^j/q>
    b = basis.conj() @ fs / M
    lu = linalg.lu_factor(G)
    c = linalg.lu_solve(lu, b)
    cond = np.linalg.cond(G)
    notes = ()
    if cond > tol.gram_cond_warn:
        msg = f"Gram system ill-conditioned (cond = {cond:.2e})"
        warnings.warn(msg, ConditioningWarning, stacklevel=2)
        notes = (msg,)
    return ComplexPoly(c, notes=notes)


def winding_number(samples, tol: Tolerances = DEFAULT) -> int:
    """Winding number about 0 of the closed curve traced by grid samples."""
    s = np.asarray(samples.samples if isinstance(samples, CircleGrid) else samples)
    mod = np.abs(s)
    if np.min(mod) <= tol.tau_zero * max(1.0, float(np.max(mod))):
        raise VanishingOnCircleError(f"sample of modulus {np.min(mod):.2e} on the circle")
    steps = np.angle(np.roll(s, -1) / s)
    if np.max(np.abs(steps)) >= np.pi / 2:
        raise ResolutionError(
            f"phase jump of {np.max(np.abs(steps)):.3f} rad between samples; refine the grid"
        )
    return int(round(float(np.sum(steps)) / (2 * np.pi)))


def winding_number_adaptive(func: Callable, M: int = 256, max_size: int = 1 << 20,
                            tol: Tolerances = DEFAULT) -> int:
    """Winding number of ``func`` on the unit circle, doubling the grid until
    two consecutive sizes agree."""
    prev = None
    while M <= max_size:
        try:
            wn = winding_number(func(unit_roots(M)), tol)
        except ResolutionError:
            wn = None
        if wn is not None and wn == prev:
            return wn
        prev = wn
        M *= 2
    raise ResolutionError("winding number did not stabilise under grid doubling")
