"""Critical points of the squared approximation error as a function of the
monic denominator.

For a monic ``q`` with zeros in the disk, ``L_q/q`` is the projection of F
onto ``P_{n-1}/q`` and ``phi_n(q) = ||F - L_q/q||^2``. Everything is computed
on a uniform grid of the unit circle. With ``q~`` the reciprocal polynomial,

    u_q = P_-(F q / q~),   L_q = q~ P_+(F q / q~),

so the projection needs no linear solve. Critical points are found by
iterating Padé interpolation at the doubled reflected zeros of ``q`` and
polishing with Newton's method.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.optimize import linear_sum_assignment

from .cauchy import TargetFunction
from .config import DEFAULT, Tolerances
from .errors import (
    ConditioningWarning,
    ConvergenceError,
    DegeneracyError,
    InconsistentProjectionError,
    NumericalConsistencyError,
    PreconditionError,
)
from .hardy import (
    CircleGrid,
    ComplexPoly,
    LaurentTail,
    MonicPoly,
    _require_interior,
    fourier,
    grid_size,
    project_minus,
    project_plus,
    project_Vq,
    reflected,
    unit_roots,
)
from .pade import InterpolationSet, build_pade

log = logging.getLogger(__name__)

MAX_GRID = 1 << 16


def circle_size(F: TargetFunction, q: MonicPoly, extra: int = 0) -> int:
    roots = q.roots()
    rho = max(F.rho, float(np.max(np.abs(roots))) if roots.size else 0.0)
    return min(MAX_GRID, grid_size(q.n + extra, min(rho, 0.999)))


@dataclass(frozen=True)
class UqData:
    """Projection data of F at q on a circle grid of size M."""

    q: MonicPoly
    L: ComplexPoly
    u: LaurentTail
    M: int
    F_samples: np.ndarray = field(repr=False)
    q_samples: np.ndarray = field(repr=False)
    qt_samples: np.ndarray = field(repr=False)

    @property
    def tau(self) -> np.ndarray:
        return unit_roots(self.M)

    @property
    def L_samples(self) -> np.ndarray:
        return self.L(self.tau)

    @property
    def error_samples(self) -> np.ndarray:
        """``F - L_q/q`` on the grid."""
        return self.F_samples - self.L_samples / self.q_samples


def compute_uq(F: TargetFunction, q: MonicPoly, M: int | None = None,
               tol: Tolerances = DEFAULT) -> UqData:
    """``u_q = (F q - L_q)/q~`` with a check that it lies in the exterior space."""
    n = q.n
    _require_interior(q, tol)
    M = M or circle_size(F, q)
    tau = unit_roots(M)
    fs = F.on_circle(M)
    qs = q(tau)
    qt = tau**n * np.conj(qs)
    g = fs * qs / qt
    c = fourier(g)
    # nonnegative frequencies give L_q/q~, negative ones u_q
    Lq = fourier(project_plus(g) * qt)[:n]
    L = ComplexPoly(Lq)
    u_samples = (fs * qs - L(tau)) / qt
    cu = fourier(u_samples)
    pos = np.max(np.abs(cu[: M // 2])) if M else 0.0
    scale = max(1.0, float(np.max(np.abs(c))))
    if pos > 1e-9 * scale:
        raise InconsistentProjectionError(f"u_q has nonnegative Fourier coefficient of size {pos:.2e}")
    neg = c[::-1][: M // 2]  # c_{-1}, c_{-2}, ...
    return UqData(q, L, LaurentTail(neg), M, fs, qs, qt)


def uq_contour(F: TargetFunction, v: MonicPoly, z, r_in: float = 0.999, M: int = 4096):
    """``u_v`` off the circle for a monic v that may have zeros on it.

    Uses the contour formula on a circle of radius ``1/r_in`` slightly
    outside the unit circle; for zeros of v on the circle ``L_v = 0`` and
    ``u_v = F v / v~``.
    """
    z = np.asarray(z, dtype=complex)
    R = 1.0 / r_in
    s = R * unit_roots(M)
    n = v.n
    vt = s**n * np.conj(v(1.0 / np.conj(s)))
    g = F(s) * v(s) / vt
    # Cauchy integral over |s| = R of g(s)/(z - s) ds / (2 pi i), for |z| > R
    out = np.array([np.mean(g * s / (s - zz)) for zz in z.reshape(-1)]).reshape(z.shape)
    return -out


@dataclass(frozen=True)
class PhiValue:
    value: float  # ||u_q||^2
    direct: float  # ||F - L_q/q||^2 with L_q from the Gram system
    discrepancy: float
    extended: bool = False  # both routes re-evaluated in mpmath


# double precision resolves the two routes to about eps ||F||^2 / phi; below
# this relative agreement both are recomputed with more digits
RESOLVE = 1e-10


def _fft_mp(x: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Radix-2 DFT ``X_k = sum_j x_j exp(-2 pi i jk/M)`` of an mpmath object
    array; ``roots`` holds ``exp(-2 pi i k/N)`` for some N divisible by M."""
    M = x.size
    if M == 1:
        return x.copy()
    stride = roots.size // M
    even, odd = _fft_mp(x[0::2], roots), _fft_mp(x[1::2], roots)
    t = roots[: roots.size // 2: stride] * odd
    return np.concatenate([even + t, even - t])


def phi_pair_mp(F_samples, q: MonicPoly, dps: int = 34) -> tuple[float, float]:
    """``(||u_q||^2, ||F - L_q/q||^2)`` from the same circle samples of F,
    both evaluated with ``dps`` digits (FFT route and Gram route)."""
    M = len(F_samples)
    if M & (M - 1):
        raise ValueError("grid size must be a power of two")
    n = q.n
    with mpmath.workdps(dps):
        tau = np.array([mpmath.expjpi(mpmath.mpf(2 * k) / M) for k in range(M)], dtype=object)
        fs = np.array([mpmath.mpc(complex(v)) for v in F_samples], dtype=object)
        qs = np.zeros(M, dtype=object) + mpmath.mpc(0)
        for c in q.coeffs[::-1]:
            qs = qs * tau + mpmath.mpc(complex(c))
        conj = np.vectorize(mpmath.conj, otypes=[object])
        qbar = conj(qs)
        qt = tau**n * qbar
        c = _fft_mp(fs * qs / qt, conj(tau)) / M
        v_u = mpmath.fsum(abs(v) ** 2 for v in c[M // 2:])
        w = 1 / (qs * qbar)
        pw = [np.ones(M, dtype=object)]
        for _ in range(1, n):
            pw.append(pw[-1] * tau)
        # Gram matrix of z^k/q is Toeplitz: G[j, k] = mean(tau^(k-j) w)
        mom = {d: np.sum(pw[d] * w) / M for d in range(n)}
        for d in range(1, n):
            mom[-d] = mpmath.conj(mom[d])
        G = mpmath.matrix(n, n)
        r = mpmath.matrix(n, 1)
        fq = fs / qbar
        for j in range(n):
            r[j] = np.sum(fq * conj(pw[j])) / M
            for k in range(n):
                G[j, k] = mom[k - j]
        coef = mpmath.lu_solve(G, r)
        approx = sum(pw[k] * coef[k] for k in range(n)) / qs
        e = fs - approx
        v_d = mpmath.fsum(abs(v) ** 2 for v in e) / M
        return float(v_u), float(v_d)


def phi_n(F: TargetFunction, q: MonicPoly, data: UqData | None = None,
          tol: Tolerances = DEFAULT, check: bool = True) -> PhiValue:
    """Squared error by the coefficient norm of ``u_q`` and, independently,
    by the grid norm of ``F - L_q/q`` with ``L_q`` from the Gram system.

    When the value is so small that rounding keeps the two routes from
    agreeing to ``RESOLVE``, both are recomputed in extended precision on the
    same samples of F.
    """
    data = data or compute_uq(F, q, tol=tol)
    v_u = float(np.sum(np.abs(data.u.coeffs) ** 2))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        Lg = project_Vq(CircleGrid(data.F_samples), q, M=data.M, method="gram", tol=tol)
    e = data.F_samples - Lg(data.tau) / data.q_samples
    v_d = float(np.mean(np.abs(e) ** 2))
    disc = abs(v_d - v_u) / max(v_u, 1e-300)
    extended = False
    if disc > RESOLVE and v_u > 0:
        v_u, v_d = phi_pair_mp(data.F_samples, q)
        disc = abs(v_d - v_u) / max(v_u, 1e-300)
        extended = True
    if check and disc > 1e-8 and abs(v_d - v_u) > 1e-28:
        raise NumericalConsistencyError(f"||F - L/q||^2 = {v_d:.16e} but ||u_q||^2 = {v_u:.16e}")
    return PhiValue(v_u, v_d, disc, extended)


def phi_value(F: TargetFunction, q: MonicPoly, tol: Tolerances = DEFAULT) -> float:
    return float(np.sum(np.abs(compute_uq(F, q, tol=tol).u.coeffs) ** 2))


def gradient(F: TargetFunction, q: MonicPoly, data: UqData | None = None,
             tol: Tolerances = DEFAULT) -> np.ndarray:
    """Wirtinger derivatives ``d phi_n / d q_k = <z^k L_q/q^2, F - L_q/q>``."""
    data = data or compute_uq(F, q, tol=tol)
    tau = data.tau
    base = data.L_samples / data.q_samples**2 * np.conj(data.error_samples)
    return np.array([np.mean(tau**k * base) for k in range(q.n)])


def real_gradient(g: np.ndarray) -> np.ndarray:
    """Gradient in the real coordinates (Re q_k, Im q_k)."""
    return np.concatenate([2 * g.real, -2 * g.imag])


def _grad_norm(g: np.ndarray) -> float:
    return float(np.linalg.norm(real_gradient(g)))


# ---------------------------------------------------------------------------
# Hessian


@dataclass(frozen=True)
class HessianForm:
    """``Q(v) = 2 Re(v^T A v) + 2 v^T B conj(v)`` and its real 2n x 2n matrix."""

    A: np.ndarray
    B: np.ndarray
    as_real: np.ndarray
    nu: np.ndarray = field(repr=False)  # monomial coefficients of nu(b_j), one row per basis element
    notes: tuple = ()
    basis: str = "monomial"

    def quadratic(self, v) -> float:
        v = np.asarray(v, dtype=complex)
        return float(2 * np.real(v @ self.A @ v) + 2 * np.real(v @ self.B @ np.conj(v)))

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.as_real)


def real_form(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    Ar, Ai, Br, Bi = A.real, A.imag, B.real, B.imag
    H = np.block([[2 * Ar + 2 * Br, -2 * Ai + 2 * Bi], [-2 * Ai - 2 * Bi, -2 * Ar + 2 * Br]])
    return 0.5 * (H + H.T)


def _divide_bottom(num: np.ndarray, den: np.ndarray, nq: int):
    """Quotient of degree < nq of num by den with den[0] = 1, by power-series
    division from the constant term, and the relative remainder."""
    quo = np.zeros(nq, dtype=complex)
    r = np.array(num, dtype=complex)
    for k in range(nq):
        quo[k] = r[k] / den[0]
        r[k : k + den.size] -= quo[k] * den[: r.size - k]
    rem = float(np.max(np.abs(r))) / max(float(np.max(np.abs(num))), 1e-300)
    return quo, rem


def dL_dq(data: UqData) -> np.ndarray:
    """Rows ``dL_q/dq_m`` (coefficients), the projection of ``z^m L_q/q^2`` onto
    ``P_{n-1}/q``."""
    n = data.q.n
    tau = data.tau
    out = np.zeros((n, n), dtype=complex)
    base = data.L_samples / data.q_samples**2
    for m in range(n):
        g = tau**m * base * data.q_samples / data.qt_samples
        out[m] = fourier(project_plus(g) * data.qt_samples)[:n]
    return out


def hessian(F: TargetFunction, q: MonicPoly, data: UqData | None = None,
            tol: Tolerances = DEFAULT, check_critical: bool = True, basis: str = "monomial",
            error_samples: np.ndarray | None = None) -> HessianForm:
    """Hessian form at a critical point from the polynomials ``nu_j`` defined by
    ``d(L_q/q)/dq_j = q~ nu_j / q^2``.

    ``basis="roots"`` expresses the form in the tangent basis ``q/(z - xi_j)``
    (root perturbations). It is congruent to the monomial form, hence has the
    same inertia, and stays well conditioned when the roots cluster.
    ``error_samples`` replaces the grid values of ``F - L_q/q`` (for instance
    by a cancellation-free Padé remainder).
    """
    data = data or compute_uq(F, q, tol=tol)
    n = q.n
    if check_critical:
        gn = _grad_norm(gradient(F, q, data))
        if gn > 1e3 * tol.tol_crit:
            raise PreconditionError(f"Hessian formulas need a critical point (grad norm {gn:.2e})")
        irr, k = irreducibility_check(data.L, q, tol)
        if not irr:
            raise PreconditionError(f"q shares {k} root(s) with L_q")
    tau = data.tau
    qs, qt = data.q_samples, data.qt_samples
    dL = dL_dq(data)
    qc = np.asarray(q.coeffs)
    qtc = np.conj(qc[::-1])
    Lc = data.L.padded(n - 1)
    nu = np.zeros((n, n), dtype=complex)
    worst = 0.0
    for j in range(n):
        num = np.polynomial.polynomial.polysub(
            np.polynomial.polynomial.polymul(qc, dL[j]), np.concatenate([np.zeros(j), Lc])
        )
        num = np.pad(num, (0, max(0, 2 * n - num.size)))
        nu[j], rem = _divide_bottom(num, qtc, n)
        worst = max(worst, rem)
    if worst > 1e-9:
        raise InconsistentProjectionError(f"division by q~ leaves a remainder {worst:.2e}")
    notes = []
    # tangent basis: rows of C are monomial coefficients of the basis polynomials
    if basis == "monomial":
        C = np.eye(n, dtype=complex)
        bs = np.array([tau**j for j in range(n)])
    elif basis == "roots":
        roots = q.roots()
        C = np.array([np.polynomial.polynomial.polydiv(qc, [-r, 1.0])[0] for r in roots])
        bs = np.array([qs / (tau - r) for r in roots])
    else:
        raise ValueError(f"unknown basis {basis!r}")
    # nu(b)/q = -P_-(b L_q/(q q~)), checked against the division route
    nuq = np.array([-project_minus(b * data.L_samples / (qs * qt)) for b in bs])
    nu_b = C @ nu
    div = np.array([np.polynomial.polynomial.polyval(tau, row) / qs for row in nu_b])
    route_gap = float(np.max(np.abs(nuq - div))) / max(float(np.max(np.abs(nuq))), 1e-300)
    if route_gap > 1e-7:
        notes.append(f"nu routes differ by {route_gap:.1e}")
    # w_q^sigma = (F - L/q) q / (q~ q^check), q^check = q~ / z^n
    err = data.error_samples if error_samples is None else error_samples
    ws = err * qs * tau**n / qt**2
    cw = fourier(ws)
    pos = float(np.max(np.abs(cw[: data.M // 2])))
    if pos > 1e-8 * max(float(np.max(np.abs(cw))), 1e-300):
        notes.append(f"w_q^sigma has nonnegative coefficient {pos:.1e}")
    M = data.M
    B = (nuq @ np.conj(nuq).T) / M  # B[j,k] = <nu_j/q, nu_k/q>
    A = 2 * ((bs * np.conj(ws)) @ nuq.T) / M  # A[j,k] = 2 <b_j nu_k/q, w^sigma>
    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.conj().T)
    return HessianForm(A, B, real_form(A, B), nu_b, tuple(notes), basis)


def quadratic_rewritten(hf: HessianForm, data: UqData, v) -> float:
    """``Q(v)`` from ``||nu/q||^2 - 2 Re <nu/q, (v w_q)^sigma>`` (times 2)."""
    if hf.basis != "monomial":
        raise ValueError("rewritten form is implemented for the monomial basis")
    v = np.asarray(v, dtype=complex)
    tau = data.tau
    n = data.q.n
    nu = -(v @ hf.nu)
    nuq = np.polynomial.polynomial.polyval(tau, nu) / data.q_samples
    ws = data.error_samples * data.q_samples * tau**n / data.qt_samples**2
    w = np.conj(tau * ws)  # w_q on the circle
    vw_sigma = np.conj(tau * np.polynomial.polynomial.polyval(tau, v) * w)
    half = np.mean(np.abs(nuq) ** 2) - 2 * np.real(np.mean(nuq * np.conj(vw_sigma)))
    return float(2 * half)


def morse_index(H: HessianForm | np.ndarray, rel: float = 1e-9) -> int:
    """Number of negative eigenvalues of the real form.

    The form is first equilibrated by the diagonal congruence
    ``D H D`` with ``D = |diag H|^(-1/2)``, which keeps the inertia. An
    eigenvalue below ``rel`` times the largest one then counts as zero and
    raises :class:`DegeneracyError`.
    """
    M = H.as_real if isinstance(H, HessianForm) else np.asarray(H, dtype=float)
    M = 0.5 * (M + M.T)
    d = np.abs(np.diag(M))
    if np.all(d > 0):
        D = 1.0 / np.sqrt(d)
        M = D[:, None] * M * D[None, :]
    ev = np.linalg.eigvalsh(M)
    scale = float(np.max(np.abs(ev))) if ev.size else 0.0
    if ev.size and float(np.min(np.abs(ev))) <= rel * scale:
        raise DegeneracyError(f"Hessian eigenvalue {ev[np.argmin(np.abs(ev))]:.2e} is numerically zero")
    return int(np.sum(ev < 0))


# ---------------------------------------------------------------------------
# irreducibility


def irreducibility_check(L: ComplexPoly, q: MonicPoly, tol: Tolerances = DEFAULT) -> tuple[bool, int]:
    """True when no root of L lies within ``tau_gcd`` of a root of q; also
    returns the number of matched roots."""
    lr = L.roots() if L.degree > 0 else np.zeros(0, dtype=complex)
    qr = q.roots()
    if lr.size == 0 or qr.size == 0:
        return True, 0
    used = np.zeros(lr.size, dtype=bool)
    k = 0
    for r in qr:
        d = np.abs(lr - r)
        d[used] = np.inf
        i = int(np.argmin(d))
        if d[i] <= tol.tau_gcd:
            used[i] = True
            k += 1
    return k == 0, k


# ---------------------------------------------------------------------------
# solver


@dataclass
class CriticalPointRecord:
    q: MonicPoly
    L: ComplexPoly
    value: float
    grad_norm: float
    hessian_eigs: np.ndarray
    morse_index: int | None
    irreducible: bool
    poles: np.ndarray
    iterations: int
    flags: list = field(default_factory=list)
    trace: list = field(default_factory=list, repr=False)  # (phi direct, ||u_q||^2) per iterate
    reduced: "CriticalPointRecord | None" = field(default=None, repr=False)

    @property
    def degree(self) -> int:
        return self.q.n

    def to_json(self) -> dict:
        c = lambda v: [float(np.real(v)), float(np.imag(v))]  # noqa: E731
        return {
            "degree": self.degree,
            "q_coeffs": [c(v) for v in self.q.coeffs],
            "L_coeffs": [c(v) for v in self.L.coeffs],
            "value": float(self.value),
            "grad_norm": float(self.grad_norm),
            "hessian_eigs": [float(x) for x in self.hessian_eigs],
            "morse_index": self.morse_index,
            "irreducible": bool(self.irreducible),
            "poles": [c(v) for v in self.poles],
            "iterations": int(self.iterations),
            "flags": list(self.flags),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CriticalPointRecord":
        cx = lambda v: complex(v[0], v[1])  # noqa: E731
        return cls(
            q=MonicPoly([cx(v) for v in doc["q_coeffs"]]),
            L=ComplexPoly([cx(v) for v in doc["L_coeffs"]]),
            value=float(doc["value"]),
            grad_norm=float(doc["grad_norm"]),
            hessian_eigs=np.array(doc["hessian_eigs"], dtype=float),
            morse_index=doc["morse_index"],
            irreducible=bool(doc["irreducible"]),
            poles=np.array([cx(v) for v in doc["poles"]], dtype=complex),
            iterations=int(doc["iterations"]),
            flags=list(doc.get("flags", [])),
        )


def sort_roots(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=complex)
    return r[np.lexsort((r.imag, r.real))]


def root_distance(r1, r2) -> float:
    """Bottleneck distance between two root multisets of equal size."""
    r1, r2 = np.asarray(r1), np.asarray(r2)
    if r1.size != r2.size:
        return np.inf
    if r1.size == 0:
        return 0.0
    cost = np.abs(r1[:, None] - r2[None, :])
    i, j = linear_sum_assignment(cost)
    return float(np.max(cost[i, j]))


def _keep_inside(roots: np.ndarray, tol: Tolerances, flags: list) -> np.ndarray:
    r = np.array(roots, dtype=complex)
    bad = np.abs(r) >= 1.0 - tol.boundary_margin
    if np.any(bad):
        with np.errstate(divide="ignore", invalid="ignore"):
            r[bad] = 1.0 / np.conj(r[bad])
        mod = np.abs(r)
        clip = mod > 1.0 - 1e-3
        r[clip] *= (1.0 - 1e-3) / mod[clip]
        if "reflected-escapee" not in flags:
            flags.append("reflected-escapee")
        log.info("reflected %d escaping root(s) back into the disk", int(np.sum(bad)))
    return r


def fixed_point_step(F: TargetFunction, q: MonicPoly, tol: Tolerances = DEFAULT) -> MonicPoly:
    """Denominator of the Padé approximant at the doubled reflections of the zeros of q."""
    E = InterpolationSet.from_points(reflected(q.roots()))
    P = build_pade(F, E, tol=tol)
    ell = np.array(P.ell.coeffs)
    if P.gcd_degree or ell.size - 1 < q.n:
        raise DegeneracyError("Padé denominator lost degree in the fixed-point map")
    return MonicPoly(ell)


def _newton_direction(F, q, g_real, tol, h=1e-7):
    n = q.n
    x0 = np.concatenate([q.free_coeffs().real, q.free_coeffs().imag])
    J = np.zeros((2 * n, 2 * n))

    def grad_at(x):
        qq = MonicPoly.from_free(x[:n] + 1j * x[n:])
        return real_gradient(gradient(F, qq, tol=tol))

    for i in range(2 * n):
        e = np.zeros(2 * n)
        e[i] = h * max(1.0, abs(x0[i]))
        J[:, i] = (grad_at(x0 + e) - grad_at(x0 - e)) / (2 * e[i])
    J = 0.5 * (J + J.T)
    step = np.linalg.lstsq(J, -g_real, rcond=1e-14)[0]
    pd = bool(np.all(np.linalg.eigvalsh(J) > 0))
    return x0, step, pd


def _finish(F, q, iterations, flags, trace, tol) -> CriticalPointRecord:
    data = compute_uq(F, q, tol=tol)
    pv = phi_n(F, q, data, tol=tol, check=False)
    trace.append((pv.direct, pv.value))
    g = gradient(F, q, data)
    gn = _grad_norm(g)
    irr, k = irreducibility_check(data.L, q, tol)
    poles = sort_roots(q.roots())
    if poles.size and np.max(np.abs(poles)) > 1.0 - tol.boundary_margin:
        flags.append("boundary-suspect")
    eigs = np.zeros(0)
    mi = None
    if irr and gn < tol.tol_crit:
        try:
            err = critical_error_samples(F, q, data, tol)
            H = hessian(F, q, data, tol=tol, check_critical=False, basis="roots", error_samples=err)
            eigs = H.eigenvalues
            flags.extend(H.notes)
            mi = morse_index(H)
        except DegeneracyError:
            flags.append("degenerate-hessian")
        except Exception as exc:  # report, do not guess
            flags.append(f"hessian-failed: {exc}")
    return CriticalPointRecord(q, data.L, pv.value, gn, eigs, mi, irr, poles, iterations, flags, trace)


def critical_error_samples(F: TargetFunction, q: MonicPoly, data: UqData,
                           tol: Tolerances = DEFAULT) -> np.ndarray:
    """``F - L_q/q`` on the grid from the Padé remainder at the doubled
    reflected zeros (valid at critical points, where the two coincide).

    Falls back to the direct grid values when they disagree beyond rounding.
    """
    direct = data.error_samples
    try:
        P = build_pade(F, InterpolationSet.from_points(reflected(q.roots())), tol=tol)
        alt = P.error(data.tau)
    except Exception:
        return direct
    gap = float(np.max(np.abs(alt - direct)))
    if gap > 1e-12 * max(1.0, float(np.max(np.abs(data.F_samples)))):
        return direct
    return alt


def solve_critical(F: TargetFunction, n: int, start: MonicPoly | int | None = None,
                   tol: Tolerances = DEFAULT) -> CriticalPointRecord:
    """Critical point of ``phi_n`` from a start polynomial or an integer seed.

    The Padé fixed-point map runs until the roots settle; Newton's method on
    the gradient takes over when that map slows down or stalls. Raises
    :class:`ConvergenceError` (with the iterate history) when the gradient
    norm stays above ``tol.tol_crit``.
    """
    F.require_hardy()
    if not isinstance(start, MonicPoly):
        start = random_start(F, n, np.random.default_rng(start))
    if start.n != n:
        raise ValueError("start polynomial has the wrong degree")
    q = start
    flags: list = []
    trace: list = []
    hist: list = [sort_roots(q.roots())]
    if phi_value(F, q, tol) <= tol.tau_zero * max(1.0, _norm2(F)):
        raise PreconditionError("phi_n vanishes at the start: F is already represented")
    it = 0
    use_newton = False
    disps: list = []
    for it in range(1, tol.fixed_point_maxiter + 1):
        data = compute_uq(F, q, tol=tol)
        pv = phi_n(F, q, data, tol=tol, check=False)
        trace.append((pv.direct, pv.value))
        try:
            q_new = fixed_point_step(F, q, tol)
        except Exception as exc:
            flags.append(f"fixed-point-stopped: {type(exc).__name__}")
            use_newton = True
            break
        r_new = _keep_inside(q_new.roots(), tol, flags)
        q_new = MonicPoly.from_roots(r_new)
        disp = root_distance(q.roots(), r_new)
        disps.append(disp)
        hist.append(sort_roots(r_new))
        q = q_new
        if disp < tol.fixed_point_tol:
            break
        if disp < tol.newton_switch and len(disps) >= 4:
            slow = disps[-1] > 0.5 * disps[-2]
            stalled = disp < 1e-9 and min(disps[-4:-1]) <= disp
            if slow or stalled:
                use_newton = not stalled or _grad_norm(gradient(F, q, tol=tol)) >= tol.tol_crit
                break
    else:
        use_newton = True
    if use_newton or _grad_norm(gradient(F, q, tol=tol)) >= tol.tol_crit:
        q, extra = _newton(F, q, tol, flags, trace, hist)
        it += extra
    rec = _finish(F, q, it, flags, trace, tol)
    if rec.grad_norm >= tol.tol_crit:
        raise ConvergenceError(
            f"gradient norm {rec.grad_norm:.2e} above {tol.tol_crit:g} after {it} iterations",
            history=hist,
        )
    if not rec.irreducible:
        _, k = irreducibility_check(rec.L, rec.q, tol)
        rec.flags.append(f"reducible-gcd-{k}")
        if n - k >= 1:
            try:
                rec.reduced = solve_critical(F, n - k, _drop_common(rec.q, rec.L, k, tol), tol=tol)
            except Exception as exc:
                rec.flags.append(f"degree-drop-failed: {exc}")
    return rec


def _newton(F, q, tol, flags, trace, hist):
    n = q.n
    steps = 0
    prev_step = np.inf
    for _ in range(tol.newton_maxiter):
        data = compute_uq(F, q, tol=tol)
        gr = real_gradient(gradient(F, q, data))
        gn = float(np.linalg.norm(gr))
        x0, step, pd = _newton_direction(F, q, gr, tol)
        size = float(np.linalg.norm(step))
        if gn < tol.tol_crit and (size < 1e-12 or size >= prev_step):
            break
        prev_step = size
        v_old = float(np.sum(np.abs(data.u.coeffs) ** 2))
        t = 1.0
        accepted = False
        for _ls in range(30):
            cand = MonicPoly.from_free((x0 + t * step)[:n] + 1j * (x0 + t * step)[n:])
            r = cand.roots()
            if np.max(np.abs(r)) < 1.0 - tol.boundary_margin:
                v_new = phi_value(F, cand, tol)
                g_new = _grad_norm(gradient(F, cand, tol=tol))
                # descent on phi when the local model is convex, on the gradient otherwise
                if (pd and v_new <= v_old * (1 + 1e-12)) or (not pd and g_new < gn):
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            flags.append("line-search-stalled")
            break
        q = cand
        steps += 1
        pv = phi_n(F, q, tol=tol, check=False)
        trace.append((pv.direct, pv.value))
        hist.append(sort_roots(q.roots()))
    return q, steps


def _drop_common(q: MonicPoly, L: ComplexPoly, k: int, tol: Tolerances) -> MonicPoly:
    qr = list(q.roots())
    for r in L.roots():
        if not qr:
            break
        d = [abs(x - r) for x in qr]
        i = int(np.argmin(d))
        if d[i] <= tol.tau_gcd:
            qr.pop(i)
    return MonicPoly.from_roots(qr[: q.n - k] if len(qr) > q.n - k else qr)


def _norm2(F: TargetFunction) -> float:
    return float(np.mean(np.abs(F.on_circle(256)) ** 2))


def ellipse_samples(a: float, b: float, count: int, rng: np.random.Generator,
                    axis_sum: float = 0.9) -> np.ndarray:
    """Uniform points in the ellipse with foci a, b and semi-axes summing to ``axis_sum``."""
    c, f = 0.5 * (a + b), 0.5 * (b - a)
    A = 0.5 * (axis_sum + f * f / axis_sum)
    B = 0.5 * (axis_sum - f * f / axis_sum)
    r = np.sqrt(rng.random(count))
    th = 2 * np.pi * rng.random(count)
    z = c + A * r * np.cos(th) + 1j * B * r * np.sin(th)
    mod = np.abs(z)
    out = mod > 0.95
    z[out] *= 0.95 / mod[out]
    return z


def random_start(F: TargetFunction, n: int, rng: np.random.Generator) -> MonicPoly:
    a, b = F.interval
    return MonicPoly.from_roots(ellipse_samples(a, b, n, rng))


def start_rng(seed: int, degree: int, index: int) -> np.random.Generator:
    """Per-start generator, identical whether starts run serially or in parallel."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), degree, index]))


@dataclass
class MultiStartResult:
    degree: int
    records: list  # distinct critical points
    assignment: list  # representative index per start (None if the start failed)
    failures: list  # (start index, message)
    index_audit: dict | None = None

    @property
    def converged_fraction(self) -> float:
        total = len(self.assignment)
        return sum(a is not None for a in self.assignment) / total if total else 0.0


def deduplicate(records: list, distance: float = DEFAULT.dedup_distance) -> tuple[list, list]:
    reps: list = []
    assign: list = []
    for rec in records:
        if rec is None:
            assign.append(None)
            continue
        for i, r in enumerate(reps):
            if root_distance(r.poles, rec.poles) < distance:
                assign.append(i)
                break
        else:
            reps.append(rec)
            assign.append(len(reps) - 1)
    return reps, assign


def index_audit(records: list) -> dict:
    """Sum of ``(-1)^M(q)`` over distinct nondegenerate interior critical points."""
    usable = [r for r in records if r.morse_index is not None and "boundary-suspect" not in r.flags
              and r.irreducible]
    total = sum((-1) ** r.morse_index for r in usable)
    ok = (len(usable) < 2) or total == 1
    return {"count": len(usable), "sum": total, "ok": ok,
            "warning": None if ok else "solver coverage: index sum differs from 1 (missing critical points)"}


def _one_start(args):
    F, n, seed, i, tol = args
    try:
        rec = solve_critical(F, n, random_start(F, n, start_rng(seed, n, i)), tol=tol)
        return rec, None
    except Exception as exc:  # recorded per start
        return None, f"{type(exc).__name__}: {exc}"


def multi_start(F: TargetFunction, n: int, starts: int, seed: int = 0, tol: Tolerances = DEFAULT,
                workers: int = 1) -> MultiStartResult:
    args = [(F, n, seed, i, tol) for i in range(starts)]
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_one_start, args))
    else:
        results = [_one_start(a) for a in args]
    recs = [r for r, _ in results]
    failures = [(i, msg) for i, (_, msg) in enumerate(results) if msg is not None]
    reps, assign = deduplicate(recs, tol.dedup_distance)
    return MultiStartResult(n, reps, assign, failures, index_audit(reps))
