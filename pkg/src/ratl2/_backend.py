"""Elementwise helpers that work on complex ndarrays and on object arrays of
mpmath numbers alike.

Arithmetic (+, -, *, /, integer powers) already broadcasts over object
arrays; only transcendental functions and linear algebra need dispatch.
"""

from __future__ import annotations

import numpy as np
import mpmath


def is_mp(x) -> bool:
    return isinstance(x, np.ndarray) and x.dtype == object


def _vec(fn):
    v = np.vectorize(fn, otypes=[object])
    return lambda x: v(x)


def to_mp(x, ctx) -> np.ndarray:
    arr = np.asarray(x)
    out = np.empty(arr.shape, dtype=object)
    flat = arr.reshape(-1)
    out_flat = out.reshape(-1)
    for i, v in enumerate(flat):
        out_flat[i] = ctx.mpc(complex(v)) if not isinstance(v, (mpmath.mpc, mpmath.mpf)) else ctx.mpc(v)
    return out


def to_complex(x) -> np.ndarray:
    arr = np.asarray(x)
    if arr.dtype != object:
        return arr.astype(complex)
    return np.array([complex(v) for v in arr.reshape(-1)], dtype=complex).reshape(arr.shape)


def sqrt(x, ctx=None):
    if is_mp(x):
        return _vec(ctx.sqrt)(x)
    return np.sqrt(np.asarray(x, dtype=complex))


def exp(x, ctx=None):
    if is_mp(x):
        return _vec(ctx.exp)(x)
    return np.exp(x)


def log(x, ctx=None):
    if is_mp(x):
        return _vec(ctx.log)(x)
    return np.log(x)


def absval(x, ctx=None):
    if is_mp(x):
        return _vec(ctx.fabs)(x)
    return np.abs(x)


def zeros(shape, like, ctx=None):
    if is_mp(like):
        out = np.empty(shape, dtype=object)
        out.fill(ctx.mpc(0))
        return out
    return np.zeros(shape, dtype=complex)


def ones(shape, like, ctx=None):
    if is_mp(like):
        out = np.empty(shape, dtype=object)
        out.fill(ctx.mpc(1))
        return out
    return np.ones(shape, dtype=complex)


def null_vector(A, ctx=None):
    """Right singular vector for the smallest singular value of a wide matrix,
    together with the singular values (descending)."""
    if is_mp(A):
        m, k = A.shape
        Am = ctx.matrix(A.tolist())
        U, S, V = ctx.svd_c(Am, full_matrices=True)
        svals = [S[i] for i in range(min(m, k))]
        last = V.rows - 1
        v = np.array([ctx.conj(V[last, j]) for j in range(k)], dtype=object)
        return v, svals
    U, S, Vh = np.linalg.svd(np.asarray(A, dtype=complex))
    return np.conj(Vh[-1]), S
