"""Batched matrix exponential by scaling and squaring with a Taylor core."""

from __future__ import annotations

import numpy as np

from .errors import NonFinite

# Largest 1-norm handed to the Taylor core after scaling.
THETA_MAX = 0.5


def taylor_degree(theta: float, tol: float) -> int:
    """Smallest K whose Taylor remainder bound at norm ``theta`` is <= tol.

    Uses ||sum_{k>K} X^k/k!|| <= theta^(K+1)/(K+1)! / (1 - theta/(K+2)).
    """
    if theta == 0.0:
        return 0
    K = 1
    term = theta ** 2 / 2.0
    while term / (1.0 - theta / (K + 2)) > tol:
        K += 1
        term *= theta / (K + 1)
        if K > 60:
            break
    return K


def _taylor(X: np.ndarray, K: int) -> np.ndarray:
    m = X.shape[-1]
    eye = np.eye(m, dtype=X.dtype)
    E = np.broadcast_to(eye, X.shape).copy()
    # Horner: I + X(I + X/2 (I + X/3 (...)))
    for k in range(K, 0, -1):
        E = eye + (X @ E) / k
    return E


def expm(A, tol: float = 1e-14) -> np.ndarray:
    """exp(A) for a single matrix or a stack of shape (..., m, m).

    A scalar shift is split off first, exp(A) = e^mu exp(A - mu I), with Re mu
    the largest eigenvalue of the Hermitian part (A + A^*)/2 and Im mu the
    mean imaginary part of the diagonal. Then ||exp(t(A - mu I))|| <= 1 for all
    t >= 0, so none of the squarings below can overflow; only e^mu itself can.
    Each shifted matrix is scaled by 2^-s so its 1-norm is at most 0.5, summed
    by a Taylor polynomial whose remainder is below ``tol * 2^-s`` and squared
    s times. Matrices needing the same s are processed together.
    """
    A = np.asarray(A)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError("expm needs square matrices")
    if not np.all(np.isfinite(A)):
        raise NonFinite("expm input contains non-finite entries")
    dtype = np.result_type(A.dtype, np.float64)
    shape = A.shape
    m = shape[-1]
    X = A.reshape(-1, m, m).astype(dtype, copy=True)
    herm = 0.5 * (X + np.conj(np.swapaxes(X, -1, -2)))
    mu = np.linalg.eigvalsh(herm)[:, -1].astype(dtype)
    if np.iscomplexobj(X):
        mu = mu + 1j * np.trace(X, axis1=-2, axis2=-1).imag / m
    X[:, np.arange(m), np.arange(m)] -= mu[:, None]

    norms = np.abs(X).sum(axis=-2).max(axis=-1)
    with np.errstate(divide="ignore"):
        s = np.where(norms > THETA_MAX, np.ceil(np.log2(norms / THETA_MAX)), 0).astype(int)
    s = np.maximum(s, 0)

    out = np.empty_like(X)
    for si in np.unique(s):
        idx = np.nonzero(s == si)[0]
        Y = X[idx] / (2.0 ** si)
        theta = float(np.abs(Y).sum(axis=-2).max()) if idx.size else 0.0
        E = _taylor(Y, taylor_degree(theta, tol * 2.0 ** (-si)))
        for _ in range(si):
            E = E @ E
        out[idx] = E

    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        out *= np.exp(mu)[:, None, None]
    if not np.all(np.isfinite(out)):
        raise NonFinite("matrix exponential overflowed")
    return out.reshape(shape)


def expm_series(A, terms: int = 60) -> np.ndarray:
    """Plain truncated power series sum_{l<terms} A^l / l!, no scaling.

    Only accurate for modest norms; kept as an independent cross-check of
    :func:`expm` (it is the series used for Schur-power arguments).
    """
    A = np.asarray(A, dtype=complex)
    m = A.shape[-1]
    term = np.broadcast_to(np.eye(m, dtype=complex), A.shape).copy()
    total = term.copy()
    for l in range(1, terms):
        term = (term @ A) / l
        total = total + term
    return total

