"""Symmetric eigensolvers.

Dense path: Householder reduction to tridiagonal form followed by the
implicit QL iteration (the EISPACK tred2/tql2 pair), compiled with numba.
Large sparse path: Lanczos with full reorthogonalisation, whose tridiagonal
Ritz problem is solved with the same QL kernel.
"""

from __future__ import annotations

import math

import numba
import numpy as np


@numba.njit(cache=True)
def _tred2(V, d, e):
    n = V.shape[0]
    for j in range(n):
        d[j] = V[n - 1, j]
    for i in range(n - 1, 0, -1):
        scale = 0.0
        h = 0.0
        for k in range(i):
            scale += abs(d[k])
        if scale == 0.0:
            e[i] = d[i - 1]
            for j in range(i):
                d[j] = V[i - 1, j]
                V[i, j] = 0.0
                V[j, i] = 0.0
        else:
            for k in range(i):
                d[k] /= scale
                h += d[k] * d[k]
            f = d[i - 1]
            g = math.sqrt(h)
            if f > 0:
                g = -g
            e[i] = scale * g
            h = h - f * g
            d[i - 1] = f - g
            for j in range(i):
                e[j] = 0.0
            for j in range(i):
                f = d[j]
                V[j, i] = f
                g = e[j] + V[j, j] * f
                for k in range(j + 1, i):
                    g += V[k, j] * d[k]
                    e[k] += V[k, j] * f
                e[j] = g
            f = 0.0
            for j in range(i):
                e[j] /= h
                f += e[j] * d[j]
            hh = f / (h + h)
            for j in range(i):
                e[j] -= hh * d[j]
            for j in range(i):
                f = d[j]
                g = e[j]
                for k in range(j, i):
                    V[k, j] -= f * e[k] + g * d[k]
                d[j] = V[i - 1, j]
                V[i, j] = 0.0
        d[i] = h
    for i in range(n - 1):
        V[n - 1, i] = V[i, i]
        V[i, i] = 1.0
        h = d[i + 1]
        if h != 0.0:
            for k in range(i + 1):
                d[k] = V[k, i + 1] / h
            for j in range(i + 1):
                g = 0.0
                for k in range(i + 1):
                    g += V[k, i + 1] * V[k, j]
                for k in range(i + 1):
                    V[k, j] -= g * d[k]
        for k in range(i + 1):
            V[k, i + 1] = 0.0
    for j in range(n):
        d[j] = V[n - 1, j]
        V[n - 1, j] = 0.0
    V[n - 1, n - 1] = 1.0
    e[0] = 0.0


@numba.njit(cache=True)
def _tql2(V, d, e, want_vectors):
    n = d.shape[0]
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0
    f = 0.0
    tst1 = 0.0
    eps = 2.0 ** -52
    for l in range(n):
        tst1 = max(tst1, abs(d[l]) + abs(e[l]))
        m = l
        while m < n:
            if abs(e[m]) <= eps * tst1:
                break
            m += 1
        if m > l:
            it = 0
            while True:
                it += 1
                if it > 60:
                    return False
                g = d[l]
                p = (d[l + 1] - g) / (2.0 * e[l])
                r = math.hypot(p, 1.0)
                if p < 0:
                    r = -r
                d[l] = e[l] / (p + r)
                d[l + 1] = e[l] * (p + r)
                dl1 = d[l + 1]
                h = g - d[l]
                for i in range(l + 2, n):
                    d[i] -= h
                f += h
                p = d[m]
                c = 1.0
                c2 = c
                c3 = c
                el1 = e[l + 1]
                s = 0.0
                s2 = 0.0
                for i in range(m - 1, l - 1, -1):
                    c3 = c2
                    c2 = c
                    s2 = s
                    g = c * e[i]
                    h = c * p
                    r = math.hypot(p, e[i])
                    e[i + 1] = s * r
                    s = e[i] / r
                    c = p / r
                    p = c * d[i] - s * g
                    d[i + 1] = h + s * (c * g + s * d[i])
                    if want_vectors:
                        for k in range(V.shape[0]):
                            h = V[k, i + 1]
                            V[k, i + 1] = s * V[k, i] + c * h
                            V[k, i] = c * V[k, i] - s * h
                p = -s * s2 * c3 * el1 * e[l] / dl1
                e[l] = s * p
                d[l] = c * p
                if abs(e[l]) <= eps * tst1:
                    break
        d[l] = d[l] + f
        e[l] = 0.0
    return True


def tridiagonal_eigh(diag: np.ndarray, off: np.ndarray, vectors: bool = True):
    """Eigen-decomposition of the symmetric tridiagonal matrix (diag, off).

    ``off[i]`` couples rows i and i+1.  Returns ascending eigenvalues and,
    when requested, the matching orthonormal eigenvectors as columns.
    """
    n = diag.shape[0]
    d = np.array(diag, dtype=float)
    e = np.zeros(n)
    e[1:] = off
    V = np.asfortranarray(np.eye(n)) if vectors else np.zeros((1, 1), order="F")
    if not _tql2(V, d, e, vectors):
        raise ArithmeticError("QL iteration did not converge")
    order = np.argsort(d, kind="stable")
    if vectors:
        return d[order], V[:, order]
    return d[order], None


def eigh(A: np.ndarray, vectors: bool = True):
    """Dense symmetric eigensolver: ascending eigenvalues (and eigenvector columns)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    if n == 1:
        return A[0].copy(), np.ones((1, 1))
    V = np.array(A, dtype=float, order="F")
    d = np.zeros(n)
    e = np.zeros(n)
    _tred2(V, d, e)
    if not vectors:
        V2 = np.zeros((1, 1), order="F")
        if not _tql2(V2, d, e, False):
            raise ArithmeticError("QL iteration did not converge")
        return np.sort(d), None
    if not _tql2(V, d, e, True):
        raise ArithmeticError("QL iteration did not converge")
    order = np.argsort(d, kind="stable")
    return d[order], V[:, order]


def lanczos_extremes(matvec, n: int, deflate: np.ndarray | None = None, steps: int = 300,
                     seed: int = 0, tol: float = 1e-10):
    """Extreme eigenpairs of a symmetric operator on the complement of ``deflate``.

    Full reorthogonalisation; iterates until both extreme Ritz pairs have
    residual below ``tol`` (infinity norm) or the Krylov space is exhausted.
    Returns ``(theta_min, theta_max, residual_min, residual_max)``.
    """
    rng = np.random.default_rng(seed)
    basis_dim = n - (0 if deflate is None else 1)
    steps = min(steps, basis_dim)
    if deflate is not None:
        u = deflate / np.linalg.norm(deflate)
    q = rng.standard_normal(n)
    if deflate is not None:
        q -= u * (u @ q)
    q /= np.linalg.norm(q)
    Q = np.zeros((steps + 1, n))
    alpha = np.zeros(steps)
    beta = np.zeros(steps)
    Q[0] = q
    k = 0
    result = None
    for k in range(steps):
        w = matvec(Q[k])
        alpha[k] = Q[k] @ w
        w -= alpha[k] * Q[k]
        if k > 0:
            w -= beta[k - 1] * Q[k - 1]
        if deflate is not None:
            w -= u * (u @ w)
        for _ in range(2):
            w -= Q[: k + 1].T @ (Q[: k + 1] @ w)
        beta[k] = np.linalg.norm(w)
        done = beta[k] < 1e-13
        if not done:
            Q[k + 1] = w / beta[k]
        if done or k == steps - 1 or (k >= 20 and k % 10 == 0):
            theta, S = tridiagonal_eigh(alpha[: k + 1], beta[:k], vectors=True)
            res_bound = np.abs(beta[k] * S[-1, [0, -1]])
            if done or k == steps - 1 or res_bound.max() < tol * 0.1:
                vmin = Q[: k + 1].T @ S[:, 0]
                vmax = Q[: k + 1].T @ S[:, -1]
                rmin = np.abs(matvec(vmin) - theta[0] * vmin).max()
                rmax = np.abs(matvec(vmax) - theta[-1] * vmax).max()
                result = (theta[0], theta[-1], rmin, rmax)
                if done or k == steps - 1 or max(rmin, rmax) < tol:
                    break
    return result
