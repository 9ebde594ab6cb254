"""Fourier analysis on the discrete cube F_2^n.

Points x and subsets A of [n] are both encoded as n-bit integers (bit i is
coordinate i).  A function on the cube is an array of shape (2^n,) or
(2^n, k).  Normalisation is fixed once:

    fhat(A) = E_x f(x) W_A(x)          (expectation, uniform measure)
    f(x)    = sum_A fhat(A) W_A(x)      (plain sum)

so that Parseval reads E|f|^2 = sum_A |fhat(A)|^2.
"""

from __future__ import annotations

import numpy as np

MAX_DIM = 20


def dimension(f) -> int:
    """Cube dimension of a value table; raises ValueError unless the length is 2^n, n <= 20."""
    size = np.shape(f)[0]
    n = int(size).bit_length() - 1
    if size < 1 or (1 << n) != size:
        raise ValueError(f"table length {size} is not a power of two")
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the cap {MAX_DIM}")
    return n


def popcounts(n: int) -> np.ndarray:
    """Hamming weights |x| for x = 0 .. 2^n - 1."""
    w = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        w[1 << i:2 << i] = w[:1 << i] + 1
    return w


def walsh(n: int, A: int) -> np.ndarray:
    """W_A(x) = (-1)^{|A & x|} as a float table."""
    return 1.0 - 2.0 * (popcounts(n)[np.arange(1 << n) & A] & 1)


def _butterfly(f) -> np.ndarray:
    a = np.array(f, dtype=float)
    n = dimension(a)
    tail = a.shape[1:]
    for i in range(n):
        v = a.reshape((1 << (n - 1 - i), 2, 1 << i) + tail)
        lo, hi = v[:, 0].copy(), v[:, 1]
        v[:, 0] += hi
        v[:, 1] = lo - hi
    return a


def wht(f) -> np.ndarray:
    """Fourier coefficients fhat(A) = E[f W_A]; O(n 2^n)."""
    a = _butterfly(f)
    return a / a.shape[0]


def iwht(c) -> np.ndarray:
    """Inverse of wht: f(x) = sum_A c(A) W_A(x)."""
    return _butterfly(c)


def norm(f) -> float:
    """L_2 norm under the uniform probability measure."""
    a = np.asarray(f, dtype=float)
    return float(np.sqrt((a * a).sum() / a.shape[0]))


def _weights_like(f, n: int) -> np.ndarray:
    w = popcounts(n).astype(float)
    return w.reshape((-1,) + (1,) * (np.ndim(f) - 1))


def partial(f, i: int) -> np.ndarray:
    """Directional difference (f(x) - f(x + e_i)) / 2.

    The sign makes partial_i W_A = W_A for i in A, so that the Laplacian
    below is the positive operator with Delta W_A = |A| W_A.
    """
    a = np.asarray(f, dtype=float)
    idx = np.arange(a.shape[0]) ^ (1 << i)
    return (a - a[idx]) / 2


def laplacian(f, method: str = "spectral") -> np.ndarray:
    """Delta f = sum_i partial_i f, i.e. fhat(A) -> |A| fhat(A)."""
    n = dimension(f)
    if method == "spatial":
        a = np.asarray(f, dtype=float)
        return sum((partial(a, i) for i in range(n)), np.zeros_like(a))
    if method != "spectral":
        raise ValueError(f"unknown method {method!r}")
    return iwht(wht(f) * _weights_like(f, n))


def noise_rate(t: float) -> float:
    return (1.0 - np.exp(-t)) / 2.0


def heat(f, t: float, method: str = "spectral") -> np.ndarray:
    """Heat semigroup T_t: fhat(A) -> e^{-t|A|} fhat(A).

    The spatial form flips each coordinate independently with probability
    tau = (1 - e^{-t}) / 2, one coordinate at a time.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    n = dimension(f)
    if method == "spatial":
        tau = noise_rate(t)
        a = np.array(f, dtype=float)
        idx = np.arange(a.shape[0])
        for i in range(n):
            a = (1 - tau) * a + tau * a[idx ^ (1 << i)]
        return a
    if method != "spectral":
        raise ValueError(f"unknown method {method!r}")
    return iwht(wht(f) * np.exp(-t * _weights_like(f, n)))


def tail_project(f, m: int) -> np.ndarray:
    """Zero every coefficient with |A| < m."""
    n = dimension(f)
    c = wht(f)
    c[popcounts(n) < m] = 0
    return iwht(c)


def tail_level(f, tol: float = 1e-12) -> int:
    """Smallest |A| with a coefficient above tol in norm (n + 1 for f = 0)."""
    n = dimension(f)
    c = wht(f).reshape(1 << n, -1)
    big = np.abs(c).max(axis=1) > tol
    w = popcounts(n)[big]
    return int(w.min()) if w.size else n + 1


def tail_bound_ratio(f, m: int) -> float:
    """||Delta f|| / (m ||f - E f||); at least 1 on the m-tail space in Hilbert space."""
    a = np.asarray(f, dtype=float)
    centred = a - a.mean(axis=0)
    den = m * norm(centred)
    return np.inf if den == 0 else norm(laplacian(a)) / den


def semigroup_decay_ratio(f, t: float, m: int) -> float:
    """||T_t f|| / (e^{-tm} ||f||); at most 1 on the m-tail space."""
    den = np.exp(-t * m) * norm(f)
    return 0.0 if den == 0 else norm(heat(f, t)) / den


def lp_decay_curve(f, ts, p: float = 1.0) -> np.ndarray:
    """Ratios ||T_t f||_p / ||f||_p (vector norm is Euclidean); reported, not asserted."""
    a = np.asarray(f, dtype=float)

    def lp(g):
        r = np.sqrt((g * g).reshape(g.shape[0], -1).sum(axis=1))
        return float(np.mean(r**p) ** (1 / p))

    base = lp(a)
    return np.array([lp(heat(a, t)) / base if base else 0.0 for t in ts])
