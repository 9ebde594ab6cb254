"""Graph products and degree adjustments on rotation maps.

Product vertex (u, a) is indexed ``u * n2 + a`` and product port (i, j) is
indexed ``i * d2 + j`` so that outputs are byte-reproducible.
"""

from __future__ import annotations

import numpy as np

from .errors import DegreeCapExceeded, DegreeTooSmall, IncompatibleSizes
from .multigraph import Multigraph, StochasticMatrix, _exact_matmul

DEFAULT_MAX_PORTS = 10**6


def _check_cap(n: int, degree: int, max_ports: int | None) -> None:
    cap = DEFAULT_MAX_PORTS if max_ports is None else max_ports
    if n * degree > cap:
        raise DegreeCapExceeded(f"{n} vertices x degree {degree} exceeds the cap of {cap} ports")


def zigzag(G1: Multigraph, G2: Multigraph, max_ports: int | None = None) -> Multigraph:
    """Zigzag product: zig in G2, zag across G1, zig in G2; degree d2**2."""
    n1, d1 = G1.n, G1.d
    if G2.n != d1:
        raise IncompatibleSizes(f"G2 has {G2.n} vertices but G1 has degree {d1}")
    d2 = G2.d
    _check_cap(n1 * d1, d2 * d2, max_ports)
    u = np.arange(n1)[:, None, None, None]
    a = np.arange(d1)[None, :, None, None]
    i = np.arange(d2)[None, None, :, None]
    j = np.arange(d2)[None, None, None, :]
    a1 = G2.nbr[a, i]
    i1 = G2.port[a, i]
    v = G1.nbr[u, a1]
    b1 = G1.port[u, a1]
    b = G2.nbr[b1, j]
    j1 = G2.port[b1, j]
    shape = (n1, d1, d2, d2)
    nbr = np.broadcast_to(v * d1 + b, shape).reshape(n1 * d1, d2 * d2)
    port = np.broadcast_to(j1 * d2 + i1, shape).reshape(n1 * d1, d2 * d2)
    return Multigraph(nbr, port)


def replacement(G1: Multigraph, G2: Multigraph, max_ports: int | None = None) -> Multigraph:
    """Replacement product: G2 clouds plus one inter-cloud edge at port d2."""
    n1, d1 = G1.n, G1.d
    if G2.n != d1:
        raise IncompatibleSizes(f"G2 has {G2.n} vertices but G1 has degree {d1}")
    d2 = G2.d
    _check_cap(n1 * d1, d2 + 1, max_ports)
    u = np.arange(n1)[:, None, None]
    a = np.arange(d1)[None, :, None]
    p = np.arange(d2)[None, None, :]
    cloud_nbr = np.broadcast_to(u * d1 + G2.nbr[a, p], (n1, d1, d2))
    cloud_port = np.broadcast_to(G2.port[a, p], (n1, d1, d2))
    cross_nbr = (G1.nbr * d1 + G1.port)[:, :, None]
    cross_port = np.full((n1, d1, 1), d2)
    nbr = np.concatenate([cloud_nbr, cross_nbr], axis=2).reshape(n1 * d1, d2 + 1)
    port = np.concatenate([cloud_port, cross_port], axis=2).reshape(n1 * d1, d2 + 1)
    return Multigraph(nbr, port)


def tensor(G: Multigraph, H: Multigraph, max_ports: int | None = None) -> Multigraph:
    """Tensor product; adjacency is the Kronecker product of the factors."""
    _check_cap(G.n * H.n, G.d * H.d, max_ports)
    nv = (G.nbr[:, None, :, None] * H.n + H.nbr[None, :, None, :])
    np_ = (G.port[:, None, :, None] * H.d + H.port[None, :, None, :])
    return Multigraph(nv.reshape(G.n * H.n, G.d * H.d), np_.reshape(G.n * H.n, G.d * H.d))


def _walks(G: Multigraph, t: int) -> tuple[np.ndarray, np.ndarray]:
    """End vertex and reversed-walk port index for every walk of length t."""
    n, d = G.n, G.d
    ends = np.repeat(np.arange(n), d**t)
    seq = np.tile(np.arange(d**t), n)
    back = np.zeros_like(seq)
    for k in range(t):
        step = (seq // d ** (t - 1 - k)) % d
        q = G.port[ends, step]
        ends = G.nbr[ends, step]
        back = back + q * d**k
    return ends, back


def power(G: Multigraph, t: int, max_ports: int | None = None) -> Multigraph:
    """G^t: one edge per walk of length t; port = the walk's step sequence."""
    if t < 1:
        raise ValueError("power requires t >= 1")
    _check_cap(G.n, G.d**t, max_ports)
    ends, back = _walks(G, t)
    return Multigraph(ends.reshape(G.n, G.d**t), back.reshape(G.n, G.d**t))


def cesaro(G: Multigraph, m: int, max_ports: int | None = None) -> Multigraph:
    """Cesaro graph: d**(m-1-t) parallel edges per walk of length t < m."""
    if m < 1:
        raise ValueError("cesaro requires m >= 1")
    n, d = G.n, G.d
    block = d ** (m - 1)
    _check_cap(n, m * block, max_ports)
    nbr_blocks = []
    port_blocks = []
    for t in range(m):
        copies = d ** (m - 1 - t)
        ends, back = _walks(G, t)
        ends = np.repeat(ends, copies).reshape(n, block)
        c = np.tile(np.arange(copies), n * d**t).reshape(n, block)
        back = np.repeat(back, copies).reshape(n, block)
        nbr_blocks.append(ends)
        port_blocks.append(t * block + back * copies + c)
    return Multigraph(np.concatenate(nbr_blocks, axis=1), np.concatenate(port_blocks, axis=1))


def cesaro_matrix(A, m: int):
    """(1/m) * sum_{t<m} A^t; exact for StochasticMatrix, float otherwise."""
    if m < 1:
        raise ValueError("cesaro_matrix requires m >= 1")
    if isinstance(A, StochasticMatrix):
        n, den = A.n, A.den
        term = np.eye(n, dtype=np.int64)
        total = term * den ** (m - 1) if den ** (m - 1) < (1 << 62) else term.astype(object) * den ** (m - 1)
        for t in range(1, m):
            term = _exact_matmul(term, A.num)
            scale = den ** (m - 1 - t)
            total = total + (term.astype(object) * scale if total.dtype == object or term.dtype == object
                             else term * scale)
        return StochasticMatrix(total, m * den ** (m - 1)).reduced()
    A = np.asarray(A, dtype=float)
    term = np.eye(A.shape[0])
    total = term.copy()
    for _ in range(1, m):
        term = term @ A
        total += term
    return total / m


def edge_complete(G: Multigraph, dp: int) -> Multigraph:
    """Write dp = l*d + r: copy every edge l times and add r loops per vertex."""
    n, d = G.n, G.d
    if dp < d:
        raise DegreeTooSmall(f"target degree {dp} is below the current degree {d}")
    ell, r = divmod(dp, d)
    nbr = np.concatenate([G.nbr] * ell + [np.repeat(np.arange(n)[:, None], r, axis=1)], axis=1)
    port = np.concatenate([G.port + k * d for k in range(ell)]
                          + [np.tile(np.arange(ell * d, dp), (n, 1))], axis=1)
    return Multigraph(nbr, port)


def cycle_with_loops(m: int) -> Multigraph:
    """m-cycle with one loop per vertex (3-regular); m=1 is a vertex with 3 loops."""
    if m < 1:
        raise ValueError("cycle_with_loops requires m >= 1")
    if m == 1:
        return Multigraph(np.zeros((1, 3), dtype=np.int64), np.arange(3)[None, :])
    v = np.arange(m)
    nbr = np.stack([(v + 1) % m, (v - 1) % m, v], axis=1)
    port = np.tile(np.array([1, 0, 2]), (m, 1))
    return Multigraph(nbr, port)


def double(A):
    """The 2n x 2n block matrix [[0, A], [A, 0]]."""
    if isinstance(A, StochasticMatrix):
        z = np.zeros_like(A.num)
        return StochasticMatrix(np.block([[z, A.num], [A.num, z]]), A.den)
    A = np.asarray(A, dtype=float)
    z = np.zeros_like(A)
    return np.block([[z, A], [A, z]])
