"""Regular multigraphs stored as rotation maps, and exact stochastic matrices.

A d-regular multigraph on n vertices is the involution

    rot(v, p) = (u, q)

on the n*d (vertex, port) slots.  A fixed point ``rot(v, p) = (v, p)`` is a
self-loop and adds 1 to the degree of ``v``; parallel edges are distinct port
pairs.  Nothing is stored as a weight.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .errors import NonRegular, NotInvolution

_INT64_SAFE = 1 << 62


def _as_exact(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return a
    return a.astype(np.int64)


def _exact_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer matrix product that silently switches to Python ints before overflowing."""
    if a.dtype != object and b.dtype != object:
        bound = int(np.abs(a).max(initial=0)) * int(np.abs(b).max(initial=0)) * a.shape[1]
        if bound < _INT64_SAFE:
            return a @ b
    return a.astype(object) @ b.astype(object)


class StochasticMatrix:
    """Symmetric doubly stochastic matrix ``num / den`` with integer ``num``."""

    __slots__ = ("num", "den")

    def __init__(self, num: np.ndarray, den: int):
        num = np.asarray(num)
        if num.ndim != 2 or num.shape[0] != num.shape[1]:
            raise ValueError("square matrix required")
        if den <= 0:
            raise ValueError("denominator must be positive")
        self.num = _as_exact(num)
        self.den = int(den)

    @classmethod
    def identity(cls, n: int) -> "StochasticMatrix":
        return cls(np.eye(n, dtype=np.int64), 1)

    @classmethod
    def from_fractions(cls, rows: Sequence[Sequence]) -> "StochasticMatrix":
        fr = [[Fraction(x) for x in row] for row in rows]
        den = 1
        for row in fr:
            for x in row:
                den = den * x.denominator // gcd(den, x.denominator)
        num = np.array([[int(x * den) for x in row] for row in fr], dtype=object)
        if den < _INT64_SAFE and all(abs(int(v)) < _INT64_SAFE for v in num.flat):
            num = num.astype(np.int64)
        return cls(num, den)

    @property
    def n(self) -> int:
        return self.num.shape[0]

    def dense(self) -> np.ndarray:
        if self.num.dtype == object:
            return np.array([[Fraction(int(x), self.den) for x in row] for row in self.num], dtype=float)
        return self.num.astype(float) / self.den

    def entry(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.num[i, j]), self.den)

    def fractions(self) -> list[list[Fraction]]:
        return [[Fraction(int(x), self.den) for x in row] for row in self.num]

    def reduced(self) -> "StochasticMatrix":
        g = self.den
        for x in self.num.flat:
            g = gcd(g, int(x))
            if g == 1:
                return self
        num = self.num // g
        return StochasticMatrix(num, self.den // g)

    def __matmul__(self, other: "StochasticMatrix") -> "StochasticMatrix":
        return StochasticMatrix(_exact_matmul(self.num, other.num), self.den * other.den).reduced()

    def power(self, t: int) -> "StochasticMatrix":
        if t < 0:
            raise ValueError("negative power")
        out = StochasticMatrix.identity(self.n)
        base = self
        while t:
            if t & 1:
                out = out @ base
            t >>= 1
            if t:
                base = base @ base
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StochasticMatrix) or other.n != self.n:
            return NotImplemented
        a = self.num.astype(object) * other.den
        b = other.num.astype(object) * self.den
        return bool(np.all(a == b))

    __hash__ = None  # type: ignore[assignment]

    def is_symmetric(self) -> bool:
        return bool(np.all(self.num == self.num.T))

    def is_doubly_stochastic(self) -> bool:
        rows = self.num.sum(axis=1)
        cols = self.num.sum(axis=0)
        return bool(np.all(self.num >= 0) and np.all(rows == self.den) and np.all(cols == self.den))

    def __repr__(self) -> str:
        return f"StochasticMatrix(n={self.n}, den={self.den})"


def as_float_matrix(A) -> np.ndarray:
    """Float view of a StochasticMatrix, Multigraph or array-like."""
    if isinstance(A, StochasticMatrix):
        return A.dense()
    if isinstance(A, Multigraph):
        return A.normalized_adjacency().dense()
    return np.asarray(A, dtype=float)


@dataclass(frozen=True, eq=False)
class Multigraph:
    """Immutable d-regular multigraph; ``nbr[v, p], port[v, p]`` give ``rot(v, p)``."""

    nbr: np.ndarray
    port: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        nbr = np.ascontiguousarray(self.nbr, dtype=np.int64)
        port = np.ascontiguousarray(self.port, dtype=np.int64)
        if nbr.ndim != 2 or nbr.shape != port.shape:
            raise ValueError("rotation map arrays must have shape (n, d)")
        nbr.setflags(write=False)
        port.setflags(write=False)
        object.__setattr__(self, "nbr", nbr)
        object.__setattr__(self, "port", port)

    @property
    def n(self) -> int:
        return self.nbr.shape[0]

    @property
    def d(self) -> int:
        return self.nbr.shape[1]

    @property
    def ports(self) -> int:
        return self.n * self.d

    def rot(self, v: int, p: int) -> tuple[int, int]:
        return int(self.nbr[v, p]), int(self.port[v, p])

    def check(self) -> "Multigraph":
        """Raise NotInvolution unless rot is an involution on valid slots."""
        n, d = self.n, self.d
        if n == 0 or d == 0:
            raise NotInvolution("empty rotation map")
        if self.nbr.min() < 0 or self.nbr.max() >= n or self.port.min() < 0 or self.port.max() >= d:
            raise NotInvolution("rotation map points outside the slot set")
        back_v = self.nbr[self.nbr, self.port]
        back_p = self.port[self.nbr, self.port]
        vs = np.arange(n)[:, None]
        ps = np.arange(d)[None, :]
        bad = (back_v != vs) | (back_p != ps)
        if bad.any():
            v, p = map(int, np.argwhere(bad)[0])
            raise NotInvolution(f"rot(rot({v},{p})) != ({v},{p})")
        return self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multigraph):
            return NotImplemented
        return (self.nbr.shape == other.nbr.shape and np.array_equal(self.nbr, other.nbr)
                and np.array_equal(self.port, other.port))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Multigraph(n={self.n}, d={self.d})"

    # -- adjacency ---------------------------------------------------------

    def adjacency_counts(self) -> np.ndarray:
        """Dense n x n matrix of port counts (#ports of u wired to v)."""
        counts = np.zeros((self.n, self.n), dtype=np.int64)
        rows = np.repeat(np.arange(self.n), self.d)
        np.add.at(counts, (rows, self.nbr.ravel()), 1)
        return counts

    def normalized_adjacency(self) -> StochasticMatrix:
        return StochasticMatrix(self.adjacency_counts(), self.d)

    def sparse_adjacency(self):
        """Float normalized adjacency as a scipy CSR matrix."""
        from scipy.sparse import csr_matrix

        rows = np.repeat(np.arange(self.n), self.d)
        data = np.full(rows.shape, 1.0 / self.d)
        return csr_matrix((data, (rows, self.nbr.ravel())), shape=(self.n, self.n))

    def loop_count(self) -> int:
        return int(np.count_nonzero(self.nbr == np.arange(self.n)[:, None]))

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edge multiset; loops appear as ``(v, v)`` once per loop port."""
        out = []
        for v in range(self.n):
            for p in range(self.d):
                u, q = int(self.nbr[v, p]), int(self.port[v, p])
                if (v, p) <= (u, q):
                    out.append((v, u))
        return out

    # -- connectivity -------------------------------------------------------

    def _two_coloring(self) -> tuple[bool, bool]:
        if "coloring" not in self._cache:
            color = np.full(self.n, -1, dtype=np.int64)
            bipartite = True
            color[0] = 0
            queue = deque([0])
            seen = 1
            while queue:
                v = queue.popleft()
                for u in self.nbr[v]:
                    u = int(u)
                    if color[u] < 0:
                        color[u] = 1 - color[v]
                        seen += 1
                        queue.append(u)
                    elif color[u] == color[v]:
                        bipartite = False
            self._cache["coloring"] = (seen == self.n, bipartite and seen == self.n)
        return self._cache["coloring"]

    def is_connected(self) -> bool:
        return self._two_coloring()[0]

    def is_bipartite(self) -> bool:
        """True for connected bipartite graphs (a loop breaks bipartiteness)."""
        return self._two_coloring()[1]

    # -- canonical port order -------------------------------------------------

    def canonical_form(self) -> "Multigraph":
        src = np.repeat(np.arange(self.n), self.d)
        return _from_slots(self.n, src, self.nbr.ravel())


def _from_slots(n: int, src: np.ndarray, dst: np.ndarray, d: int | None = None) -> Multigraph:
    """Canonical rotation map from directed slots ``src -> dst`` (one per port).

    Ports at v are ordered by neighbour; the c-th slot v->u pairs with the c-th
    slot u->v, and every v->v slot becomes a fixed-point loop.
    """
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    deg = np.bincount(src, minlength=n)
    if d is None:
        d = int(deg[0]) if n else 0
    bad = np.flatnonzero(deg != d)
    if bad.size:
        v = int(bad[0])
        raise NonRegular(v, int(deg[v]), d)
    order = np.lexsort((dst, src))
    s, t = src[order], dst[order]
    total = s.size
    idx = np.arange(total)
    new_group = np.ones(total, dtype=bool)
    new_group[1:] = (s[1:] != s[:-1]) | (t[1:] != t[:-1])
    group_start = np.maximum.accumulate(np.where(new_group, idx, 0))
    c = idx - group_start
    mirror = np.lexsort((c, s, t))
    if not (np.array_equal(s, t[mirror]) and np.array_equal(t, s[mirror]) and np.array_equal(c, c[mirror])):
        raise NotInvolution("edge multiplicities are not symmetric")
    partner = np.empty(total, dtype=np.int64)
    partner[idx] = mirror
    new_port = idx - s * d
    nbr = t.reshape(n, d)
    port = new_port[partner].reshape(n, d)
    return Multigraph(nbr, port)


def from_edge_list(n: int, edges: Iterable[tuple[int, int]], loops: Sequence[int] | None = None) -> Multigraph:
    """Build a regular multigraph; an edge ``(v, v)`` counts as one loop."""
    src: list[int] = []
    dst: list[int] = []
    for u, v in edges:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u},{v}) outside vertex range")
        src.append(u)
        dst.append(v)
        if u != v:
            src.append(v)
            dst.append(u)
    if loops is not None:
        for v, k in enumerate(loops):
            src.extend([v] * int(k))
            dst.extend([v] * int(k))
    deg = np.bincount(np.asarray(src, dtype=np.int64), minlength=n)
    return _from_slots(n, np.asarray(src), np.asarray(dst), int(deg[0]) if n else 0)


def from_counts(counts: np.ndarray) -> Multigraph:
    """Canonical multigraph with the given symmetric port-count matrix."""
    counts = np.asarray(counts, dtype=np.int64)
    n = counts.shape[0]
    rows, cols = np.nonzero(counts)
    reps = counts[rows, cols]
    return _from_slots(n, np.repeat(rows, reps), np.repeat(cols, reps))


def single_loop() -> Multigraph:
    return Multigraph(np.zeros((1, 1), dtype=np.int64), np.zeros((1, 1), dtype=np.int64))


def cycle(n: int) -> Multigraph:
    if n < 3:
        raise ValueError("a simple cycle needs at least 3 vertices")
    return from_edge_list(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Multigraph:
    return from_edge_list(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_regular(n: int, d: int, seed: int, simple: bool = False, max_tries: int = 10_000) -> Multigraph:
    """Uniform random involution on the n*d ports (permutation model).

    Unpaired ports (odd n*d) and ports paired at the same vertex become loops.
    With ``simple=True`` the sample is rejected until it has no loops and no
    parallel edges.
    """
    from .rng import generator

    rng = generator(seed)
    total = n * d
    for _ in range(max_tries):
        perm = rng.permutation(total)
        if total % 2:
            fixed = perm[-1:]
            perm = perm[:-1]
        else:
            fixed = perm[:0]
        a, b = perm[0::2] // d, perm[1::2] // d
        s = np.concatenate([a, b, fixed // d])
        t = np.concatenate([b, a, fixed // d])
        if simple:
            if np.any(s == t):
                continue
            key = s * n + t
            if np.unique(key).size != key.size:
                continue
        return _from_slots(n, s, t, d)
    raise RuntimeError("no simple regular graph sampled within the retry budget")


# -- text formats ----------------------------------------------------------------

def to_text(G: Multigraph) -> str:
    lines = ["nlsg-graph v1", f"vertices {G.n}", f"degree {G.d}"]
    for v in range(G.n):
        for p in range(G.d):
            lines.append(f"{v} {p} -> {int(G.nbr[v, p])} {int(G.port[v, p])}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Multigraph:
    """Parse ``nlsg-graph v1``; non-involutive files raise NotInvolution."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0] != "nlsg-graph v1":
        raise ValueError("missing 'nlsg-graph v1' header")
    try:
        n = int(lines[1].split()[1]) if lines[1].startswith("vertices") else None
        d = int(lines[2].split()[1]) if lines[2].startswith("degree") else None
    except (IndexError, ValueError) as exc:
        raise ValueError("malformed header") from exc
    if n is None or d is None:
        raise ValueError("header must list 'vertices N' then 'degree D'")
    nbr = np.full((n, d), -1, dtype=np.int64)
    port = np.full((n, d), -1, dtype=np.int64)
    body = lines[3:]
    if len(body) != n * d:
        raise ValueError(f"expected {n * d} rotation lines, found {len(body)}")
    for ln in body:
        left, _, right = ln.partition("->")
        v, p = map(int, left.split())
        u, q = map(int, right.split())
        if not (0 <= v < n and 0 <= p < d):
            raise ValueError(f"slot ({v},{p}) out of range")
        if nbr[v, p] >= 0:
            raise ValueError(f"slot ({v},{p}) listed twice")
        nbr[v, p], port[v, p] = u, q
    return Multigraph(nbr, port).check()


def from_edge_text(text: str) -> Multigraph:
    """Parse ``u v`` edge lines plus ``loop v`` lines (optional ``vertices N``)."""
    edges: list[tuple[int, int]] = []
    loop_list: list[int] = []
    n = None
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        parts = ln.split()
        if parts[0] == "vertices":
            n = int(parts[1])
        elif parts[0] == "loop":
            loop_list.append(int(parts[1]))
        else:
            edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        n = 1 + max([max(e) for e in edges] + loop_list, default=-1)
    loops = np.bincount(np.asarray(loop_list, dtype=np.int64), minlength=n)
    return from_edge_list(n, edges, loops)


def to_edge_text(G: Multigraph) -> str:
    lines = [f"vertices {G.n}"]
    for u, v in G.edges():
        lines.append(f"loop {u}" if u == v else f"{u} {v}")
    return "\n".join(lines) + "\n"


def load(path) -> Multigraph:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("nlsg-graph"):
        return from_text(text)
    return from_edge_text(text)
