"""Binary linear codes over GF(2).

Words of length n are n-bit integers with bit i holding coordinate i, the
same encoding the hypercube module uses for points and subsets.  A code is
stored by a generator matrix in reduced echelon form whose pivot in each row
is that row's highest set coordinate.  Rows are sorted by pivot, highest
first, which makes the form canonical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import NoCodeFound, TooLarge
from .rng import generator

MAX_ENUM_DIM = 24
MAX_COSET_LENGTH = 20
GOOD_CODE_BUDGET = 1000


def _rref(rows: Iterable[int]) -> list[int]:
    basis: dict[int, int] = {}
    for r in rows:
        r = int(r)
        for p in sorted(basis, reverse=True):
            if r >> p & 1:
                r ^= basis[p]
        if r:
            p = r.bit_length() - 1
            for q in basis:
                if basis[q] >> p & 1:
                    basis[q] ^= r
            basis[p] = r
    return [basis[p] for p in sorted(basis, reverse=True)]


def _bits(word: int, n: int) -> np.ndarray:
    return np.array([(word >> i) & 1 for i in range(n)], dtype=np.uint8)


@dataclass(frozen=True)
class BinaryCode:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if any(r >> self.n for r in self.rows):
            raise ValueError("generator row longer than the code length")
        canon = tuple(_rref(self.rows))
        object.__setattr__(self, "rows", canon)

    @classmethod
    def from_matrix(cls, G, n: int | None = None) -> "BinaryCode":
        """Code spanned by the rows of a 0/1 matrix (column j is coordinate j)."""
        G = np.atleast_2d(np.asarray(G, dtype=np.int64)) % 2
        if n is None:
            n = G.shape[1]
        weights = 1 << np.arange(G.shape[1], dtype=np.int64)
        return cls(n, tuple(int(w) for w in (G * weights).sum(axis=1)))

    @classmethod
    def full(cls, n: int) -> "BinaryCode":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def zero(cls, n: int) -> "BinaryCode":
        return cls(n, ())

    @classmethod
    def repetition(cls, n: int) -> "BinaryCode":
        return cls(n, ((1 << n) - 1,))

    @property
    def k(self) -> int:
        return len(self.rows)

    @property
    def G(self) -> np.ndarray:
        """k x n generator matrix over GF(2)."""
        return np.array([_bits(r, self.n) for r in self.rows], dtype=np.uint8).reshape(self.k, self.n)

    @property
    def pivots(self) -> list[int]:
        return [r.bit_length() - 1 for r in self.rows]

    def contains(self, word: int) -> bool:
        for r, p in zip(self.rows, self.pivots):
            if word >> p & 1:
                word ^= r
        return word == 0

    def codewords(self) -> np.ndarray:
        """All 2^k codewords as integers (index bits select generator rows)."""
        if self.k > MAX_ENUM_DIM:
            raise TooLarge(f"2^{self.k} codewords exceed the enumeration limit 2^{MAX_ENUM_DIM}")
        words = np.zeros(1, dtype=np.int64)
        for r in self.rows:
            words = np.concatenate([words, words ^ r])
        return words


def dual(C: BinaryCode) -> BinaryCode:
    """Orthogonal complement under the standard dot product."""
    pivots = C.pivots
    free = [j for j in range(C.n) if j not in set(pivots)]
    rows = []
    for f in free:
        v = 1 << f
        for r, p in zip(C.rows, pivots):
            if r >> f & 1:
                v |= 1 << p
        rows.append(v)
    return BinaryCode(C.n, tuple(rows))


def min_distance(C: BinaryCode) -> float:
    """Minimum weight of a nonzero codeword, by exhaustion; inf for the zero code."""
    if C.k == 0:
        return math.inf
    w = np.bitwise_count(C.codewords()[1:])
    return int(w.min())


def good_code(n: int, seed: int, dim: int | None = None, distance: int | None = None,
              budget: int = GOOD_CODE_BUDGET) -> BinaryCode:
    """Rejection-sample a code of dimension ceil(n/10) and distance >= ceil(n/10)."""
    dim = math.ceil(n / 10) if dim is None else dim
    distance = math.ceil(n / 10) if distance is None else distance
    rng = generator(seed)
    for _ in range(budget):
        G = rng.integers(0, 2, size=(dim, n))
        C = BinaryCode.from_matrix(G)
        if C.k == dim and min_distance(C) >= distance:
            return C
    raise NoCodeFound(f"no [{n},{dim}] code with distance >= {distance} in {budget} draws")


def reduce(C: BinaryCode, words) -> np.ndarray:
    """Smallest integer in each coset ``word + C``; clears every pivot bit."""
    x = np.array(words, dtype=np.int64, copy=True)
    for r, p in zip(C.rows, C.pivots):
        x ^= ((x >> p) & 1) * r
    return x


@dataclass(frozen=True)
class Cosets:
    """Partition of F_2^n into cosets of a subspace."""

    label: np.ndarray  # coset index of every x in 0 .. 2^n - 1
    reps: np.ndarray   # sorted canonical representatives

    @property
    def count(self) -> int:
        return self.reps.size

    @property
    def size(self) -> int:
        return self.label.size // self.reps.size


def cosets(C_perp: BinaryCode) -> Cosets:
    if C_perp.n > MAX_COSET_LENGTH:
        raise TooLarge(f"length {C_perp.n} exceeds the coset limit {MAX_COSET_LENGTH}")
    canon = reduce(C_perp, np.arange(1 << C_perp.n))
    reps, label = np.unique(canon, return_inverse=True)
    return Cosets(label.astype(np.int64), reps)


# -- file format -------------------------------------------------------------------

def to_text(C: BinaryCode) -> str:
    lines = ["nlsg-code v1", f"length {C.n}", f"dimension {C.k}"]
    lines += ["".join(str(b) for b in _bits(r, C.n)) for r in C.rows]
    return "\n".join(lines) + "\n"


def from_text(text: str) -> BinaryCode:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0] != "nlsg-code v1":
        raise ValueError("missing 'nlsg-code v1' header")
    try:
        n = int(lines[1].split()[1])
        k = int(lines[2].split()[1])
    except (IndexError, ValueError) as exc:
        raise ValueError("header must list 'length N' then 'dimension K'") from exc
    body = lines[3:]
    if len(body) != k or any(len(b) != n or set(b) - {"0", "1"} for b in body):
        raise ValueError(f"expected {k} rows of {n} bits")
    C = BinaryCode(n, tuple(int(b[::-1], 2) for b in body))
    if C.k != k:
        raise ValueError("generator rows are linearly dependent")
    return C
