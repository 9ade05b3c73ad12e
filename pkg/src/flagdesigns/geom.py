"""Projective spaces over GF(q) and the designs living in them.

Points of PG(n-1, q) are normalized row vectors (first nonzero coordinate 1)
stored as tuples of field labels, and indexed in lexicographic label order.
Everything else in the package refers to points through that index.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product
from math import gcd
from typing import Any, Iterable, Sequence

import numpy as np

from .ff import FieldElement, FiniteField, field_of_order, prime_power

__all__ = [
    "Design",
    "DesignError",
    "ProjPoint",
    "PointSpace",
    "gauss_binom",
    "pg_points",
    "pg_design",
    "pg_line_design",
    "hermitian_points",
    "hermitian_unital",
]


class DesignError(ValueError):
    pass


@dataclass(frozen=True)
class Design:
    """``v`` points ``0..v-1`` and a lexicographically sorted list of sorted blocks."""

    v: int
    blocks: tuple[tuple[int, ...], ...]
    meta: dict[str, Any] = dc_field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.v < 1:
            raise DesignError("a design needs at least one point")
        for b in self.blocks:
            if not b:
                raise DesignError("empty block")
            if list(b) != sorted(b) or len(set(b)) != len(b):
                raise DesignError(f"block {b} is not a sorted set")
            if b[0] < 0 or b[-1] >= self.v:
                raise DesignError(f"block {b} has a point outside 0..{self.v - 1}")
        if list(self.blocks) != sorted(self.blocks):
            raise DesignError("block list is not sorted")

    @classmethod
    def from_blocks(cls, v: int, blocks: Iterable[Iterable[int]], **meta) -> "Design":
        """Normalize ``blocks`` (sort each, sort the list) and build the design."""
        norm = sorted(tuple(sorted(int(x) for x in b)) for b in blocks)
        return cls(v, tuple(norm), dict(meta))

    @property
    def b(self) -> int:
        return len(self.blocks)

    def block_array(self) -> np.ndarray:
        sizes = {len(b) for b in self.blocks}
        if len(sizes) != 1:
            raise DesignError("blocks have different sizes")
        return np.array(self.blocks, dtype=np.intp)


def gauss_binom(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of GF(q)^n."""
    if not 0 <= k <= n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@dataclass(frozen=True)
class ProjPoint:
    field: FiniteField
    labels: tuple[int, ...]

    @property
    def coords(self) -> tuple[FieldElement, ...]:
        return tuple(self.field.element(x) for x in self.labels)

    def __repr__(self) -> str:
        return "(" + " : ".join(repr(c) for c in self.coords) + ")"


class PointSpace:
    """The points of PG(n-1, q) with vectorized normalization and lookup."""

    def __init__(self, n: int, q: int):
        if n < 2:
            raise DesignError("projective space needs n >= 2")
        self.n = n
        self.q = q
        self.field = F = field_of_order(q)
        self.mul = np.array(F.mul_table, dtype=np.intp)
        self.add = np.array(F.add_table, dtype=np.intp)
        self.inv = np.array([0] + F.inv_table[1:], dtype=np.intp)
        pts = []
        for lead in range(n):
            for tail in product(range(q), repeat=n - lead - 1):
                pts.append((0,) * lead + (1,) + tail)
        pts.sort()
        self.labels: list[tuple[int, ...]] = pts
        self.coords = np.array(pts, dtype=np.intp).reshape(len(pts), n)
        self.weights = q ** np.arange(n, dtype=np.int64)
        self.lookup = np.full(q**n, -1, dtype=np.intp)
        self.lookup[self.coords @ self.weights] = np.arange(len(pts))

    def __len__(self) -> int:
        return len(self.labels)

    def normalize(self, vecs: np.ndarray) -> np.ndarray:
        """Scale each nonzero row so that its first nonzero entry is 1."""
        vecs = np.asarray(vecs, dtype=np.intp)
        nz = vecs != 0
        if not nz.any(axis=1).all():
            raise DesignError("zero vector has no projective point")
        lead = vecs[np.arange(len(vecs)), nz.argmax(axis=1)]
        return self.mul[self.inv[lead][:, None], vecs]

    def index_of(self, vecs: np.ndarray) -> np.ndarray:
        return self.lookup[self.normalize(vecs) @ self.weights]

    def dot(self, a: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Matrix of bilinear values ``sum_i a[r,i] * x[c,i]``."""
        acc = self.mul[a[:, None, 0], x[None, :, 0]]
        for i in range(1, self.n):
            acc = self.add[acc, self.mul[a[:, None, i], x[None, :, i]]]
        return acc

    def row_times_matrix(self, vecs: np.ndarray, mat: np.ndarray) -> np.ndarray:
        """Row vectors times an ``n x n`` label matrix, over the field."""
        vecs = np.asarray(vecs, dtype=np.intp)
        mat = np.asarray(mat, dtype=np.intp)
        out = np.zeros_like(vecs)
        for i in range(self.n):
            out = self.add[out, self.mul[vecs[:, i][:, None], mat[i][None, :]]]
        return out

    def matrix_action(self, mat: np.ndarray, rows: np.ndarray | None = None) -> np.ndarray:
        """Permutation of point indices induced by ``x -> x * mat``."""
        pts = self.coords if rows is None else rows
        return self.index_of(self.row_times_matrix(pts, mat))

    def point(self, i: int) -> ProjPoint:
        return ProjPoint(self.field, self.labels[i])


_SPACES: dict[tuple[int, int], PointSpace] = {}


def point_space(n: int, q: int) -> PointSpace:
    key = (n, q)
    if key not in _SPACES:
        _SPACES[key] = PointSpace(n, q)
    return _SPACES[key]


def pg_points(n: int, q: int) -> list[ProjPoint]:
    sp = point_space(n, q)
    return [sp.point(i) for i in range(len(sp))]


def _incidence_blocks(inc: np.ndarray) -> list[tuple[int, ...]]:
    return [tuple(np.flatnonzero(row).tolist()) for row in inc]


def pg_design(n: int, q: int) -> Design:
    """Points versus hyperplanes of PG(n-1, q)."""
    if n < 3:
        raise DesignError("points-hyperplanes design needs n >= 3")
    sp = point_space(n, q)
    inc = sp.dot(sp.coords, sp.coords) == 0
    return Design.from_blocks(len(sp), _incidence_blocks(inc), family="pg", n=n, q=q)


def _lines(sp: PointSpace) -> list[tuple[int, ...]]:
    """All lines of the space as sorted point-index tuples."""
    q = sp.q
    seen: set[tuple[int, ...]] = set()
    covered = np.zeros((len(sp), len(sp)), dtype=bool)
    scal = np.arange(q, dtype=np.intp)
    for i in range(len(sp)):
        x = sp.coords[i]
        for j in range(i + 1, len(sp)):
            if covered[i, j]:
                continue
            y = sp.coords[j]
            # y + c*x for every scalar c, plus x itself
            combo = sp.add[y[None, :], sp.mul[scal[:, None], x[None, :]]]
            idx = np.append(sp.index_of(combo), i)
            line = tuple(sorted(idx.tolist()))
            seen.add(line)
            arr = np.array(line)
            covered[np.ix_(arr, arr)] = True
    return sorted(seen)


def pg_line_design(n: int, q: int) -> Design:
    """Blocks are the sets obtained from a line by deleting one of its points."""
    if n < 3:
        raise DesignError("line-derived design needs n >= 3")
    if q <= 2:
        raise DesignError("q = 2 gives blocks of size 2, a trivial design")
    if gcd(n - 1, q - 1) != 1:
        raise DesignError(f"gcd(n-1, q-1) = gcd({n - 1}, {q - 1}) != 1")
    sp = point_space(n, q)
    blocks = set()
    for line in _lines(sp):
        for a in line:
            blocks.add(tuple(x for x in line if x != a))
    return Design.from_blocks(len(sp), blocks, family="pg-lines", n=n, q=q)


def hermitian_points(q: int) -> tuple[PointSpace, np.ndarray]:
    """Indices in PG(2, q^2) of the isotropic points of sum x_i^(q+1)."""
    prime_power(q)
    sp = point_space(3, q * q)
    K = sp.field
    norm = np.array([K.pow(x, q + 1) for x in range(K.q)], dtype=np.intp)
    vals = norm[sp.coords]
    total = sp.add[sp.add[vals[:, 0], vals[:, 1]], vals[:, 2]]
    return sp, np.flatnonzero(total == 0)


def hermitian_unital(q: int) -> Design:
    """Isotropic points of a Hermitian form with the secant lines as blocks."""
    if q < 3:
        raise DesignError("the Hermitian unital needs q >= 3")
    sp, iso = hermitian_points(q)
    inc = sp.dot(sp.coords, sp.coords[iso]) == 0
    blocks = [tuple(np.flatnonzero(row).tolist()) for row in inc]
    secants = [b for b in blocks if len(b) == q + 1]
    return Design.from_blocks(len(iso), secants, family="hermitian", q=q)
