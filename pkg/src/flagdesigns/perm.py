"""Permutation groups: stabilizer chains, orbits and the actions designs need.

Permutations act on ``0..n-1`` from the right: ``(p * q)(i) == q(p(i))``,
so a product is read left to right.  Images are stored in read-only numpy
arrays which makes composition a single fancy-indexing operation.

The stabilizer chain is built by a deterministic Schreier-Sims procedure.
Base points are always the smallest point moved by the element that forces a
new level, so two runs on the same generator list give identical chains.
"""

from __future__ import annotations

from collections import deque
from math import lcm, prod
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

__all__ = [
    "Perm",
    "GroupBSGS",
    "PermError",
    "DesignNotPreserved",
    "OrderLimitExceeded",
    "bsgs",
    "orbit",
    "set_orbit",
    "point_stabilizer",
    "contains",
    "is_primitive",
    "is_flag_transitive",
    "flag_orbit_size",
    "conjugation_action",
    "find_subgroup",
    "subgroup_label",
]


class PermError(ValueError):
    pass


class DesignNotPreserved(PermError):
    """A generator does not map the block set onto itself."""


class OrderLimitExceeded(Exception):
    """Raised when a chain under construction outgrows a caller-supplied cap."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class Perm:
    """A permutation of ``0..n-1`` given by its image array."""

    __slots__ = ("arr", "_hash", "_ident")

    def __init__(self, images: Sequence[int] | np.ndarray):
        arr = np.array(images, dtype=np.intp).ravel()
        n = arr.size
        if n == 0:
            raise PermError("permutation of degree 0")
        seen = np.zeros(n, dtype=bool)
        if arr.min() < 0 or arr.max() >= n:
            raise PermError("image out of range")
        seen[arr] = True
        if not seen.all():
            raise PermError("images are not a bijection")
        self.arr = _frozen(arr)
        self._hash = None
        self._ident = None

    @classmethod
    def _raw(cls, arr: np.ndarray) -> "Perm":
        # trusted constructor for internal products
        self = cls.__new__(cls)
        self.arr = _frozen(arr)
        self._hash = None
        self._ident = None
        return self

    @classmethod
    def identity(cls, n: int) -> "Perm":
        if n < 1:
            raise PermError("permutation of degree 0")
        return cls._raw(np.arange(n, dtype=np.intp))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int, *, base: int = 0) -> "Perm":
        """Build from disjoint cycles; ``base=1`` reads 1-indexed labels."""
        img = list(range(n))
        touched: set[int] = set()
        for cyc in cycles:
            pts = [c - base for c in cyc]
            for x in pts:
                if not 0 <= x < n:
                    raise PermError(f"cycle point {x + base} outside degree {n}")
                if x in touched:
                    raise PermError("cycles are not disjoint")
                touched.add(x)
            for a, b in zip(pts, pts[1:] + pts[:1]):
                img[a] = b
        return cls(img)

    @classmethod
    def parse(cls, text: str, n: int, *, base: int = 1) -> "Perm":
        """Parse cycle notation such as ``"(1,2,3)(4,5)"``; ``"()"`` is the identity."""
        text = text.replace(" ", "")
        cycles = []
        for chunk in text.split(")"):
            chunk = chunk.lstrip("(")
            if chunk:
                cycles.append([int(t) for t in chunk.split(",")])
        return cls.from_cycles(cycles, n, base=base)

    @property
    def degree(self) -> int:
        return self.arr.size

    @property
    def is_identity(self) -> bool:
        if self._ident is None:
            self._ident = bool(np.array_equal(self.arr, np.arange(self.arr.size)))
        return self._ident

    def __call__(self, i: int) -> int:
        return int(self.arr[i])

    def __mul__(self, other: "Perm") -> "Perm":
        if not isinstance(other, Perm):
            return NotImplemented
        if other.arr.size != self.arr.size:
            raise PermError("degree mismatch")
        return Perm._raw(other.arr[self.arr])

    def inverse(self) -> "Perm":
        inv = np.empty_like(self.arr)
        inv[self.arr] = np.arange(self.arr.size, dtype=np.intp)
        return Perm._raw(inv)

    __invert__ = inverse

    def __pow__(self, e: int) -> "Perm":
        if e < 0:
            return self.inverse() ** (-e)
        result, base = Perm.identity(self.degree), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self, g: "Perm") -> "Perm":
        """``g^-1 * self * g``, i.e. relabel the points of ``self`` by ``g``."""
        out = np.empty_like(self.arr)
        out[g.arr] = g.arr[self.arr]
        return Perm._raw(out)

    def cycles(self) -> list[tuple[int, ...]]:
        seen = np.zeros(self.degree, dtype=bool)
        out = []
        img = self.arr.tolist()
        for start in range(self.degree):
            if seen[start] or img[start] == start:
                continue
            cyc = [start]
            seen[start] = True
            x = img[start]
            while x != start:
                cyc.append(x)
                seen[x] = True
                x = img[x]
            out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return lcm(1, *(len(c) for c in self.cycles()))

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.arr != np.arange(self.degree))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Perm):
            return NotImplemented
        return self.arr.size == other.arr.size and bool(np.array_equal(self.arr, other.arr))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.arr.tobytes())
        return self._hash

    def to_cycle_string(self, base: int = 1) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + ",".join(str(x + base) for x in c) + ")" for c in cyc)

    def __repr__(self) -> str:
        return f"Perm({self.to_cycle_string(base=0)}, n={self.degree})"


class _Level:
    """One level of the stabilizer chain: base point, generators, transversal."""

    __slots__ = ("point", "gens", "gen_lists", "reps", "inv_reps", "orbit", "done")

    def __init__(self, point: int, n: int):
        self.point = point
        self.gens: list[Perm] = []
        self.gen_lists: list[list[int]] = []
        ident = Perm.identity(n)
        self.reps: dict[int, Perm] = {point: ident}
        self.inv_reps: dict[int, Perm] = {point: ident}
        self.orbit: list[int] = [point]
        self.done: set[tuple[int, int]] = set()

    def add_gen(self, g: Perm) -> None:
        self.gens.append(g)
        self.gen_lists.append(g.arr.tolist())
        # extend the orbit; existing representatives are never replaced
        queue = deque(self.orbit)
        while queue:
            b = queue.popleft()
            for s, img in zip(self.gens, self.gen_lists):
                c = img[b]
                if c not in self.reps:
                    rep = self.reps[b] * s
                    self.reps[c] = rep
                    self.inv_reps[c] = rep.inverse()
                    self.orbit.append(c)
                    queue.append(c)


def _schreier_sims(
    n: int,
    gens: Sequence[Perm],
    base_prefix: Sequence[int] = (),
    order_limit: int | None = None,
) -> list[_Level]:
    strong: list[Perm] = []
    seen: set[Perm] = set()
    for g in gens:
        if not g.is_identity and g not in seen:
            seen.add(g)
            strong.append(g)

    levels: list[_Level] = [_Level(b, n) for b in base_prefix]
    if len(set(base_prefix)) != len(base_prefix):
        raise PermError("repeated base point")

    def fixes_base(g: Perm, upto: int) -> bool:
        return all(g.arr[levels[j].point] == levels[j].point for j in range(upto))

    for g in strong:
        if fixes_base(g, len(levels)):
            levels.append(_Level(int(g.support[0]), n))
    for i, lev in enumerate(levels):
        for g in strong:
            if fixes_base(g, i):
                lev.add_gen(g)

    def sift(h: Perm, start: int) -> tuple[Perm, int]:
        for j in range(start, len(levels)):
            b = int(h.arr[levels[j].point])
            inv = levels[j].inv_reps.get(b)
            if inv is None:
                return h, j
            h = h * inv
        return h, len(levels)

    i = len(levels) - 1
    while i >= 0:
        lev = levels[i]
        restart = False
        k = 0
        while k < len(lev.orbit) and not restart:
            b = lev.orbit[k]
            k += 1
            for gi in range(len(lev.gens)):
                if (b, gi) in lev.done:
                    continue
                lev.done.add((b, gi))
                c = lev.gen_lists[gi][b]
                h = lev.reps[b] * lev.gens[gi] * lev.inv_reps[c]
                if h.is_identity:
                    continue
                r, j = sift(h, i + 1)
                if r.is_identity:
                    continue
                if j == len(levels):
                    levels.append(_Level(int(r.support[0]), n))
                for t in range(i + 1, j + 1):
                    levels[t].add_gen(r)
                if order_limit is not None and prod(len(L.orbit) for L in levels) > order_limit:
                    raise OrderLimitExceeded
                i = j
                restart = True
                break
        if not restart:
            i -= 1
    # drop trailing levels whose subgroup is trivial (only possible for a prefix)
    while levels and len(levels[-1].orbit) == 1 and not levels[-1].gens:
        levels.pop()
    return levels


class GroupBSGS:
    """A permutation group with a base and strong generating set.

    Treat instances as immutable.  ``name``, ``socle`` and ``out_order`` are
    free metadata attached by the constructors in :mod:`flagdesigns.atlas`.
    """

    def __init__(
        self,
        gens: Sequence[Perm],
        *,
        degree: int | None = None,
        base_prefix: Sequence[int] = (),
        order_limit: int | None = None,
        name: str = "",
        socle: str = "",
        out_order: int | None = None,
    ):
        gens = list(gens)
        if degree is None:
            if not gens:
                raise PermError("empty generator list needs an explicit degree")
            degree = gens[0].degree
        if degree < 1:
            raise PermError("empty degree")
        for g in gens:
            if not isinstance(g, Perm):
                raise PermError(f"not a permutation: {g!r}")
            if g.degree != degree:
                raise PermError("generators of different degrees")
        self.degree = degree
        self.gens: tuple[Perm, ...] = tuple(gens)
        self._levels = _schreier_sims(degree, gens, base_prefix, order_limit)
        self.base: tuple[int, ...] = tuple(L.point for L in self._levels)
        self.strong_gens: tuple[tuple[Perm, ...], ...] = tuple(tuple(L.gens) for L in self._levels)
        self.basic_orbit_lengths: tuple[int, ...] = tuple(len(L.orbit) for L in self._levels)
        self.order: int = prod(self.basic_orbit_lengths)
        self.name = name
        self.socle = socle
        self.out_order = out_order
        self._gen_lists = [g.arr.tolist() for g in self.gens]

    # -- basic queries ------------------------------------------------------
    def __repr__(self) -> str:
        label = self.name or "group"
        return f"<{label}: degree {self.degree}, order {self.order}>"

    def with_meta(self, **meta) -> "GroupBSGS":
        for key in meta:
            if key not in ("name", "socle", "out_order"):
                raise TypeError(f"unknown metadata field {key}")
        clone = object.__new__(GroupBSGS)
        clone.__dict__.update(self.__dict__)
        clone.__dict__.update(meta)
        return clone

    def orbit(self, pt: int) -> list[int]:
        if not 0 <= pt < self.degree:
            raise PermError(f"point {pt} outside degree {self.degree}")
        seen = {pt}
        queue = [pt]
        for x in queue:
            for img in self._gen_lists:
                y = img[x]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return sorted(seen)

    def orbits(self) -> list[list[int]]:
        done: set[int] = set()
        out = []
        for x in range(self.degree):
            if x not in done:
                orb = self.orbit(x)
                done.update(orb)
                out.append(orb)
        return out

    def is_transitive(self) -> bool:
        return len(self.orbit(0)) == self.degree

    def sift(self, x: Perm) -> tuple[Perm, int]:
        h = x
        for j, lev in enumerate(self._levels):
            inv = lev.inv_reps.get(int(h.arr[lev.point]))
            if inv is None:
                return h, j
            h = h * inv
        return h, len(self._levels)

    def contains(self, x: Perm) -> bool:
        if not isinstance(x, Perm) or x.degree != self.degree:
            raise PermError("degree mismatch in membership test")
        return self.sift(x)[0].is_identity

    def level_group(self, i: int) -> "GroupBSGS":
        """The chain subgroup fixing ``base[:i]``, reusing the existing chain."""
        clone = object.__new__(GroupBSGS)
        clone.degree = self.degree
        clone.gens = self.strong_gens[i] if i < len(self._levels) else ()
        clone._levels = self._levels[i:]
        clone.base = self.base[i:]
        clone.strong_gens = self.strong_gens[i:]
        clone.basic_orbit_lengths = self.basic_orbit_lengths[i:]
        clone.order = prod(clone.basic_orbit_lengths)
        clone.name, clone.socle, clone.out_order = "", "", None
        clone._gen_lists = [g.arr.tolist() for g in clone.gens]
        return clone

    def point_stabilizer(self, pt: int) -> "GroupBSGS":
        if not 0 <= pt < self.degree:
            raise PermError(f"point {pt} outside degree {self.degree}")
        if self.base and self.base[0] == pt:
            return self.level_group(1)
        if not self.base or all(g.arr[pt] == pt for g in self.gens):
            return self
        rebased = GroupBSGS(self.gens, degree=self.degree, base_prefix=[pt])
        return rebased.level_group(1)

    # -- element access ---------------------------------------------------
    def random_element(self, rng: np.random.Generator) -> Perm:
        """Uniform random element: one random coset representative per level."""
        x = Perm.identity(self.degree)
        for lev in reversed(self._levels):
            b = lev.orbit[int(rng.integers(len(lev.orbit)))]
            x = x * lev.reps[b]
        return x

    def element_array(self) -> np.ndarray:
        """All elements as rows of an ``(order, degree)`` image array.

        Memory is ``order * degree`` integers, so only call this on groups of
        modest order.
        """
        dtype = np.int16 if self.degree < 2**15 else np.int32
        rows = np.arange(self.degree, dtype=dtype)[None, :]
        for lev in reversed(self._levels):
            reps = np.stack([lev.reps[b].arr for b in lev.orbit]).astype(dtype)
            # row x followed by rep u: u[x]
            rows = reps[:, rows].reshape(-1, self.degree)
        return rows

    def elements(self) -> Iterator[Perm]:
        for row in self.element_array():
            yield Perm._raw(row.astype(np.intp))

    # -- orbit algorithms ---------------------------------------------------
    def set_orbit(self, block: Iterable[int]) -> list[tuple[int, ...]]:
        return _set_orbit(self.gens, block, self.degree)

    def is_primitive(self) -> bool:
        if not self.is_transitive():
            raise PermError("primitivity is only defined for transitive groups")
        n = self.degree
        if n <= 2:
            return True
        stab = self.point_stabilizer(0)
        tried: set[int] = {0}
        for beta in range(1, n):
            if beta in tried:
                continue
            tried.update(stab.orbit(beta))
            if len(_minimal_block(self._gen_lists, n, beta)) < n:
                return False
        return True


def _minimal_block(gen_lists: list[list[int]], n: int, beta: int) -> list[int]:
    """Smallest block of imprimitivity containing 0 and ``beta``."""
    ds = DisjointSet(range(n))
    ds.merge(0, beta)
    queue = deque([(0, beta)])
    while queue:
        a, b = queue.popleft()
        for img in gen_lists:
            x, y = img[a], img[b]
            rx, ry = ds[x], ds[y]
            if rx != ry:
                ds.merge(rx, ry)
                queue.append((rx, ry))
    return sorted(ds.subset(0))


def _set_orbit(gens: Sequence[Perm], block: Iterable[int], n: int) -> list[tuple[int, ...]]:
    start = np.array(sorted(set(int(x) for x in block)), dtype=np.intp)
    if start.size == 0:
        raise PermError("empty block")
    if start[0] < 0 or start[-1] >= n:
        raise PermError("block point outside degree")
    k = start.size
    seen: set[bytes] = {start.tobytes()}
    found = [start]
    frontier = start[None, :]
    gen_arrs = [g.arr for g in gens]
    while frontier.shape[0]:
        fresh = []
        for arr in gen_arrs:
            imgs = np.sort(arr[frontier], axis=1)
            for row in imgs:
                key = row.tobytes()
                if key not in seen:
                    seen.add(key)
                    fresh.append(row)
        frontier = np.array(fresh, dtype=np.intp).reshape(-1, k)
        found.extend(fresh)
    rows = np.array(found, dtype=np.intp).reshape(-1, k)
    order = np.lexsort(rows.T[::-1])
    return [tuple(r) for r in rows[order].tolist()]


# -- module-level operations ------------------------------------------------


def bsgs(gens: Sequence[Perm], *, degree: int | None = None, **meta) -> GroupBSGS:
    return GroupBSGS(gens, degree=degree, **meta)


def orbit(g: GroupBSGS, pt: int) -> list[int]:
    return g.orbit(pt)


def set_orbit(g: GroupBSGS, block: Iterable[int]) -> list[tuple[int, ...]]:
    return g.set_orbit(block)


def point_stabilizer(g: GroupBSGS, pt: int) -> GroupBSGS:
    return g.point_stabilizer(pt)


def contains(g: GroupBSGS, x: Perm) -> bool:
    return g.contains(x)


def is_primitive(g: GroupBSGS) -> bool:
    return g.is_primitive()


def _block_matrix(blocks: Sequence[Sequence[int]]) -> np.ndarray | None:
    sizes = {len(b) for b in blocks}
    if len(sizes) != 1:
        return None
    return np.array([sorted(b) for b in blocks], dtype=np.intp)


def _rows_sorted(mat: np.ndarray) -> np.ndarray:
    return mat[np.lexsort(mat.T[::-1])]


def check_preserves(d, g: GroupBSGS) -> None:
    """Raise :class:`DesignNotPreserved` unless every generator fixes the block set."""
    if g.degree != d.v:
        raise PermError(f"group degree {g.degree} differs from point count {d.v}")
    mat = _block_matrix(d.blocks)
    if mat is not None:
        ref = _rows_sorted(mat)
        for idx, s in enumerate(g.gens):
            img = _rows_sorted(np.sort(s.arr[mat], axis=1))
            if not np.array_equal(img, ref):
                raise DesignNotPreserved(f"generator {idx} does not preserve the blocks")
        return
    ref_set = {tuple(sorted(b)) for b in d.blocks}
    for idx, s in enumerate(g.gens):
        img = s.arr.tolist()
        if {tuple(sorted(img[x] for x in b)) for b in d.blocks} != ref_set:
            raise DesignNotPreserved(f"generator {idx} does not preserve the blocks")


def flag_orbit_size(d, g: GroupBSGS) -> int:
    """Size of the orbit of one flag ``(alpha, B)`` under ``g``.

    Uses ``|(alpha, B)^G| = |alpha^G| * |B^(G_alpha)|`` with ``alpha`` the
    first base point, so only a point stabilizer's set orbit is expanded.
    """
    check_preserves(d, g)
    alpha = g.base[0] if g.base else 0
    block = next((b for b in d.blocks if alpha in b), None)
    if block is None:
        return 0
    stab = g.point_stabilizer(alpha)
    return len(g.orbit(alpha)) * len(_set_orbit(stab.gens, block, g.degree))


def is_flag_transitive(d, g: GroupBSGS) -> bool:
    flags = sum(len(b) for b in d.blocks)
    return flag_orbit_size(d, g) == flags


def subgroup_label(elements: np.ndarray, base: Sequence[int]) -> tuple:
    """Canonical label of a subgroup from its element rows: sorted base images."""
    imgs = elements[:, list(base)]
    imgs = imgs[np.lexsort(imgs.T[::-1])]
    return tuple(map(tuple, imgs.tolist()))


def conjugation_action(g: GroupBSGS, sub: GroupBSGS, **meta) -> tuple[GroupBSGS, list[tuple]]:
    """Action of ``g`` by conjugation on the conjugates of ``sub``.

    Each conjugate is labeled by its sorted element images on ``g.base``;
    point ``i`` of the returned group is ``labels[i]``.  Labels are ordered
    by discovery from ``sub`` itself, which is point 0.
    """
    if sub.degree != g.degree:
        raise PermError("degree mismatch")
    for s in sub.gens:
        if not g.contains(s):
            raise PermError("sub is not a subgroup of g")
    base = list(g.base) or [0]
    elems = sub.element_array().astype(np.intp)
    label0 = subgroup_label(elems, base)
    labels = [label0]
    index = {label0: 0}
    members = [elems]
    # conjugating rows by h: h^-1 x h has images h[x[h^-1]]
    gen_arrs = [(h.arr, h.inverse().arr) for h in g.gens]
    images: list[list[int]] = [[] for _ in g.gens]
    pos = 0
    while pos < len(members):
        rows = members[pos]
        for j, (h, hinv) in enumerate(gen_arrs):
            conj = h[rows[:, hinv]]
            lab = subgroup_label(conj, base)
            if lab not in index:
                index[lab] = len(labels)
                labels.append(lab)
                members.append(conj)
            images[j].append(index[lab])
        pos += 1
    m = len(labels)
    action_gens = [Perm(img) for img in images]
    return GroupBSGS(action_gens, degree=m, **meta), labels


def find_subgroup(
    g: GroupBSGS,
    target_order: int,
    *,
    seed: int = 0,
    budget: int = 10_000,
    accept=None,
    max_gens: int = 3,
) -> GroupBSGS | None:
    """Seeded search for a subgroup of order ``target_order``.

    Candidates are generated by random pairs of elements (then triples after
    half the budget) whose element orders divide the target.  Chains are
    abandoned as soon as their partial order exceeds the target.  Distinct
    subgroups are tried once; ``accept`` may reject a subgroup of the right
    order (for instance a wrong conjugacy class).  Returns ``None`` when the
    budget runs out.
    """
    if g.order % target_order:
        return None
    rng = np.random.default_rng(seed)
    tried: set[tuple] = set()
    base = list(g.base)
    for attempt in range(budget):
        ngens = 2 if attempt < budget // 2 or max_gens < 3 else 3
        gens = []
        for _ in range(ngens):
            x = g.random_element(rng)
            if target_order % x.order():
                break
            gens.append(x)
        else:
            try:
                sub = GroupBSGS(gens, degree=g.degree, order_limit=target_order)
            except OrderLimitExceeded:
                continue
            if sub.order != target_order:
                continue
            label = subgroup_label(sub.element_array(), base)
            if label in tried:
                continue
            tried.add(label)
            if accept is None or accept(sub):
                return sub
    return None
