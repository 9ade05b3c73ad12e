"""Designs built from a group: base-block orbits and subgroup geometries."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .atlas import (
    CertificateError,
    cyclic_subgroup,
    named_group,
    psl_group,
    suzuki_group,
    suzuki_subgroup_perms,
)
from .ff import prime_power
from .geom import Design
from .perm import GroupBSGS, conjugation_action, find_subgroup, is_flag_transitive
from .verify import DesignParams, ParamsError, params

__all__ = [
    "BaseBlockRecord",
    "TABLE1",
    "FamilyError",
    "BaseBlockNotFound",
    "Table1Mismatch",
    "wbs_design",
    "suzuki_design",
    "ree_unital",
    "ree_design",
    "orbit_design",
    "find_base_block",
    "table1_design",
]


class FamilyError(ValueError):
    pass


class BaseBlockNotFound(RuntimeError):
    pass


class Table1Mismatch(RuntimeError):
    pass


@dataclass(frozen=True)
class BaseBlockRecord:
    line: int
    group: str
    v: int
    b: int
    r: int
    k: int
    lam: int
    point_stab_order: int
    block_stab_order: int
    literal_block: tuple[int, ...] | None = None  # 1-indexed, as printed
    note: str = ""

    def __post_init__(self):
        if self.r * (self.k - 1) != self.lam * (self.v - 1) or self.b * self.k != self.v * self.r:
            raise ValueError(f"line {self.line}: inconsistent parameters")

    @property
    def params(self) -> tuple[int, int, int, int, int]:
        return (self.v, self.b, self.r, self.k, self.lam)


# Literal blocks are only tried where the action is the natural one.
TABLE1: tuple[BaseBlockRecord, ...] = (
    BaseBlockRecord(1, "PSL2(5)@6", 6, 10, 5, 3, 2, 10, 6, (1, 2, 3)),
    BaseBlockRecord(2, "PSL3(2)@7", 7, 7, 3, 3, 1, 24, 24, (1, 2, 3), "PG_2(2)"),
    BaseBlockRecord(3, "PSL2(7)@8", 8, 14, 7, 4, 3, 21, 12),
    BaseBlockRecord(4, "PSL2(8)@28", 28, 36, 9, 7, 2, 18, 14),
    BaseBlockRecord(5, "PSL2(9)@10", 10, 15, 9, 6, 5, 36, 24, (1, 2, 3, 4, 5, 6)),
    BaseBlockRecord(6, "PSL2(11)@11", 11, 11, 5, 5, 2, 60, 60, (1, 2, 3, 5, 11), "Hadamard design"),
    BaseBlockRecord(7, "M11@12", 12, 22, 11, 6, 5, 660, 360),
    BaseBlockRecord(8, "M22@22", 22, 77, 21, 6, 5, 20160, 5760),
    BaseBlockRecord(9, "M22:2@22", 22, 77, 21, 6, 5, 40320, 11520),
    BaseBlockRecord(10, "S6@10", 10, 15, 9, 6, 5, 72, 48),
    BaseBlockRecord(11, "A7@15", 15, 35, 7, 3, 1, 168, 72),
    BaseBlockRecord(12, "A7@15", 15, 15, 7, 7, 3, 168, 168, None, "PG_3(2)"),
    BaseBlockRecord(13, "A8@15", 15, 35, 7, 3, 1, 1344, 576),
)


# natural actions on projective points; everything else comes from the atlas
_NATURAL = {"PSL2(5)@6": (2, 5), "PSL3(2)@7": (3, 2), "PSL2(7)@8": (2, 7), "PSL2(9)@10": (2, 9)}


def table1_group(name: str) -> GroupBSGS:
    if name in _NATURAL:
        return psl_group(*_NATURAL[name]).with_meta(name=name)
    return named_group(name)


# -- generic orbit designs -------------------------------------------------------


def orbit_design(g: GroupBSGS, base: Sequence[int], **meta) -> Design:
    blocks = g.set_orbit(base)
    meta.setdefault("base_block", sorted(int(x) for x in base))
    return Design(g.degree, tuple(blocks), dict(meta))


def _orbit_unions(orbits: list[list[int]], k: int) -> Iterator[list[int]]:
    """All unions of whole orbits with exactly ``k`` points, in a fixed order."""
    sizes = [len(o) for o in orbits]

    def rec(i: int, left: int, chosen: list[int]):
        if left == 0:
            yield sorted(x for j in chosen for x in orbits[j])
            return
        if i == len(orbits) or left < 0:
            return
        if sizes[i] <= left:
            yield from rec(i + 1, left - sizes[i], chosen + [i])
        yield from rec(i + 1, left, chosen)

    yield from rec(0, k, [])


def _design_matches(g: GroupBSGS, block: Sequence[int], expect: tuple[int, ...]) -> bool:
    v, b, r, k, lam = expect
    blocks = g.set_orbit(block)
    if len(blocks) != b:
        return False
    try:
        p = params(Design(g.degree, tuple(blocks)))
    except ParamsError:
        return False
    return p.as_tuple() == expect


def find_base_block(
    g: GroupBSGS,
    k: int,
    lam: int,
    stab_order_hint: int,
    *,
    seed: int = 0,
    budget: int = 10_000,
) -> tuple[int, ...]:
    """A block whose orbit under ``g`` is a 2-(v, k, lam) design.

    Candidates are unions of orbits of subgroups of order ``stab_order_hint``
    found by :func:`flagdesigns.perm.find_subgroup`.  Raises
    :class:`BaseBlockNotFound` when the search budget is exhausted.
    """
    v = g.degree
    if (lam * (v - 1)) % (k - 1):
        raise FamilyError("r = lam(v-1)/(k-1) is not an integer")
    r = lam * (v - 1) // (k - 1)
    if (v * r) % k:
        raise FamilyError("b = vr/k is not an integer")
    expect = (v, v * r // k, r, k, lam)
    found: list[tuple[int, ...]] = []

    def accept(sub: GroupBSGS) -> bool:
        for cand in _orbit_unions(sub.orbits(), k):
            if _design_matches(g, cand, expect):
                found.append(tuple(cand))
                return True
        return False

    find_subgroup(g, stab_order_hint, seed=seed, budget=budget, accept=accept)
    if not found:
        raise BaseBlockNotFound(
            f"no base block for 2-({v},{k},{lam}) from subgroups of order {stab_order_hint}"
        )
    return found[0]


def table1_design(line: int, *, check_extension: bool = False) -> tuple[Design, GroupBSGS, DesignParams]:
    """Build, verify and return the design of one catalog line.

    ``check_extension`` additionally checks line 4 against PSL2(8):3.
    """
    if not 1 <= line <= len(TABLE1):
        raise FamilyError(f"line must be in 1..{len(TABLE1)}")
    rec = TABLE1[line - 1]
    g = table1_group(rec.group)
    block = None
    source = "search"
    if rec.literal_block is not None and line in (1, 2, 5, 6):
        lit = [x - 1 for x in rec.literal_block]
        if _design_matches(g, lit, rec.params):
            block, source = tuple(lit), "literal"
    if block is None:
        block = find_base_block(g, rec.k, rec.lam, rec.block_stab_order, seed=line)
    d = orbit_design(g, block, family="table1", line=line, group=rec.group, base_block_source=source)
    p = params(d)
    if p.as_tuple() != rec.params:
        raise Table1Mismatch(f"line {line}: got {p.as_tuple()}, expected {rec.params}")
    if not p.coprime_r_lambda:
        raise Table1Mismatch(f"line {line}: gcd(r, lambda) != 1")
    if not is_flag_transitive(d, g):
        raise Table1Mismatch(f"line {line}: {rec.group} is not flag-transitive")
    if g.order // len(g.orbit(0)) != rec.point_stab_order:
        raise Table1Mismatch(f"line {line}: point stabilizer order differs")
    if check_extension and line == 4:
        ext = named_group("PSL2(8):3@28")
        if not is_flag_transitive(d, ext):
            raise Table1Mismatch("line 4: PSL2(8):3 is not flag-transitive")
    return d, g, p


# -- Witt-Bose-Shrikhande spaces ----------------------------------------------------


def wbs_design(q: int) -> tuple[Design, GroupBSGS]:
    """W(q): dihedral subgroups of order 2(q+1) of PSL2(q) versus involutions.

    A dihedral subgroup is represented by its cyclic core of order q + 1 (its
    normalizer), so the points are the conjugates of that core.  An involution
    lies in the dihedral group exactly when it normalizes the core, that is
    when it fixes the core in the conjugation action.
    """
    try:
        p, a = prime_power(q)
    except ValueError:
        raise FamilyError(f"q = {q} is not a prime power") from None
    if p != 2 or a < 3:
        raise FamilyError("W(q) needs q = 2^a with a >= 3")
    base = psl_group(2, q)
    core = cyclic_subgroup(base, q + 1)
    act, _ = conjugation_action(base, core, name=f"PSL2({q})@{q * (q - 1) // 2}")
    # base.gens[0] is the transvection I + E_01, an involution in characteristic 2
    if base.gens[0].order() != 2:
        raise CertificateError("first generator is not an involution")
    t = act.gens[0]
    block = [i for i in range(act.degree) if t(i) == i]
    d = orbit_design(act, block, family="wbs", q=q, group=act.name)
    return d, act


# -- Suzuki designs ----------------------------------------------------------------


def suzuki_design(q: int) -> tuple[Design, GroupBSGS]:
    """The 2-(q^2+1, q, q-1) design: X-orbit of a K-orbit of length q, K = Z:T."""
    if q not in (8, 32):
        raise FamilyError("Suzuki designs are supported for q in {8, 32}")
    X = suzuki_group(q)
    sub = suzuki_subgroup_perms(q)
    K = GroupBSGS(sub["centre"] + sub["torus"], degree=X.degree)
    if K.order != q * (q - 1):
        raise CertificateError(f"K has order {K.order}, expected {q * (q - 1)}")
    block = next((o for o in K.orbits() if len(o) == q), None)
    if block is None:
        raise CertificateError("no K-orbit of length q")
    d = orbit_design(X, block, family="suzuki", q=q, group=X.name)
    return d, X


# -- Ree designs (optional tier) ------------------------------------------------------


def ree_unital(q: int) -> tuple[Design, GroupBSGS]:
    if q != 27:
        raise FamilyError("Ree unitals are supported for q = 27 only")
    raise NotImplementedError("the Ree-group tier is not included in this build")


def ree_design(q: int, i: int) -> tuple[Design, GroupBSGS]:
    if q != 27 or i not in (1, 2):
        raise FamilyError("Ree designs are supported for q = 27 and i in {1, 2} only")
    raise NotImplementedError("the Ree-group tier is not included in this build")
