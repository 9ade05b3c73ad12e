"""Checking the 2-design axioms and reading off the parameters.

:func:`params` counts pairs with numpy over per-block pair indices.
:func:`pair_counts` is a deliberately different route (one Python integer
bitmask of blocks per point, intersections counted by popcount) that the
test-suite uses as an oracle for it.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from math import gcd
from typing import Any

import numpy as np

from .geom import Design
from .perm import DesignNotPreserved, GroupBSGS, flag_orbit_size

__all__ = [
    "DesignParams",
    "ParamsError",
    "params",
    "pair_counts",
    "embeddable_flag",
    "verification_report",
]


class ParamsError(ValueError):
    """The incidence structure is not a 2-design; ``witness`` says why."""

    def __init__(self, kind: str, message: str, witness: dict[str, Any]):
        super().__init__(message)
        self.kind = kind
        self.witness = witness


@dataclass(frozen=True)
class DesignParams:
    v: int
    b: int
    r: int
    k: int
    lam: int
    symmetric: bool
    coprime_r_lambda: bool
    nontrivial: bool

    @classmethod
    def from_tuple(cls, v: int, b: int, r: int, k: int, lam: int) -> "DesignParams":
        if r * (k - 1) != lam * (v - 1) or b * k != v * r:
            raise ValueError(f"({v},{b},{r},{k},{lam}) violates r(k-1)=lam(v-1) or bk=vr")
        return cls(v, b, r, k, lam, v == b, gcd(r, lam) == 1, 2 < k < v - 1)

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.v, self.b, self.r, self.k, self.lam)

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["lambda"] = out.pop("lam")
        return out


def _pair_histogram(d: Design, k: int, chunk: int = 4096) -> np.ndarray:
    """Counts of every ordered pair index ``i*v + j`` with ``i < j``."""
    v = d.v
    blocks = d.block_array()
    iu, ju = np.triu_indices(k, 1)
    counts = np.zeros(v * v, dtype=np.int64)
    for start in range(0, len(blocks), chunk):
        part = blocks[start : start + chunk]
        idx = part[:, iu] * v + part[:, ju]
        counts += np.bincount(idx.ravel(), minlength=v * v)
    return counts


def params(d: Design) -> DesignParams:
    """Verify uniform k, constant r and constant lambda; return the parameters."""
    if not d.blocks:
        raise ParamsError("empty", "design has no blocks", {})
    k = len(d.blocks[0])
    for i, blk in enumerate(d.blocks):
        if len(blk) != k:
            raise ParamsError(
                "block-size",
                f"block {i} has size {len(blk)}, block 0 has size {k}",
                {"block_index": i, "block": list(blk), "size": len(blk), "expected": k},
            )
    v = d.v
    rep = np.bincount(d.block_array().ravel(), minlength=v)
    bad = np.flatnonzero(rep != rep[0])
    if bad.size:
        x = int(bad[0])
        raise ParamsError(
            "replication",
            f"point {x} lies on {rep[x]} blocks, point 0 on {rep[0]}",
            {"point": x, "count": int(rep[x]), "expected": int(rep[0])},
        )
    if v < 2:
        raise ParamsError("points", "need at least two points", {})
    counts = _pair_histogram(d, k).reshape(v, v)
    iu, ju = np.triu_indices(v, 1)
    pc = counts[iu, ju]
    lam = int(pc[0])
    bad = np.flatnonzero(pc != lam)
    if bad.size or lam == 0:
        t = int(bad[0]) if bad.size else 0
        pair = (int(iu[t]), int(ju[t]))
        raise ParamsError(
            "pair-count",
            f"pair {pair} lies on {int(pc[t])} blocks, pair (0, 1) on {lam}",
            {"pair": list(pair), "count": int(pc[t]), "expected": lam},
        )
    r = int(rep[0])
    return DesignParams.from_tuple(v, len(d.blocks), r, k, lam)


def pair_counts(d: Design) -> np.ndarray:
    """Symmetric ``v x v`` table: entry ``(i, j)`` counts blocks through both
    points (the diagonal holds the replication numbers)."""
    masks = [0] * d.v
    for idx, blk in enumerate(d.blocks):
        bit = 1 << idx
        for x in blk:
            masks[x] |= bit
    table = np.zeros((d.v, d.v), dtype=np.int64)
    for i in range(d.v):
        mi = masks[i]
        table[i, i] = mi.bit_count()
        for j in range(i + 1, d.v):
            c = (mi & masks[j]).bit_count()
            table[i, j] = table[j, i] = c
    return table


def embeddable_flag(p: DesignParams) -> tuple[int, int, int] | None:
    """Symmetric design parameters the design would embed in when r = k + lambda."""
    if p.lam > 2:
        raise ValueError("the embedding criterion applies to lambda <= 2 only")
    if p.r == p.k + p.lam:
        return (p.v + p.k + p.lam, p.k + p.lam, p.lam)
    return None


def verification_report(d: Design, group: GroupBSGS | None = None) -> dict[str, Any]:
    """JSON-ready summary: parameters and flags, or the failure witness."""
    report: dict[str, Any] = {"v": d.v, "b": d.b}
    try:
        p = params(d)
    except ParamsError as exc:
        report.update(ok=False, error=exc.kind, message=str(exc), witness=exc.witness)
        return report
    report.update(ok=True, params=p.to_dict())
    if p.lam <= 2:
        emb = embeddable_flag(p)
        report["embeddable_in"] = list(emb) if emb else None
    if group is not None:
        try:
            size = flag_orbit_size(d, group)
        except DesignNotPreserved as exc:
            report.update(ok=False, error="not-preserved", message=str(exc), witness={})
            return report
        report["flag_orbit_size"] = size
        report["flag_transitive"] = size == p.b * p.k
        report["ok"] = report["flag_transitive"]
    return report
