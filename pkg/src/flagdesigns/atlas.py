"""Constructors for the permutation groups used by the design families.

Every constructor checks the order it computes against the closed formula
for the group (or the catalog order for named groups) and raises
:class:`CertificateError` on any mismatch, so a transcription slip in a
generator turns into a loud failure instead of a wrong design.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from math import gcd, prod

import numpy as np

from .ff import FiniteField, prime_power, twist_theta
from .geom import hermitian_points, point_space
from .perm import GroupBSGS, Perm, PermError, conjugation_action, find_subgroup

__all__ = [
    "GroupSpec",
    "CertificateError",
    "group_order",
    "psl_group",
    "pgammal_group",
    "psu3_group",
    "suzuki_group",
    "suzuki_ovoid",
    "ree_group",
    "named_group",
    "cyclic_subgroup",
    "NAMED_GROUPS",
    "CATALOG_SHA256",
]


class CertificateError(RuntimeError):
    """A constructed group failed its order or invariance certificate."""


FAMILIES = ("PSL", "PSU", "PSp", "POmega+", "POmega-", "POmegaOdd", "Sz", "Ree", "Named")

# name -> (order, |Out| of the socle, socle name)
NAMED_GROUPS: dict[str, tuple[int, int, str]] = {
    "M11": (7920, 1, "M11"),
    "M12": (95040, 2, "M12"),
    "M22": (443520, 2, "M22"),
    "M22:2": (887040, 2, "M22"),
    "M24": (244823040, 1, "M24"),
    "S6": (720, 4, "A6"),
    "A7": (2520, 2, "A7"),
    "A8": (20160, 2, "A8"),
    "PSL2(11)": (660, 2, "PSL2(11)"),
    "PSL2(8)": (504, 3, "PSL2(8)"),
    "PSL2(8):3": (1512, 3, "PSL2(8)"),
}


def _is_odd_power(q: int, p: int) -> bool:
    try:
        pp, a = prime_power(q)
    except ValueError:
        return False
    return pp == p and a % 2 == 1 and a >= 3


@dataclass(frozen=True)
class GroupSpec:
    """A finite simple group (or named group) by family and parameters.

    ``n`` is the dimension of the natural module for classical families.
    """

    family: str
    n: int = 0
    q: int = 0
    name: str = ""

    def __post_init__(self):
        fam, n, q = self.family, self.n, self.q
        if fam not in FAMILIES:
            raise ValueError(f"unknown family {fam!r}")
        if fam == "Named":
            if self.name.split("@")[0] not in NAMED_GROUPS:
                raise ValueError(f"unknown named group {self.name!r}")
            return
        prime_power(q)
        ok = {
            "PSL": n >= 2 and (n, q) not in {(2, 2), (2, 3)},
            "PSU": n >= 3 and (n, q) != (3, 2),
            "PSp": n >= 4 and n % 2 == 0 and (n, q) != (4, 2),
            "POmegaOdd": n >= 7 and n % 2 == 1 and q % 2 == 1,
            "POmega+": n >= 8 and n % 2 == 0,
            "POmega-": n >= 8 and n % 2 == 0,
            "Sz": _is_odd_power(q, 2),
            "Ree": _is_odd_power(q, 3),
        }[fam]
        if not ok:
            raise ValueError(f"invalid parameters for {fam}: n={n}, q={q}")


def group_order(spec: GroupSpec) -> tuple[int, int]:
    """``(|X|, |Out(X)|)`` for the simple group described by ``spec``."""
    fam, n, q = spec.family, spec.n, spec.q
    if fam == "Named":
        order, out, _ = NAMED_GROUPS[spec.name.split("@")[0]]
        return order, out
    p, a = prime_power(q)
    if fam == "PSL":
        d = gcd(n, q - 1)
        order = q ** (n * (n - 1) // 2) * prod(q**i - 1 for i in range(2, n + 1)) // d
        out = d * a if n == 2 else 2 * a * d
    elif fam == "PSU":
        d = gcd(n, q + 1)
        order = q ** (n * (n - 1) // 2) * prod(q**i - (-1) ** i for i in range(2, n + 1)) // d
        out = 2 * a * d
    elif fam == "PSp":
        m = n // 2
        d = gcd(2, q - 1)
        order = q ** (m * m) * prod(q ** (2 * i) - 1 for i in range(1, m + 1)) // d
        out = 2 * a if (m == 2 and p == 2) else d * a
    elif fam == "POmegaOdd":
        m = (n - 1) // 2
        order = q ** (m * m) * prod(q ** (2 * i) - 1 for i in range(1, m + 1)) // 2
        out = 2 * a
    elif fam in ("POmega+", "POmega-"):
        m = n // 2
        eps = 1 if fam == "POmega+" else -1
        d = gcd(4, q**m - eps)
        order = (
            q ** (m * (m - 1)) * (q**m - eps) * prod(q ** (2 * i) - 1 for i in range(1, m)) // d
        )
        if eps == 1 and m == 4:
            out = 6 * a * d
        else:
            out = 2 * a * d
    elif fam == "Sz":
        order = q * q * (q * q + 1) * (q - 1)
        out = a
    else:  # Ree
        order = q**3 * (q**3 + 1) * (q - 1)
        out = a
    return order, out


def _certify(g: GroupBSGS, expected: int, what: str) -> GroupBSGS:
    if g.order != expected:
        raise CertificateError(f"{what}: computed order {g.order}, expected {expected}")
    return g


# -- linear groups on projective points -------------------------------------


def _transvections(F: FiniteField, n: int) -> list[np.ndarray]:
    gamma = F.primitive_element
    mats = []
    for j in range(F.a):
        c = F.pow(gamma, j)
        for k in range(n):
            for l in range(n):
                if k != l:
                    m = np.eye(n, dtype=np.intp)
                    m[k, l] = c
                    mats.append(m)
    return mats


@lru_cache(maxsize=None)
def psl_group(n: int, q: int) -> GroupBSGS:
    """PSL_n(q) acting on the points of PG(n-1, q), from all elementary transvections."""
    spec = GroupSpec("PSL", n, q)
    order, out = group_order(spec)
    sp = point_space(n, q)
    gens = [Perm(sp.matrix_action(m)) for m in _transvections(sp.field, n)]
    g = GroupBSGS(gens, degree=len(sp), name=f"PSL{n}({q})", socle=f"PSL{n}({q})", out_order=out)
    return _certify(g, order, g.name)


@lru_cache(maxsize=None)
def pgammal_group(n: int, q: int) -> GroupBSGS:
    """PGammaL_n(q) on PG(n-1, q): transvections, a diagonal element, Frobenius."""
    sp = point_space(n, q)
    F = sp.field
    gens = [Perm(sp.matrix_action(m)) for m in _transvections(F, n)]
    diag = np.eye(n, dtype=np.intp)
    diag[0, 0] = F.primitive_element
    gens.append(Perm(sp.matrix_action(diag)))
    frob = np.array([F.frobenius(x) for x in range(F.q)], dtype=np.intp)
    gens.append(Perm(sp.index_of(frob[sp.coords])))
    order, out = group_order(GroupSpec("PSL", n, q))
    full = order * gcd(n, q - 1) * F.a
    g = GroupBSGS(gens, degree=len(sp), name=f"PGammaL{n}({q})", socle=f"PSL{n}({q})", out_order=out)
    return _certify(g, full, g.name)


# -- small matrix helpers over field labels ------------------------------------


def _mat_mul(F: FiniteField, A, B):
    n, m, k = len(A), len(B), len(B[0])
    out = [[0] * k for _ in range(n)]
    for i in range(n):
        for j in range(k):
            acc = 0
            for t in range(m):
                acc = F.add(acc, F.mul(A[i][t], B[t][j]))
            out[i][j] = acc
    return out


def _mat_inv(F: FiniteField, A):
    n = len(A)
    M = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise CertificateError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = F.inv(M[col][col])
        M[col] = [F.mul(inv, x) for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                c = M[r][col]
                M[r] = [F.sub(x, F.mul(c, y)) for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def _det3(F: FiniteField, A) -> int:
    t = 0
    for (i, j, k), sign in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                            ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
        term = F.mul(F.mul(A[0][i], A[1][j]), A[2][k])
        t = F.add(t, term) if sign == 1 else F.sub(t, term)
    return t


# -- unitary group ------------------------------------------------------------


@lru_cache(maxsize=None)
def psu3_group(q: int) -> GroupBSGS:
    """PSU_3(q) on the isotropic points of the form sum x_i^(q+1).

    The generators are written in a hyperbolic basis ``(e, w, f)`` where the
    form is antidiagonal: every lower unitriangular isometry of determinant
    one (found by filtering all candidates through the isometry equation),
    plus the antidiagonal swap of ``e`` and ``f``.  They are transported back
    to the standard basis before acting on points.
    """
    spec = GroupSpec("PSU", 3, q)
    order, out = group_order(spec)
    sp, iso = hermitian_points(q)
    K = sp.field
    conj = [K.pow(x, q) for x in range(K.q)]

    def herm(x, y):
        acc = 0
        for a, b in zip(x, y):
            acc = K.add(acc, K.mul(a, conj[b]))
        return acc

    vecs = [list(sp.labels[i]) for i in iso]
    e = vecs[0]
    f = next(v for v in vecs if herm(e, v))
    c = conj[K.inv(herm(e, f))]
    f = [K.mul(c, x) for x in f]
    # w spans the orthogonal complement of <e, f>; it is anisotropic
    w = next(
        list(v) for v in sp.labels if herm(v, e) == 0 and herm(v, f) == 0
    )
    nw = herm(w, w)
    s = next(s for s in range(1, K.q) if K.mul(K.pow(s, q + 1), nw) == 1)
    w = [K.mul(s, x) for x in w]
    B = [e, w, f]
    Binv = _mat_inv(K, B)

    J = [[0, 0, 1], [0, 1, 0], [1, 0, 0]]

    def is_isometry(A) -> bool:
        Abar_t = [[conj[A[j][i]] for j in range(3)] for i in range(3)]
        return _mat_mul(K, _mat_mul(K, A, J), Abar_t) == J

    mats = []
    for a in range(K.q):
        for b in range(K.q):
            for cc in range(K.q):
                A = [[1, 0, 0], [a, 1, 0], [b, cc, 1]]
                if (a or b or cc) and is_isometry(A):
                    mats.append(A)
    swap = [[0, 0, 1], [0, K.neg(1), 0], [1, 0, 0]]
    if not is_isometry(swap) or _det3(K, swap) != 1:
        raise CertificateError("swap matrix is not a determinant-one isometry")
    mats.append(swap)

    pos = np.full(len(sp), -1, dtype=np.intp)
    pos[iso] = np.arange(len(iso))
    rows = sp.coords[iso]
    gens = []
    for A in mats:
        # x -> x * Binv * A * B in standard coordinates
        M = np.array(_mat_mul(K, _mat_mul(K, Binv, A), B), dtype=np.intp)
        img = pos[sp.matrix_action(M, rows)]
        if (img < 0).any():
            raise CertificateError("generator does not preserve the isotropic points")
        gens.append(Perm(img))
    g = GroupBSGS(gens, degree=len(iso), name=f"PSU3({q})", socle=f"PSU3({q})", out_order=out)
    return _certify(g, order, g.name)


# -- Suzuki groups -------------------------------------------------------------


def suzuki_ovoid(q: int) -> tuple[object, np.ndarray]:
    """PG(3, q) point indices of the ovoid {(1 : u : v : uv + u^(t+2) + v^t)} + (0:0:0:1)."""
    if not _is_odd_power(q, 2):
        raise ValueError(f"Suzuki groups need q = 2^(2m+1) with m >= 1, got {q}")
    sp = point_space(4, q)
    F = sp.field
    th = twist_theta(F)
    pts = [(0, 0, 0, 1)]
    for u in range(q):
        u_t2 = F.mul(th(u), F.mul(u, u))
        for v in range(q):
            last = F.add(F.add(F.mul(u, v), u_t2), th(v))
            pts.append((1, u, v, last))
    idx = sp.index_of(np.array(pts, dtype=np.intp))
    return sp, np.sort(idx)


def _suzuki_matrices(F: FiniteField):
    """Column-action matrices S(a, b), M(k) and the reversal T."""
    th = twist_theta(F)
    r = th.exponent
    half = r // 2

    def S(a, b):
        a_r = F.pow(a, r)
        corner = F.add(F.add(F.mul(F.pow(a, 2 + r), 1), F.mul(a, b)), F.pow(b, r))
        return [
            [1, 0, 0, 0],
            [a, 1, 0, 0],
            [b, a_r, 1, 0],
            [corner, F.add(F.pow(a, 1 + r), b), a, 1],
        ]

    def M(k):
        return [
            [F.pow(k, 1 + half), 0, 0, 0],
            [0, F.pow(k, half), 0, 0],
            [0, 0, F.pow(k, -half), 0],
            [0, 0, 0, F.pow(k, -1 - half)],
        ]

    T = [[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]
    return S, M, T


def _ovoid_perm(sp, ovoid: np.ndarray, pos: np.ndarray, col_mat) -> Perm:
    # column action x -> M x equals row action x^T -> x^T M^T
    Mt = np.array(col_mat, dtype=np.intp).T
    img = pos[sp.matrix_action(Mt, sp.coords[ovoid])]
    if (img < 0).any():
        raise CertificateError("Suzuki generator does not preserve the ovoid")
    return Perm(img)


@lru_cache(maxsize=None)
def suzuki_group(q: int) -> GroupBSGS:
    """Sz(q) on the q^2 + 1 points of its ovoid in PG(3, q)."""
    spec = GroupSpec("Sz", 0, q)
    order, out = group_order(spec)
    sp, ovoid = suzuki_ovoid(q)
    F = sp.field
    S, M, T = _suzuki_matrices(F)
    pos = np.full(len(sp), -1, dtype=np.intp)
    pos[ovoid] = np.arange(len(ovoid))
    mats = [S(1, 0), S(0, 1), M(F.primitive_element), T]
    gens = [_ovoid_perm(sp, ovoid, pos, m) for m in mats]
    g = GroupBSGS(gens, degree=len(ovoid), name=f"Sz({q})", socle=f"Sz({q})", out_order=out)
    _certify(g, order, g.name)
    stab = g.point_stabilizer(0)
    if len(stab.orbit(1)) != len(ovoid) - 1:
        raise CertificateError(f"Sz({q}) is not 2-transitive on the ovoid")
    return g


def suzuki_subgroup_perms(q: int) -> dict[str, list[Perm]]:
    """Generators of the centre Z = {S(0, b)} and the torus <M(w)> on the ovoid."""
    sp, ovoid = suzuki_ovoid(q)
    F = sp.field
    S, M, _ = _suzuki_matrices(F)
    pos = np.full(len(sp), -1, dtype=np.intp)
    pos[ovoid] = np.arange(len(ovoid))
    centre = [_ovoid_perm(sp, ovoid, pos, S(0, 1 << i)) for i in range(F.a)]
    torus = [_ovoid_perm(sp, ovoid, pos, M(F.primitive_element))]
    return {"centre": centre, "torus": torus}


def ree_group(q: int) -> GroupBSGS:
    """The small Ree group on q^3 + 1 points (optional tier, not built here)."""
    if not _is_odd_power(q, 3):
        raise ValueError(f"Ree groups need q = 3^(2m+1) with m >= 1, got {q}")
    raise NotImplementedError("the Ree-group tier is not included in this build")


# -- named groups ---------------------------------------------------------------

CATALOG_FILE = "atlas_gens.txt"
CATALOG_SHA256 = "de65c091b3d8a1e62753f72eb228bafc1bb8a751164a8fe843f375347f165687"


@dataclass(frozen=True)
class CatalogRecord:
    name: str
    degree: int
    order: int
    gens: tuple[str, ...]
    source: str

    def perms(self) -> list[Perm]:
        return [Perm.parse(t, self.degree) for t in self.gens]


def _catalog_text() -> bytes:
    return resources.files("flagdesigns.data").joinpath(CATALOG_FILE).read_bytes()


def parse_catalog(text: str) -> dict[str, CatalogRecord]:
    """Records are ``name | degree | order | gen; gen; ... | source`` lines."""
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split("|")]
        if len(fields) != 5:
            raise ValueError(f"malformed catalog record: {line[:40]}...")
        name, deg, order, gens, source = fields
        out[name] = CatalogRecord(
            name, int(deg), int(order), tuple(g.strip() for g in gens.split(";")), source
        )
    return out


@lru_cache(maxsize=None)
def load_catalog(verify_hash: bool = True) -> dict[str, CatalogRecord]:
    raw = _catalog_text()
    if verify_hash:
        digest = hashlib.sha256(raw).hexdigest()
        if digest != CATALOG_SHA256:
            raise CertificateError(f"generator catalog hash mismatch: {digest}")
    return parse_catalog(raw.decode("utf-8"))


def _from_record(rec: CatalogRecord) -> GroupBSGS:
    base_name = rec.name.split("@")[0]
    order, out, socle = NAMED_GROUPS[base_name]
    if order != rec.order:
        raise CertificateError(f"{rec.name}: catalog order {rec.order} differs from {order}")
    g = GroupBSGS(rec.perms(), degree=rec.degree, name=rec.name, socle=socle, out_order=out)
    return _certify(g, order, rec.name)


@lru_cache(maxsize=None)
def named_group(name: str) -> GroupBSGS:
    """A named permutation group such as ``"M11@12"`` (group @ degree)."""
    if name == "A8@15":
        g = psl_group(4, 2)
        return _certify(g.with_meta(name=name, socle="A8", out_order=2), 20160, name)
    if name == "A7@15":
        return _a7_on_15()
    if name in ("PSL2(8)@28", "PSL2(8):3@28"):
        return _psl28_on_c9(name)
    catalog = load_catalog()
    if name not in catalog:
        raise KeyError(f"unknown named group {name!r}")
    return _from_record(catalog[name])


def _a7_on_15() -> GroupBSGS:
    a8 = psl_group(4, 2)
    sub = find_subgroup(a8, 2520, seed=7, accept=lambda s: s.is_transitive())
    if sub is None:
        raise CertificateError("no A7 found inside A8@15 within the search budget")
    return _certify(sub.with_meta(name="A7@15", socle="A7", out_order=2), 2520, "A7@15")


def cyclic_subgroup(g: GroupBSGS, order: int, seed: int = 0) -> GroupBSGS:
    """A cyclic subgroup of ``g`` of the given order, from a seeded element search."""
    rng = np.random.default_rng(seed)
    for _ in range(10_000):
        x = g.random_element(rng)
        if x.order() == order:
            return GroupBSGS([x])
    raise CertificateError(f"no element of order {order} found")


def _psl28_on_c9(name: str) -> GroupBSGS:
    """Conjugation action on the 28 cyclic subgroups of order 9 of PSL2(8).

    Both ``PSL2(8)@28`` and ``PSL2(8):3@28`` come from one action of
    PGammaL2(8) so that they share a point labeling; the simple group is the
    subgroup generated by the images of the transvections.
    """
    full = pgammal_group(2, 8)
    core = cyclic_subgroup(psl_group(2, 8), 9)
    act, labels = conjugation_action(full, core)
    if len(labels) != 28:
        raise CertificateError(f"{name}: {len(labels)} conjugates instead of 28")
    base_name = name.split("@")[0]
    order, out, socle = NAMED_GROUPS[base_name]
    if base_name == "PSL2(8)":
        n_trans = len(psl_group(2, 8).gens)
        act = GroupBSGS(act.gens[:n_trans], degree=28)
    return _certify(act.with_meta(name=name, socle=socle, out_order=out), order, name)


# -- derivations of catalog records from other records ---------------------------


def _restrict(p: Perm, points: list[int]) -> Perm:
    where = {x: i for i, x in enumerate(points)}
    return Perm([where[int(p.arr[x])] for x in points])


def derive_m22_2() -> list[Perm]:
    """M22:2 as the setwise stabilizer of {23, 24} in M24, on the other 22 points."""
    m24 = _from_record(load_catalog()["M24@24"])
    stab = m24.point_stabilizer(22).point_stabilizer(23)
    # x carries 22 to 23; y fixes 23 and carries x(23) back to 22
    x = _element_mapping(m24, 22, 23)
    y = _element_mapping(m24.point_stabilizer(23), x(23), 22)
    swap = x * y
    if not (swap(22) == 23 and swap(23) == 22):
        raise CertificateError("failed to build an element swapping 23 and 24")
    pts = list(range(22))
    return [_restrict(s, pts) for s in stab.gens] + [_restrict(swap, pts)]


def _element_mapping(g: GroupBSGS, src: int, dst: int) -> Perm:
    """Some element of ``g`` mapping ``src`` to ``dst`` (breadth-first word)."""
    seen = {src: Perm.identity(g.degree)}
    queue = [src]
    for pt in queue:
        for s in g.gens:
            nxt = s(pt)
            if nxt not in seen:
                seen[nxt] = seen[pt] * s
                queue.append(nxt)
    if dst not in seen:
        raise PermError(f"{dst} not in the orbit of {src}")
    return seen[dst]


def derive_m11_on_12() -> list[Perm]:
    """M11 acting on the 12 conjugates of a PSL2(11) subgroup."""
    m11 = _from_record(load_catalog()["M11@11"])
    sub = find_subgroup(m11, 660, seed=11)
    if sub is None:
        raise CertificateError("no PSL2(11) found inside M11")
    act, _ = conjugation_action(m11, sub)
    return list(act.gens)


def derive_psl2_11_on_11() -> list[Perm]:
    """PSL2(11) acting on the 11 conjugates of one of its A5 subgroups."""
    g = psl_group(2, 11)
    sub = find_subgroup(g, 60, seed=5)
    if sub is None:
        raise CertificateError("no A5 found inside PSL2(11)")
    act, _ = conjugation_action(g, sub)
    return list(act.gens)


def derive_s6_on_10() -> list[Perm]:
    """S6 acting on the 10 partitions of {1..6} into two 3-sets."""
    from itertools import combinations

    parts = sorted(
        {tuple(sorted((c, tuple(sorted(set(range(6)) - set(c)))))) for c in combinations(range(6), 3)}
    )
    index = {p: i for i, p in enumerate(parts)}

    def act(img):
        out = []
        for a, b in parts:
            ia, ib = tuple(sorted(img[x] for x in a)), tuple(sorted(img[x] for x in b))
            out.append(index[tuple(sorted((ia, ib)))])
        return Perm(out)

    return [act([1, 0, 2, 3, 4, 5]), act([1, 2, 3, 4, 5, 0])]


DERIVED = {
    "M11@12": (derive_m11_on_12, "derived: M11@11 acting on the conjugates of a subgroup of order 660"),
    "M22:2@22": (derive_m22_2, "derived: setwise stabilizer of {23,24} in M24@24, restricted"),
    "PSL2(11)@11": (derive_psl2_11_on_11, "derived: PSL2(11) on the conjugates of a subgroup of order 60"),
    "S6@10": (derive_s6_on_10, "derived: S6 on the partitions of six points into two triples"),
}


def render_derived_record(name: str) -> str:
    fn, source = DERIVED[name]
    gens = fn()
    degree = gens[0].degree
    order = NAMED_GROUPS[name.split("@")[0]][0]
    text = "; ".join(p.to_cycle_string() for p in gens)
    return f"{name} | {degree} | {order} | {text} | {source}"
