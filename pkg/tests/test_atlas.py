from __future__ import annotations

import hashlib

import pytest

from flagdesigns import atlas
from flagdesigns.atlas import GroupSpec, group_order
from flagdesigns.perm import GroupBSGS


@pytest.mark.parametrize(
    "build,spec,expected",
    [
        (lambda: atlas.psl_group(3, 2), GroupSpec("PSL", 3, 2), 168),
        (lambda: atlas.psl_group(3, 4), GroupSpec("PSL", 3, 4), 20160),
        (lambda: atlas.psu3_group(3), GroupSpec("PSU", 3, 3), 6048),
        (lambda: atlas.suzuki_group(8), GroupSpec("Sz", q=8), 29120),
        (lambda: atlas.suzuki_group(32), GroupSpec("Sz", q=32), 32537600),
        (lambda: atlas.named_group("M11@11"), GroupSpec("Named", name="M11"), 7920),
        (lambda: atlas.named_group("M22@22"), GroupSpec("Named", name="M22"), 443520),
    ],
)
def test_order_certificates(build, spec, expected):
    g = build()
    assert group_order(spec)[0] == expected
    assert g.order == expected


def test_group_order_formulas():
    assert group_order(GroupSpec("PSL", 2, 7)) == (168, 2)
    assert group_order(GroupSpec("PSp", 4, 3))[0] == 25920
    assert group_order(GroupSpec("PSU", 4, 2))[0] == 25920
    assert group_order(GroupSpec("POmega+", 8, 2))[0] == 174182400
    assert group_order(GroupSpec("POmegaOdd", 7, 3))[0] == 4585351680
    assert group_order(GroupSpec("Ree", q=27))[0] == 10073444472
    with pytest.raises(ValueError):
        GroupSpec("Sz", q=2)
    with pytest.raises(ValueError):
        GroupSpec("PSL", 2, 3)
    with pytest.raises(ValueError):
        GroupSpec("Named", name="M13")


def test_psl_acts_on_points():
    g = atlas.psl_group(3, 3)
    assert g.degree == 13
    assert g.is_transitive()
    assert g.is_primitive()


def test_m22_point_stabilizer():
    g = atlas.named_group("M22@22")
    assert g.point_stabilizer(0).order == 20160


@pytest.mark.parametrize("q", [8, 32])
def test_suzuki_stabilizers(q):
    g = atlas.suzuki_group(q)
    assert g.degree == q * q + 1
    s1 = g.point_stabilizer(0)
    assert s1.order == q * q * (q - 1)
    s2 = s1.point_stabilizer(1)
    assert s2.order == q - 1
    # the two-point stabilizer is cyclic
    assert any(x.order() == q - 1 for x in s2.elements())


def test_suzuki_subgroups():
    sub = atlas.suzuki_subgroup_perms(8)
    centre = GroupBSGS(sub["centre"], degree=65)
    assert centre.order == 8
    K = GroupBSGS(sub["centre"] + sub["torus"], degree=65)
    assert K.order == 56


def test_catalog_hash_and_records():
    raw = atlas._catalog_text()
    assert hashlib.sha256(raw).hexdigest() == atlas.CATALOG_SHA256
    cat = atlas.load_catalog()
    for name, rec in cat.items():
        assert rec.degree >= 2
        assert all(p.degree == rec.degree for p in rec.perms())


@pytest.mark.parametrize("name", sorted(atlas.DERIVED))
def test_derived_records_reproduce(name):
    cat = atlas.load_catalog()
    line = atlas.render_derived_record(name)
    rec = atlas.parse_catalog(line)[name]
    assert rec == cat[name]


@pytest.mark.parametrize(
    "name,order,degree",
    [
        ("M11@12", 7920, 12),
        ("M22:2@22", 887040, 22),
        ("S6@10", 720, 10),
        ("A7@15", 2520, 15),
        ("A8@15", 20160, 15),
        ("PSL2(11)@11", 660, 11),
        ("PSL2(8)@28", 504, 28),
        ("PSL2(8):3@28", 1512, 28),
    ],
)
def test_named_groups(name, order, degree):
    g = atlas.named_group(name)
    assert (g.order, g.degree) == (order, degree)
    assert g.is_transitive()


def test_ree_not_available():
    with pytest.raises(NotImplementedError):
        atlas.ree_group(27)
    with pytest.raises(ValueError):
        atlas.ree_group(9)


def test_unknown_named_group():
    with pytest.raises(KeyError):
        atlas.named_group("M23@23")
