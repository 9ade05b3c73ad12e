from __future__ import annotations

from math import gcd

import networkx as nx
import pytest

from flagdesigns import atlas, families
from flagdesigns.families import TABLE1, FamilyError, find_base_block, orbit_design, table1_design
from flagdesigns.geom import Design, pg_design
from flagdesigns.perm import is_flag_transitive
from flagdesigns.verify import params

EXPECTED = {
    1: (6, 10, 5, 3, 2),
    2: (7, 7, 3, 3, 1),
    3: (8, 14, 7, 4, 3),
    4: (28, 36, 9, 7, 2),
    5: (10, 15, 9, 6, 5),
    6: (11, 11, 5, 5, 2),
    7: (12, 22, 11, 6, 5),
    8: (22, 77, 21, 6, 5),
    9: (22, 77, 21, 6, 5),
    10: (10, 15, 9, 6, 5),
    11: (15, 35, 7, 3, 1),
    12: (15, 15, 7, 7, 3),
    13: (15, 35, 7, 3, 1),
}


def incidence_graph(d: Design) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from((("p", x) for x in range(d.v)), side=0)
    g.add_nodes_from((("b", i) for i in range(d.b)), side=1)
    g.add_edges_from((("p", x), ("b", i)) for i, blk in enumerate(d.blocks) for x in blk)
    return g


def isomorphic(d1: Design, d2: Design) -> bool:
    match = lambda a, b: a["side"] == b["side"]  # noqa: E731
    return nx.is_isomorphic(incidence_graph(d1), incidence_graph(d2), node_match=match)


@pytest.mark.parametrize("line", sorted(EXPECTED))
def test_table1_lines(table1_designs, line):
    d, g, p = table1_designs[line]
    assert p.as_tuple() == EXPECTED[line]
    assert params(d).as_tuple() == EXPECTED[line]
    assert gcd(p.r, p.lam) == 1
    assert is_flag_transitive(d, g)
    rec = TABLE1[line - 1]
    assert g.order // len(g.orbit(0)) == rec.point_stab_order
    # block stabilizer order from orbit-stabilizer on the block orbit
    assert g.order // d.b == rec.block_stab_order


def test_table1_line12_is_pg32(table1_designs):
    d, _, _ = table1_designs[12]
    assert isomorphic(d, pg_design(4, 2))


def test_table1_line2_is_fano(table1_designs):
    d, _, _ = table1_designs[2]
    assert isomorphic(d, pg_design(3, 2))


def test_table1_line4_extension():
    d, _, _ = table1_design(4, check_extension=True)
    assert is_flag_transitive(d, atlas.named_group("PSL2(8):3@28"))


def test_table1_is_deterministic():
    a = table1_design(3)[0]
    b = table1_design(3)[0]
    assert a.blocks == b.blocks


def test_table1_bad_line():
    with pytest.raises(FamilyError):
        table1_design(14)


@pytest.mark.parametrize("q,expect", [(8, (28, 4, 1)), (16, (120, 8, 1)), (32, (496, 16, 1))])
def test_wbs(example_designs, q, expect):
    d, g = example_designs[f"wbs-{q}"]
    p = params(d)
    assert (p.v, p.k, p.lam) == expect
    assert is_flag_transitive(d, g)
    assert g.order == q * (q * q - 1)


def test_wbs_errors():
    for q in (4, 9, 12):
        with pytest.raises(FamilyError):
            families.wbs_design(q)


@pytest.mark.parametrize(
    "q,expect", [(8, (65, 520, 64, 8, 7)), (32, (1025, 32800, 1024, 32, 31))]
)
def test_suzuki(example_designs, q, expect):
    d, g = example_designs[f"suzuki-{q}"]
    assert params(d).as_tuple() == expect
    assert is_flag_transitive(d, g)


def test_suzuki_errors():
    with pytest.raises(FamilyError):
        families.suzuki_design(128)


def test_ree_tier_not_available():
    with pytest.raises(NotImplementedError):
        families.ree_unital(27)
    with pytest.raises(NotImplementedError):
        families.ree_design(27, 1)
    with pytest.raises(FamilyError):
        families.ree_unital(3)
    with pytest.raises(FamilyError):
        families.ree_design(27, 3)


def test_find_base_block_fano():
    g = atlas.psl_group(3, 2)
    block = find_base_block(g, 3, 1, 24, seed=1)
    d = orbit_design(g, block)
    assert params(d).as_tuple() == (7, 7, 3, 3, 1)


def test_find_base_block_rejects_non_integral():
    with pytest.raises(FamilyError):
        find_base_block(atlas.psl_group(3, 2), 4, 1, 24)
