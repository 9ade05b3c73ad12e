from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flagdesigns.geom import Design, pg_design
from flagdesigns.perm import GroupBSGS, Perm
from flagdesigns import atlas
from flagdesigns.verify import (
    DesignParams,
    ParamsError,
    embeddable_flag,
    pair_counts,
    params,
    verification_report,
)


def params_from_pair_counts(d: Design) -> tuple[int, int, int, int, int]:
    table = pair_counts(d)
    ks = {len(b) for b in d.blocks}
    assert len(ks) == 1
    diag = np.diag(table)
    assert (diag == diag[0]).all()
    off = table[np.triu_indices(d.v, 1)]
    assert (off == off[0]).all()
    return (d.v, d.b, int(diag[0]), ks.pop(), int(off[0]))


def test_params_agree_with_pair_counts(all_designs):
    for key, (d, _) in all_designs.items():
        assert params(d).as_tuple() == params_from_pair_counts(d), key


def test_embeddable_flag():
    q = 4
    k, lam = q * q - 1, 2
    r = k + lam
    v = 1 + r * (k - 1) // lam
    p = DesignParams.from_tuple(v, v * r // k, r, k, lam)
    assert p.as_tuple() == (120, 136, 17, 15, 2)
    assert embeddable_flag(p) == ((q**4 + q * q + 2) // 2, q * q + 1, 2) == (137, 17, 2)
    assert embeddable_flag(DesignParams.from_tuple(7, 7, 3, 3, 1)) is None
    with pytest.raises(ValueError):
        embeddable_flag(DesignParams.from_tuple(8, 14, 7, 4, 3))


def test_from_tuple_rejects_inconsistent():
    with pytest.raises(ValueError):
        DesignParams.from_tuple(7, 7, 3, 3, 2)
    p = DesignParams.from_tuple(7, 7, 3, 3, 1)
    assert p.symmetric and p.coprime_r_lambda and p.nontrivial
    assert p.to_dict()["lambda"] == 1


def test_witnesses():
    with pytest.raises(ParamsError) as exc:
        params(Design.from_blocks(4, [[0, 1], [2, 3], [0]]))
    assert exc.value.kind == "block-size"
    # blocks are sorted, so [0] is block 0 and sets the reference size
    assert exc.value.witness == {"block_index": 1, "block": [0, 1], "size": 2, "expected": 1}
    with pytest.raises(ParamsError) as exc:
        params(Design.from_blocks(4, [[0, 1], [0, 2], [1, 3]]))
    assert exc.value.kind == "replication"
    with pytest.raises(ParamsError) as exc:
        params(Design.from_blocks(4, [[0, 1], [2, 3]]))
    assert exc.value.kind == "pair-count"
    # all 1-subsets: no pair is covered
    with pytest.raises(ParamsError) as exc:
        params(Design.from_blocks(5, [[x] for x in range(5)]))
    assert exc.value.kind == "pair-count"
    assert exc.value.witness["count"] == 0


def test_tampered_fano_reports_witness():
    d = pg_design(3, 2)
    blocks = [list(b) for b in d.blocks]
    blocks[3] = blocks[3][:2]
    report = verification_report(Design.from_blocks(7, blocks))
    assert report["ok"] is False
    assert report["error"] == "block-size"
    assert len(report["witness"]["block"]) == 2


def test_report_with_group():
    d = pg_design(3, 2)
    rep = verification_report(d, atlas.psl_group(3, 2))
    assert rep["ok"] and rep["flag_transitive"] and rep["flag_orbit_size"] == 21
    assert rep["embeddable_in"] is None
    rep = verification_report(d, GroupBSGS([], degree=7))
    assert rep["ok"] is False and rep["flag_transitive"] is False
    bad = GroupBSGS([Perm.from_cycles([(0, 1)], 7)])
    assert verification_report(d, bad)["error"] == "not-preserved"


def test_fisher_inequality(all_designs):
    for key, (d, _) in all_designs.items():
        p = params(d)
        assert p.b >= p.v and p.r >= p.k, key


@given(st.data())
def test_params_match_oracle_on_random_structures(data):
    v = data.draw(st.integers(3, 9))
    k = data.draw(st.integers(2, v))
    blocks = data.draw(
        st.lists(st.sets(st.integers(0, v - 1), min_size=k, max_size=k), min_size=1, max_size=12)
    )
    d = Design.from_blocks(v, blocks)
    table = pair_counts(d)
    off = table[np.triu_indices(v, 1)]
    diag = np.diag(table)
    is_design = (diag == diag[0]).all() and (off == off[0]).all() and off[0] > 0
    try:
        p = params(d)
    except ParamsError:
        assert not is_design
    else:
        assert is_design
        assert p.as_tuple() == (v, d.b, int(diag[0]), k, int(off[0]))
