from __future__ import annotations

from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flagdesigns.ff import field_of_order
from flagdesigns.geom import (
    Design,
    DesignError,
    gauss_binom,
    hermitian_points,
    hermitian_unital,
    pg_design,
    pg_line_design,
    pg_points,
    point_space,
)
from flagdesigns.verify import params


def count_subspaces(n: int, k: int, q: int) -> int:
    """Brute-force count of k-subspaces of GF(q)^n by closing spans."""
    F = field_of_order(q)
    vectors = list(product(range(q), repeat=n))

    def span(gens):
        out = set()
        for coeffs in product(range(q), repeat=len(gens)):
            v = [0] * n
            for c, g in zip(coeffs, gens):
                v = [F.add(a, F.mul(c, b)) for a, b in zip(v, g)]
            out.add(tuple(v))
        return frozenset(out)

    found = set()
    for gens in combinations(vectors, k):
        s = span(gens)
        if len(s) == q**k:
            found.add(s)
    return len(found)


def test_gauss_binom_examples():
    assert gauss_binom(3, 1, 2) == 7
    assert gauss_binom(4, 2, 2) == 35
    assert gauss_binom(4, 2, 3) == 130
    assert gauss_binom(5, 0, 7) == 1
    assert gauss_binom(3, 4, 2) == 0


@pytest.mark.parametrize("n,k,q", [(3, 1, 2), (3, 2, 2), (4, 2, 2), (4, 1, 3), (3, 1, 4), (3, 2, 3)])
def test_gauss_binom_counts_subspaces(n, k, q):
    assert gauss_binom(n, k, q) == count_subspaces(n, k, q)


@given(st.integers(1, 7), st.integers(0, 7), st.sampled_from([2, 3, 4, 5, 7, 8, 9]))
def test_gauss_binom_symmetry_and_pascal(n, k, q):
    assert gauss_binom(n, k, q) == gauss_binom(n, n - k, q) or k > n
    if 1 <= k <= n - 1:
        assert gauss_binom(n, k, q) == gauss_binom(n - 1, k - 1, q) + q**k * gauss_binom(n - 1, k, q)


@pytest.mark.parametrize("n,q", [(2, 2), (3, 2), (3, 3), (3, 4), (4, 2), (4, 3)])
def test_point_counts(n, q):
    pts = pg_points(n, q)
    assert len(pts) == (q**n - 1) // (q - 1)
    # the first nonzero coordinate is 1 for every stored representative
    for pt in pts:
        lead = next(x for x in pt.labels if x)
        assert lead == 1


def test_normalize_and_lookup():
    sp = point_space(3, 5)
    F = sp.field
    for i in range(0, len(sp), 5):
        for c in range(1, 5):
            scaled = np.array([[F.mul(c, x) for x in sp.coords[i]]])
            assert sp.index_of(scaled)[0] == i


@pytest.mark.parametrize("n,q", [(3, 2), (3, 3), (3, 4), (4, 2), (4, 3), (5, 2)])
def test_pg_design_parameters(n, q):
    d = pg_design(n, q)
    v = gauss_binom(n, 1, q)
    k = gauss_binom(n - 1, 1, q)
    lam = gauss_binom(n - 2, 1, q)
    assert params(d).as_tuple() == (v, v, k, k, lam)


@pytest.mark.parametrize("n,q", [(3, 4), (3, 8), (4, 3)])
def test_line_design_parameters(n, q):
    d = pg_line_design(n, q)
    v = (q**n - 1) // (q - 1)
    r = (q**n - q) // (q - 1)
    b = v * r // q
    assert params(d).as_tuple() == (v, b, r, q, q - 1)


def test_line_design_errors():
    with pytest.raises(DesignError):
        pg_line_design(3, 3)  # gcd(2, 2) != 1
    with pytest.raises(DesignError):
        pg_line_design(3, 2)
    with pytest.raises(DesignError):
        pg_line_design(2, 4)
    with pytest.raises(DesignError):
        pg_design(2, 3)


@pytest.mark.parametrize("q", [3, 4])
def test_hermitian_unital(q):
    d = hermitian_unital(q)
    assert params(d).as_tuple() == (q**3 + 1, q * q * (q * q - q + 1), q * q, q + 1, 1)
    sp, iso = hermitian_points(q)
    K = sp.field
    # independent evaluation of x^(q+1) + y^(q+1) + z^(q+1) with field elements
    for i in iso:
        x = [K.element(int(c)) for c in sp.coords[i]]
        assert sum((c ** (q + 1) for c in x), K.zero) == K.zero
    assert len(iso) == q**3 + 1


def test_hermitian_rejects_q2():
    with pytest.raises(DesignError):
        hermitian_unital(2)


def test_design_validation():
    with pytest.raises(DesignError):
        Design(3, ((1, 0),))
    with pytest.raises(DesignError):
        Design(3, ((0, 3),))
    with pytest.raises(DesignError):
        Design(3, ((1, 2), (0, 1)))
    d = Design.from_blocks(3, [[2, 1], [1, 0]])
    assert d.blocks == ((0, 1), (1, 2))
