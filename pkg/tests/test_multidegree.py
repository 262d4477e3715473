import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperfit import (
    MonomialBasis,
    box_set,
    degree_set,
    eval_monomials,
    is_lower_set,
    lower_closure,
    minkowski_sum,
    parse_basis_spec,
    total_degree,
    triangular_set,
)
from hyperfit.multidegree import as_multidegree

small_sets = st.sets(
    st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=8
)


def test_as_multidegree_validates():
    assert as_multidegree([1, 0, 2]) == (1, 0, 2)
    assert as_multidegree((0,)) == (0,)
    with pytest.raises(ValueError):
        as_multidegree([1, -1])
    with pytest.raises(ValueError):
        as_multidegree([1.5, 0])
    with pytest.raises(ValueError):
        as_multidegree([])


def test_total_degree_full_and_partial():
    assert total_degree((2, 3, 1)) == 6
    assert total_degree((2, 3, 1), s=1) == 2
    assert total_degree((2, 3, 1), s=2) == 5
    with pytest.raises(ValueError):
        total_degree((2, 3, 1), s=0)
    with pytest.raises(ValueError):
        total_degree((2, 3, 1), s=4)


def test_degree_set_counts_and_membership():
    d22 = degree_set(2, 2)
    assert d22 == {(2, 0), (1, 1), (0, 2)}
    # exactly-degree-l sets have the stars and bars cardinality
    from math import comb

    for q in (1, 2, 3):
        for ell in range(5):
            assert len(degree_set(q, ell)) == comb(ell + q - 1, q - 1)
    assert all(sum(a) == 3 for a in degree_set(3, 3))


def test_triangular_and_box_sets():
    t22 = triangular_set(2, 2)
    assert t22 == {(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)}
    b = box_set((1, 2))
    assert b == {(i, j) for i in range(2) for j in range(3)}
    with pytest.raises(ValueError):
        triangular_set(0, 2)


def test_minkowski_sum_small():
    a = {(1, 0), (0, 1)}
    assert minkowski_sum(a, a) == {(2, 0), (1, 1), (0, 2)}


def test_lower_closure_and_lower_set():
    d22 = degree_set(2, 2)
    assert not is_lower_set(d22)
    closed = lower_closure(d22)
    assert closed == triangular_set(2, 2)
    assert is_lower_set(closed)
    assert is_lower_set(box_set((2, 1)))
    assert is_lower_set(triangular_set(3, 3))


@given(small_sets)
@settings(max_examples=60, deadline=None)
def test_lower_closure_idempotent(aset):
    closed = lower_closure(aset)
    assert is_lower_set(closed)
    assert lower_closure(closed) == closed
    assert aset <= closed


@given(small_sets, small_sets)
@settings(max_examples=40, deadline=None)
def test_minkowski_symmetric_and_degrees(aset, bset):
    ab = minkowski_sum(aset, bset)
    assert ab == minkowski_sum(bset, aset)
    degs = {sum(a) + sum(b) for a in aset for b in bset}
    assert {sum(g) for g in ab} == degs


def test_canonical_order():
    basis = MonomialBasis.triangular(2, 2)
    assert basis.columns == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    # ascending total degree, ties broken by descending lexicographic order
    basis3 = MonomialBasis.triangular(3, 1)
    assert basis3.columns == ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_basis_validation_and_lookup():
    basis = MonomialBasis.triangular(2, 2)
    assert basis.q == 2
    assert basis.m == 6
    assert basis.index_of((1, 1)) == 4
    with pytest.raises(KeyError):
        basis.index_of((3, 0))
    with pytest.raises(ValueError):
        MonomialBasis(((0, 0), (1, 0, 0)))
    with pytest.raises(ValueError):
        MonomialBasis(((0, 0), (0, 0)))
    with pytest.raises(ValueError):
        MonomialBasis(())


def test_pair_support_matches_minkowski():
    basis = MonomialBasis.degree(2, 2)
    assert set(basis.pair_support()) == minkowski_sum(basis.support(), basis.support())


def test_sub_degree():
    basis = MonomialBasis.from_set({(0, 0), (2, 1), (1, 3)})
    assert basis.sub_degree(1) == 2
    assert basis.sub_degree(2) == 4
    with pytest.raises(ValueError):
        basis.sub_degree(0)


def test_vandermonde_matches_naive():
    rng = np.random.default_rng(3)
    pts = rng.standard_normal((7, 3))
    basis = MonomialBasis.triangular(3, 3)
    v = basis.vandermonde(pts)
    assert v.shape == (basis.m, 7)
    naive = np.array([[np.prod(p**np.array(a)) for p in pts] for a in basis.columns])
    assert np.allclose(v, naive, rtol=1e-12, atol=0)


def test_eval_monomials_single_point():
    basis = MonomialBasis.triangular(2, 2)
    vals = eval_monomials(basis, [2.0, 3.0])
    assert np.allclose(vals, [1, 2, 3, 4, 6, 9])


def test_json_round_trip():
    basis = MonomialBasis.box((2, 1))
    again = MonomialBasis.from_json(basis.to_json())
    assert again == basis
    assert json.loads(basis.to_json())  # valid JSON document


def test_parse_basis_spec():
    assert parse_basis_spec("triangular:2:2") == MonomialBasis.triangular(2, 2)
    assert parse_basis_spec("degree:3:3") == MonomialBasis.degree(3, 3)
    assert parse_basis_spec("box:1,2") == MonomialBasis.box((1, 2))
    for bad in ("triangular:2", "tri:2:2", "box:", "degree:a:b", ""):
        with pytest.raises(ValueError):
            parse_basis_spec(bad)
