import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cgolab import multiindex as mi


@pytest.mark.parametrize("d,k,expected", [(3, 2, 6), (5, 0, 1), (2, 3, 4)])
def test_sym_dim_values(d, k, expected):
    assert mi.sym_dim(d, k) == expected


@pytest.mark.parametrize("d,k,expected", [(2, 2, 6), (1, 5, 6), (3, 2, 10)])
def test_poly_dim_le_values(d, k, expected):
    assert mi.poly_dim_le(d, k) == expected


@pytest.mark.parametrize("d", range(1, 7))
@pytest.mark.parametrize("k", range(0, 11))
def test_dims_match_enumeration(d, k):
    assert mi.sym_dim(d, k) == len(mi.counted_indices(d, k)) == math.comb(k + d - 1, d - 1)
    assert mi.poly_dim_le(d, k) == sum(mi.sym_dim(d, j) for j in range(k + 1))


@pytest.mark.parametrize("d", range(2, 7))
@pytest.mark.parametrize("k", range(0, 11))
def test_codim_identity(d, k):
    lhs = mi.sym_dim(d, k) - (mi.sym_dim(d, k - 2) if k >= 2 else 0)
    rhs = mi.binom(k + d - 2, d - 2) + mi.binom(k + d - 3, d - 2)
    assert lhs == rhs


def test_codim_identity_in_one_dimension():
    # both right-hand binomials vanish for d = 1, so only k >= 2 balances
    for k in range(0, 11):
        lhs = mi.sym_dim(1, k) - (mi.sym_dim(1, k - 2) if k >= 2 else 0)
        rhs = mi.binom(k - 1, -1) + mi.binom(k - 2, -1)
        assert (lhs == rhs) == (k >= 2)


def test_overflow_is_reported():
    with pytest.raises(OverflowError):
        mi.sym_dim(40, 60)
    with pytest.raises(OverflowError):
        mi.multiplicity((30, 30, 30))


def test_bad_arguments():
    with pytest.raises(ValueError):
        mi.sym_dim(0, 1)
    with pytest.raises(ValueError):
        mi.poly_dim_le(2, -1)


@pytest.mark.parametrize(
    "alpha,d,expected",
    [((2, 3, 2), 3, (0, 2, 1)), ((), 4, (0, 0, 0, 0)), ((1, 1, 1), 2, (3, 0))],
)
def test_ordered_to_counted(alpha, d, expected):
    assert mi.ordered_to_counted(mi.OrderedIndex(alpha, d), d).counts == expected


def test_ordered_to_counted_out_of_range():
    with pytest.raises(ValueError):
        mi.ordered_to_counted((0, 1), 2)
    with pytest.raises(ValueError):
        mi.OrderedIndex((3,), 2)


@pytest.mark.parametrize("counts,expected", [((0, 2, 1), 3), ((4, 0, 0), 1), ((1, 1), 2)])
def test_multiplicity(counts, expected):
    assert mi.multiplicity(mi.CountedIndex(counts)) == expected


def test_multiplicity_by_enumeration():
    seen = {}
    for alpha in itertools.product(range(1, 4), repeat=3):
        c = mi.ordered_to_counted(alpha, 3).counts
        seen[c] = seen.get(c, 0) + 1
    for c, n in seen.items():
        assert mi.multiplicity(c) == n


@pytest.mark.parametrize("d", range(1, 5))
@pytest.mark.parametrize("k", range(0, 6))
def test_enumeration_completeness(d, k):
    assert int(mi.multiplicities(d, k).sum()) == d**k


def test_unrank_small_cases():
    assert [mi.unrank(2, 2, r).counts for r in range(3)] == [(2, 0), (1, 1), (0, 2)]
    assert mi.rank(mi.unrank(3, 4, 7)) == 7
    with pytest.raises(IndexError):
        mi.unrank(2, 2, 3)


def test_unrank_has_no_duplicates():
    items = [mi.unrank(3, 3, r).counts for r in range(mi.sym_dim(3, 3))]
    assert len(set(items)) == len(items)


@given(st.integers(1, 5), st.integers(0, 6), st.data())
def test_rank_round_trip(d, k, data):
    r = data.draw(st.integers(0, mi.sym_dim(d, k) - 1))
    c = mi.unrank(d, k, r)
    assert mi.rank(c) == r
    assert mi.rank_many(np.array([c.counts]))[0] == r


@given(st.integers(1, 4), st.integers(0, 5))
def test_order_is_colex(d, k):
    items = [tuple(row) for row in mi.counted_indices(d, k)]
    assert items == sorted(items, key=lambda c: c[::-1])


@given(
    st.integers(1, 4).flatmap(
        lambda d: st.tuples(
            st.just(d),
            st.lists(st.integers(1, d), max_size=4),
            st.lists(st.integers(1, d), max_size=4),
        )
    )
)
def test_concat_lengths(args):
    d, a, b = args
    c = mi.concat(mi.OrderedIndex(a, d), mi.OrderedIndex(b, d))
    assert len(c) == len(a) + len(b)
    assert c.entries == tuple(a) + tuple(b)


def test_concat_examples():
    assert mi.concat(mi.OrderedIndex((1, 2), 3), mi.OrderedIndex((3,), 3)).entries == (1, 2, 3)
    assert mi.concat(mi.OrderedIndex((), 2), mi.OrderedIndex((2, 2), 2)).entries == (2, 2)
    with pytest.raises(ValueError):
        mi.concat(mi.OrderedIndex((1,), 2), mi.OrderedIndex((1,), 3))


def test_counted_json_round_trip():
    c = mi.CountedIndex((0, 2, 1))
    assert c.to_json() == "[0, 2, 1]"
    assert mi.CountedIndex.from_json(c.to_json()) == c


def test_ordered_rank_map_agrees_with_rank():
    m = mi.ordered_rank_map(3, 3)
    for alpha in itertools.product(range(3), repeat=3):
        counts = mi.ordered_to_counted(tuple(a + 1 for a in alpha), 3)
        assert m[alpha] == mi.rank(counts)


def test_cached_arrays_are_read_only():
    with pytest.raises(ValueError):
        mi.multiplicities(3, 2)[0] = 5
    arr = mi.counted_indices(3, 2)
    arr[0, 0] = 99
    assert mi.counted_indices(3, 2)[0, 0] != 99
