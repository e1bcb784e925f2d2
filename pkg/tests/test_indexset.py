import pytest
from hypothesis import given
from hypothesis import strategies as st

from turan.indexset import Degenerate, IndexSet, Reduced, Residues


def index_sets():
    elems = st.frozensets(st.integers(2, 60), max_size=6)
    base = st.one_of(
        st.just("empty"),
        st.just("full"),
        st.builds(lambda q, r: Residues(q, frozenset(r)), st.integers(2, 6), st.frozensets(st.integers(0, 5), max_size=4)),
    )

    def make(b, inc, exc):
        return IndexSet(b, inc, exc - inc)

    return st.builds(make, base, elems, elems)


def test_explicit_exclusion():
    assert not IndexSet("full", exclude=frozenset([5])).contains(5)
    assert not IndexSet.all_but(5).contains(5)
    assert IndexSet.all_but(5).contains(6)


def test_parity_bases():
    assert IndexSet.even().contains(4)
    assert not IndexSet.odd().contains(2)
    assert IndexSet.odd().contains(3)


def test_complement_examples():
    assert IndexSet.finite([5]).complement() == IndexSet.all_but(5)
    assert IndexSet.even().complement() == IndexSet.odd()
    assert IndexSet.empty().complement() == IndexSet.full()


def test_truncate_examples():
    assert IndexSet.odd().truncate(9) == [3, 5, 7, 9]
    assert IndexSet.tail(5).truncate(8) == [6, 7, 8]
    assert IndexSet.interval(2, 3).truncate(10) == [2, 3]


def test_reduce_mod_examples():
    d = IndexSet.finite([3]).reduce_mod(4)
    assert isinstance(d, Degenerate)
    assert IndexSet.finite([2]).reduce_mod(6) == Reduced((2,), 6)
    assert IndexSet.finite([7]).reduce_mod(5) == Reduced((2,), 5)


def test_multiple_of_modulus_is_degenerate():
    assert isinstance(IndexSet.finite([6]).reduce_mod(3), Degenerate)


def test_rejects_small_and_overlapping_elements():
    with pytest.raises(ValueError):
        IndexSet.finite([1])
    with pytest.raises(ValueError):
        IndexSet("empty", frozenset([4]), frozenset([4]))
    with pytest.raises(ValueError):
        IndexSet.finite([10**7])


def test_json_round_trip_and_bad_input():
    H = IndexSet.residue_class(3, [1]).complement()
    assert IndexSet.from_json(H.to_json()) == H
    with pytest.raises(ValueError):
        IndexSet.from_json({"base": "sometimes"})


def test_residue_base_normalizes():
    # residues {0, 2} mod 4 are just the even numbers
    assert IndexSet.residue_class(4, [0, 2]) == IndexSet.even()
    assert IndexSet.residue_class(3, [0, 1, 2]) == IndexSet.full()


@given(index_sets())
def test_complement_is_an_involution(H):
    CC = H.complement().complement()
    assert all(CC.contains(k) == H.contains(k) for k in range(2, 1001))


@given(index_sets())
def test_complement_flips_membership(H):
    C = H.complement()
    assert all(C.contains(k) != H.contains(k) for k in range(2, 300))


@given(index_sets(), st.integers(2, 80))
def test_truncation_is_monotone(H, N):
    assert set(H.truncate(N)) <= set(H.truncate(N + 1))
    assert H.truncate(N) == [k for k in range(2, N + 1) if H.contains(k)]


@given(index_sets(), st.integers(2, 40))
def test_reduced_sets_live_in_half_range(H, m):
    r = H.reduce_mod(m)
    if isinstance(r, Reduced):
        assert all(2 <= k <= m // 2 for k in r.elements)
        # brute force: k is kept iff some member of H is congruent to +-k
        members = [h for h in range(2, 40 * m) if H.contains(h)]
        expect = [k for k in range(2, m // 2 + 1) if any(h % m in (k % m, -k % m) for h in members)]
        assert list(r.elements) == expect
    else:
        assert H.contains(r.witness) and r.witness % m == r.residue


@given(st.integers(4, 60), st.data())
def test_reduce_mod_fixes_clean_sets(m, data):
    pool = [k for k in range(2, m // 2 + 1) if k % m not in (0, 1, m - 1)]
    H = data.draw(st.lists(st.sampled_from(pool), unique=True) if pool else st.just([]))
    r = IndexSet.finite(H).reduce_mod(m)
    assert isinstance(r, Reduced)
    assert sorted(r.elements) == sorted(H)
