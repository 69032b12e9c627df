"""Pattern primitives and the exhaustive oracle."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avmachine import perms
from avmachine.perms import (
    apply_symmetry,
    avoids,
    avoids_all,
    contains,
    direct_sum,
    enumerate_av,
    format_permutation,
    left_to_right_maxima,
    minimal_patterns,
    normalize_basis,
    one_skew_basis,
    parse_permutation,
    skew_sum,
    standardize,
)


def brute_contains(pi, pattern):
    """Independent containment check straight from the definition."""
    k = len(pattern)
    for idxs in itertools.combinations(range(len(pi)), k):
        if standardize([pi[i] for i in idxs]) == pattern:
            return True
    return k == 0


perm_strategy = st.integers(1, 6).flatmap(
    lambda n: st.permutations(list(range(1, n + 1)))
).map(tuple)


# --- parsing and formatting -----------------------------------------------


def test_parse_forms():
    assert parse_permutation("3 1 2") == (3, 1, 2)
    assert parse_permutation("3,1,2") == (3, 1, 2)
    assert parse_permutation("312") == (3, 1, 2)
    assert parse_permutation("") == ()
    # ten or more entries need separators; digits alone would be ambiguous
    assert parse_permutation("10 9 8 7 6 5 4 3 2 1") == (10, 9, 8, 7, 6, 5, 4, 3, 2, 1)


def test_parse_rejects_non_permutations():
    for bad in ("1 1", "1 3", "0 1", "2 4 3"):
        with pytest.raises(ValueError):
            parse_permutation(bad)


def test_format_round_trip():
    for p in [(), (1,), (2, 1), (3, 1, 2), (5, 2, 4, 1, 3)]:
        assert parse_permutation(format_permutation(p)) == p


# --- containment ------------------------------------------------------------


def test_contains_matches_definition_exhaustively():
    patterns = [(1,), (1, 2), (2, 1), (1, 2, 3), (2, 3, 1), (3, 1, 2), (1, 3, 2)]
    for n in range(6):
        for pi in itertools.permutations(range(1, n + 1)):
            for pat in patterns:
                assert contains(pi, pat) == brute_contains(pi, pat), (pi, pat)


def test_contains_length_four_patterns():
    for pi in itertools.permutations(range(1, 7)):
        assert contains(pi, (4, 2, 3, 1)) == brute_contains(pi, (4, 2, 3, 1))


def test_avoids_is_negation():
    assert avoids((1, 3, 2), (1, 2, 3))
    assert not avoids((1, 2, 3), (1, 2))
    assert avoids_all((2, 1), [(1, 2, 3), (3, 1, 2)])


@given(perm_strategy)
def test_every_perm_contains_itself(pi):
    assert contains(pi, pi)


@given(perm_strategy, perm_strategy)
@settings(max_examples=300)
def test_symmetries_preserve_containment(pi, pat):
    for sym in ("reverse", "complement", "inverse"):
        assert contains(pi, pat) == contains(
            apply_symmetry(pi, sym), apply_symmetry(pat, sym)
        )


@given(perm_strategy, perm_strategy)
def test_sums_contain_their_parts(p, q):
    assert contains(direct_sum(p, q), p)
    assert contains(skew_sum(p, q), q)


# --- helpers ---------------------------------------------------------------


def test_standardize():
    assert standardize((10, 2, 7)) == (3, 1, 2)
    assert standardize([]) == ()
    assert standardize(standardize((4, 9, 1))) == standardize((4, 9, 1))


def test_left_to_right_maxima_positions_and_values():
    # 1-indexed (position, value) pairs, in order
    assert left_to_right_maxima((3, 1, 4, 2, 5)) == [(1, 3), (3, 4), (5, 5)]
    assert left_to_right_maxima(()) == []
    assert left_to_right_maxima((1, 2, 3)) == [(1, 1), (2, 2), (3, 3)]


def test_skew_and_direct_sum_values():
    assert direct_sum((1,), (1, 2)) == (1, 2, 3)
    assert skew_sum((1,), (1, 2)) == (3, 1, 2)
    assert skew_sum((1,), (2, 1)) == (3, 2, 1)
    assert direct_sum((), (2, 1)) == (2, 1)


def test_one_skew_basis():
    # prepending a new maximum is exactly the skew sum with a single point
    assert one_skew_basis([(1, 2)]) == ((3, 1, 2),)
    assert set(one_skew_basis([(2, 3, 1), (3, 1, 2), (3, 2, 1)])) == {
        (4, 2, 3, 1),
        (4, 3, 1, 2),
        (4, 3, 2, 1),
    }


def test_normalize_basis_dedupes_and_sorts():
    b = normalize_basis(["21", (2, 1), "1 2 3"])
    assert b == ((2, 1), (1, 2, 3))


def test_minimal_patterns_drops_dominated():
    # 321 contains 21, so it is redundant next to 21
    assert minimal_patterns([(2, 1), (3, 2, 1)]) == ((2, 1),)
    assert minimal_patterns([(1, 2), (2, 1)]) == ((1, 2), (2, 1))


# --- the oracle ------------------------------------------------------------


def test_enumerate_av_classic_counts():
    catalan = [1, 1, 2, 5, 14, 42, 132, 429]
    assert enumerate_av([(2, 3, 1)], 7) == catalan
    assert enumerate_av([(1, 2, 3)], 7) == catalan
    # avoiding 21 forces the identity
    assert enumerate_av([(2, 1)], 7) == [1] * 8
    # two patterns of length three with a power-of-two class
    assert enumerate_av([(1, 3, 2), (2, 1, 3)], 7) == [1, 1, 2, 4, 8, 16, 32, 64]


def test_enumerate_av_edge_bases():
    # empty basis: everything avoids nothing
    assert enumerate_av([], 5) == [1, 1, 2, 6, 24, 120]
    # the single-point pattern kills every nonempty permutation
    assert enumerate_av([(1,)], 4) == [1, 0, 0, 0, 0]
    # a basis containing the empty pattern kills everything
    assert enumerate_av([()], 4) == [0, 0, 0, 0, 0]


def test_enumerate_av_guard():
    with pytest.raises(ValueError):
        enumerate_av([(2, 1)], 12)
    # explicit override is allowed
    assert enumerate_av([(1, 2)], 12, max_guard=12)[12] == 1


def test_enumerate_av_returns_sorted_levels():
    counts, levels = enumerate_av([(2, 3, 1)], 4, return_perms=True)
    assert [len(lv) for lv in levels] == counts
    for lv in levels:
        assert lv == sorted(lv)
        for p in lv:
            assert avoids(p, (2, 3, 1))
