"""Relation fitting: recovery of known relations, refusal on non-algebraic
sequences, verification, serialization."""

import math

import pytest

from avmachine.engines import engine_counts, fib_minus_counts, fib_plus_counts
from avmachine.guess import (
    AdeRelation,
    InsufficientTerms,
    PolyRelation,
    guess_ade,
    guess_algebraic,
    verify_ade,
    verify_algebraic,
)
from avmachine.systems import iterate_system

CATALAN = [math.comb(2 * n, n) // (n + 1) for n in range(41)]

BELL = [1]
for _n in range(24):
    BELL.append(sum(math.comb(_n, _k) * BELL[_k] for _k in range(_n + 1)))

# The minimal relations, monomials sorted by (f_exp, x_exp), sign normalized
# so the highest monomial is positive.
CATALAN_REL = ((0, 0, 1), (0, 1, -1), (1, 2, 1))  # 1 - f + x f^2
SCHROEDER_REL = ((0, 0, 2), (0, 1, -3), (1, 1, 1), (0, 2, 1))  # 2 - (3-x) f + f^2
FIB_MINUS_REL = ((0, 0, 1), (0, 1, -1), (1, 1, 1), (1, 2, -1), (1, 3, 1))
FIB_PLUS_REL = (
    (0, 0, -2), (1, 0, 26), (2, 0, 3),
    (0, 1, 7), (1, 1, -82), (2, 1, 12), (3, 1, 1),
    (0, 2, -9), (1, 2, 94), (2, 2, -21), (3, 2, 3),
    (0, 3, 5), (1, 3, -46), (2, 3, 4), (3, 3, 1),
    (0, 4, -1), (1, 4, 8), (2, 4, 2),
)


# --- recovering known algebraic relations ---------------------------------------


def test_guess_catalan():
    rel = guess_algebraic(CATALAN, 1, 2)
    assert rel is not None
    assert rel.monomials == CATALAN_REL
    assert str(rel) == "x*f^2 - f + 1"
    assert rel.degrees() == (1, 2)
    assert rel.coefficient(1, 2) == 1
    assert rel.coefficient(5, 5) == 0


def test_guess_schroeder():
    seq = iterate_system("schroeder", 40).coefficients
    rel = guess_algebraic(seq, 1, 2)
    assert rel is not None
    assert rel.monomials == SCHROEDER_REL
    assert str(rel) == "f^2 + x*f - 3*f + 2"


def test_guess_fib_minus_cubic():
    rel = guess_algebraic(fib_minus_counts(45), 2, 3)
    assert rel is not None
    assert rel.monomials == FIB_MINUS_REL
    assert str(rel) == "x*f^3 - x*f^2 + x*f - f + 1"


def test_guess_fib_plus_quartic():
    rel = guess_algebraic(fib_plus_counts(60), 3, 4)
    assert rel is not None
    assert rel.monomials == FIB_PLUS_REL


def test_guess_finds_minimal_relation_inside_larger_bounds():
    # Generous bounds must still return the degree-(1,2) Catalan relation
    # first, because the sweep goes up in f-degree then x-degree.
    rel = guess_algebraic(CATALAN, 4, 4)
    assert rel is not None
    assert rel.monomials == CATALAN_REL


def test_guess_is_deterministic():
    a = guess_algebraic(CATALAN, 1, 2)
    b = guess_algebraic(list(CATALAN), 1, 2)
    assert a == b


# --- verification ----------------------------------------------------------------


def test_verify_algebraic_rejects_perturbed_sequence():
    rel = PolyRelation(CATALAN_REL)
    assert verify_algebraic(rel, CATALAN)
    bad = list(CATALAN)
    bad[-1] += 1
    assert not verify_algebraic(rel, bad)
    # ...but the unbroken prefix still verifies
    assert verify_algebraic(rel, bad, order=len(bad) - 2)


def test_verify_algebraic_rejects_wrong_relation():
    wrong = PolyRelation(((0, 0, 1), (0, 1, -1), (1, 2, 2)))
    assert not verify_algebraic(wrong, CATALAN)


def test_guess_none_on_non_algebraic_sequences():
    factorials = [math.factorial(i) for i in range(60)]
    assert guess_algebraic(factorials, 3, 3) is None
    assert guess_algebraic(BELL, 2, 2) is None


def test_guess_none_on_machine_sequence_with_small_bounds():
    seq = engine_counts("av4231-4321", 80)
    assert guess_algebraic(seq, 6, 6) is None


def test_insufficient_terms():
    with pytest.raises(InsufficientTerms):
        guess_algebraic(CATALAN[:10], 3, 4)  # 20 columns, 10 rows
    with pytest.raises(InsufficientTerms):
        guess_ade(BELL[:8], 2, 3)


# --- differential relations -------------------------------------------------------


def test_guess_bell_egf_relation():
    rel = guess_ade(BELL, 2, 2, egf=True)
    assert rel is not None
    assert rel.egf
    assert rel.order() == 2
    assert rel.monomials == (
        (0, (0, 2, 0), 1),   # f'^2
        (0, (1, 0, 1), -1),  # - f f''
        (0, (1, 1, 0), 1),   # + f f'
    )
    assert str(rel) == "f*f' - f*f'' + f'^2"


def test_verify_ade():
    rel = AdeRelation(
        ((0, (0, 2, 0), 1), (0, (1, 0, 1), -1), (0, (1, 1, 0), 1)), egf=True
    )
    assert verify_ade(rel, BELL)
    bad = list(BELL)
    bad[-1] += 1
    assert not verify_ade(rel, bad)
    flipped = AdeRelation(
        ((0, (0, 2, 0), 1), (0, (1, 0, 1), 1), (0, (1, 1, 0), 1)), egf=True
    )
    assert not verify_ade(flipped, BELL)


def test_guess_ade_none_on_catalan_ogf_first_order():
    # Catalan is algebraic, hence D-finite, but not via order-1 degree-1.
    assert guess_ade(CATALAN, 1, 1) is None


def test_guess_ade_ogf_control():
    # f = 1/(1-x) satisfies f' = f^2: order 1, degree 2, plain ogf.
    rel = guess_ade([1] * 30, 1, 2)
    assert rel is not None
    assert verify_ade(rel, [1] * 30)
    assert rel.monomials == ((0, (0, 1), -1), (0, (2, 0), 1))
    assert str(rel) == "f^2 - f'"
    assert not rel.egf


# --- serialization -----------------------------------------------------------------


def test_poly_relation_json_round_trip():
    rel = PolyRelation(CATALAN_REL)
    assert PolyRelation.from_json(rel.as_json()) == rel
    with pytest.raises(ValueError, match="algebraic"):
        PolyRelation.from_json('{"kind": "ade", "monomials": []}')


def test_ade_relation_json_round_trip():
    rel = AdeRelation(((1, (2, 0, 1), -3), (0, (0, 0, 0), 7)), egf=True)
    back = AdeRelation.from_json(rel.as_json())
    assert back == rel
    with pytest.raises(ValueError, match="differential"):
        AdeRelation.from_json('{"kind": "algebraic", "monomials": []}')


def test_relation_strings_print_constants_bare():
    assert str(PolyRelation(((0, 0, 5),))) == "5"
    assert str(PolyRelation(((0, 0, 1), (0, 1, -1)))) == "-f + 1"
