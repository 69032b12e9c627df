"""Machine simulation: legal moves, unique sequences, transport, level DP."""

import doctest
import itertools

import pytest

import avmachine.machine as machine_mod
from avmachine.machine import (
    BYPASS,
    POP,
    MachineBudgetError,
    MachineError,
    basis_from_spec_json,
    basis_to_spec_json,
    canonical_sequence,
    insert_new_max,
    legal_actions,
    machine_class_counts,
    pop_pattern,
    push,
    transport,
    validate_sequence,
)
from avmachine.perms import (
    enumerate_av,
    left_to_right_maxima,
    one_skew_basis,
)


def test_doctests():
    failures, _ = doctest.testmod(machine_mod)
    assert failures == 0


# --- single-step helpers ------------------------------------------------------


def test_insert_new_max():
    assert insert_new_max((), 0) == (1,)
    assert insert_new_max((1, 3, 2), 1) == (1, 4, 3, 2)
    assert insert_new_max((2, 1), 2) == (2, 1, 3)
    with pytest.raises(MachineError):
        insert_new_max((1, 2), 3)


def test_pop_pattern():
    assert pop_pattern((1,)) == ()
    assert pop_pattern((2, 3, 1)) == (2, 1)
    assert pop_pattern((3, 1, 2)) == (1, 2)
    with pytest.raises(MachineError):
        pop_pattern(())


def test_legal_actions_decreasing_container():
    # Av(12) container: only slot 0 keeps the pattern decreasing.
    basis = [(1, 2)]
    assert legal_actions((), True, basis) == [BYPASS, push(0)]
    assert legal_actions((1,), True, basis) == [BYPASS, POP, push(0)]
    assert legal_actions((1,), False, basis) == [BYPASS, push(0)]
    assert legal_actions((2, 1), True, basis) == [BYPASS, POP, push(0)]


def test_legal_actions_empty_container_class():
    # Av(1) container can never hold anything: no pushes at all.
    assert legal_actions((), True, [(1,)]) == [BYPASS]


def test_legal_actions_unrestricted():
    ops = legal_actions((2, 1, 3), True, [])
    assert ops == [BYPASS, POP, push(0), push(1), push(2), push(3)]


# --- validate_sequence --------------------------------------------------------


def test_validate_sequence_example():
    ops = [push(0), BYPASS, BYPASS, POP]
    assert validate_sequence(ops, [(1, 2)]) == (2, 3, 1)


def test_validate_rejects_pop_after_push():
    with pytest.raises(MachineError, match="reduced"):
        validate_sequence([push(0), POP], [])


def test_validate_rejects_pop_from_empty():
    with pytest.raises(MachineError, match="empty"):
        validate_sequence([BYPASS, POP], [])


def test_validate_rejects_push_leaving_class():
    # Second push at slot 1 would make the container (1, 2).
    with pytest.raises(MachineError, match="class"):
        validate_sequence([push(0), push(1)], [(1, 2)])


def test_validate_rejects_unfinished_run():
    with pytest.raises(MachineError, match="unpopped"):
        validate_sequence([push(0), BYPASS], [])


def test_validate_rejects_bad_slot_and_unknown_op():
    with pytest.raises(MachineError, match="slot"):
        validate_sequence([push(5)], [])
    with pytest.raises(MachineError, match="unknown"):
        validate_sequence([("paws",)], [])


# --- canonical sequences and uniqueness ---------------------------------------


def _assert_reduced(ops, pi):
    """Check both uniqueness conventions against the emitted permutation.

    Replays the ops; before every bypass or push, popping must not have been
    both legal and correct (else the sequence is not pop-eager), and no pop
    may directly follow a push.
    """
    container = []
    out = 0
    value = 0
    prev = None
    for op in ops:
        if op in (BYPASS, POP) or op[0] == "push":
            if op != POP:
                assert not (container and container[0] == pi[out]), (
                    f"pop was due before {op} in {ops}"
                )
        if op == POP:
            assert prev is None or prev[0] != "push", f"pop follows push in {ops}"
            assert container[0] == pi[out]  # pops only emit the due symbol
            container.pop(0)
            out += 1
        elif op == BYPASS:
            value += 1
            out += 1
        else:
            value += 1
            container.insert(op[1], value)
        prev = op


BASES = [
    [],
    [(1,)],
    [(2, 1)],
    [(1, 2)],
    [(2, 3, 1)],
    [(3, 1, 2), (2, 1, 3)],
]


@pytest.mark.parametrize("basis", BASES, ids=lambda b: "av" + "-".join(
    "".join(map(str, p)) for p in b))
def test_canonical_sequences_biject_with_generated_class(basis):
    """Every permutation has at most one reduced sequence; counting those
    generated matches the level DP and the skew-closure class, size by size."""
    dp = machine_class_counts(basis, 6)
    closure = enumerate_av(one_skew_basis(basis), 6)
    assert dp == closure
    for n in range(7):
        generated = 0
        for pi in itertools.permutations(range(1, n + 1)):
            seq = canonical_sequence(pi, basis)
            if seq is None:
                continue
            generated += 1
            assert validate_sequence(seq, basis) == pi
            _assert_reduced(seq, pi)
        assert generated == dp[n]


def test_canonical_sequence_rejects_non_permutation():
    with pytest.raises(ValueError):
        canonical_sequence((1, 3), [])


# --- transport ----------------------------------------------------------------


def test_transport_identity_when_container_stays_small():
    # Never more than one symbol in the container: nothing to rearrange.
    assert transport((2, 3, 4, 1), [(1, 2)], [(2, 1)]) == (2, 3, 4, 1)


def test_transport_rearranges_container():
    image = transport((3, 2, 4, 1), [(1, 2)], [(2, 1)])
    assert image == (3, 1, 4, 2)
    assert left_to_right_maxima(image) == left_to_right_maxima((3, 2, 4, 1))


def test_transport_ambiguous_target_returns_none():
    # The Av(312) container accepts the second symbol at two slots.
    assert transport((3, 1, 2), [(2, 1)], [(3, 1, 2)]) is None


def test_transport_unreachable_source_raises():
    with pytest.raises(ValueError, match="not generated"):
        transport((3, 1, 2), [(1, 2)], [(2, 1)])


# --- the level DP -------------------------------------------------------------


def test_counts_catalan_prefix():
    assert machine_class_counts([(2, 1)], 8) == [1, 1, 2, 5, 14, 42, 132, 429, 1430]


def test_counts_identity_only_class():
    assert machine_class_counts([(1,)], 6) == [1] * 7


def test_counts_unrestricted_container_gives_factorials():
    assert machine_class_counts([], 6) == [1, 1, 2, 6, 24, 120, 720]


def test_counts_with_level_totals():
    counts, totals = machine_class_counts([(2, 1)], 6, with_level_totals=True)
    assert counts == [1, 1, 2, 5, 14, 42, 132]
    assert len(totals) == len(counts)
    assert totals[0] == 1
    # Every level's mass includes at least the walks already on empty.
    assert all(t >= c for t, c in zip(totals, counts))


def test_state_budget_error():
    with pytest.raises(MachineBudgetError, match="budget"):
        machine_class_counts([], 9, state_budget=50)


# --- spec files ----------------------------------------------------------------


def test_basis_spec_json_round_trip():
    basis = ((2, 1, 3), (3, 1, 2))
    text = basis_to_spec_json(basis)
    assert basis_from_spec_json(text) == basis


def test_basis_spec_json_rejects_bad_shapes():
    with pytest.raises(ValueError, match="basis"):
        basis_from_spec_json("[1, 2]")
    with pytest.raises(ValueError, match="array"):
        basis_from_spec_json('{"basis": "3 1 2"}')
