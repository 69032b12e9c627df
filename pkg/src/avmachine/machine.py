"""Simulation of container machines over an arbitrary avoidance class.

A machine for the class C = Av(B) reads the input 1, 2, ..., n from left to
right and builds an output permutation.  Each input symbol is either bypassed
straight to the output or pushed into the container, where it enters as the
new maximum at any horizontal slot that keeps the container's pattern inside
C; between input symbols the machine may pop the leftmost container entry to
the output any number of times.  The output permutations form the class
Av({1 (-) beta : beta in B}): bypassed symbols are exactly the left-to-right
maxima of the output, and everything below a left-to-right maximum passed
through the container, so a forbidden 1(-)beta would need beta inside the
container's history.

Generation sequences are made unique by two conventions: pop whenever the
next output symbol sits at the front of the container, and never pop
immediately after a push.  The second convention is the only one a counting
walk has to track, which it does with a single "can pop" flag: a bypass or a
pop re-arms the flag, a push clears it.  machine_class_counts counts exactly
these reduced walks level by level, where a level boundary is an emission
(bypass or pop) and pushes saturate within the level.

Containers are tracked as patterns (tuples), not values: the machine's legal
moves only depend on the pattern, so the level DP runs over patterns with
multiplicities.
"""

from __future__ import annotations

import json
import os
from typing import Iterable

from .perms import (
    Perm,
    avoids_all,
    is_permutation,
    minimal_patterns,
    normalize_basis,
    parse_permutation,
    standardize,
)

# Ops are plain tuples: ("bypass",), ("push", slot), ("pop",).
Op = tuple

BYPASS: Op = ("bypass",)
POP: Op = ("pop",)


def push(slot: int) -> Op:
    return ("push", slot)


def format_op(op: Op) -> str:
    return f"push@{op[1]}" if op[0] == "push" else op[0]


class MachineError(ValueError):
    """An op sequence broke the machine rules."""


class MachineBudgetError(RuntimeError):
    """The level DP exceeded its state budget."""


DEFAULT_STATE_BUDGET = 10_000_000
_BUDGET_ENV = "CMACHINE_STATE_BUDGET"


def _state_budget(explicit: int | None) -> int:
    if explicit is not None:
        return explicit
    return int(os.environ.get(_BUDGET_ENV, DEFAULT_STATE_BUDGET))


def insert_new_max(pattern: Perm, slot: int) -> Perm:
    """Container pattern after pushing a new maximum at the given slot."""
    if not 0 <= slot <= len(pattern):
        raise MachineError(f"push slot {slot} out of range for {pattern}")
    k = len(pattern)
    return pattern[:slot] + (k + 1,) + pattern[slot:]


def pop_pattern(pattern: Perm) -> Perm:
    """Container pattern after popping the leftmost entry."""
    if not pattern:
        raise MachineError("pop from empty container")
    r = pattern[0]
    return tuple(v - (v > r) for v in pattern[1:])


def legal_actions(container: Perm, can_pop: bool, basis: Iterable[Perm]) -> list[Op]:
    """All ops available from a container state.

    Bypass is always legal; pop needs a nonempty container and the can-pop
    flag; a push at slot s is legal when the grown pattern stays in the
    class.  Order: bypass, pop, pushes by ascending slot.
    """
    bas = minimal_patterns(basis)
    ops: list[Op] = [BYPASS]
    if container and can_pop:
        ops.append(POP)
    for slot in range(len(container) + 1):
        if avoids_all(insert_new_max(container, slot), bas):
            ops.append(push(slot))
    return ops


def validate_sequence(ops: Iterable[Op], basis: Iterable[Perm]) -> Perm:
    """Run an op sequence, returning the output permutation.

    Raises MachineError if any op is illegal (a push that leaves the class, a
    pop on an empty container or directly after a push) or if the run ends
    with a nonempty container.
    """
    bas = minimal_patterns(basis)
    container: list[int] = []  # actual values; the pattern is their standardization
    out: list[int] = []
    value = 0
    can_pop = True
    for op in ops:
        if op == BYPASS:
            value += 1
            out.append(value)
            can_pop = True
        elif op == POP:
            if not container:
                raise MachineError("pop from empty container")
            if not can_pop:
                raise MachineError("pop immediately after push is not reduced")
            out.append(container.pop(0))
            can_pop = True
        elif op[0] == "push":
            value += 1
            slot = op[1]
            if not 0 <= slot <= len(container):
                raise MachineError(f"push slot {slot} out of range")
            grown = container[:slot] + [value] + container[slot:]
            if not avoids_all(standardize(grown), bas):
                raise MachineError(f"push@{slot} leaves the container class")
            container = grown
            can_pop = False
        else:
            raise MachineError(f"unknown op {op!r}")
    if container:
        raise MachineError(f"run ended with {len(container)} entries unpopped")
    return tuple(out)


def canonical_sequence(pi: Perm, basis: Iterable[Perm]) -> list[Op] | None:
    """The unique reduced generation sequence for pi, or None.

    The reconstruction is forced move by move: the container must hold, in
    order, exactly the input symbols already read but not yet due in the
    output, so each input symbol either bypasses (it is the next output
    symbol, necessarily a new left-to-right maximum) or is pushed at the slot
    matching its position in pi among the container's entries.  Pops fire
    exactly when the front of the container is the next output symbol.  The
    only way to fail is a forced push whose pattern leaves the container
    class, in which case pi is not generated by this machine.

    >>> canonical_sequence((2, 3, 1), [(1, 2)])
    [('push', 0), ('bypass',), ('bypass',), ('pop',)]
    >>> canonical_sequence((3, 1, 2), [(1, 2)]) is None
    True
    """
    if not is_permutation(pi):
        raise ValueError(f"not a permutation: {pi}")
    bas = minimal_patterns(basis)
    n = len(pi)
    position = {v: i for i, v in enumerate(pi)}
    container: list[int] = []  # values, kept in pi-order so pops come out right
    ops: list[Op] = []
    out_idx = 0
    for v in range(1, n + 1):
        while container and container[0] == pi[out_idx]:
            ops.append(POP)
            container.pop(0)
            out_idx += 1
        if v == pi[out_idx]:
            ops.append(BYPASS)
            out_idx += 1
        else:
            slot = sum(1 for c in container if position[c] < position[v])
            grown = container[:slot] + [v] + container[slot:]
            if not avoids_all(standardize(grown), bas):
                return None
            container = grown
            ops.append(push(slot))
    while container:
        ops.append(POP)
        container.pop(0)
    return ops


def transport(
    pi: Perm, basis_from: Iterable[Perm], basis_to: Iterable[Perm]
) -> Perm | None:
    """Carry pi across machines by replaying its generation skeleton.

    Takes the reduced generation sequence of pi on the Av(basis_from)
    machine, keeps the bypass/push/pop skeleton, and re-derives each push
    slot on the Av(basis_to) machine.  Returns the output permutation when
    every replayed push has exactly one legal slot, None when some push is
    ambiguous or impossible.  Raises ValueError if pi is not generated by the
    source machine at all.

    When each container class forces its arrangement (e.g. Av(12) keeps the
    container decreasing, Av(21) increasing), this is a bijection between the
    generated classes that fixes the bypass skeleton, hence the positions and
    values of all left-to-right maxima.
    """
    seq = canonical_sequence(pi, basis_from)
    if seq is None:
        raise ValueError(
            f"{pi} is not generated by the Av({sorted(normalize_basis(basis_from))}) machine"
        )
    bas_to = minimal_patterns(basis_to)
    container: list[int] = []
    out: list[int] = []
    value = 0
    for op in seq:
        if op == BYPASS:
            value += 1
            out.append(value)
        elif op == POP:
            out.append(container.pop(0))
        else:
            value += 1
            slots = [
                s
                for s in range(len(container) + 1)
                if avoids_all(
                    standardize(container[:s] + [value] + container[s:]), bas_to
                )
            ]
            if len(slots) != 1:
                return None
            container.insert(slots[0], value)
    return tuple(out)


def machine_class_counts(
    basis: Iterable[Perm],
    n_max: int,
    *,
    state_budget: int | None = None,
    with_level_totals: bool = False,
):
    """Counts of the class generated by the Av(basis) machine, n = 0..n_max.

    Level-by-level dynamic programming over container patterns.  A level
    boundary is an emission; entering level e the DP holds the multiset of
    container patterns (with walk multiplicities) reachable with e outputs,
    all with the can-pop flag armed.  Within a level, pushes saturate
    (container growth is capped at n_max - e: larger containers cannot be
    emptied in the remaining levels), then one emission step closes the
    level: every state may bypass, and the pre-push states may pop.  The
    count a_e is the mass on the empty container entering level e.

    The state budget (default 10**7 patterns per level, overridable via the
    CMACHINE_STATE_BUDGET environment variable) turns pattern blowup into a
    clean MachineBudgetError instead of an out-of-memory grind.

    With with_level_totals=True returns (counts, totals) where totals[e] is
    the total walk mass entering level e — the number of reduced partial
    sequences with e outputs and a container small enough to finish by level
    n_max.

    >>> machine_class_counts([(2, 1)], 6)
    [1, 1, 2, 5, 14, 42, 132]
    """
    bas = minimal_patterns(basis)
    budget = _state_budget(state_budget)
    ok_cache: dict[Perm, bool] = {(): avoids_all((), bas)}

    def container_ok(pat: Perm) -> bool:
        hit = ok_cache.get(pat)
        if hit is None:
            hit = ok_cache[pat] = avoids_all(pat, bas)
        return hit

    counts: list[int] = []
    totals: list[int] = []
    T: dict[Perm, int] = {(): 1} if container_ok(()) else {}
    for level in range(n_max + 1):
        counts.append(T.get((), 0))
        totals.append(sum(T.values()))
        if level == n_max:
            break
        cap = n_max - level
        # Saturate pushes.  Each wave pushes only the freshly added mass, so a
        # pattern reachable from several waves still accumulates exactly once
        # per walk; termination is by strict growth of the container.
        F: dict[Perm, int] = {}
        frontier = T
        while frontier:
            wave: dict[Perm, int] = {}
            for pat, mass in frontier.items():
                if len(pat) >= cap:
                    continue
                for slot in range(len(pat) + 1):
                    cand = insert_new_max(pat, slot)
                    if container_ok(cand):
                        F[cand] = F.get(cand, 0) + mass
                        wave[cand] = wave.get(cand, 0) + mass
            if len(F) + len(T) > budget:
                raise MachineBudgetError(
                    f"level {level}: {len(F) + len(T)} container patterns "
                    f"exceed the state budget ({budget})"
                )
            frontier = wave
        # One emission: bypass from everything, pop from the pre-push states.
        nxt: dict[Perm, int] = {}
        for src in (T, F):
            for pat, mass in src.items():
                nxt[pat] = nxt.get(pat, 0) + mass
        for pat, mass in T.items():
            if pat:
                popped = pop_pattern(pat)
                nxt[popped] = nxt.get(popped, 0) + mass
        T = nxt
    return (counts, totals) if with_level_totals else counts


# --- machine spec files ------------------------------------------------------


def basis_from_spec_json(text: str) -> tuple[Perm, ...]:
    """Parse a machine spec: a JSON object {"basis": ["3 1 2", ...]}."""
    data = json.loads(text)
    if not isinstance(data, dict) or "basis" not in data:
        raise ValueError('machine spec must be a JSON object with a "basis" key')
    patterns = data["basis"]
    if not isinstance(patterns, list) or not all(isinstance(s, str) for s in patterns):
        raise ValueError('"basis" must be an array of one-line permutation strings')
    return normalize_basis(parse_permutation(s) for s in patterns)


def basis_to_spec_json(basis: Iterable[Perm]) -> str:
    from .perms import format_permutation

    return json.dumps(
        {"basis": [format_permutation(p) for p in normalize_basis(basis)]}
    )
