"""Permutations in one-line notation and classical pattern containment.

A permutation of length n is a tuple of the integers 1..n; the empty tuple is
the empty permutation.  sigma occurs as a pattern in pi if some subsequence of
pi has the same relative order as sigma, and Av(B) is the class of
permutations avoiding every pattern in the basis B.  Avoidance is hereditary
(closed under taking subsequences), which is what makes the incremental
enumeration in enumerate_av sound: every member of Av_n(B) restricts to a
member of Av_{n-1}(B) when the maximum entry is removed.

Everything downstream (machine simulation, the counting engines, the
acceptance checks) leans on this module, so it stays small and direct:
containment is plain backtracking with a value-window prune, and the
enumerator is an honest filter, not a clever one.
"""

from __future__ import annotations

import json
from typing import Iterable, Sequence

Perm = tuple[int, ...]


def is_permutation(seq: Sequence[int]) -> bool:
    """True if seq is a rearrangement of 1..len(seq)."""
    return sorted(seq) == list(range(1, len(seq) + 1))


def parse_permutation(text: str) -> Perm:
    """Parse one-line notation.

    Accepts entries separated by whitespace and/or commas ("3 1 2", "3,1,2"),
    or a contiguous digit string ("312") for lengths up to 9 where that is
    unambiguous.  The empty string is the empty permutation.

    >>> parse_permutation("3 1 2")
    (3, 1, 2)
    >>> parse_permutation("312")
    (3, 1, 2)
    >>> parse_permutation("")
    ()
    """
    text = text.strip()
    if not text:
        return ()
    if any(ch in text for ch in " ,\t"):
        tokens = text.replace(",", " ").split()
        values = tuple(int(tok) for tok in tokens)
    elif text.isdigit():
        if len(text) > 9:
            raise ValueError(
                f"digit-string form is ambiguous beyond length 9: {text!r}"
            )
        values = tuple(int(ch) for ch in text)
    else:
        raise ValueError(f"cannot parse permutation from {text!r}")
    if not is_permutation(values):
        raise ValueError(f"not a permutation of 1..{len(values)}: {values}")
    return values


def format_permutation(perm: Perm) -> str:
    """One-line notation with spaces, the inverse of parse_permutation."""
    return " ".join(str(v) for v in perm)


def standardize(values: Sequence[int]) -> Perm:
    """Pattern of a sequence of distinct numbers.

    >>> standardize((5, 2, 9))
    (2, 1, 3)
    """
    ranks = {v: i + 1 for i, v in enumerate(sorted(values))}
    return tuple(ranks[v] for v in values)


def contains(pi: Perm, sigma: Perm) -> bool:
    """Does pi contain sigma as a classical pattern?

    Backtracking over the positions of pi; a candidate position is rejected
    unless its value sits inside the open interval forced by the already
    matched entries (the standard value-window prune).

    >>> contains((5, 3, 4, 1, 2), (3, 2, 1))
    True
    >>> contains((2, 3, 1), (3, 1, 2))
    False
    """
    k, n = len(sigma), len(pi)
    if k == 0:
        return True
    if k > n:
        return False
    chosen = [0] * k  # chosen[j] = index in pi matched to sigma[j]

    def extend(j: int, start: int) -> bool:
        if j == k:
            return True
        lo, hi = 0, n + 1  # allowed open value window for sigma[j]'s image
        for t in range(j):
            if sigma[t] < sigma[j]:
                lo = max(lo, pi[chosen[t]])
            else:
                hi = min(hi, pi[chosen[t]])
        for i in range(start, n - (k - j) + 1):
            if lo < pi[i] < hi:
                chosen[j] = i
                if extend(j + 1, i + 1):
                    return True
        return False

    return extend(0, 0)


def avoids(pi: Perm, sigma: Perm) -> bool:
    return not contains(pi, sigma)


def avoids_all(pi: Perm, basis: Iterable[Perm]) -> bool:
    return all(not contains(pi, sigma) for sigma in basis)


def left_to_right_maxima(perm: Perm) -> list[tuple[int, int]]:
    """(position, value) pairs of the left-to-right maxima, 1-indexed.

    >>> left_to_right_maxima((5, 3, 4, 1, 2))
    [(1, 5)]
    >>> left_to_right_maxima((2, 3, 1))
    [(1, 2), (2, 3)]
    """
    out = []
    best = 0
    for pos, val in enumerate(perm, start=1):
        if val > best:
            out.append((pos, val))
            best = val
    return out


def direct_sum(alpha: Perm, beta: Perm) -> Perm:
    """alpha (+) beta: beta placed above and to the right of alpha."""
    k = len(alpha)
    return alpha + tuple(v + k for v in beta)


def skew_sum(alpha: Perm, beta: Perm) -> Perm:
    """alpha (-) beta: alpha placed above and to the left of beta.

    >>> skew_sum((1,), (1, 2))
    (3, 1, 2)
    """
    m = len(beta)
    return tuple(v + m for v in alpha) + beta


def reverse(perm: Perm) -> Perm:
    return perm[::-1]


def complement(perm: Perm) -> Perm:
    n = len(perm)
    return tuple(n + 1 - v for v in perm)


def inverse(perm: Perm) -> Perm:
    out = [0] * len(perm)
    for pos, val in enumerate(perm, start=1):
        out[val - 1] = pos
    return tuple(out)


def apply_symmetry(perm: Perm, name: str) -> Perm:
    """Apply one of the dihedral symmetries 'reverse'/'complement'/'inverse'."""
    try:
        return {"reverse": reverse, "complement": complement, "inverse": inverse}[
            name
        ](perm)
    except KeyError:
        raise ValueError(f"unknown symmetry {name!r}") from None


# --- pattern sets (bases) ---------------------------------------------------


def normalize_basis(patterns: Iterable[Perm | str]) -> tuple[Perm, ...]:
    """Canonical basis form: parsed, deduplicated, sorted by (length, values).

    Does not assume or enforce an antichain; see minimal_patterns for that.
    """
    parsed = set()
    for p in patterns:
        perm = parse_permutation(p) if isinstance(p, str) else tuple(p)
        if not is_permutation(perm):
            raise ValueError(f"basis element is not a permutation: {perm}")
        parsed.add(perm)
    return tuple(sorted(parsed, key=lambda q: (len(q), q)))


def minimal_patterns(basis: Iterable[Perm]) -> tuple[Perm, ...]:
    """Drop basis elements that contain another basis element.

    Av(B) only depends on the minimal elements of B under containment, so
    this turns any finite basis into the equivalent antichain.
    """
    items = normalize_basis(basis)
    keep = []
    for p in items:
        if not any(q != p and contains(p, q) for q in items):
            keep.append(p)
    return tuple(keep)


def one_skew_basis(basis: Iterable[Perm]) -> tuple[Perm, ...]:
    """The basis {1 (-) beta : beta in B}.

    This is the class a container machine over Av(B) generates: prepending a
    new maximum to each basis pattern.

    >>> one_skew_basis([(2, 1)])
    ((3, 2, 1),)
    """
    return normalize_basis(skew_sum((1,), beta) for beta in normalize_basis(basis))


def basis_to_json(basis: Iterable[Perm]) -> str:
    return json.dumps([format_permutation(p) for p in normalize_basis(basis)])


def basis_from_json(text: str) -> tuple[Perm, ...]:
    data = json.loads(text)
    if not isinstance(data, list) or not all(isinstance(s, str) for s in data):
        raise ValueError("pattern set JSON must be an array of strings")
    return normalize_basis(data)


# --- the brute-force avoidance oracle ---------------------------------------

ENUMERATION_GUARD = 11  # n! filtering beyond this is a mistake, not a request


def enumerate_av(
    basis: Iterable[Perm],
    n_max: int,
    *,
    max_guard: int = ENUMERATION_GUARD,
    return_perms: bool = False,
):
    """Counts |Av_n(B)| for n = 0..n_max by exhaustive filtering.

    Built incrementally: the members of Av_n are found by inserting the new
    maximum n into every slot of every member of Av_{n-1} and keeping the
    candidates that avoid B (hereditarity makes this complete).  This is the
    ground-truth oracle the counting engines are tested against, so it stays
    brutally simple.

    With return_perms=True returns (counts, levels) where levels[n] is the
    sorted list of members of Av_n(B).
    """
    if n_max > max_guard:
        raise ValueError(
            f"enumerate_av is a factorial-time oracle; n_max={n_max} exceeds "
            f"the guard ({max_guard}).  Pass max_guard explicitly to insist."
        )
    bas = normalize_basis(basis)
    counts = []
    levels = []
    current: list[Perm] = [p for p in [()] if avoids_all(p, bas)]
    for n in range(n_max + 1):
        if n > 0:
            nxt = []
            for perm in current:
                for slot in range(len(perm) + 1):
                    cand = perm[:slot] + (n,) + perm[slot:]
                    if avoids_all(cand, bas):
                        nxt.append(cand)
            current = nxt
        counts.append(len(current))
        if return_perms:
            levels.append(sorted(current))
    return (counts, levels) if return_perms else counts
