"""Specialized counting engines for six machine-generated classes.

machine_class_counts tracks containers as raw patterns, which is exact but
explodes for containers of linear size.  Each engine here replaces the pattern
with a small summary — a tuple of block sizes — that provably determines the
machine's legal moves, then runs the same level-by-level walk count: a level
boundary is an emission (bypass or pop), pushes saturate within a level, pops
are only allowed from states that have not just pushed.

The six engines and their container classes:

* fib_plus_counts — container Av(231, 312, 321), the layered permutations
  with layers of size 1 or 2 (direct sums of 1 and 21, Fibonacci-many per
  length).  Pushes act on the rightmost layer: a new singleton layer on top,
  or completing a singleton top layer to a 21-pair.  Pops take the bottom
  entry.  State: (type of top layer, number of entries below it), so
  ('S', u) / ('D', u) plus the empty container.  The generated class is
  Av(4231, 4312, 4321).

* fib_minus_counts — container Av(123, 132, 213), skew sums of 1 and 12.
  A popped bottom entry can expose either block shape, so a fixed-width
  summary of the container is not enough.  Instead the walks are counted by
  a grammar over five nonterminals (below).  Generates Av(4123, 4132, 4213).

* av4123_4231_4312_counts — container Av(123, 231, 312): a decreasing run of
  low entries followed by a decreasing run of high entries.  State (a, b) =
  the two run lengths.  New maxima may extend the low run only while the high
  run is absent (pushing left of high entries would make 231/312), start the
  high run, or extend it.  Popping removes the lowest entry of the low run;
  when the low run empties, the high run becomes the new low run.

* av4123_4231_counts — container Av(123, 231): a column of high entries, a
  low decreasing run, and a trailing run tucked between them in value.  State
  (a, b, c) with the pop order a-then-b-run-then-promote; rules mirror the
  geometry of where a new maximum can land without creating 123 or 231.

* av4123_4312_counts — container Av(123, 312): a decreasing run that a push
  may split into a low part and a high part with a middle run growing after
  it.  State (a, b, c): a low entries, b middle entries, c high entries; the
  split push sends (a, 0, 0) to (i, a - i, 1).

* av4231_4321_counts — container Av(231, 321): direct sums of singleton
  layers and descent layers of arbitrary length.  State (a, b, c): a = size
  of the top run of singleton layers, b = size of the descent layer directly
  below it (0 if none), c = everything further down.  A push either extends
  the singleton run or lands inside it, turning its upper part plus the new
  entry into a fresh descent layer.  Generates Av(4231, 4321).

Every engine is validated against the brute-force oracle and against
machine_class_counts on the raw patterns; the tuple states are additionally
checked by comparing total level mass with a direct memoized walk count.

The four quadratic-state engines (everything except the Fibonacci pair,
whose state spaces are linear) switch to a vectorized multi-modular backend
(fastdp) for long runs; the tuple-state recurrences there are identical,
only the arithmetic changes.
"""

from __future__ import annotations

from typing import Callable, Iterable

from .perms import Perm

State = tuple

# Container bases (what the machine holds) and generated bases (what it
# outputs) for each engine, used by the cross-validation tests and the CLI.
ENGINE_CONTAINER_BASIS: dict[str, tuple[Perm, ...]] = {
    "fib-plus": ((2, 3, 1), (3, 1, 2), (3, 2, 1)),
    "fib-minus": ((1, 2, 3), (1, 3, 2), (2, 1, 3)),
    "av4123-4231-4312": ((1, 2, 3), (2, 3, 1), (3, 1, 2)),
    "av4123-4231": ((1, 2, 3), (2, 3, 1)),
    "av4123-4312": ((1, 2, 3), (3, 1, 2)),
    "av4231-4321": ((2, 3, 1), (3, 2, 1)),
}

ENGINE_GENERATED_BASIS: dict[str, tuple[Perm, ...]] = {
    name: tuple(sorted((len(b) + 1,) + tuple(v for v in b) for b in basis))
    for name, basis in ENGINE_CONTAINER_BASIS.items()
}


def _level_dp(
    n_max: int,
    start: State,
    pushes: Callable[[State], Iterable[State]],
    pop: Callable[[State], State | None],
    size_of: Callable[[State], int],
    *,
    with_level_totals: bool = False,
):
    """Count reduced machine walks level by level over abstract states.

    T holds the walk mass entering each level (all states may pop).  Pushes
    saturate in waves — each wave extends only the mass added by the previous
    one, and every push strictly grows the container, so saturation stops at
    the size cap n_max - level (a bigger container cannot be emptied in the
    remaining levels).  The emission step lets every state bypass and the
    pre-push states pop.  counts[e] is the mass on the start state entering
    level e, i.e. the number of complete generation sequences with e outputs.
    """
    T: dict[State, int] = {start: 1}
    counts: list[int] = []
    totals: list[int] = []
    for level in range(n_max + 1):
        counts.append(T.get(start, 0))
        totals.append(sum(T.values()))
        if level == n_max:
            break
        cap = n_max - level
        F: dict[State, int] = {}
        frontier = T
        while frontier:
            wave: dict[State, int] = {}
            for st, mass in frontier.items():
                for nx in pushes(st):
                    if size_of(nx) <= cap:
                        F[nx] = F.get(nx, 0) + mass
                        wave[nx] = wave.get(nx, 0) + mass
            frontier = wave
        nxt: dict[State, int] = {}
        for src in (T, F):
            for st, mass in src.items():
                nxt[st] = nxt.get(st, 0) + mass
        for st, mass in T.items():
            ps = pop(st)
            if ps is not None:
                nxt[ps] = nxt.get(ps, 0) + mass
        T = nxt
    return (counts, totals) if with_level_totals else counts


# --- Av(4231, 4312, 4321): container = layered, layers of size 1 or 2 --------

_E = ("E", 0)


def _fib_plus_pushes(st: State) -> list[State]:
    tag, u = st
    if tag == "E":
        return [("S", 0)]
    if tag == "S":
        # new singleton layer on top (the old top joins the 'below' count),
        # or complete the top singleton into a 21-layer
        return [("S", u + 1), ("D", u)]
    return [("S", u + 2)]  # tag == "D": only a fresh singleton layer is legal


def _fib_plus_pop(st: State) -> State | None:
    tag, u = st
    if tag == "E":
        return None
    if tag == "S":
        return _E if u == 0 else ("S", u - 1)
    # popping the bottom of a container whose top is a 21-layer: if the top
    # layer is all that is left (u == 0), the pop splits it into a singleton
    return ("S", 0) if u == 0 else ("D", u - 1)


def _fib_plus_size(st: State) -> int:
    tag, u = st
    return u + {"E": 0, "S": 1, "D": 2}[tag]


def fib_plus_counts(n_max: int, *, with_level_totals: bool = False):
    """|Av_n(4231, 4312, 4321)| for n = 0..n_max."""
    return _level_dp(
        n_max,
        _E,
        _fib_plus_pushes,
        _fib_plus_pop,
        _fib_plus_size,
        with_level_totals=with_level_totals,
    )


# --- Av(4123, 4132, 4213): grammar over the skew-layered container -----------


def fib_minus_counts(n_max: int) -> list[int]:
    """|Av_n(4123, 4132, 4213)| for n = 0..n_max.

    The container class (skew sums of 1 and 12) has no bounded-width state:
    a pop removes the bottom entry and what it exposes depends on the whole
    block word.  The walks satisfy instead a grammar in five nonterminals —
    s for complete runs, w/r for runs that still owe the output one or two
    entries of an exposed block, p/n marking whether a pop is armed:

        s   = 1 + x s + x w_n s
        w_p = 1 + x w_p + x w_n w_p + x r_n w_p
        w_n =     x w_p + x w_n w_p + x r_n w_p
        r_p = 1 + x r_p + x w_n r_p
        r_n =     x r_p + x w_n r_p

    with x marking emissions.  Every product on the right carries an x, so
    coefficients extract termwise: order n needs only orders below n.
    """
    N = n_max
    s = [0] * (N + 1)
    wp = [0] * (N + 1)
    wn = [0] * (N + 1)
    rp = [0] * (N + 1)
    rn = [0] * (N + 1)
    for n in range(N + 1):
        if n == 0:
            s[0] = wp[0] = rp[0] = 1
            continue
        m = n - 1
        wn_s = sum(wn[i] * s[m - i] for i in range(m + 1))
        wn_wp = sum(wn[i] * wp[m - i] for i in range(m + 1))
        rn_wp = sum(rn[i] * wp[m - i] for i in range(m + 1))
        wn_rp = sum(wn[i] * rp[m - i] for i in range(m + 1))
        s[n] = s[m] + wn_s
        wp[n] = wp[m] + wn_wp + rn_wp
        wn[n] = wp[m] + wn_wp + rn_wp
        rp[n] = rp[m] + wn_rp
        rn[n] = rp[m] + wn_rp
    return s


# --- Av(4123, 4231, 4312): container = two descending runs -------------------


def _a6_1_pushes(st: State) -> list[State]:
    a, b = st
    if b == 0:
        return [(a + 1, 0)] + ([(a, 1)] if a >= 1 else [])
    return [(a, b + 1)]


def _a6_1_pop(st: State) -> State | None:
    a, b = st
    if a == 0:
        return None
    if b == 0:
        return (a - 1, 0)
    return (b, 0) if a == 1 else (a - 1, b)


def av4123_4231_4312_counts(
    n_max: int,
    *,
    method: str = "auto",
    checkpoint=None,
    with_level_totals: bool = False,
):
    """|Av_n(4123, 4231, 4312)| for n = 0..n_max.

    Exact dict DP for short runs; long runs go through the vectorized
    multi-modular backend (identical recurrences, reconstructed by CRT).
    """
    if _use_fast(method, n_max, with_level_totals, "av4123-4231-4312"):
        from . import fastdp

        return fastdp.av4123_4231_4312_counts_fast(n_max, checkpoint=checkpoint)
    return _level_dp(
        n_max,
        (0, 0),
        _a6_1_pushes,
        _a6_1_pop,
        lambda st: st[0] + st[1],
        with_level_totals=with_level_totals,
    )


# --- Av(4123, 4231): container = high column over two tucked runs ------------


def _a6_2_pushes(st: State) -> list[State]:
    a, b, c = st
    if b == 0:  # no middle run yet (and then c == 0 too)
        return [(a + 1, 0, 0)] + ([(a, 1, 0)] if a >= 1 else [])
    if c == 0:
        return [(a, b + 1, 0), (a, b, 1)]
    return [(a, b, c + 1)]


def _a6_2_pop(st: State) -> State | None:
    a, b, c = st
    if c >= 1:
        return (a, b, c - 1)
    if a == 0:
        return None
    if b == 0:
        return (a - 1, 0, 0)
    return (b, 0, 0) if a == 1 else (a - 1, b, 0)


def av4123_4231_counts(
    n_max: int,
    *,
    method: str = "auto",
    checkpoint=None,
    with_level_totals: bool = False,
):
    """|Av_n(4123, 4231)| for n = 0..n_max."""
    if _use_fast(method, n_max, with_level_totals, "av4123-4231"):
        from . import fastdp

        return fastdp.av4123_4231_counts_fast(n_max, checkpoint=checkpoint)
    return _level_dp(
        n_max,
        (0, 0, 0),
        _a6_2_pushes,
        _a6_2_pop,
        lambda st: st[0] + st[1] + st[2],
        with_level_totals=with_level_totals,
    )


# --- Av(4123, 4312): container = descending run that pushes may split --------


def _a6_3_pushes(st: State) -> list[State]:
    a, b, c = st
    if b == 0:  # plain descending run (c == 0 as well)
        grow = [(a + 1, 0, 0)]
        split = [(i, a - i, 1) for i in range(a)]  # i = 0..a-1
        return grow + split
    return [(a, b, c + 1)]


def _a6_3_pop(st: State) -> State | None:
    a, b, c = st
    if b == 0:
        return (a - 1, 0, 0) if a >= 1 else None
    if b == 1:
        return (a + c, 0, 0)  # middle run exhausted: high run rejoins the low
    return (a, b - 1, c)


def av4123_4312_counts(
    n_max: int,
    *,
    method: str = "auto",
    checkpoint=None,
    with_level_totals: bool = False,
):
    """|Av_n(4123, 4312)| for n = 0..n_max."""
    if _use_fast(method, n_max, with_level_totals, "av4123-4312"):
        from . import fastdp

        return fastdp.av4123_4312_counts_fast(n_max, checkpoint=checkpoint)
    return _level_dp(
        n_max,
        (0, 0, 0),
        _a6_3_pushes,
        _a6_3_pop,
        lambda st: st[0] + st[1] + st[2],
        with_level_totals=with_level_totals,
    )


# --- Av(4231, 4321): container = sums of singletons and one descent ----------


def _a6_4_pushes(st: State) -> list[State]:
    a, b, c = st
    grow = [(a + 1, b, c)]
    if a >= 1:
        # landing inside the singleton run turns its top i entries plus the
        # new entry into a descent of size a - i + 1; the rest sinks below
        return grow + [(0, a - i + 1, b + c + i) for i in range(a)]
    return grow


def _a6_4_pop(st: State) -> State | None:
    a, b, c = st
    if c >= 1:
        return (a, b, c - 1)
    if b >= 1:
        return (a + b - 1, 0, 0)  # the descent, minus its bottom, rejoins the run
    return (a - 1, 0, 0) if a >= 1 else None


def av4231_4321_counts(
    n_max: int,
    *,
    method: str = "auto",
    checkpoint=None,
    with_level_totals: bool = False,
):
    """|Av_n(4231, 4321)| for n = 0..n_max."""
    if _use_fast(method, n_max, with_level_totals, "av4231-4321"):
        from . import fastdp

        return fastdp.av4231_4321_counts_fast(n_max, checkpoint=checkpoint)
    return _level_dp(
        n_max,
        (0, 0, 0),
        _a6_4_pushes,
        _a6_4_pop,
        lambda st: st[0] + st[1] + st[2],
        with_level_totals=with_level_totals,
    )


# --- dispatch ----------------------------------------------------------------

# Per-engine crossover from the exact dict DP to the modular backend, picked
# so the slowest exact run "auto" can choose stays around ten seconds.  The
# grid engine visits O(n^3) states; the three-block engines visit O(n^3)
# states but pay an extra factor for their length-a push lists, and the
# 4231/4321 engine's lists are longest.
FAST_THRESHOLD = {
    "av4123-4231-4312": 100,
    "av4123-4231": 56,
    "av4123-4312": 56,
    "av4231-4321": 40,
}


def _use_fast(
    method: str, n_max: int, with_level_totals: bool, engine: str
) -> bool:
    if method not in ("auto", "exact", "modular"):
        raise ValueError(f"unknown method {method!r}")
    if with_level_totals:
        if method == "modular":
            raise ValueError("level totals require the exact method")
        return False
    if method == "exact":
        return False
    if method == "modular":
        return True
    return n_max >= FAST_THRESHOLD[engine]


def _fib_plus_entry(n_max: int, *, method: str = "auto", checkpoint=None):
    # the F+ state space is linear in n, the exact DP is never the bottleneck
    return fib_plus_counts(n_max)


def _fib_minus_entry(n_max: int, *, method: str = "auto", checkpoint=None):
    return fib_minus_counts(n_max)


ENGINES: dict[str, Callable] = {
    "fib-plus": _fib_plus_entry,
    "fib-minus": _fib_minus_entry,
    "av4123-4231-4312": av4123_4231_4312_counts,
    "av4123-4231": av4123_4231_counts,
    "av4123-4312": av4123_4312_counts,
    "av4231-4321": av4231_4321_counts,
}


def engine_counts(name: str, n_max: int, *, method: str = "auto", checkpoint=None):
    """Run an engine by its public name."""
    try:
        fn = ENGINES[name]
    except KeyError:
        raise ValueError(
            f"unknown engine {name!r}; choose from {sorted(ENGINES)}"
        ) from None
    return fn(n_max, method=method, checkpoint=checkpoint)
