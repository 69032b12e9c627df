"""Vectorized multi-modular backends for the long engine runs.

The tuple-state level DPs in engines.py are exact but push big integers
through Python dicts, which caps them at a few hundred terms.  The backends
here run the identical recurrences on numpy arrays: once modulo each of a set
of 31-bit primes (int64 arithmetic, reduced often enough that every
intermediate stays far below 2**63), and once in float64 to measure how many
bits the answers need.  The per-prime residue streams are then recombined by
the Chinese remainder theorem.

Moduli are processed in batches along a leading array axis, so the Python
call overhead of a level sweep is paid once per batch rather than once per
prime; the arithmetic cost is per prime either way.

Magnitude pass: the float sweep tracks a global power-of-two scale and
rescales whenever values approach 2**900, recording log2 of each count.  The
float estimate of a magnitude is good to a relative error far below 2**-40,
and the prime pool is sized with a 64-bit margin on top of the measured
maximum, so the CRT modulus comfortably exceeds every count.  As a further
guard the reconstructed counts are compared against the exact dict engine on
a short prefix, which would catch any systematic divergence of the
recurrences themselves.

State layouts:

* av4123-4231-4312 uses a single (a, b) grid per level.  Push chains (grow
  the low run, hop to the high run, grow it) are closed forms over prefix
  sums of the entering mass, so the push saturation is one cumsum pass.

* the three-component engines keep one square array per container size s
  ("shell"), indexed [a, b] with the third block size implied as s - a - b.
  Every push moves mass up exactly one shell, so saturation is a single
  ascending pass; every pop moves mass down one shell, so the emission is a
  single descending pass with eager frees.

Dead states (containers too large to be emptied in the remaining levels) are
dropped or left behind by the shrinking views; their mass can never reach
the empty container in time to be counted, so this is a pure performance
choice, not an approximation.

Long runs checkpoint after every completed batch of moduli (JSON; atomic
rename), so an interrupted run loses at most one batch pass.
"""

from __future__ import annotations

import json
import math
import os
import tempfile

import numpy as np

_MARGIN_BITS = 64
_RESCALE_LIMIT = 2.0**900
_RESCALE_STEP = 2.0**600
_PREFIX_CHECK = 10
_BATCH_CAP = 8
_BATCH_BYTES = 1 << 30  # keep a batch's working set near 1 GiB


# --- primes and CRT -----------------------------------------------------------


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


def primes31(count: int) -> list[int]:
    """The largest `count` primes below 2**31, descending."""
    out = []
    q = 2**31 - 1
    while len(out) < count:
        if _is_prime(q):
            out.append(q)
        q -= 2
    return out


def crt_combine(pairs: list[tuple[int, int]]) -> int:
    """Recombine residues (p, r) into the unique value below prod p."""
    x, modulus = 0, 1
    for p, r in pairs:
        t = ((r - x) * pow(modulus, -1, p)) % p
        x += modulus * t
        modulus *= p
    return x


# --- arithmetic strategies ------------------------------------------------
#
# A "ring" fixes the dtype, the leading batch shape of every DP array, and
# the reduction discipline.  Sweeps are written with `...` indexing so the
# same code runs batched (lead = (P,)) and unbatched (lead = ()).


class _ModArith:
    """int64 arithmetic modulo a batch of 31-bit primes (leading axis).

    Entering values are < p after the per-level reduction; the shell sweeps
    additionally reduce each freshly built shell, so sums stay below a few
    times 2**50 even for runs of several thousand terms — far inside int64.
    """

    def __init__(self, ps: list[int]):
        self.ps = list(ps)
        self.dtype = np.int64
        self.lead = (len(ps),)
        self._mod2 = np.array(ps, dtype=np.int64).reshape(-1, 1, 1)

    def reduce_shell(self, arr) -> None:
        np.mod(arr, self._mod2, out=arr)

    def reduce_level(self, arrays) -> None:
        for arr in arrays:
            np.mod(arr, self._mod2, out=arr)

    def read_count(self, cell) -> list[int]:
        return [int(v) for v in np.asarray(cell).reshape(-1)]


class _MagArith:
    """float64 magnitude tracking with a global power-of-two scale."""

    def __init__(self):
        self.scale = 0.0
        self.dtype = np.float64
        self.lead = ()

    def reduce_shell(self, arr) -> None:
        pass  # rescaling must stay global across shells

    def reduce_level(self, arrays) -> None:
        top = 0.0
        for arr in arrays:
            if arr.size:
                m = float(arr.max())
                if m > top:
                    top = m
        if top > _RESCALE_LIMIT:
            for arr in arrays:
                arr *= 1.0 / _RESCALE_STEP
            self.scale += math.log2(_RESCALE_STEP)

    def read_count(self, cell) -> float:
        v = float(cell)
        return (math.log2(v) + self.scale) if v > 0.0 else 0.0


# --- the (a, b) grid sweep: av4123-4231-4312 -----------------------------------


def _sweep_a6_1(n_max: int, ring) -> list:
    """Two descending runs; state (a, b) on a grid.

    Push closure in closed form: mass entering at (a, 0) may grow the low run
    to any (a', 0), a' > a, and from any (a', 0), a' >= 1, hop onto the high
    run and grow it.  With s0 the prefix sums of column 0, the pushed-mass
    grid is F[a', 0] = s0[a'-1] and F[a', b'] = s0[a'] + sum_{1<=b<b'} T[a', b].
    """
    n = n_max
    T = np.zeros(ring.lead + (n + 1, n + 1), dtype=ring.dtype)
    U = np.zeros_like(T)
    T[..., 0, 0] = 1
    raw = [ring.read_count(T[..., 0, 0])]
    for level in range(n):
        m = n - level  # size cap; the live square is [0..m] x [0..m]
        S = T[..., : m + 1, : m + 1]
        s0 = np.cumsum(S[..., :, 0], axis=-1)
        F = np.zeros_like(S)
        F[..., 1:, 0] = s0[..., :-1]
        F[..., 1:, 1] = s0[..., 1:]
        if m >= 2:
            rowcum = np.cumsum(S[..., :, 1:], axis=-1)
            F[..., 1:, 2:] = s0[..., 1:, None] + rowcum[..., 1:, : m - 1]
        V = U[..., : m + 1, : m + 1]
        V[...] = S + F  # bypass from every live state
        V[..., :-1, 0] += S[..., 1:, 0]  # pop (a, 0) -> (a-1, 0)
        if m >= 2:
            V[..., 1:-1, 1:] += S[..., 2:, 1:]  # pop (a>=2, b) -> (a-1, b)
        V[..., 1:, 0] += S[..., 1, 1:]  # pop (1, b) -> (b, 0)
        ring.reduce_level([V])
        raw.append(ring.read_count(V[..., 0, 0]))
        T, U = U, T
    return raw


# --- shell sweeps: one square per container size -------------------------------


def _sweep_shells(n_max: int, ring, closure_shell, emit_shell) -> list:
    """Shared driver for the three-block engines.

    closure_shell(F_s, M_prev, s) receives the total entering-plus-pushed
    mass of shell s-1 and adds the one-push arrivals into shell s; running it
    for s ascending saturates all push chains.  emit_shell(U_below, T_s, s)
    adds the pops of shell s (pre-push mass only: a pop may not directly
    follow a push) into shell s-1; the driver itself adds the bypasses.
    Shells above the size cap are dropped — their mass cannot be emptied in
    the remaining levels.

    To avoid a second pyramid of temporaries, F[s] is promoted in place to
    the full post-push mass T[s] + F[s] as the ascending pass moves through
    shell s, so the closure always reads F[s-1] directly.
    """
    n = n_max
    dt = ring.dtype

    def shell(s: int):
        return np.zeros(ring.lead + (s + 1, s + 1), dtype=dt)

    T: list = [shell(0)]
    T[0][..., 0, 0] = 1
    raw = [ring.read_count(T[0][..., 0, 0])]
    for level in range(n):
        cap = n - level
        del T[cap + 1 :]
        while len(T) < cap + 1:
            T.append(shell(len(T)))
        F = [np.zeros_like(A) for A in T]
        F[0] += T[0]
        for s in range(1, cap + 1):
            closure_shell(F[s], F[s - 1], s)
            ring.reduce_shell(F[s])
            F[s] += T[s]
        U: list = [None] * (cap + 1)

        def bucket(idx: int):
            if U[idx] is None:
                U[idx] = shell(idx)
            return U[idx]

        for s in range(cap, -1, -1):
            Us = bucket(s)
            Us += F[s]  # bypass of the full post-push mass
            if s >= 1:
                emit_shell(bucket(s - 1), T[s], s)
            T[s] = None  # eager frees keep two array sets live, not three
            F[s] = None
        ring.reduce_level(U)
        T = U
        raw.append(ring.read_count(T[0][..., 0, 0]))
    return raw


def _a6_2_closure(Fs, M, s: int) -> None:
    corner = M[..., s - 1, 0]  # the (a, 0, 0) state of shell s-1
    Fs[..., s, 0] += corner  # grow the low run
    if s >= 2:
        Fs[..., s - 1, 1] += corner  # start the middle run
        idx = np.arange(0, s - 1)
        Fs[..., idx, s - idx] += M[..., idx, s - 1 - idx]  # extend the middle run
        # same-cell moves one shell up: (a,b,0) -> (a,b,1) and c -> c+1
        Fs[..., :s, 1:s] += M[..., :s, 1:s]


def _a6_2_emit(Ub, Ts, s: int) -> None:
    Ub[..., s - 1, 0] += Ts[..., s, 0]  # (a,0,0) -> (a-1,0,0)
    if s >= 2:
        Ub[..., s - 1, 0] += Ts[..., 1, s - 1]  # (1,b,0) -> (b,0,0)
        if s >= 3:
            idx = np.arange(2, s)  # (a>=2,b,0) -> (a-1,b,0)
            Ub[..., idx - 1, s - idx] += Ts[..., idx, s - idx]
        # (a,b,c>=1) -> (a,b,c-1): same cell one shell down, then remove the
        # c=0 anti-diagonal the blanket slice wrongly included
        Ub[..., :s, 1:s] += Ts[..., :s, 1:s]
        idx2 = np.arange(1, s)
        Ub[..., idx2, s - idx2] -= Ts[..., idx2, s - idx2]


def _a6_3_closure(Fs, M, s: int) -> None:
    corner = M[..., s - 1, 0]
    Fs[..., s, 0] += corner  # grow the run
    if s >= 2:
        idx = np.arange(0, s - 1)
        Fs[..., idx, s - 1 - idx] += corner[..., None]  # split: (i, s-1-i, 1)
        Fs[..., :s, 1:s] += M[..., :s, 1:s]  # c -> c+1 (b>=1 forces c>=1 here)


def _a6_3_emit(Ub, Ts, s: int) -> None:
    Ub[..., s - 1, 0] += Ts[..., s, 0]  # (a,0,0) -> (a-1,0,0)
    if s >= 2:
        Ub[..., s - 1, 0] += Ts[..., : s - 1, 1].sum(axis=-1)  # (a,1,c) -> (a+c,0,0)
        Ub[..., :s, 1 : s - 1] += Ts[..., :s, 2:s]  # (a,b>=2,c) -> (a,b-1,c)


def _a6_4_closure(Fs, M, s: int) -> None:
    Fs[..., 1:, :-1] += M  # (a,b,c) -> (a+1,b,c)
    if s >= 2:
        # splits from any (a>=1, b, c): (0, a-i+1, b+c+i), i = 0..a-1; the
        # mass landing on (0, B, s-B) is the suffix sum of row mass over a >= B-1
        rowmass = M.sum(axis=-1)
        suffix = np.cumsum(rowmass[..., ::-1], axis=-1)[..., ::-1]
        Fs[..., 0, 2 : s + 1] += suffix[..., 1:s]


def _a6_4_emit(Ub, Ts, s: int) -> None:
    # every c = 0 state (the anti-diagonal) pops to (s-1, 0, 0)
    idx = np.arange(0, s + 1)
    Ub[..., s - 1, 0] += Ts[..., idx, s - idx].sum(axis=-1)
    # c >= 1 states: same cell one shell down
    Ub[..., :s, :s] += Ts[..., :s, :s]
    idx2 = np.arange(1, s)
    Ub[..., idx2, s - idx2] -= Ts[..., idx2, s - idx2]


# --- orchestration --------------------------------------------------------


def _atomic_write(path: str, payload: dict) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".ck-", dir=d)
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_checkpoint(path: str, engine: str, n_max: int) -> dict | None:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None
    if data.get("engine") != engine or data.get("n_max") != n_max:
        return None
    return data


def _grid_bytes(engine: str, n_max: int) -> int:
    if engine == "av4123-4231-4312":
        per_set = (n_max + 1) ** 2 * 8
        sets = 2.2
    else:
        per_set = sum((s + 1) ** 2 for s in range(n_max + 1)) * 8
        sets = 2.5
    return int(per_set * sets)


def _batch_size(engine: str, n_max: int) -> int:
    return max(1, min(_BATCH_CAP, _BATCH_BYTES // max(1, _grid_bytes(engine, n_max))))


def _fast_counts(
    engine: str, sweep, n_max: int, *, checkpoint: str | None = None
) -> list[int]:
    state = _load_checkpoint(checkpoint, engine, n_max) if checkpoint else None
    if state is None:
        logs = sweep(n_max, _MagArith())
        state = {
            "engine": engine,
            "n_max": n_max,
            "maxbits": int(max(logs)) + 1,
            "residues": {},
        }
        if checkpoint:
            _atomic_write(checkpoint, state)
    need_bits = state["maxbits"] + _MARGIN_BITS
    count = max(2, need_bits // 30 + 1)  # each prime contributes just under 31 bits
    primes = primes31(count)
    while sum(math.log2(p) for p in primes) <= need_bits:
        primes = primes31(len(primes) + 1)
    residues: dict[str, list[int]] = state["residues"]
    todo = [p for p in primes if str(p) not in residues]
    batch = _batch_size(engine, n_max)
    for i in range(0, len(todo), batch):
        chunk = todo[i : i + batch]
        rows = sweep(n_max, _ModArith(chunk))  # rows[level][j] = a_level mod chunk[j]
        for j, p in enumerate(chunk):
            residues[str(p)] = [row[j] for row in rows]
        if checkpoint:
            _atomic_write(checkpoint, state)
    counts = [
        crt_combine([(p, residues[str(p)][e]) for p in primes])
        for e in range(n_max + 1)
    ]
    _verify_prefix(engine, counts)
    return counts


def _verify_prefix(engine: str, counts: list[int]) -> None:
    from . import engines

    k = min(_PREFIX_CHECK, len(counts) - 1)
    exact = engines.ENGINES[engine](k, method="exact")
    if counts[: k + 1] != exact:
        raise RuntimeError(
            f"{engine}: modular reconstruction disagrees with the exact engine "
            f"on the first {k + 1} terms — {counts[: k + 1]} vs {exact}"
        )


def av4123_4231_4312_counts_fast(n_max: int, *, checkpoint: str | None = None):
    return _fast_counts("av4123-4231-4312", _sweep_a6_1, n_max, checkpoint=checkpoint)


def av4123_4231_counts_fast(n_max: int, *, checkpoint: str | None = None):
    def sweep(n, ring):
        return _sweep_shells(n, ring, _a6_2_closure, _a6_2_emit)

    return _fast_counts("av4123-4231", sweep, n_max, checkpoint=checkpoint)


def av4123_4312_counts_fast(n_max: int, *, checkpoint: str | None = None):
    def sweep(n, ring):
        return _sweep_shells(n, ring, _a6_3_closure, _a6_3_emit)

    return _fast_counts("av4123-4312", sweep, n_max, checkpoint=checkpoint)


def av4231_4321_counts_fast(n_max: int, *, checkpoint: str | None = None):
    def sweep(n, ring):
        return _sweep_shells(n, ring, _a6_4_closure, _a6_4_emit)

    return _fast_counts("av4231-4321", sweep, n_max, checkpoint=checkpoint)
