"""Fit algebraic and differential relations to counting sequences.

Given the first N coefficients of a generating function f, two fitters look
for exact relations:

* guess_algebraic: a bivariate polynomial P(x, f) = 0 with integer
  coefficients, degree at most d_x in x and d_f in f.

* guess_ade: an algebraic differential equation, an integer-coefficient
  polynomial in x, f, f', ..., f^(k) of total degree at most d, identically
  zero.  With egf=True the sequence is first divided by n! so the relation
  is sought for the exponential generating function.

Method: each candidate relation is a null vector of the matrix whose columns
are candidate monomials evaluated as truncated series and whose rows are
coefficient indices.  The last ten rows are withheld from the fit and used
to reject spurious fits (a relation that merely interpolates the fitted rows
almost never survives ten extra equations).  Degree pairs are swept smallest
first, so the returned relation is minimal in (f-degree, x-degree).

A fast path makes the common no-relation outcome cheap: the fit matrix is
first reduced modulo a fixed 31-bit prime, and if it has full column rank
there, it has full column rank over the rationals, so no relation exists at
those degrees and the exact elimination is skipped.  Exact Fraction row
reduction runs only for the rare candidate hits.

Ten held-out rows are the default; when the sequence barely covers the
monomial count the holdout shrinks, but never below two rows — a fit is
only ever accepted with at least two coefficients it was not trained on
(and the returned relation is re-verified against every supplied term).

Everything is deterministic: fixed monomial generation order, first-free-
column null vector, primitive integer scaling, and the sign convention that
the highest monomial (ordered by f-part, then x-exponent) gets a positive
coefficient.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_PRIME = 2**31 - 1
_HOLDOUT = 10
_MIN_HOLDOUT = 2


def _pick_holdout(rows_avail: int, ncols: int) -> int:
    """Largest holdout we can afford, between _MIN_HOLDOUT and _HOLDOUT."""
    h = min(_HOLDOUT, rows_avail - ncols)
    if h < _MIN_HOLDOUT:
        raise InsufficientTerms(
            f"need at least {ncols + _MIN_HOLDOUT} usable coefficients "
            f"for {ncols} candidate monomials; got {rows_avail}"
        )
    return h


class InsufficientTerms(ValueError):
    """Too few coefficients for the requested degree bounds."""


# --- small exact / modular linear algebra --------------------------------------


def _rank_mod_p(mat: np.ndarray, p: int = _PRIME) -> int:
    """Rank of an int64 matrix over GF(p).  mat is consumed."""
    m, n = mat.shape
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if mat[i, c] % p:
                piv = i
                break
        if piv is None:
            continue
        mat[[r, piv]] = mat[[piv, r]]
        inv = pow(int(mat[r, c]) % p, -1, p)
        row = (mat[r] * inv) % p
        mat[r] = row
        below = mat[r + 1 :]
        if below.size:
            factors = below[:, c : c + 1] % p
            below -= factors * row  # |entries| < p^2 < 2^62, fits int64
            below %= p
        r += 1
        if r == m:
            break
    return r


def _nullspace_exact(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Nullspace basis of an exact matrix, one canonical vector per free
    column, ordered by free column index."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [list(map(Fraction, row)) for row in rows]
    piv_of_col: dict[int, int] = {}
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        piv_of_col[c] = r
        r += 1
        if r == m:
            break
    basis = []
    for fc in range(n):
        if fc in piv_of_col:
            continue
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for pc, pr in piv_of_col.items():
            v[pc] = -a[pr][fc]
        basis.append(v)
    return basis


def _to_primitive_int(vec: list[Fraction]) -> list[int]:
    den = math.lcm(*(f.denominator for f in vec)) if vec else 1
    ints = [int(f * den) for f in vec]
    g = math.gcd(*ints) if any(ints) else 1
    return [v // g for v in ints]


def _frac_mod(f: Fraction, p: int = _PRIME) -> int:
    return (f.numerator % p) * pow(f.denominator % p, -1, p) % p


# --- truncated-series helpers on plain lists --------------------------------
#
# Coefficients stay int when the input is int (bigint products are much
# faster than Fraction products); the EGF path brings Fractions in naturally.


def _poly_mul(a: list, b: list, order: int) -> list:
    out = [0] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai:
            for j in range(min(len(b), order + 1 - i)):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
    return out


def _derivative(a: list) -> list:
    return [i * a[i] for i in range(1, len(a))]


# --- algebraic relations ----------------------------------------------------


@dataclass(frozen=True)
class PolyRelation:
    """P(x, f) = 0 as a list of (x_exp, f_exp, coef), coef integer."""

    monomials: tuple[tuple[int, int, int], ...]

    def coefficient(self, x_exp: int, f_exp: int) -> int:
        for i, j, c in self.monomials:
            if (i, j) == (x_exp, f_exp):
                return c
        return 0

    def degrees(self) -> tuple[int, int]:
        return (
            max(i for i, _, _ in self.monomials),
            max(j for _, j, _ in self.monomials),
        )

    def as_json(self) -> str:
        return json.dumps(
            {
                "kind": "algebraic",
                "monomials": [
                    {"x": i, "f": j, "coef": str(c)}
                    for i, j, c in self.monomials
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "PolyRelation":
        data = json.loads(text)
        if data.get("kind") != "algebraic":
            raise ValueError("not an algebraic relation")
        return cls(
            tuple(
                (int(m["x"]), int(m["f"]), int(m["coef"]))
                for m in data["monomials"]
            )
        )

    def __str__(self) -> str:
        def mono(i, j):
            parts = []
            if i:
                parts.append("x" if i == 1 else f"x^{i}")
            if j:
                parts.append("f" if j == 1 else f"f^{j}")
            return "*".join(parts) or "1"

        terms = sorted(self.monomials, key=lambda m: (-m[1], -m[0]))
        out = ""
        for i, j, c in terms:
            sign = "-" if c < 0 else ("+" if out else "")
            mag = abs(c)
            if not (i or j):
                body = str(mag)
            elif mag == 1:
                body = mono(i, j)
            else:
                body = f"{mag}*{mono(i, j)}"
            out += f" {sign} {body}" if out else f"{sign}{body}"
        return out or "0"


def verify_algebraic(rel: PolyRelation, coeffs, *, order: int | None = None) -> bool:
    """Check P(x, f) = 0 through x**order for f given by its coefficients."""
    coeffs = list(coeffs)
    n = len(coeffs) - 1 if order is None else min(order, len(coeffs) - 1)
    d_f = max(j for _, j, _ in rel.monomials)
    powers = [[1] + [0] * n]
    for _ in range(d_f):
        powers.append(_poly_mul(powers[-1], coeffs, n))
    acc = [0] * (n + 1)
    for i, j, c in rel.monomials:
        pw = powers[j]
        for r in range(i, n + 1):
            v = pw[r - i]
            if v:
                acc[r] += c * v
    return all(v == 0 for v in acc)


def guess_algebraic(coeffs, d_x: int, d_f: int) -> PolyRelation | None:
    """Search for a minimal polynomial relation P(x, f) = 0.

    Sweeps f-degree 1..d_f then x-degree 0..d_x and returns the first
    relation that also fits ten held-out coefficients.  None means no
    relation within the bounds passed the validation.
    """
    coeffs = list(coeffs)
    nterms = len(coeffs)
    holdout = _pick_holdout(nterms, (d_x + 1) * (d_f + 1))
    n = nterms - 1
    powers = [[1] + [0] * n]
    for _ in range(d_f):
        powers.append(_poly_mul(powers[-1], coeffs, n))
    # column for (i, j) = x^i f^j: powers[j] shifted by i
    col_mod: dict[tuple[int, int], np.ndarray] = {}
    for j in range(d_f + 1):
        base = [v % _PRIME for v in powers[j]]
        for i in range(d_x + 1):
            col_mod[(i, j)] = np.array(
                [0] * i + base[: n + 1 - i], dtype=np.int64
            )
    for df in range(1, d_f + 1):
        for dx in range(d_x + 1):
            pairs = [(i, j) for j in range(df + 1) for i in range(dx + 1)]
            fit_rows = n + 1 - holdout
            mat = np.stack([col_mod[p][:fit_rows] for p in pairs], axis=1)
            if _rank_mod_p(mat.copy()) == len(pairs):
                continue  # full rank over GF(p) => full rank over Q
            exact_rows = [
                [
                    Fraction(powers[j][r - i] if r >= i else 0)
                    for (i, j) in pairs
                ]
                for r in range(fit_rows)
            ]
            basis = _nullspace_exact(exact_rows)
            if not basis:
                continue  # the modular rank drop was a p-coincidence
            vec = basis[0]
            ints = _to_primitive_int(vec)
            rel = _assemble_poly(pairs, ints)
            if rel is not None and verify_algebraic(rel, coeffs):
                return rel
    return None


def _assemble_poly(pairs, ints) -> PolyRelation | None:
    monos = [
        (i, j, c) for (i, j), c in zip(pairs, ints) if c != 0
    ]
    if not monos:
        return None
    lead = max(monos, key=lambda m: (m[1], m[0]))
    if lead[2] < 0:
        monos = [(i, j, -c) for i, j, c in monos]
    return PolyRelation(tuple(sorted(monos, key=lambda m: (m[1], m[0]))))


# --- algebraic differential equations -------------------------------------


@dataclass(frozen=True)
class AdeRelation:
    """Sum of coef * x^x_exp * f^e0 * f'^e1 * ... = 0.

    f_exps[t] is the exponent of the t-th derivative; egf records whether
    the relation is about the exponential generating function.
    """

    monomials: tuple[tuple[int, tuple[int, ...], int], ...]
    egf: bool = False

    def order(self) -> int:
        return max(
            (len(e) - 1 for _, e, _ in self.monomials if any(e)), default=0
        )

    def as_json(self) -> str:
        return json.dumps(
            {
                "kind": "ade",
                "egf": self.egf,
                "monomials": [
                    {"x": i, "f_exps": list(e), "coef": str(c)}
                    for i, e, c in self.monomials
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "AdeRelation":
        data = json.loads(text)
        if data.get("kind") != "ade":
            raise ValueError("not a differential relation")
        return cls(
            tuple(
                (int(m["x"]), tuple(int(v) for v in m["f_exps"]), int(m["coef"]))
                for m in data["monomials"]
            ),
            egf=bool(data.get("egf", False)),
        )

    def __str__(self) -> str:
        names = ["f", "f'", "f''"] + [f"f^({t})" for t in range(3, 10)]

        def mono(i, exps):
            parts = []
            if i:
                parts.append("x" if i == 1 else f"x^{i}")
            for t, e in enumerate(exps):
                if e:
                    parts.append(names[t] if e == 1 else f"{names[t]}^{e}")
            return "*".join(parts) or "1"

        terms = sorted(self.monomials, key=lambda m: (m[1], m[0]), reverse=True)
        out = ""
        for i, exps, c in terms:
            sign = "-" if c < 0 else ("+" if out else "")
            mag = abs(c)
            if not (i or any(exps)):
                body = str(mag)
            elif mag == 1:
                body = mono(i, exps)
            else:
                body = f"{mag}*{mono(i, exps)}"
            out += f" {sign} {body}" if out else f"{sign}{body}"
        return out or "0"


def _ade_series(seq, egf: bool) -> list:
    if egf:
        return [Fraction(v, math.factorial(i)) for i, v in enumerate(seq)]
    return [v for v in seq]


def _ade_monomial_exponents(k: int, d: int):
    """Exponent tuples (x_exp, e_0..e_k), total degree <= d, fixed order."""
    out = []
    for exps in itertools.product(range(d + 1), repeat=k + 2):
        if sum(exps) <= d:
            out.append((exps[0], exps[1:]))
    out.sort()
    return out


def verify_ade(rel: AdeRelation, seq, *, order: int | None = None) -> bool:
    """Check the differential relation on a sequence prefix."""
    f = _ade_series(seq, rel.egf)
    k = rel.order()
    n = len(f) - 1 - k
    if order is not None:
        n = min(n, order)
    if n < 0:
        raise InsufficientTerms("sequence shorter than the relation's order")
    derivs = [list(f)]
    for _ in range(k):
        derivs.append(_derivative(derivs[-1]))
    acc = [0] * (n + 1)
    for i, exps, c in rel.monomials:
        term = [1]
        for t, e in enumerate(exps):
            for _ in range(e):
                term = _poly_mul(term, derivs[t], n)
        for r in range(i, n + 1):
            if r - i < len(term) and term[r - i]:
                acc[r] += c * term[r - i]
    return all(v == 0 for v in acc)


def guess_ade(seq, k: int, d: int, *, egf: bool = False) -> AdeRelation | None:
    """Search for a polynomial differential relation of order k, degree d.

    The candidate monomials are all products of x, f, f', ..., f^(k) with
    total degree at most d.  Rows through coefficient index N-k are fitted
    (every monomial is trustworthy there) minus ten held-out rows used for
    validation.  None means nothing within the bounds survived validation.
    """
    f = _ade_series(seq, egf)
    n = len(f) - 1
    monos = _ade_monomial_exponents(k, d)
    rows_avail = n + 1 - k
    holdout = _pick_holdout(rows_avail, len(monos))
    derivs = [list(f)]
    for _ in range(k):
        derivs.append(_derivative(derivs[-1]))
    valid = rows_avail - 1  # highest trustworthy coefficient index
    cols = []
    for x_exp, exps in monos:
        term = [1]
        for t, e in enumerate(exps):
            for _ in range(e):
                term = _poly_mul(term, derivs[t], valid)
        col = [Fraction(0)] * (valid + 1)
        for r in range(x_exp, valid + 1):
            if r - x_exp < len(term):
                col[r] = Fraction(term[r - x_exp])
        cols.append(col)
    fit_rows = valid + 1 - holdout
    mat = np.array(
        [[_frac_mod(cols[c][r]) for c in range(len(cols))] for r in range(fit_rows)],
        dtype=np.int64,
    )
    if _rank_mod_p(mat) == len(cols):
        return None
    exact_rows = [
        [cols[c][r] for c in range(len(cols))] for r in range(fit_rows)
    ]
    basis = _nullspace_exact(exact_rows)
    if not basis:
        return None
    ints = _to_primitive_int(basis[0])
    monomials = [
        (x_exp, exps, c)
        for (x_exp, exps), c in zip(monos, ints)
        if c != 0
    ]
    if not monomials:
        return None
    lead = max(monomials, key=lambda m: (m[1], m[0]))
    if lead[2] < 0:
        monomials = [(i, e, -c) for i, e, c in monomials]
    rel = AdeRelation(tuple(monomials), egf=egf)
    if verify_ade(rel, seq):
        return rel
    return None
