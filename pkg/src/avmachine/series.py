"""Truncated power series for the counting systems and relation guessing.

Two series types live here:

* RationalSeries — univariate, Fraction coefficients, with an explicit
  accuracy order.  Products and derivatives shrink the order the way the
  data actually degrades (a derivative of a series known to order N is only
  known to order N-1), which keeps the differential-equation fitting honest
  about how many coefficients it may trust.

* MultiSeries — multivariate with integer coefficients, one distinguished
  size variable ``x`` plus named catalytic variables.  The counting systems
  iterate functional equations over these.

Truncation policy for MultiSeries: a term is kept iff its x-degree plus its
total catalytic degree is at most the order N.  This is sound because in
every system here a catalytic variable counts container entries, and each
container entry must be popped as one later output letter before the walk
can finish — so a term x^i * (catalytic degree j) only ever feeds output
coefficients of x^(i+j) and beyond.  Dropping i + j > N therefore cannot
change the reported coefficients through x^N.

growth_estimate() summarizes how fast a counting sequence grows: successive
ratios, n-th roots (safe for integers of thousands of bits), and Aitken
delta-squared acceleration of the ratio tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


# --- univariate, exact coefficients -----------------------------------------


class RationalSeries:
    """A power series known through x**order, with Fraction coefficients."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order: int | None = None):
        cs = [Fraction(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("order must be >= 0")
        cs = cs[: order + 1] + [Fraction(0)] * (order + 1 - len(cs))
        self.coeffs = cs
        self.order = order

    @classmethod
    def from_ints(cls, seq) -> "RationalSeries":
        return cls([Fraction(v) for v in seq])

    @classmethod
    def egf_from_counts(cls, seq) -> "RationalSeries":
        """Exponential generating function: coefficient i is seq[i] / i!."""
        return cls(
            [Fraction(v, math.factorial(i)) for i, v in enumerate(seq)]
        )

    def coeff(self, i: int) -> Fraction:
        if i > self.order:
            raise IndexError(f"coefficient {i} beyond known order {self.order}")
        return self.coeffs[i]

    def __add__(self, other: "RationalSeries") -> "RationalSeries":
        n = min(self.order, other.order)
        return RationalSeries(
            [self.coeffs[i] + other.coeffs[i] for i in range(n + 1)], n
        )

    def __sub__(self, other: "RationalSeries") -> "RationalSeries":
        n = min(self.order, other.order)
        return RationalSeries(
            [self.coeffs[i] - other.coeffs[i] for i in range(n + 1)], n
        )

    def __mul__(self, other: "RationalSeries") -> "RationalSeries":
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a:
                for j in range(n + 1 - i):
                    b = other.coeffs[j]
                    if b:
                        out[i + j] += a * b
        return RationalSeries(out, n)

    def scale(self, c) -> "RationalSeries":
        c = Fraction(c)
        return RationalSeries([c * v for v in self.coeffs], self.order)

    def derivative(self) -> "RationalSeries":
        if self.order == 0:
            raise ValueError("cannot differentiate a series known only at order 0")
        return RationalSeries(
            [i * self.coeffs[i] for i in range(1, self.order + 1)],
            self.order - 1,
        )

    def mul_x(self, k: int = 1) -> "RationalSeries":
        """Multiply by x**k; the accuracy order grows with the valuation."""
        return RationalSeries(
            [Fraction(0)] * k + self.coeffs, self.order + k
        )

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:8])
        tail = ", ..." if self.order >= 8 else ""
        return f"RationalSeries([{head}{tail}], order={self.order})"


# --- multivariate, integer coefficients ---------------------------------------


class MultiSeries:
    """Integer-coefficient series in x plus named catalytic variables.

    Terms live in a dict keyed by exponent tuples (aligned with ``vars``,
    where vars[0] must be "x").  All operations enforce the cap
    x-degree + total catalytic degree <= order; see the module docstring
    for why this truncation is exact for the systems iterated here.
    """

    __slots__ = ("vars", "order", "terms")

    def __init__(self, vars: tuple[str, ...], order: int, terms=None):
        if not vars or vars[0] != "x":
            raise ValueError('vars must start with the size variable "x"')
        if len(set(vars)) != len(vars):
            raise ValueError("duplicate variable names")
        self.vars = tuple(vars)
        self.order = order
        self.terms: dict[tuple[int, ...], int] = {}
        if terms:
            for exps, c in terms.items():
                self._acc(tuple(exps), c)

    # -- internals --

    def _keep(self, exps: tuple[int, ...]) -> bool:
        return exps[0] + sum(exps[1:]) <= self.order

    def _acc(self, exps: tuple[int, ...], c: int) -> None:
        if c == 0 or not self._keep(exps):
            return
        t = self.terms
        v = t.get(exps, 0) + c
        if v:
            t[exps] = v
        else:
            del t[exps]

    def _idx(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise KeyError(f"no variable {var!r} in {self.vars}") from None

    def _like(self, terms=None) -> "MultiSeries":
        out = MultiSeries.__new__(MultiSeries)
        out.vars = self.vars
        out.order = self.order
        out.terms = terms if terms is not None else {}
        return out

    def _check_compat(self, other: "MultiSeries") -> None:
        if self.vars != other.vars or self.order != other.order:
            raise ValueError(
                f"incompatible series: {self.vars}@{self.order} vs "
                f"{other.vars}@{other.order}"
            )

    # -- constructors --

    @classmethod
    def zero(cls, vars: tuple[str, ...], order: int) -> "MultiSeries":
        return cls(vars, order)

    @classmethod
    def one(cls, vars: tuple[str, ...], order: int) -> "MultiSeries":
        s = cls(vars, order)
        s.terms[(0,) * len(vars)] = 1
        return s

    def copy(self) -> "MultiSeries":
        return self._like(dict(self.terms))

    # -- ring ops --

    def __add__(self, other: "MultiSeries") -> "MultiSeries":
        self._check_compat(other)
        out = self.copy()
        for exps, c in other.terms.items():
            out._acc(exps, c)
        return out

    def __sub__(self, other: "MultiSeries") -> "MultiSeries":
        self._check_compat(other)
        out = self.copy()
        for exps, c in other.terms.items():
            out._acc(exps, -c)
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiSeries)
            and self.vars == other.vars
            and self.order == other.order
            and self.terms == other.terms
        )

    def __hash__(self):
        raise TypeError("MultiSeries is mutable-ish; not hashable")

    def scale(self, c: int) -> "MultiSeries":
        if c == 0:
            return self._like()
        return self._like({e: c * v for e, v in self.terms.items()})

    def mul(self, other: "MultiSeries") -> "MultiSeries":
        self._check_compat(other)
        out = self._like()
        # iterate the smaller operand outside
        a, b = (self.terms, other.terms)
        if len(a) > len(b):
            a, b = b, a
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                out._acc(tuple(i + j for i, j in zip(e1, e2)), c1 * c2)
        return out

    def mul_var(self, var: str, k: int = 1) -> "MultiSeries":
        """Multiply by var**k."""
        i = self._idx(var)
        out = self._like()
        for exps, c in self.terms.items():
            e = list(exps)
            e[i] += k
            out._acc(tuple(e), c)
        return out

    # -- the catalytic toolkit --

    def slice0(self, var: str) -> "MultiSeries":
        """Set var = 0: keep only terms where var does not appear."""
        i = self._idx(var)
        return self._like(
            {e: c for e, c in self.terms.items() if e[i] == 0}
        )

    def shift_down(self, var: str) -> "MultiSeries":
        """(S - S|var=0) / var: drop the var-free part, lower var by one."""
        i = self._idx(var)
        out = self._like()
        for exps, c in self.terms.items():
            if exps[i] == 0:
                continue
            e = list(exps)
            e[i] -= 1
            out._acc(tuple(e), c)
        return out

    def div_var(self, var: str, k: int = 1) -> "MultiSeries":
        """Divide by var**k, requiring exact divisibility (unlike shift_down,
        which silently removes the var-free part first)."""
        i = self._idx(var)
        out = self._like()
        for exps, c in self.terms.items():
            if exps[i] < k:
                raise ValueError(
                    f"term {exps} not divisible by {var}**{k}"
                )
            e = list(exps)
            e[i] -= k
            out._acc(tuple(e), c)
        return out

    def subst(self, src: str, dst: str) -> "MultiSeries":
        """Rename src to dst, merging exponents (sets src := dst)."""
        i, j = self._idx(src), self._idx(dst)
        if i == j:
            return self.copy()
        out = self._like()
        for exps, c in self.terms.items():
            e = list(exps)
            e[j] += e[i]
            e[i] = 0
            out._acc(tuple(e), c)
        return out

    def geom(self, var: str) -> "MultiSeries":
        """Multiply by 1/(1 - var) = 1 + var + var^2 + ... up to the cap."""
        i = self._idx(var)
        out = self._like()
        for exps, c in self.terms.items():
            room = self.order - exps[0] - sum(exps[1:])
            e = list(exps)
            for _ in range(room + 1):
                out._acc(tuple(e), c)
                e[i] += 1
        return out

    def divided_difference(self, var: str, other_var: str) -> "MultiSeries":
        """(S(var) - S(var := other_var)) / (var - other_var).

        Requires other_var absent from S.  Per term, var^k spreads to the
        homogeneous sum over var^i * other_var^j with i + j = k - 1 (var-free
        terms cancel), which is the coefficient-level form of the quotient.
        """
        i, j = self._idx(var), self._idx(other_var)
        out = self._like()
        for exps, c in self.terms.items():
            if exps[j] != 0:
                raise ValueError(
                    f"divided_difference target {other_var!r} already present"
                )
            k = exps[i]
            e = list(exps)
            for a_exp in range(k):  # k terms, total degree k-1; none if k == 0
                e[i] = a_exp
                e[j] = k - 1 - a_exp
                out._acc(tuple(e), c)
        return out

    def extend_vars(self, vars: tuple[str, ...]) -> "MultiSeries":
        """Re-embed into a superset variable tuple (same order)."""
        pos = {v: k for k, v in enumerate(vars)}
        missing = [v for v in self.vars if v not in pos]
        if missing or vars[0] != "x":
            raise ValueError(f"{vars} does not extend {self.vars}")
        out = MultiSeries(vars, self.order)
        for exps, c in self.terms.items():
            e = [0] * len(vars)
            for v, ex in zip(self.vars, exps):
                e[pos[v]] = ex
            out._acc(tuple(e), c)
        return out

    # -- extraction --

    def coeff(self, **exps) -> int:
        """Coefficient of the monomial given by keyword exponents."""
        key = tuple(exps.get(v, 0) for v in self.vars)
        for v in exps:
            self._idx(v)
        return self.terms.get(key, 0)

    def project_x(self) -> list[int]:
        """Coefficient list in x; every catalytic variable must be gone."""
        out = [0] * (self.order + 1)
        for exps, c in self.terms.items():
            if any(exps[1:]):
                raise ValueError(
                    "catalytic variables still present; slice them first"
                )
            out[exps[0]] = c
        return out

    def __repr__(self) -> str:
        return (
            f"MultiSeries(vars={self.vars}, order={self.order}, "
            f"terms={len(self.terms)})"
        )


# --- growth estimation ---------------------------------------------------


def log2_int(n: int) -> float:
    """log2 of a positive integer, safe for values far beyond float range."""
    if n <= 0:
        raise ValueError("log2_int needs a positive integer")
    bl = n.bit_length()
    if bl <= 53:
        return math.log2(n)
    shift = bl - 53
    return shift + math.log2(n >> shift)


def _aitken(seq: list[float]) -> float | None:
    """Last stable Aitken delta-squared value of a convergent sequence."""
    best = None
    for k in range(len(seq) - 2):
        d2 = seq[k + 2] - 2 * seq[k + 1] + seq[k]
        if abs(d2) < 1e-12:
            continue
        best = seq[k + 2] - (seq[k + 2] - seq[k + 1]) ** 2 / d2
    return best


@dataclass
class GrowthEstimate:
    n: int
    ratio: float
    nth_root: float
    aitken: float | None

    def report(self) -> str:
        lines = [
            f"terms used: through n = {self.n}",
            f"last ratio a_n / a_(n-1): {self.ratio:.6f}",
            f"n-th root of a_n:        {self.nth_root:.6f}",
        ]
        if self.aitken is not None:
            lines.append(f"Aitken-accelerated ratio: {self.aitken:.6f}")
        else:
            lines.append("Aitken acceleration: not stable on this tail")
        return "\n".join(lines)


def growth_estimate(counts, *, tail: int = 20) -> GrowthEstimate:
    """Estimate the exponential growth rate of a positive counting sequence.

    Ratios are computed exactly as Fractions before conversion to float, so
    integer size never overflows; the n-th root goes through log2_int.  The
    Aitken extrapolation runs on the last `tail` ratios.
    """
    counts = list(counts)
    n = len(counts) - 1
    if n < 2 or counts[-1] <= 0 or counts[-2] <= 0:
        raise ValueError("need at least three terms of a positive sequence")
    ratios = [
        float(Fraction(counts[i], counts[i - 1]))
        for i in range(1, n + 1)
        if counts[i] > 0 and counts[i - 1] > 0
    ]
    return GrowthEstimate(
        n=n,
        ratio=ratios[-1],
        nth_root=2.0 ** (log2_int(counts[n]) / n),
        aitken=_aitken(ratios[-tail:]),
    )
