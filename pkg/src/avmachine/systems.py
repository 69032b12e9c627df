"""Catalytic functional-equation systems for the machine counting sequences.

Each system encodes, equation by equation, how the container states of one
machine evolve: a catalytic variable per tracked container statistic, one
component series per state family.  Iterating the equations from zero
converges coefficientwise to the truncated solution, because every right
hand side is a monotone polynomial map (subtractions only occur inside
(S - S|v=0)/v combinations, which drop terms rather than negate them), so
coefficients grow toward their true values and freeze.

The iteration protocol mirrors that convergence: run the step map to an
exact fixpoint of the full multivariate state, record the projected output
coefficients after every pass, and complain loudly if the trace ever shows a
coefficient changing after the pass where it should already have frozen --
coefficient x^i must be final from pass 2i+1 onward (each pass extends the
trustworthy prefix by at least half an order: bypass/push/pop steps each add
at least one to x-degree plus catalytic degree, and a length-i prefix of the
output needs at most 2i such moves).

Pipelines apply degree-decreasing operations (shift_down, div_var,
divided_difference) before the multiplications that compensate them, which
keeps the global truncation cap exact (see series.MultiSeries).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .series import MultiSeries


class SystemStabilityError(RuntimeError):
    """The iteration failed to reach or respect its convergence guarantees."""


# --- helpers ---------------------------------------------------------------


def _catalan_coeffs(order: int) -> list[int]:
    """Catalan numbers 1, 1, 2, 5, 14, ... up to index `order`."""
    cat = [1] * (order + 1)
    for n in range(1, order + 1):
        cat[n] = sum(cat[k] * cat[n - 1 - k] for k in range(n))
    return cat


def _series_from_x_coeffs(vars, order, coeffs, start=0):
    s = MultiSeries(vars, order)
    for i in range(start, min(len(coeffs), order + 1)):
        if coeffs[i]:
            s.terms[(i,) + (0,) * (len(vars) - 1)] = coeffs[i]
    return s


# --- system definitions ------------------------------------------------------
#
# A factory takes the truncation order and returns (initial_state, step,
# output): `state` is a dict of component MultiSeries, `step` maps it to the
# next state, `output` projects the finished object to x-coefficients.


def _sys_catalan(order: int):
    vars = ("x", "u")
    one = MultiSeries.one(vars, order)
    zero = MultiSeries.zero(vars, order)

    def step(st):
        f, g = st["f"], st["g"]
        fg = f + g
        return {
            "f": one + fg.mul_var("x") + f.shift_down("u").mul_var("x"),
            "g": fg.mul_var("u"),
        }

    def output(st):
        return st["f"].slice0("u").project_x()

    return {"f": zero, "g": zero}, step, output


def _sys_schroeder(order: int):
    vars = ("x", "u")
    one = MultiSeries.one(vars, order)
    zero = MultiSeries.zero(vars, order)

    def step(st):
        f, g = st["f"], st["g"]
        f0 = f.slice0("u")
        return {
            "f": one + (f + g).mul_var("x") + f.shift_down("u").mul_var("x"),
            "g": ((f - f0) + g).scale(2).mul_var("u") + f0.mul_var("u"),
        }

    def output(st):
        return st["f"].slice0("u").project_x()

    return {"f": zero, "g": zero}, step, output


def _sys_fib_plus(order: int):
    # Components: E counts finished walks; S tracks a single marked descent
    # with u container entries beyond it; D tracks a doubled one.  The bare
    # E term in the S_n equation (no x factor) is the hand-off of a finished
    # prefix into the still-open suffix, not an emission.
    vars = ("x", "u")
    one = MultiSeries.one(vars, order)
    zero = MultiSeries.zero(vars, order)

    def step(st):
        E, Sp, Sn = st["E"], st["Sp"], st["Sn"]
        Dp, Dn = st["Dp"], st["Dn"]
        S = Sn + Sp
        D = Dn + Dp
        return {
            "E": one + E.mul_var("x") + Sp.slice0("u").mul_var("x"),
            "Sp": S.mul_var("x")
            + Sp.shift_down("u").mul_var("x")
            + Dp.slice0("u").mul_var("x"),
            "Sn": E + S.mul_var("u") + D.mul_var("u", 2),
            "Dp": D.mul_var("x") + Dp.shift_down("u").mul_var("x"),
            "Dn": S,
        }

    def output(st):
        return st["E"].slice0("u").project_x()

    state = {"E": zero, "Sp": zero, "Sn": zero, "Dp": zero, "Dn": zero}
    return state, step, output


def _sys_fib_minus(order: int):
    # Plain context-free grammar over x alone: s is the full object, w/r the
    # two kinds of open windows, each split by whether the window is at the
    # start (p) or strictly inside (n).
    vars = ("x",)
    one = MultiSeries.one(vars, order)
    zero = MultiSeries.zero(vars, order)

    def step(st):
        s, wp, wn = st["s"], st["wp"], st["wn"]
        rp, rn = st["rp"], st["rn"]
        return {
            "s": one + s.mul_var("x") + wn.mul(s).mul_var("x"),
            "wp": one
            + wp.mul_var("x")
            + wn.mul(wp).mul_var("x")
            + rn.mul(wp).mul_var("x"),
            "wn": wp.mul_var("x")
            + wn.mul(wp).mul_var("x")
            + rn.mul(wp).mul_var("x"),
            "rp": one + rp.mul_var("x") + wn.mul(rp).mul_var("x"),
            "rn": rp.mul_var("x") + wn.mul(rp).mul_var("x"),
        }

    def output(st):
        return st["s"].project_x()

    state = {"s": zero, "wp": zero, "wn": zero, "rp": zero, "rn": zero}
    return state, step, output


def _sys_av4123_4231_4312(order: int):
    # A: container is two descending runs (a marks the low run); B: the low
    # run has been capped by a bigger entry (b marks the middle layer).
    vars = ("x", "a", "b")
    one = MultiSeries.one(vars, order)
    zero = MultiSeries.zero(vars, order)

    def step(st):
        A, B = st["A"], st["B"]
        return {
            "A": one
            + A.shift_down("a").mul_var("x")
            + A.mul_var("a")
            + B.slice0("a").subst("b", "a").mul_var("x"),
            "B": A.shift_down("a").mul_var("b").mul_var("x").geom("b").geom("x")
            + B.mul_var("b").mul_var("x").geom("b").geom("x")
            + B.shift_down("a").mul_var("x").geom("x"),
        }

    def output(st):
        return st["A"].slice0("a").slice0("b").project_x()

    return {"A": zero, "B": zero}, step, output


def _sys_av4123_4231(order: int):
    # Same A as above; B's transitions work modulo whole Catalan blocks, so
    # the Catalan generating series C = x + 2x^2 + 5x^3 + ... enters as a
    # fixed coefficient series.
    vars = ("x", "a", "b")
    one = MultiSeries.one(vars, order)
    zero = MultiSeries.zero(vars, order)
    C = _series_from_x_coeffs(vars, order, _catalan_coeffs(order), start=1)
    one_plus_C = one + C

    def step(st):
        A, B = st["A"], st["B"]
        return {
            "A": one
            + A.shift_down("a").mul_var("x")
            + A.mul_var("a")
            + B.slice0("a").subst("b", "a").mul_var("x"),
            "B": A.shift_down("a").mul(C).mul_var("b").geom("b")
            + B.mul(C).mul_var("b").geom("b")
            + B.shift_down("a").mul(one_plus_C).mul_var("x"),
        }

    def output(st):
        return st["A"].slice0("a").slice0("b").project_x()

    return {"A": zero, "B": zero}, step, output


def _sys_av4123_4312(order: int):
    # A as before but in (a); B needs three catalytic slots, and the A mass
    # enters B through the divided difference (A(a) - A(b)) / (a - b).
    vars = ("x", "a", "b", "c")
    one = MultiSeries.one(vars, order)
    zero = MultiSeries.zero(vars, order)

    def step(st):
        A, B = st["A"], st["B"]
        dd = A.divided_difference("a", "b")
        return {
            "A": one
            + A.shift_down("a").mul_var("x")
            + A.mul_var("a")
            + B.slice0("b").subst("c", "a").mul_var("x"),
            "B": dd.mul_var("c").mul_var("x").geom("c").geom("x")
            + B.mul_var("c").mul_var("x").geom("c").geom("x")
            + B.shift_down("b").mul_var("x").geom("x"),
        }

    def output(st):
        return st["A"].slice0("a").slice0("b").slice0("c").project_x()

    return {"A": zero, "B": zero}, step, output


def _sys_av4231_4321(order: int):
    # Two positive/negative pairs; the divided differences substitute the
    # A- and B-masses at the two boundary values b and c of the new slot.
    vars = ("x", "a", "b", "c")
    one = MultiSeries.one(vars, order)
    zero = MultiSeries.zero(vars, order)

    def dd_bc(S):
        # (S(c) - S(b)) / (c - b) for S a series in the catalytic slot a
        return S.divided_difference("a", "b").subst("a", "c")

    def step(st):
        Ap, An = st["Ap"], st["An"]
        Bp, Bn = st["Bp"], st["Bn"]
        Asum = Ap + An
        Bsum = Bp + Bn
        return {
            "Ap": one
            + Asum.mul_var("x")
            + Ap.shift_down("a").mul_var("x")
            + Bp.slice0("c").subst("b", "a").div_var("a").mul_var("x"),
            "An": Asum.mul_var("a"),
            "Bp": Bsum.mul_var("x") + Bp.shift_down("c").mul_var("x"),
            "Bn": Bsum.mul_var("a")
            + dd_bc(Asum).mul_var("b", 2)
            + dd_bc(Bsum.subst("b", "c")).mul_var("b", 2),
        }

    def output(st):
        return st["Ap"].slice0("a").slice0("b").slice0("c").project_x()

    state = {"Ap": zero, "An": zero, "Bp": zero, "Bn": zero}
    return state, step, output


SYSTEMS = {
    "catalan": _sys_catalan,
    "schroeder": _sys_schroeder,
    "fib-plus": _sys_fib_plus,
    "fib-minus": _sys_fib_minus,
    "av4123-4231-4312": _sys_av4123_4231_4312,
    "av4123-4231": _sys_av4123_4231,
    "av4123-4312": _sys_av4123_4312,
    "av4231-4321": _sys_av4231_4321,
}


# --- iteration -------------------------------------------------------------


@dataclass
class SystemRun:
    name: str
    order: int
    coefficients: list[int]
    iterations: int
    history: list[list[int]] = field(repr=False, default_factory=list)


def iterate_system(name: str, order: int, *, keep_history: bool = False) -> SystemRun:
    """Iterate a registered system to its exact fixpoint at the given order.

    Raises SystemStabilityError if no fixpoint appears within 4*order + 20
    passes, or if any output coefficient x^i is still moving after pass
    2i + 1 (both would mean an equation violates the convergence argument
    in the module docstring — i.e. a wrong system, not a wrong sequence).
    """
    try:
        factory = SYSTEMS[name]
    except KeyError:
        raise ValueError(
            f"unknown system {name!r}; choose from {sorted(SYSTEMS)}"
        ) from None
    state, step, output = factory(order)
    history = [output(state)]
    limit = 4 * order + 20
    for it in range(1, limit + 1):
        new_state = step(state)
        history.append(output(new_state))
        if new_state == state:
            break
        state = new_state
    else:
        raise SystemStabilityError(
            f"{name}: no fixpoint within {limit} passes at order {order}"
        )
    final = history[-1]
    for i in range(order + 1):
        freeze = 2 * i + 1
        for t in range(freeze, len(history)):
            if history[t][i] != final[i]:
                raise SystemStabilityError(
                    f"{name}: coefficient x^{i} moved at pass {t} "
                    f"(expected frozen from pass {freeze})"
                )
    return SystemRun(
        name=name,
        order=order,
        coefficients=final,
        iterations=it,
        history=history if keep_history else [],
    )
