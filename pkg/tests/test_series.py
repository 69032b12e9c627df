"""Series arithmetic, the catalytic toolkit, system iteration, growth."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avmachine.engines import (
    av4123_4231_4312_counts,
    av4123_4231_counts,
    av4123_4312_counts,
    av4231_4321_counts,
    fib_minus_counts,
    fib_plus_counts,
)
from avmachine.series import (
    GrowthEstimate,
    MultiSeries,
    RationalSeries,
    growth_estimate,
    log2_int,
)
from avmachine.systems import SYSTEMS, SystemStabilityError, iterate_system

CATALAN = [math.comb(2 * n, n) // (n + 1) for n in range(31)]


# --- RationalSeries ------------------------------------------------------------


def test_rational_series_construction():
    s = RationalSeries([1, 2, 3])
    assert s.order == 2
    assert s.coeff(1) == 2
    padded = RationalSeries([1], order=3)
    assert padded.coeffs == [1, 0, 0, 0]
    with pytest.raises(IndexError):
        s.coeff(3)
    with pytest.raises(ValueError):
        RationalSeries([], order=-1)


def test_rational_series_orders_shrink_honestly():
    a = RationalSeries([1] * 6)  # order 5
    b = RationalSeries([1] * 4)  # order 3
    assert (a * b).order == 3
    assert (a + b).order == 3
    assert (a - b).order == 3
    assert a.derivative().order == 4
    assert a.mul_x(2).order == 7


def test_rational_series_arithmetic():
    geom = RationalSeries([1] * 8)
    one_minus_x = RationalSeries([1, -1], order=7)
    assert (geom * one_minus_x).coeffs == [1] + [0] * 7
    assert geom.derivative().coeffs == [1, 2, 3, 4, 5, 6, 7]
    assert geom.scale(Fraction(1, 2)).coeff(3) == Fraction(1, 2)
    assert (geom - geom).is_zero()
    with pytest.raises(ValueError):
        RationalSeries([1]).derivative()


def test_rational_series_egf():
    e = RationalSeries.egf_from_counts([1, 1, 2, 6, 24])
    assert e.coeffs == [1] * 5  # n! / n!


def test_catalan_satisfies_its_equation():
    f = RationalSeries.from_ints(CATALAN[:11])
    residual = (f * f).mul_x() - f + RationalSeries([1], order=10)
    assert residual.order == 10
    assert residual.is_zero()


# --- MultiSeries: basics --------------------------------------------------------


def ms(terms, vars=("x", "a"), order=6):
    return MultiSeries(vars, order, terms)


def test_multiseries_requires_x_first():
    with pytest.raises(ValueError, match='"x"'):
        MultiSeries(("a", "x"), 5)
    with pytest.raises(ValueError, match="duplicate"):
        MultiSeries(("x", "a", "a"), 5)


def test_multiseries_truncates_on_entry():
    s = ms({(2, 2): 1}, order=3)  # x^2 a^2 has weight 4 > 3
    assert s.terms == {}
    assert s.coeff(x=2, a=2) == 0


def test_multiseries_equality_and_hash():
    a = ms({(1, 1): 2})
    b = ms({(1, 1): 2})
    assert a == b
    assert a != ms({(1, 1): 3})
    with pytest.raises(TypeError):
        hash(a)


def test_multiseries_add_cancels_to_empty():
    a = ms({(1, 2): 5, (0, 0): 1})
    assert (a - a).terms == {}
    assert (a + a.scale(-1)).terms == {}


def test_multiseries_incompatible_operands():
    with pytest.raises(ValueError, match="incompatible"):
        ms({}) + MultiSeries(("x", "b"), 6)
    with pytest.raises(ValueError, match="incompatible"):
        ms({}).mul(MultiSeries(("x", "a"), 7))


def test_multiseries_unknown_variable():
    with pytest.raises(KeyError):
        ms({}).mul_var("z")
    with pytest.raises(KeyError):
        ms({(0, 0): 1}).coeff(z=1)


# A small strategy over two-variable series inside the cap.
def _series_strategy(order=6):
    exps = st.tuples(st.integers(0, order), st.integers(0, order)).filter(
        lambda e: e[0] + e[1] <= order
    )
    return st.dictionaries(exps, st.integers(-9, 9), max_size=8).map(
        lambda d: ms(d, order=order)
    )


@settings(max_examples=200, deadline=None)
@given(_series_strategy(), _series_strategy(), _series_strategy())
def test_multiseries_ring_laws(a, b, c):
    assert a.mul(b) == b.mul(a)
    assert a.mul(b.mul(c)) == a.mul(b).mul(c)
    assert a.mul(b + c) == a.mul(b) + a.mul(c)
    one = MultiSeries.one(a.vars, a.order)
    assert a.mul(one) == a


@settings(max_examples=200, deadline=None)
@given(_series_strategy())
def test_slice_shift_decomposition(s):
    # S = S|a=0 + a * ((S - S|a=0) / a), exactly, even at the cap.
    assert s.slice0("a") + s.shift_down("a").mul_var("a") == s


@settings(max_examples=200, deadline=None)
@given(_series_strategy())
def test_geom_telescopes(s):
    # S/(1-a) - a*S/(1-a) = S: the cap drops the same boundary term both ways.
    g = s.geom("a")
    assert g - g.mul_var("a") == s


@settings(max_examples=200, deadline=None)
@given(_series_strategy())
def test_divided_difference_clears_denominator(s):
    # (a - b) * [S(a) - S(b)] / (a - b) == S(a) - S(b), checked via b-extension.
    wide = s.extend_vars(("x", "a", "b"))
    dd = wide.divided_difference("a", "b")
    assert dd.mul_var("a") - dd.mul_var("b") == wide - wide.subst("a", "b")


def test_divided_difference_small_case():
    cube = MultiSeries(("x", "a", "b"), 6, {(0, 3, 0): 1})
    dd = cube.divided_difference("a", "b")
    assert dd.terms == {(0, 2, 0): 1, (0, 1, 1): 1, (0, 0, 2): 1}


def test_divided_difference_requires_fresh_target():
    s = MultiSeries(("x", "a", "b"), 6, {(0, 1, 1): 1})
    with pytest.raises(ValueError, match="already present"):
        s.divided_difference("a", "b")


def test_div_var():
    s = ms({(1, 2): 7})
    assert s.div_var("a", 2).terms == {(1, 0): 7}
    with pytest.raises(ValueError, match="not divisible"):
        ms({(1, 1): 1, (2, 0): 1}).div_var("a")


def test_subst_merges_exponents():
    s = MultiSeries(("x", "a", "b"), 8, {(1, 2, 1): 3, (0, 0, 2): 1})
    assert s.subst("a", "b").terms == {(1, 0, 3): 3, (0, 0, 2): 1}
    assert s.subst("a", "a") == s


def test_extend_vars():
    s = ms({(1, 2): 4})
    wide = s.extend_vars(("x", "b", "a"))
    assert wide.coeff(x=1, a=2) == 4
    assert wide.coeff(x=1, b=2) == 0
    with pytest.raises(ValueError):
        s.extend_vars(("x", "b"))  # drops "a"


def test_project_x():
    s = ms({(0, 0): 1, (3, 0): 5})
    assert s.project_x() == [1, 0, 0, 5, 0, 0, 0]
    with pytest.raises(ValueError, match="catalytic"):
        ms({(0, 1): 1}).project_x()


# --- systems ---------------------------------------------------------------------


def test_catalan_system():
    run = iterate_system("catalan", 12)
    assert run.coefficients == CATALAN[:13]
    assert run.iterations <= 4 * 12 + 20


def test_schroeder_system():
    # 1 followed by the large Schroeder numbers.
    s = [1, 2]
    for n in range(1, 9):
        s.append((3 * (2 * n + 1) * s[n] - (n - 1) * s[n - 1]) // (n + 2))
    run = iterate_system("schroeder", 10)
    assert run.coefficients == [1] + s


ENGINE_SYSTEMS = {
    "fib-plus": fib_plus_counts,
    "fib-minus": fib_minus_counts,
    "av4123-4231-4312": av4123_4231_4312_counts,
    "av4123-4231": av4123_4231_counts,
    "av4123-4312": av4123_4312_counts,
    "av4231-4321": av4231_4321_counts,
}


@pytest.mark.parametrize("name", sorted(ENGINE_SYSTEMS))
def test_system_matches_engine(name):
    assert iterate_system(name, 10).coefficients == ENGINE_SYSTEMS[name](10)


def test_system_history_freezes_on_schedule():
    run = iterate_system("catalan", 8, keep_history=True)
    assert len(run.history) == run.iterations + 1
    assert run.history[-1] == run.coefficients
    for i in range(9):
        for t in range(2 * i + 1, len(run.history)):
            assert run.history[t][i] == run.coefficients[i]


def test_unknown_system():
    with pytest.raises(ValueError, match="unknown system"):
        iterate_system("mystery", 5)


def test_runaway_system_raises(monkeypatch):
    def runaway(order):
        def step(state):
            s = state["f"].copy()
            s._acc((0,), 1)  # constant term grows every pass: no fixpoint
            return {"f": s}

        return {"f": MultiSeries(("x",), order)}, step, (
            lambda st: st["f"].project_x()
        )

    monkeypatch.setitem(SYSTEMS, "runaway", runaway)
    with pytest.raises(SystemStabilityError, match="no fixpoint"):
        iterate_system("runaway", 3)


def test_late_moving_coefficient_raises(monkeypatch):
    def creeper(order):
        # Constant term creeps up to 7 and then stops: a fixpoint exists, but
        # x^0 kept moving long after its freeze deadline (pass 1).
        def step(state):
            k = state["f"].coeff()
            out = MultiSeries(("x",), order)
            out._acc((0,), min(k + 1, 7))
            return {"f": out}

        return {"f": MultiSeries(("x",), order)}, step, (
            lambda st: st["f"].project_x()
        )

    monkeypatch.setitem(SYSTEMS, "creeper", creeper)
    with pytest.raises(SystemStabilityError, match="moved"):
        iterate_system("creeper", 3)


# --- growth ----------------------------------------------------------------------


def test_log2_int():
    assert log2_int(1) == 0.0
    assert log2_int(2**500) == 500.0
    assert abs(log2_int(3**200) - 200 * math.log2(3)) < 1e-9
    with pytest.raises(ValueError):
        log2_int(0)


def test_growth_estimate_geometric():
    g = growth_estimate([3**i for i in range(41)])
    assert isinstance(g, GrowthEstimate)
    assert g.ratio == pytest.approx(3.0)
    assert g.nth_root == pytest.approx(3.0)
    assert g.aitken is None  # exactly constant ratios leave nothing to accelerate
    assert "not stable" in g.report()


def test_growth_estimate_catalan():
    cat = [math.comb(2 * n, n) // (n + 1) for n in range(101)]
    g = growth_estimate(cat)
    assert g.n == 100
    assert g.aitken is not None
    # acceleration gets strictly closer to the true growth rate 4
    assert abs(g.aitken - 4) < abs(g.ratio - 4)
    assert "Aitken" in g.report()


def test_growth_estimate_handles_huge_terms():
    g = growth_estimate([2 ** (10 * i) for i in range(200)])
    assert g.nth_root == pytest.approx(1024.0)


def test_growth_estimate_input_validation():
    with pytest.raises(ValueError):
        growth_estimate([1, 2])
    with pytest.raises(ValueError):
        growth_estimate([1, 1, 0])
