import random

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from econtact import scalar as sc
from econtact.scalar import (Assumptions, FuncFacts, ParamFacts, Range,
                             ScalarError, Verdict)

from conftest import assert_zero_by_sampling

lam = sc.parameter("lam")
a = sc.parameter("a")
t, x, y = (sc.coordinate(n) for n in "txy")
q = sc.function_head("q")
qp = sc.function_head("q", 1)


class TestSimplify:
    def test_cancellation(self):
        assert sc.simplify((lam**2 + 1) - 1 - lam**2) == 0

    def test_abstract_cancellation(self):
        e = sp.exp(y) * qp(x - t) * (-1) + sp.exp(y) * qp(x - t)
        assert sc.simplify(e) == 0

    def test_rational_coefficient_cancellation(self):
        assert sc.simplify(2 * lam**2 * sp.Rational(1, 2) - lam**2) == 0

    def test_idempotent_node_for_node(self):
        rng = random.Random(11)
        for _ in range(100):
            e = sc.random_expr(rng, params=[lam, a], coords=[t, x, y],
                               funcs=["q"], depth=4)
            s1 = sc.simplify(e)
            assert sp.srepr(sc.simplify(s1)) == sp.srepr(s1)

    def test_value_preserved_at_bindings(self):
        rng = random.Random(5)
        assumptions = Assumptions()
        for i in range(100):
            e = sc.random_expr(rng, params=[lam, a], coords=[t, x],
                               funcs=["q"], depth=3, allow_exp=False)
            s = sc.simplify(e)
            checked = 0
            for binding, polys, var in sc.probe_bindings(e, assumptions, i):
                try:
                    v1 = sc.eval_rational(e, binding, funcs=polys, func_var=var)
                    v2 = sc.eval_rational(s, binding, funcs=polys, func_var=var)
                except ScalarError:
                    continue
                assert v1 == v2
                checked += 1
                if checked == 10:
                    break


class TestDifferentiate:
    def test_chain_rule_dt(self):
        e = sp.exp(y) * q(x - t)
        assert sc.simplify(sc.differentiate(e, t) + sp.exp(y) * qp(x - t)) == 0

    def test_exp_dy(self):
        e = sp.exp(y) * q(x - t)
        assert sc.simplify(sc.differentiate(e, y) - e) == 0

    def test_constant(self):
        assert sc.differentiate(sp.Integer(7), x) == 0

    def test_oracle_random_cubic(self):
        # independent path: bind q to explicit cubics first, then use plain
        # sympy differentiation of the bound expression
        rng = random.Random(3)
        s = sp.Symbol("_s")
        e = sp.exp(y) * q(x - t)
        for i in range(10):
            cubic = sum(sp.Rational(rng.randint(-4, 4), rng.randint(1, 3))
                        * s**k for k in range(4))
            bound = sc._instantiate_functions(e, {"q": cubic}, s)
            for v in (t, x, y):
                direct = sp.diff(bound, v)
                formal = sc._instantiate_functions(sc.differentiate(e, v),
                                                   {"q": cubic}, s)
                assert sc.simplify(direct - formal) == 0

    def test_partials_commute(self):
        rng = random.Random(17)
        for _ in range(25):
            e = sc.random_expr(rng, params=[lam], coords=[t, x, y],
                               funcs=["q"], depth=4)
            dtx = sc.differentiate(sc.differentiate(e, t), x)
            dxt = sc.differentiate(sc.differentiate(e, x), t)
            assert sc.simplify(dtx - dxt) == 0

    def test_rejects_parameter(self):
        with pytest.raises(ScalarError):
            sc.differentiate(lam**2, lam)

    def test_polynomial_integration_round_trip(self):
        rng = random.Random(23)
        for _ in range(20):
            p = sum(sp.Rational(rng.randint(-5, 5), rng.randint(1, 4)) * x**k
                    for k in range(5))
            back = sp.integrate(sc.differentiate(p, x), x)
            assert sc.simplify(back - (p - p.subs(x, 0))) == 0


class TestIsZero:
    def test_trivial_zero(self):
        assert sc.is_zero(lam**2 - lam**2).verdict is Verdict.ZERO

    def test_nonzero_with_assumption(self):
        assumptions = Assumptions(params={a: ParamFacts(nonzero=True)})
        r = sc.is_zero(-2 * a, assumptions)
        assert r.verdict is Verdict.NONZERO
        assert r.value != 0

    def test_boundary_is_unknown(self):
        assumptions = Assumptions(params={lam: ParamFacts(
            nonzero=True,
            square_range=Range(sp.Integer(0), sp.Integer(1), lo_open=True))})
        assert sc.is_zero(1 - lam**2, assumptions).verdict is Verdict.UNKNOWN

    def test_unconstrained_parameter_is_unknown(self):
        assert sc.is_zero(-2 * a, Assumptions()).verdict is Verdict.UNKNOWN

    def test_nowhere_zero_function(self):
        assumptions = Assumptions(funcs={"q": FuncFacts(nowhere_zero=True)})
        assert sc.is_zero(q(x - t), assumptions).verdict is Verdict.NONZERO
        assert sc.is_zero(sp.exp(y) * q(x - t)**2,
                          assumptions).verdict is Verdict.NONZERO

    def test_deterministic_for_fixed_seed(self):
        assumptions = Assumptions(params={a: ParamFacts()})
        r1 = sc.is_zero(a**2 - a, assumptions, seed=42)
        r2 = sc.is_zero(a**2 - a, assumptions, seed=42)
        assert r1.verdict is r2.verdict and r1.witness == r2.witness

    def test_zero_verdict_backed_by_sampling(self):
        for e in [lam**2 - lam**2, (lam + 1)**2 - lam**2 - 2 * lam - 1,
                  sp.exp(y) * q(x - t) - sp.exp(y) * q(x - t)]:
            r = sc.is_zero(e)
            assert r.verdict is Verdict.ZERO
            assert_zero_by_sampling(e)

    def test_inconsistent_assumptions_reported(self):
        bad = Assumptions(params={a: ParamFacts(
            positive=True, range=Range(None, sp.Integer(-1)))})
        with pytest.raises(sc.InconsistentAssumptions):
            sc.is_zero(a + 1, bad)


class TestEvalRational:
    def test_square(self):
        assert sc.eval_rational(lam**2, {lam: 2}) == 4

    def test_ricci_coefficient_at_unit(self):
        e = sp.Rational(1, 2) * (2 * lam**2 - 1)
        assert sc.eval_rational(e, {lam: 1}) == sp.Rational(1, 2)

    def test_exp_at_zero(self):
        assert sc.eval_rational(sp.exp(y), {y: 0}) == 1

    def test_exp_elsewhere_rejected(self):
        with pytest.raises(ScalarError):
            sc.eval_rational(sp.exp(y), {y: 1})

    def test_unbound_symbol(self):
        with pytest.raises(ScalarError, match="unbound"):
            sc.eval_rational(lam + a, {lam: 1})

    def test_division_by_zero(self):
        with pytest.raises(ScalarError):
            sc.eval_rational(1 / a, {a: 0})

    def test_function_binding(self):
        s = sp.Symbol("_s")
        v = sc.eval_rational(q(x - t), {x: 3, t: 1}, funcs={"q": s**2},
                             func_var=s)
        assert v == 4

    def test_derivative_binding(self):
        s = sp.Symbol("_s")
        v = sc.eval_rational(qp(x - t), {x: 3, t: 1}, funcs={"q": s**3},
                             func_var=s)
        assert v == 12


class TestParse:
    def test_grammar_round_trip(self):
        e = sc.parse_scalar("exp(y) * q'(x - t) + 1/2 * lam^2",
                            params=["lam"], coords=["x", "t", "y"],
                            funcs=["q"])
        want = sp.exp(y) * qp(x - t) + sp.Rational(1, 2) * lam**2
        assert sc.simplify(e - want) == 0

    def test_keyword_parameter_name(self):
        e = sc.parse_scalar("lambda^2 - 1", params=["lambda"], coords=[],
                            funcs=[])
        lam2 = sc.parameter("lambda")
        assert sc.simplify(e - (lam2**2 - 1)) == 0

    def test_double_prime(self):
        e = sc.parse_scalar("q''(t)", params=[], coords=["t"], funcs=["q"])
        assert sc.simplify(e - sc.function_head("q", 2)(t)) == 0

    @pytest.mark.parametrize("bad", [
        "0.5*lam", "sin(x)", "lam + mu", "q(x*x)", "x^lam", "q(x, t)"])
    def test_rejections(self, bad):
        with pytest.raises(ScalarError):
            sc.parse_scalar(bad, params=["lam"], coords=["x", "t"],
                            funcs=["q"])


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=-6, max_value=6),
       st.integers(min_value=-6, max_value=6),
       st.integers(min_value=1, max_value=5))
def test_eval_is_a_ring_morphism(pval, qval, denom):
    """eval_rational respects + and * against Fraction arithmetic."""
    e1 = lam**2 + sp.Rational(pval, denom)
    e2 = a * lam - sp.Rational(qval, denom)
    binding = {lam: sp.Rational(pval, denom + 1), a: sp.Rational(qval, 2)}
    lhs = sc.eval_rational(sc.simplify(e1 * e2 + e2), binding)
    rhs = (sc.eval_rational(e1, binding) * sc.eval_rational(e2, binding)
           + sc.eval_rational(e2, binding))
    assert lhs == rhs
