import itertools
import random

import numpy as np
import pytest
import sympy as sp

from econtact import frames as fr
from econtact import scalar as sc
from econtact.frames import (DOWN, UP, FrameError, TensorField, basis_form,
                             basis_vector, ext_d, flat, form_from_sorted,
                             form_inner, hodge, interior, lie_bracket,
                             lie_derivative, metric_tensor, one_form,
                             product_manifold, promote, sharp, tensor_product,
                             vector, volume_form, wedge)

from conftest import flat_manifold, make_frame3

lam = sc.parameter("lam")
I3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
D3 = [[-1, 0, 0], [0, 1, 0], [0, 0, 1]]
LIGHT = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]


@pytest.fixture(scope="module")
def mink3():
    return flat_manifold(3, -1, name="mink3")


@pytest.fixture(scope="module")
def su2():
    a = sc.Assumptions(params={lam: sc.ParamFacts(nonzero=True)})
    return make_frame3(["e1", "e2", "e3"],
                       {(1, 2): {0: 1}, (2, 0): {1: lam**2},
                        (0, 1): {2: lam**2}},
                       I3, 1, "su2", a, orientation=-1)


@pytest.fixture(scope="module")
def sl2_lor():
    return make_frame3(["e0", "e1", "e2"],
                       {(0, 1): {2: lam**2}, (0, 2): {1: -lam**2},
                        (1, 2): {0: -1}},
                       D3, -1, "sl2-lor",
                       sc.Assumptions(params={lam: sc.ParamFacts(nonzero=True)}))


@pytest.fixture(scope="module")
def light_cone():
    return make_frame3(["e+", "e-", "e2"], {}, LIGHT, -1, "light")


@pytest.fixture(scope="module")
def r3(request):
    t, x, y = (sc.coordinate(n) for n in "txy")
    a = sc.Assumptions(funcs={"q": sc.FuncFacts(nowhere_zero=True)})
    return make_frame3(["dt", "dx", "dy"], {}, D3, -1, "r3", a,
                       coords=(t, x, y))


def rand_form(m, rank, rng):
    entries = {K: sp.Rational(rng.randint(-4, 4), rng.randint(1, 3))
               for K in itertools.combinations(range(m.dim), rank)}
    return form_from_sorted(m, rank, entries)


def wedge_oracle(a, b):
    """Total antisymmetrization with 1/(p! q!) weight, full index loop."""
    m = a.manifold
    p, q = a.rank, b.rank
    n = m.dim
    comp = np.empty((n,) * (p + q), dtype=object)
    for idx in itertools.product(range(n), repeat=p + q):
        acc = sp.S.Zero
        for per in itertools.permutations(range(p + q)):
            sgn = fr._perm_sign(per)
            left = tuple(idx[per[i]] for i in range(p))
            right = tuple(idx[per[p + i]] for i in range(q))
            acc += sgn * a.comp[left] * b.comp[right]
        comp[idx] = sp.expand(acc / (sp.factorial(p) * sp.factorial(q)))
    return TensorField(m, DOWN * (p + q), comp, form=True)


def hodge_oracle(m, w):
    """Solve eta ^ star(w) = <eta, w> nu over the basis, exactly."""
    n, p = m.dim, w.rank
    unknowns = {J: sp.Dummy() for J in itertools.combinations(range(n), n - p)}
    nu = volume_form(m)
    eqs = []
    for I in itertools.combinations(range(n), p):
        eta = basis_form(m, I)
        lhs = sp.S.Zero
        for J, xj in unknowns.items():
            lhs += xj * wedge(eta, basis_form(m, J)).comp[tuple(range(n))]
        rhs = form_inner(eta, w) * nu.comp[tuple(range(n))]
        eqs.append(sp.Eq(lhs, rhs))
    sol = sp.solve(eqs, list(unknowns.values()), dict=True)
    assert len(sol) == 1
    return form_from_sorted(m, n - p, {J: sol[0].get(xj, xj)
                                       for J, xj in unknowns.items()})


class TestWedge:
    def test_convention_anchor(self, mink3):
        w = wedge(basis_form(mink3, (0,)), basis_form(mink3, (1,)))
        assert w.comp[0, 1] == 1 and w.comp[1, 0] == -1

    def test_graded_commutativity(self, mink3):
        rng = random.Random(2)
        for p, q in [(1, 1), (1, 2), (2, 1)]:
            a, b = rand_form(mink3, p, rng), rand_form(mink3, q, rng)
            lhs = wedge(a, b)
            rhs = wedge(b, a) * sp.Integer((-1) ** (p * q))
            assert (lhs - rhs).is_zero_tensor()

    def test_against_antisymmetrization_oracle(self, r3):
        t, x, y = (sc.coordinate(n) for n in "txy")
        q = sc.function_head("q")
        a = one_form(r3, [1, -1, 0])                      # dt - dx
        b = one_form(r3, [0, 0, sp.exp(y) * q(x - t)])
        rng = random.Random(7)
        for left, right in [(a, b), (rand_form(r3, 1, rng), rand_form(r3, 2, rng)),
                            (rand_form(r3, 2, rng), rand_form(r3, 1, rng))]:
            got = wedge(left, right)
            want = wedge_oracle(left, right)
            assert (got - want).canonical().is_zero_tensor()

    def test_dimension_overflow(self, mink3):
        a = rand_form(mink3, 2, random.Random(1))
        with pytest.raises(FrameError):
            wedge(a, a)


class TestInterior:
    def test_basis_anchor(self, mink3):
        w = basis_form(mink3, (0, 1, 2))
        got = interior(basis_vector(mink3, 0), w)
        assert (got - basis_form(mink3, (1, 2))).is_zero_tensor()

    def test_sharp_into_own_star_vanishes(self, mink3, su2, light_cone):
        rng = random.Random(9)
        for m in (mink3, su2, light_cone):
            for _ in range(5):
                eta = rand_form(m, 1, rng)
                got = interior(sharp(eta), hodge(eta)).canonical()
                assert got.is_zero_tensor()

    def test_antiderivation(self, mink3):
        rng = random.Random(4)
        for p, q in [(1, 1), (1, 2), (2, 1)]:
            a, b = rand_form(mink3, p, rng), rand_form(mink3, q, rng)
            xv = vector(mink3, [rng.randint(-3, 3) for _ in range(3)])
            lhs = interior(xv, wedge(a, b))
            rhs = (wedge(interior(xv, a), b) if p > 1 else b * interior(xv, a).comp[()] if p == 1 else None)
            rhs = wedge(interior(xv, a), b) if a.rank > 1 else b * interior(xv, a).comp[()]
            rhs = rhs + wedge(a, interior(xv, b)) * sp.Integer((-1) ** p) \
                if b.rank > 1 else rhs + a * (interior(xv, b).comp[()] * (-1) ** p)
            assert (lhs - rhs).canonical().is_zero_tensor()

    def test_zero_form_rejected(self, mink3):
        zero_form = TensorField(mink3, "", np.array(sp.S.One,
                                                    dtype=object).reshape(()))
        with pytest.raises(FrameError):
            interior(basis_vector(mink3, 0), zero_form)


class TestMusical:
    def test_inverse_pair(self, su2, light_cone):
        rng = random.Random(12)
        for m in (su2, light_cone):
            for _ in range(5):
                alpha = rand_form(m, 1, rng)
                assert (flat(sharp(alpha)) - alpha).canonical().is_zero_tensor()

    def test_signature_sign(self, mink3):
        assert list(sharp(basis_form(mink3, (0,))).comp) == [-1, 0, 0]

    def test_lightcone_sharp(self, light_cone):
        # e^- raises to e_+ on the light-cone metric
        assert list(sharp(one_form(light_cone, [0, 1, 0])).comp) == [1, 0, 0]


class TestHodge:
    def test_star_one_is_volume(self, mink3):
        one = TensorField(mink3, "", np.array(sp.S.One, dtype=object).reshape(()))
        assert (hodge(one) - volume_form(mink3)).is_zero_tensor()

    def test_minkowski_anchor(self, mink3):
        got = hodge(basis_form(mink3, (0,)))
        assert (got + basis_form(mink3, (1, 2))).is_zero_tensor()

    def test_solve_oracle_all_basis_forms(self, mink3, su2, light_cone):
        for m in (mink3, su2, light_cone):
            for p in range(1, m.dim + 1):
                for K in itertools.combinations(range(m.dim), p):
                    w = basis_form(m, K)
                    assert (hodge(w) - hodge_oracle(m, w)).canonical() \
                        .is_zero_tensor()

    @pytest.mark.parametrize("dim,signature", [(3, 1), (3, -1), (4, 1),
                                               (4, -1), (6, 1), (6, -1)])
    def test_star_star_sign_law(self, dim, signature):
        m = flat_manifold(dim, signature)
        sign_det = signature
        for p in range(dim + 1):
            for K in itertools.combinations(range(dim), p):
                w = basis_form(m, K) if p else TensorField(
                    m, "", np.array(sp.S.One, dtype=object).reshape(()))
                ss = hodge(hodge(w))
                factor = sp.Integer(sign_det * (-1) ** (p * (dim - p)))
                if p:
                    assert (ss - w * factor).is_zero_tensor()
                else:
                    assert sc.simplify(ss.comp[()] - factor) == 0

    @pytest.mark.parametrize("dim,signature", [(3, 1), (3, -1), (4, 1),
                                               (4, -1), (6, 1), (6, -1)])
    def test_isometry_up_to_det_sign(self, dim, signature):
        # <star w, star e> = sign(det g) <w, e> on every basis pair
        m = flat_manifold(dim, signature)
        for p in range(1, dim):
            combos = list(itertools.combinations(range(dim), p))
            forms = {K: basis_form(m, K) for K in combos}
            stars = {K: hodge(forms[K]) for K in combos}
            for K, L in itertools.product(combos, repeat=2):
                lhs = form_inner(stars[K], stars[L])
                rhs = signature * form_inner(forms[K], forms[L])
                assert sc.simplify(lhs - rhs) == 0

    def test_nondiagonal_metric(self, light_cone):
        # defining property on the light-cone metric, all basis one-forms
        for i in range(3):
            w = basis_form(light_cone, (i,))
            sw = hodge(w)
            nu = volume_form(light_cone)
            for K in itertools.combinations(range(3), 1):
                eta = basis_form(light_cone, K)
                lhs = wedge(eta, sw).comp[0, 1, 2]
                rhs = form_inner(eta, w) * nu.comp[0, 1, 2]
                assert sc.simplify(lhs - rhs) == 0


class TestExteriorDerivative:
    def test_su2_maurer_cartan(self, su2):
        d1 = ext_d(basis_form(su2, (0,)))
        assert (d1 + basis_form(su2, (1, 2))).canonical().is_zero_tensor()
        d2 = ext_d(basis_form(su2, (1,)))
        assert (d2 - basis_form(su2, (0, 2)) * lam**2).canonical() \
            .is_zero_tensor()

    def test_sl2_lor_maurer_cartan(self, sl2_lor):
        d0 = ext_d(basis_form(sl2_lor, (0,)))
        assert (d0 - basis_form(sl2_lor, (1, 2))).canonical().is_zero_tensor()

    def test_coordinate_frame_dalpha(self, r3):
        t, x, y = (sc.coordinate(n) for n in "txy")
        q = sc.function_head("q")
        f = sp.exp(y) * q(x - t)
        alpha = one_form(r3, [f, -f, 0])
        da = ext_d(alpha)
        want = form_from_sorted(r3, 2, {(0, 2): -f, (1, 2): f})
        assert (da - want).canonical().is_zero_tensor()
        assert ext_d(da).canonical().is_zero_tensor()

    def test_d_squared_zero(self, su2, sl2_lor, r3, light_cone):
        rng = random.Random(21)
        for m in (su2, sl2_lor, light_cone):
            for p in (1, 2):
                w = rand_form(m, p, rng)
                if p + 2 <= m.dim + 1 and w.rank + 2 <= m.dim:
                    assert ext_d(ext_d(w)).canonical().is_zero_tensor()
        t, x, y = (sc.coordinate(n) for n in "txy")
        q = sc.function_head("q")
        w = one_form(r3, [sp.exp(y) * q(x - t), x * t, y**2])
        assert ext_d(ext_d(w)).canonical().is_zero_tensor()


class TestLieBracket:
    def test_su2_table(self, su2):
        got = lie_bracket(basis_vector(su2, 1), basis_vector(su2, 2))
        assert (got - basis_vector(su2, 0)).canonical().is_zero_tensor()

    def test_self_bracket(self, r3):
        t, x, y = (sc.coordinate(n) for n in "txy")
        xv = vector(r3, [sp.exp(y), x, t * y])
        assert lie_bracket(xv, xv).canonical().is_zero_tensor()

    def test_antisymmetric_and_jacobi(self, su2):
        rng = random.Random(8)
        vs = [vector(su2, [sp.Rational(rng.randint(-3, 3), rng.randint(1, 2))
                           for _ in range(3)]) for _ in range(3)]
        ab = lie_bracket(vs[0], vs[1])
        ba = lie_bracket(vs[1], vs[0])
        assert (ab + ba).canonical().is_zero_tensor()
        jac = (lie_bracket(lie_bracket(vs[0], vs[1]), vs[2])
               + lie_bracket(lie_bracket(vs[1], vs[2]), vs[0])
               + lie_bracket(lie_bracket(vs[2], vs[0]), vs[1]))
        assert jac.canonical().is_zero_tensor()

    def test_coordinate_frame_function_coefficients(self, r3):
        t, x, y = (sc.coordinate(n) for n in "txy")
        xv = vector(r3, [0, 0, sp.S.One])
        yv = vector(r3, [sp.exp(y), 0, 0])
        got = lie_bracket(xv, yv)
        assert sc.simplify(got.comp[0] - sp.exp(y)) == 0


class TestLieDerivative:
    def test_function_is_directional(self, r3):
        t, x, y = (sc.coordinate(n) for n in "txy")
        xv = vector(r3, [1, 2, 3])
        f = TensorField(r3, "", np.array(t * x + y**2,
                                         dtype=object).reshape(()))
        got = lie_derivative(xv, f).comp[()]
        assert sc.simplify(got - (x + 2 * t + 6 * y)) == 0

    def test_killing_field_on_su2(self, su2):
        got = lie_derivative(basis_vector(su2, 0), metric_tensor(su2))
        assert got.canonical().is_zero_tensor()

    def test_on_vectors_equals_bracket(self, su2):
        a = vector(su2, [1, 2, -1])
        b = vector(su2, [0, 1, 1])
        lhs = lie_derivative(a, b)
        rhs = lie_bracket(a, b)
        assert (lhs - rhs).canonical().is_zero_tensor()


class TestProduct:
    @pytest.fixture(scope="class")
    def pair(self, sl2_lor, su2):
        return sl2_lor, su2, product_manifold(sl2_lor, su2)

    def test_metric_blocks(self, pair):
        n, x, p = pair
        for i in range(3):
            for j in range(3, 6):
                assert p.g[i, j] == 0 and p.g[j, i] == 0

    def test_cross_structure_vanishes(self, pair):
        n, x, p = pair
        for k, i, j in itertools.product(range(6), range(3), range(3, 6)):
            assert p.c[k, i, j] == 0

    def test_volume_splits(self, pair):
        n, x, p = pair
        got = wedge(promote(volume_form(n), p), promote(volume_form(x), p))
        assert (got - volume_form(p)).canonical().is_zero_tensor()
        assert volume_form(p).comp[tuple(range(6))] == n.orientation * x.orientation

    def test_hodge_factorization_sign_law(self, pair):
        # star_g(rho ^ sigma) = (-1)^{r(3-q)} star rho ^ star sigma
        n, x, p = pair
        for qdeg in range(4):
            for rdeg in range(4):
                if qdeg + rdeg == 0 or qdeg + rdeg == 6:
                    continue
                for K in itertools.combinations(range(3), qdeg):
                    for L in itertools.combinations(range(3), rdeg):
                        rho = basis_form(n, K) if qdeg else None
                        sig = basis_form(x, L) if rdeg else None
                        rho6 = promote(rho, p) if rho else None
                        sig6 = promote(sig, p) if sig else None
                        if rho6 is not None and sig6 is not None:
                            lhs = hodge(wedge(rho6, sig6))
                            rhs = wedge(promote(hodge(rho), p),
                                        promote(hodge(sig), p)) \
                                * sp.Integer((-1) ** (rdeg * (3 - qdeg)))
                        elif rho6 is not None:
                            lhs = hodge(rho6)
                            rhs = wedge(promote(hodge(rho), p),
                                        promote(hodge(
                                            TensorField(x, "", np.array(
                                                sp.S.One, dtype=object)
                                            .reshape(())) * 1), p))
                        else:
                            continue
                        assert (lhs - rhs).canonical().is_zero_tensor(), \
                            (qdeg, rdeg, K, L)

    def test_signature_mismatch_rejected(self, su2):
        with pytest.raises(FrameError):
            product_manifold(su2, su2)

    def test_promote_zero_extension(self, pair):
        n, x, p = pair
        a = promote(basis_form(n, (0,)), p)
        for j in range(3, 6):
            assert a.comp[j] == 0
        nu_x = promote(volume_form(x), p)
        assert interior(basis_vector(p, 0), nu_x).canonical().is_zero_tensor()

    def test_interior_through_orthogonal_factor(self, pair):
        n, x, p = pair
        alpha = promote(basis_form(n, (0,)), p)
        beta = promote(basis_form(x, (1,)), p)   # lives on the other factor
        xv = basis_vector(p, 0)
        got = interior(xv, wedge(alpha, beta))
        want = beta * alpha.comp[0]
        assert (got - want).canonical().is_zero_tensor()

    def test_promote_requires_factor(self, pair, mink3):
        n, x, p = pair
        with pytest.raises(FrameError):
            promote(basis_form(mink3, (0,)), p)


class TestValidation:
    def test_form_antisymmetry_enforced(self, mink3):
        comp = np.full((3, 3), sp.S.Zero, dtype=object)
        comp[0, 1] = sp.S.One   # missing the (1,0) = -1 mirror
        with pytest.raises(FrameError):
            TensorField(mink3, DOWN * 2, comp, form=True)

    def test_jacobi_violation_rejected(self):
        with pytest.raises(FrameError, match="Jacobi"):
            make_frame3(["a", "b", "c"],
                        {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {0: 1}},
                        I3, 1, "bad")

    def test_degenerate_metric_rejected(self):
        with pytest.raises(fr.DegenerateMetric):
            make_frame3(["a", "b", "c"], {},
                        [[1, 0, 0], [0, 1, 0], [0, 0, 0]], 1, "degenerate")

    def test_signature_tag_checked(self):
        with pytest.raises(FrameError, match="signature"):
            make_frame3(["a", "b", "c"], {}, I3, -1, "wrong-tag")
