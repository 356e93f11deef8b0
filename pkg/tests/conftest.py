import itertools

import numpy as np
import pytest
import sympy as sp

from econtact import scalar as sc
from econtact import frames as fr


@pytest.fixture(scope="session")
def catalog_entries():
    from econtact import eta_einstein as ee
    return {name: ee.catalog(name) for name in ee.catalog_names()}


@pytest.fixture(scope="session")
def product_configs():
    """The three certified product configurations, built once."""
    from econtact import eta_einstein as ee
    from econtact import sugra as sg
    out = {}
    for key, (n_name, n_par, x_name, x_par) in {
        "lor-x-riem": ("sl2-lor", None, "su2", None),
        "para-x-riem": ("sl2-para", None, "su2", None),
        "null-x-riem": ("sl2-null", None, "su2", {"lambda": 1}),
    }.items():
        en = ee.catalog(n_name, n_par)
        ex = ee.catalog(x_name, x_par)
        out[key] = sg.build_solution(en.structure, ex.structure,
                                     cert_n=en.certificate,
                                     cert_x=ex.certificate, coefficient=1)
    return out


def make_frame3(labels, brackets, metric, signature, name,
                assumptions=None, coords=None, orientation=1):
    n = len(labels)
    c = np.full((n, n, n), sp.S.Zero, dtype=object)
    for (i, j), vec in brackets.items():
        for k, val in vec.items():
            c[k, i, j] = sp.sympify(val)
            c[k, j, i] = -sp.sympify(val)
    g = np.array([[sp.sympify(metric[i][j]) for j in range(n)]
                  for i in range(n)], dtype=object)
    return fr.FrameManifold(labels, c, g, orientation, signature,
                            coords=coords,
                            assumptions=assumptions or sc.Assumptions(),
                            name=name)


def flat_manifold(dim, signature, orientation=1, name="flat"):
    labels = [f"f{i}" for i in range(dim)]
    c = np.full((dim, dim, dim), sp.S.Zero, dtype=object)
    g = np.full((dim, dim), sp.S.Zero, dtype=object)
    for i in range(dim):
        g[i, i] = sp.Integer(-1) if (signature < 0 and i == 0) else sp.S.One
    return fr.FrameManifold(labels, c, g, orientation, signature, name=name)


def assert_zero_by_sampling(expr, assumptions=None, seed=0, bindings=10):
    """Independent numeric cross-check of a symbolic-zero claim: evaluate
    at seeded admissible rational bindings (exp nodes made opaque)."""
    assumptions = assumptions if assumptions is not None else sc.Assumptions()
    e = sc._exp_opaque(sp.sympify(expr), assumptions)
    if e == 0:
        return
    checked = 0
    for binding, polys, var in sc.probe_bindings(e, assumptions, seed,
                                                 count=3 * bindings):
        try:
            v = sc.eval_rational(e, binding, funcs=polys, func_var=var)
        except sc.ScalarError:
            continue
        assert v == 0, f"{expr} evaluates to {v} at {binding}"
        checked += 1
        if checked >= bindings:
            return
    assert checked > 0 or not e.free_symbols, \
        f"could not probe {expr} at any admissible binding"


def assert_tensor_zero_by_sampling(t, assumptions=None, seed=0, bindings=10):
    for idx in np.ndindex(t.comp.shape):
        assert_zero_by_sampling(t.comp[idx], assumptions, seed, bindings)
