"""Connections and curvature over framed manifolds.

Levi-Civita comes from the Koszul formula written on the frame; the
curvature operator is R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z
- nabla_[X,Y] Z with components R(e_i,e_j)e_k = sum_l R^l_{kij} e_l, and
Ricci is the trace Ric(X,Y) = tr(Z -> R(Z,X)Y).  The metric connection
with totally skew torsion H satisfies
g(nabla^H_X Y, Z) = g(nabla_X Y, Z) + (1/2) H(X,Y,Z),
so its torsion lowered by g is exactly H.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np
import sympy as sp

from . import scalar as sc
from .frames import (DOWN, UP, FrameError, FrameManifold, TensorField,
                     zero_tensor)


@dataclass
class Connection:
    manifold: FrameManifold
    gamma: np.ndarray            # gamma[k, i, j]: nabla_{e_i} e_j = gamma^k_ij e_k
    torsion_form: Optional[TensorField] = None   # None marks Levi-Civita

    def nabla_frame(self, i: int, j: int) -> list:
        return [self.gamma[k, i, j] for k in range(self.manifold.dim)]


@dataclass
class CurvatureData:
    riemann: TensorField         # types 'uddd', slots (l, k, i, j)
    ricci: TensorField           # types 'dd'
    scalar: sp.Expr


def _koszul_lower(m: FrameManifold) -> np.ndarray:
    """low[k,i,j] = g(nabla_{e_i} e_j, e_k) from the Koszul formula."""
    n = m.dim
    low = np.empty((n, n, n), dtype=object)

    def gbr(i, j, k):  # g([e_i, e_j], e_k)
        return sp.Add(*[m.c[a, i, j] * m.g[a, k] for a in range(n)
                        if m.c[a, i, j] != 0 and m.g[a, k] != 0])

    for k, i, j in itertools.product(range(n), repeat=3):
        acc = (m.direct(i, m.g[j, k]) + m.direct(j, m.g[i, k])
               - m.direct(k, m.g[i, j])
               + gbr(i, j, k) - gbr(i, k, j) - gbr(j, k, i))
        low[k, i, j] = sp.expand(acc / 2)
    return low


def levi_civita(m: FrameManifold) -> Connection:
    """The unique torsion-free metric connection."""
    n = m.dim
    low = _koszul_lower(m)
    gamma = np.empty((n, n, n), dtype=object)
    for l, i, j in itertools.product(range(n), repeat=3):
        gamma[l, i, j] = sp.expand(sp.Add(
            *[m.g_inv[l, k] * low[k, i, j] for k in range(n)
              if m.g_inv[l, k] != 0 and low[k, i, j] != 0]))
    return Connection(m, gamma, torsion_form=None)


def with_skew_torsion(m: FrameManifold, h: TensorField) -> Connection:
    """Metric connection whose g-lowered torsion equals the 3-form h."""
    if not h.form or h.rank != 3 or h.manifold is not m:
        raise FrameError("skew torsion must be a 3-form on the same manifold")
    lc = levi_civita(m)
    n = m.dim
    gamma = np.empty((n, n, n), dtype=object)
    for l, i, j in itertools.product(range(n), repeat=3):
        corr = sp.Add(*[m.g_inv[l, k] * h.comp[i, j, k] for k in range(n)
                        if m.g_inv[l, k] != 0 and h.comp[i, j, k] != 0])
        gamma[l, i, j] = sp.expand(lc.gamma[l, i, j] + corr / 2)
    return Connection(m, gamma, torsion_form=h)


def metricity_residual(conn: Connection) -> TensorField:
    """(nabla g) as a (0,3) table, slots (a, i, j) for (nabla_{e_a} g)(e_i,e_j)."""
    m = conn.manifold
    n = m.dim
    comp = np.empty((n, n, n), dtype=object)
    for a, i, j in itertools.product(range(n), repeat=3):
        acc = [m.direct(a, m.g[i, j])]
        for k in range(n):
            if conn.gamma[k, a, i] != 0 and m.g[k, j] != 0:
                acc.append(-conn.gamma[k, a, i] * m.g[k, j])
            if conn.gamma[k, a, j] != 0 and m.g[i, k] != 0:
                acc.append(-conn.gamma[k, a, j] * m.g[i, k])
        comp[a, i, j] = sp.expand(sp.Add(*acc))
    return TensorField(m, DOWN * 3, comp)


def torsion_tensor(conn: Connection) -> TensorField:
    """T(e_i, e_j) = nabla_i e_j - nabla_j e_i - [e_i, e_j], slots (k, i, j)."""
    m = conn.manifold
    n = m.dim
    comp = np.empty((n, n, n), dtype=object)
    for k, i, j in itertools.product(range(n), repeat=3):
        comp[k, i, j] = sp.expand(conn.gamma[k, i, j] - conn.gamma[k, j, i]
                                  - m.c[k, i, j])
    return TensorField(m, UP + DOWN + DOWN, comp)


def lowered_torsion(conn: Connection) -> TensorField:
    """Torsion with the first slot lowered, arranged as T(X,Y,Z)=g(T(X,Y),Z)."""
    t = torsion_tensor(conn)
    m = conn.manifold
    n = m.dim
    comp = np.empty((n, n, n), dtype=object)
    for i, j, k in itertools.product(range(n), repeat=3):
        comp[i, j, k] = sp.expand(sp.Add(
            *[m.g[a, k] * t.comp[a, i, j] for a in range(n)
              if m.g[a, k] != 0 and t.comp[a, i, j] != 0]))
    return TensorField(m, DOWN * 3, comp)


def riemann(conn: Connection) -> CurvatureData:
    """Curvature of the connection; Ricci is returned unsymmetrized."""
    m = conn.manifold
    n = m.dim
    g = conn.gamma
    riem = np.empty((n, n, n, n), dtype=object)
    for i, j in itertools.combinations(range(n), 2):
        for k, l in itertools.product(range(n), repeat=2):
            acc = [m.direct(i, g[l, j, k]), -m.direct(j, g[l, i, k])]
            for mm in range(n):
                if g[mm, j, k] != 0 and g[l, i, mm] != 0:
                    acc.append(g[mm, j, k] * g[l, i, mm])
                if g[mm, i, k] != 0 and g[l, j, mm] != 0:
                    acc.append(-g[mm, i, k] * g[l, j, mm])
                if m.c[mm, i, j] != 0 and g[l, mm, k] != 0:
                    acc.append(-m.c[mm, i, j] * g[l, mm, k])
            val = sp.expand(sp.Add(*acc))
            riem[l, k, i, j] = val
            riem[l, k, j, i] = sp.expand(-val)
    for l, k, i in itertools.product(range(n), repeat=3):
        riem[l, k, i, i] = sp.S.Zero
    riemann_t = TensorField(m, UP + DOWN * 3, riem)
    ric = np.empty((n, n), dtype=object)
    for i, j in itertools.product(range(n), repeat=2):
        ric[i, j] = sp.expand(sp.Add(*[riem[k, j, k, i] for k in range(n)]))
    ricci_t = TensorField(m, DOWN + DOWN, ric)
    scal = sp.expand(sp.Add(*[m.g_inv[i, j] * ric[i, j]
                              for i, j in itertools.product(range(n), repeat=2)
                              if m.g_inv[i, j] != 0 and ric[i, j] != 0]))
    return CurvatureData(riemann_t, ricci_t, sc.simplify(scal))


def ricci_of(conn: Connection) -> CurvatureData:
    """Ricci of a possibly torsionful connection (no symmetrization)."""
    return riemann(conn)


def ricci_split(cd: CurvatureData) -> tuple[TensorField, TensorField]:
    """Symmetric and antisymmetric parts of the Ricci table."""
    m = cd.ricci.manifold
    n = m.dim
    s = np.empty((n, n), dtype=object)
    a = np.empty((n, n), dtype=object)
    for i, j in itertools.product(range(n), repeat=2):
        s[i, j] = sp.expand((cd.ricci.comp[i, j] + cd.ricci.comp[j, i]) / 2)
        a[i, j] = sp.expand((cd.ricci.comp[i, j] - cd.ricci.comp[j, i]) / 2)
    return (TensorField(m, DOWN * 2, s), TensorField(m, DOWN * 2, a))


def covariant_derivative(conn: Connection, t: TensorField) -> TensorField:
    """nabla t with the derivative slot prepended: (nabla t)[a, idx...]."""
    m = conn.manifold
    n = m.dim
    comp = np.empty((n,) * (t.rank + 1), dtype=object)
    for a in range(n):
        for idx in itertools.product(range(n), repeat=t.rank):
            acc = [m.direct(a, t.comp[idx])]
            for slot in range(t.rank):
                for mm in range(n):
                    src = idx[:slot] + (mm,) + idx[slot + 1:]
                    if t.comp[src] == 0:
                        continue
                    if t.types[slot] == UP:
                        gam = conn.gamma[idx[slot], a, mm]
                        if gam != 0:
                            acc.append(gam * t.comp[src])
                    else:
                        gam = conn.gamma[mm, a, idx[slot]]
                        if gam != 0:
                            acc.append(-gam * t.comp[src])
            comp[(a,) + idx] = sp.expand(sp.Add(*acc))
    return TensorField(m, DOWN + t.types, comp)


def first_bianchi_residual(cd: CurvatureData) -> TensorField:
    """Cyclic sum R(X,Y)Z + R(Y,Z)X + R(Z,X)Y, zero for Levi-Civita."""
    r = cd.riemann.comp
    m = cd.riemann.manifold
    n = m.dim
    comp = np.empty((n, n, n, n), dtype=object)
    for l, i, j, k in itertools.product(range(n), repeat=4):
        comp[l, i, j, k] = sp.expand(r[l, k, i, j] + r[l, i, j, k] + r[l, j, k, i])
    return TensorField(m, UP + DOWN * 3, comp)


def second_bianchi_residual(conn: Connection, cd: CurvatureData) -> TensorField:
    """Cyclic (nabla_a R)(i,j) sum over (a,i,j), zero for Levi-Civita."""
    dr = covariant_derivative(conn, cd.riemann).comp  # [a, l, k, i, j]
    m = conn.manifold
    n = m.dim
    comp = np.empty((n,) * 5, dtype=object)
    for a, l, k, i, j in itertools.product(range(n), repeat=5):
        comp[a, l, k, i, j] = sp.expand(dr[a, l, k, i, j] + dr[i, l, k, j, a]
                                        + dr[j, l, k, a, i])
    return TensorField(m, DOWN + UP + DOWN * 3, comp)


def oracle_levi_civita(m: FrameManifold) -> Connection:
    """Independent Levi-Civita path: solve metricity + zero torsion linearly.

    Treats all low[k,i,j] = g(nabla_i e_j, e_k) as unknowns and solves
      low[k,i,j] + low[j,i,k] = e_i(g_jk)         (metricity)
      low[k,i,j] - low[k,j,i] = g([e_i,e_j],e_k)  (torsion-free)
    exactly with sympy, then raises the first index.  Test oracle only.
    """
    n = m.dim
    unknowns = {(k, i, j): sp.Dummy(f"G_{k}_{i}_{j}")
                for k, i, j in itertools.product(range(n), repeat=3)}
    eqs = []
    for i, j, k in itertools.product(range(n), repeat=3):
        eqs.append(sp.Eq(unknowns[(k, i, j)] + unknowns[(j, i, k)],
                         m.direct(i, m.g[j, k])))
        bracket = sp.Add(*[m.c[a, i, j] * m.g[a, k] for a in range(n)])
        eqs.append(sp.Eq(unknowns[(k, i, j)] - unknowns[(k, j, i)], bracket))
    order = [unknowns[key] for key in sorted(unknowns)]
    sol = sp.solve(eqs, order, dict=True)
    if len(sol) != 1:
        raise FrameError("metricity/torsion system did not determine the connection")
    vals = sol[0]
    gamma = np.empty((n, n, n), dtype=object)
    for l, i, j in itertools.product(range(n), repeat=3):
        gamma[l, i, j] = sp.expand(sp.Add(
            *[m.g_inv[l, k] * vals[unknowns[(k, i, j)]] for k in range(n)]))
    return Connection(m, gamma, torsion_form=None)
