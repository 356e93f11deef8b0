"""Tensor algebra and exterior calculus on globally framed manifolds.

A manifold is presented by a global frame e_1..e_n with structure
functions c^k_ij (so [e_i, e_j] = sum_k c^k_ij e_k plus partial-derivative
terms on coordinate frames), symmetric metric components g_ij and an
orientation sign fixing nu = sign * sqrt(|det g|) * e^1 ^ ... ^ e^n.

Conventions (load-bearing, everything downstream depends on them):

* wedge uses the shuffle convention, so (e^1 ^ e^2)(e_1, e_2) = 1;
* the p-form inner product is <a,b> = (1/p!) a_K b^K (full contraction);
* hodge satisfies  eta ^ star(omega) = <eta, omega> nu  for all eta;
* d omega carries no 1/(p+1) factor, so for left-invariant one-forms
  d alpha(e_i, e_j) = -alpha([e_i, e_j]).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import sympy as sp

from . import scalar as sc
from .scalar import Assumptions, ScalarError, Verdict

UP, DOWN = "u", "d"


class FrameError(ValueError):
    """Ill-formed manifold or tensor data."""


class DegenerateMetric(FrameError):
    pass


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _sign_of_arrangement(idx: Sequence[int]) -> int:
    """Sign of the permutation sorting ``idx``; 0 on repeats."""
    if len(set(idx)) != len(idx):
        return 0
    order = sorted(range(len(idx)), key=lambda k: idx[k])
    return _perm_sign(order)


class FrameManifold:
    """Manifold presented by a global frame, structure functions and metric."""

    def __init__(self, labels: Sequence[str], structure, metric,
                 orientation: int = 1, signature: int = 1,
                 coords: Optional[Sequence[Optional[sp.Symbol]]] = None,
                 assumptions: Optional[Assumptions] = None,
                 name: str = "", validate: bool = True):
        self.dim = len(labels)
        self.labels = tuple(labels)
        self.name = name or "-".join(labels)
        n = self.dim
        self.c = np.empty((n, n, n), dtype=object)
        for k, i, j in itertools.product(range(n), repeat=3):
            self.c[k, i, j] = sp.sympify(structure[k][i][j]) if not isinstance(
                structure, np.ndarray) else sp.sympify(structure[k, i, j])
        self.g = np.empty((n, n), dtype=object)
        for i, j in itertools.product(range(n), repeat=2):
            self.g[i, j] = sp.sympify(metric[i][j]) if not isinstance(
                metric, np.ndarray) else sp.sympify(metric[i, j])
        if orientation not in (1, -1):
            raise FrameError("orientation must be +1 or -1")
        if signature not in (1, -1):
            raise FrameError("signature tag must be +1 (Riemannian) or -1 (Lorentzian)")
        self.orientation = orientation
        self.s_g = signature
        self.coords = tuple(coords) if coords is not None else (None,) * n
        if len(self.coords) != n:
            raise FrameError("one coordinate entry per frame direction required")
        self.assumptions = assumptions if assumptions is not None else Assumptions()
        self.factors: list[tuple["FrameManifold", int]] = []
        self._derived_cache: dict = {}
        gm = sp.Matrix(n, n, lambda i, j: self.g[i, j])
        self.g_matrix = gm
        self.det_g = sp.cancel(gm.det(method="berkowitz"))
        if validate:
            self._validate()
        self.g_inv_matrix = gm.inv(method="ADJ") if n <= 4 else gm.inv(method="LU")
        self.g_inv_matrix = self.g_inv_matrix.applyfunc(sp.cancel)
        self.g_inv = np.array(self.g_inv_matrix.tolist(), dtype=object)
        abs_det = sp.cancel(self.det_g if self.s_g > 0 else -self.det_g)
        scale = sp.sqrt(abs_det)
        if scale.atoms(sp.Pow) and any(not p.exp.is_Integer for p in scale.atoms(sp.Pow)):
            raise FrameError(
                f"sqrt|det g| = {scale} leaves the supported scalar grammar")
        self.vol_scale = sp.cancel(scale)

    # -- validation ---------------------------------------------------------

    def _validate(self) -> None:
        n = self.dim
        for k, i, j in itertools.product(range(n), repeat=3):
            if sc.simplify(self.c[k, i, j] + self.c[k, j, i]) != 0:
                raise FrameError(f"structure functions not antisymmetric at "
                                 f"c^{k}_{i}{j}")
        for i, j in itertools.product(range(n), repeat=2):
            if sc.simplify(self.g[i, j] - self.g[j, i]) != 0:
                raise FrameError(f"metric not symmetric at g_{i}{j}")
        if self._constant_structure():
            for l, (i, j, k) in itertools.product(
                    range(n), itertools.combinations(range(n), 3)):
                acc = sp.S.Zero
                for m in range(n):
                    acc += (self.c[m, i, j] * self.c[l, m, k]
                            + self.c[m, j, k] * self.c[l, m, i]
                            + self.c[m, k, i] * self.c[l, m, j])
                if sc.simplify(acc) != 0:
                    raise FrameError(
                        f"Jacobi identity fails for triple {(i, j, k)} -> e_{l}")
        det_verdict = sc.is_zero(self.det_g, self.assumptions)
        if det_verdict.verdict is not Verdict.NONZERO:
            raise DegenerateMetric(
                f"det g = {self.det_g} not certified nonzero "
                f"({det_verdict.verdict.value})")
        if self.dim == 3 and self.det_g.is_Rational:
            if (self.det_g > 0) != (self.s_g > 0):
                raise FrameError("signature tag does not match the sign of det g")

    def _constant_structure(self) -> bool:
        coords = {c for c in self.coords if c is not None}
        return all(not sp.sympify(self.c[k, i, j]).free_symbols & coords
                   for k, i, j in itertools.product(range(self.dim), repeat=3))

    # -- basic queries ------------------------------------------------------

    def direct(self, i: int, f) -> sp.Expr:
        """Directional derivative of a scalar along frame vector e_i."""
        v = self.coords[i]
        if v is None:
            return sp.S.Zero
        return sp.diff(sp.sympify(f), v)

    def coordinate_symbols(self) -> set[sp.Symbol]:
        return {c for c in self.coords if c is not None}

    def check_scalar(self, e) -> sp.Expr:
        e = sp.sympify(e)
        stray = {s for s in e.free_symbols if s.name in sc._COORDS} \
            - self.coordinate_symbols()
        if stray:
            raise FrameError(
                f"scalar {e} uses coordinates {sorted(stray, key=str)} "
                f"that do not live on {self.name}")
        return e

    def with_orientation(self, orientation: int) -> "FrameManifold":
        if orientation == self.orientation:
            return self
        m = FrameManifold(self.labels, self.c, self.g, orientation, self.s_g,
                          self.coords, self.assumptions, self.name, validate=False)
        m.factors = self.factors
        return m

    def __repr__(self) -> str:
        kind = "Riemannian" if self.s_g > 0 else "Lorentzian"
        return f"<FrameManifold {self.name} dim={self.dim} {kind}>"


@dataclass
class TensorField:
    """Dense component table over the frame, with declared slot types.

    ``types`` is a string over {'u', 'd'} (contravariant / covariant per
    slot).  ``form=True`` asserts total antisymmetry of an all-'d' table
    and is checked on construction.
    """

    manifold: FrameManifold
    types: str
    comp: np.ndarray
    form: bool = False

    def __post_init__(self):
        n = self.manifold.dim
        want = (n,) * len(self.types)
        if self.comp.shape != want:
            raise FrameError(f"component table shape {self.comp.shape} != {want}")
        for idx in np.ndindex(self.comp.shape):
            v = self.comp[idx]
            if not isinstance(v, sp.Expr):
                v = sp.sympify(v)
                self.comp[idx] = v
            if v.free_symbols:
                self.manifold.check_scalar(v)
        if self.form:
            if set(self.types) - {DOWN}:
                raise FrameError("forms must be fully covariant")
            self._check_antisymmetry()

    def _check_antisymmetry(self):
        n = self.manifold.dim
        p = self.rank
        for idx in itertools.product(range(n), repeat=p):
            if len(set(idx)) != p:
                v = self.comp[idx]
                if v != 0 and sc.simplify(v) != 0:
                    raise FrameError(f"form has nonzero repeated-index entry {idx}")
        for base in itertools.combinations(range(n), p):
            ref = self.comp[base]
            for per in itertools.permutations(range(p)):
                idx = tuple(base[i] for i in per)
                want = _perm_sign(per) * ref
                v = self.comp[idx]
                if v == want:
                    continue
                if sc.simplify(v - want) != 0:
                    raise FrameError(f"form components not antisymmetric at {idx}")

    @property
    def rank(self) -> int:
        return len(self.types)

    def map(self, fn) -> "TensorField":
        out = np.empty(self.comp.shape, dtype=object)
        for idx in np.ndindex(self.comp.shape):
            out[idx] = fn(self.comp[idx])
        return TensorField(self.manifold, self.types, out, self.form)

    def canonical(self) -> "TensorField":
        return self.map(sc.simplify)

    def expand(self) -> "TensorField":
        return self.map(sp.expand)

    def __add__(self, other: "TensorField") -> "TensorField":
        self._compat(other)
        return TensorField(self.manifold, self.types,
                           np.vectorize(lambda a, b: sp.expand(a + b),
                                        otypes=[object])(self.comp, other.comp),
                           self.form and other.form)

    def __sub__(self, other: "TensorField") -> "TensorField":
        return self + (other * sp.Integer(-1))

    def __mul__(self, scalar) -> "TensorField":
        s = sp.sympify(scalar)
        return TensorField(self.manifold, self.types,
                           np.vectorize(lambda a: sp.expand(s * a),
                                        otypes=[object])(self.comp), self.form)

    __rmul__ = __mul__

    def _compat(self, other: "TensorField"):
        if other.manifold is not self.manifold or other.types != self.types:
            raise FrameError("tensor fields are not compatible")

    def is_zero_tensor(self) -> bool:
        return not self.nonzero_components()

    def nonzero_components(self) -> list[tuple[tuple[int, ...], sp.Expr]]:
        out = []
        for idx in np.ndindex(self.comp.shape):
            v = self.comp[idx]
            if v == 0:
                continue
            v = sc.simplify(v)
            if v != 0:
                out.append((idx, v))
        return out

    def apply(self, *args: "TensorField") -> sp.Expr:
        """Full contraction against one vector/one-form per slot."""
        if len(args) != self.rank:
            raise FrameError("argument count must match tensor rank")
        n = self.manifold.dim
        acc = []
        for idx in itertools.product(range(n), repeat=self.rank):
            term = self.comp[idx]
            if term == 0:
                continue
            for slot, a in enumerate(args):
                want = UP if self.types[slot] == DOWN else DOWN
                if a.types != want:
                    raise FrameError("slot/argument variance mismatch")
                term = term * a.comp[idx[slot]]
            acc.append(term)
        return sp.expand(sp.Add(*acc))


# ---------------------------------------------------------------------------
# constructors

def zero_tensor(m: FrameManifold, types: str, form: bool = False) -> TensorField:
    comp = np.full((m.dim,) * len(types), sp.S.Zero, dtype=object)
    return TensorField(m, types, comp, form)


def vector(m: FrameManifold, components: Sequence) -> TensorField:
    return TensorField(m, UP, np.array([sp.sympify(v) for v in components],
                                       dtype=object))


def one_form(m: FrameManifold, components: Sequence) -> TensorField:
    return TensorField(m, DOWN, np.array([sp.sympify(v) for v in components],
                                         dtype=object), form=True)


def form_from_sorted(m: FrameManifold, rank: int, entries: dict) -> TensorField:
    """Build a p-form from values on strictly increasing index tuples."""
    comp = np.full((m.dim,) * rank, sp.S.Zero, dtype=object)
    for idx, val in entries.items():
        val = sp.sympify(val)
        if list(idx) != sorted(idx):
            raise FrameError(f"entries must use sorted index tuples, got {idx}")
        for per in itertools.permutations(range(rank)):
            comp[tuple(idx[k] for k in per)] = _perm_sign(per) * val
    return TensorField(m, DOWN * rank, comp, form=True)


def basis_vector(m: FrameManifold, i: int) -> TensorField:
    comp = np.full((m.dim,), sp.S.Zero, dtype=object)
    comp[i] = sp.S.One
    return TensorField(m, UP, comp)


def basis_form(m: FrameManifold, idx: Sequence[int]) -> TensorField:
    """The coframe wedge e^{i1} ^ ... ^ e^{ip} for strictly increasing idx."""
    return form_from_sorted(m, len(idx), {tuple(idx): sp.S.One})


def metric_tensor(m: FrameManifold) -> TensorField:
    return TensorField(m, DOWN + DOWN, m.g.copy())


def tensor_product(a: TensorField, b: TensorField) -> TensorField:
    if a.manifold is not b.manifold:
        raise FrameError("tensor product requires a common manifold")
    n = a.manifold.dim
    comp = np.empty((n,) * (a.rank + b.rank), dtype=object)
    for ia in itertools.product(range(n), repeat=a.rank):
        for ib in itertools.product(range(n), repeat=b.rank):
            comp[ia + ib] = sp.expand(a.comp[ia] * b.comp[ib])
    return TensorField(a.manifold, a.types + b.types, comp)


def sym_product(a: TensorField, b: TensorField) -> TensorField:
    """Symmetric product a (.) b = a x b + b x a of two one-forms."""
    return tensor_product(a, b) + tensor_product(b, a)


# ---------------------------------------------------------------------------
# raising / lowering and inner products

def _contract_slot_comp(comp: np.ndarray, n: int, slot: int, matrix) -> np.ndarray:
    """Scatter nonzero entries through the metric/inverse matrix; cost
    scales with the number of nonzero components."""
    acc: dict[tuple, list] = {}
    for idx in np.ndindex(comp.shape):
        v = comp[idx]
        if v == 0:
            continue
        for k in range(n):
            gk = matrix[k, idx[slot]]
            if gk == 0:
                continue
            dst = idx[:slot] + (k,) + idx[slot + 1:]
            acc.setdefault(dst, []).append(gk * v)
    out = np.full(comp.shape, sp.S.Zero, dtype=object)
    for dst, terms in acc.items():
        out[dst] = sp.expand(sp.Add(*terms))
    return out


def _raised_comp(t: TensorField) -> np.ndarray:
    comp = t.comp
    for slot in range(t.rank):
        if t.types[slot] == DOWN:
            comp = _contract_slot_comp(comp, t.manifold.dim, slot,
                                       t.manifold.g_inv)
    return comp


def raise_slot(t: TensorField, slot: int) -> TensorField:
    if t.types[slot] != DOWN:
        raise FrameError("slot is already contravariant")
    comp = _contract_slot_comp(t.comp, t.manifold.dim, slot, t.manifold.g_inv)
    return TensorField(t.manifold, t.types[:slot] + UP + t.types[slot + 1:],
                       comp)


def lower_slot(t: TensorField, slot: int) -> TensorField:
    if t.types[slot] != UP:
        raise FrameError("slot is already covariant")
    comp = _contract_slot_comp(t.comp, t.manifold.dim, slot, t.manifold.g)
    return TensorField(t.manifold, t.types[:slot] + DOWN + t.types[slot + 1:],
                       comp)


def sharp(alpha: TensorField) -> TensorField:
    if alpha.types != DOWN:
        raise FrameError("sharp expects a one-form")
    return raise_slot(alpha, 0)


def flat(x: TensorField) -> TensorField:
    if x.types != UP:
        raise FrameError("flat expects a vector field")
    t = lower_slot(x, 0)
    return TensorField(t.manifold, DOWN, t.comp, form=True)


def raise_all(t: TensorField) -> TensorField:
    out = t
    for slot in range(t.rank):
        if out.types[slot] == DOWN:
            out = raise_slot(out, slot)
    return out


def form_inner(a: TensorField, b: TensorField) -> sp.Expr:
    """<a,b> = (1/p!) full contraction = sum over sorted tuples."""
    if a.manifold is not b.manifold or a.rank != b.rank:
        raise FrameError("inner product needs same-degree forms on one manifold")
    if a.rank == 0:
        raise FrameError("rank-0 handled by plain multiplication")
    bup = _raised_comp(b)
    acc = [a.comp[K] * bup[K]
           for K in itertools.combinations(range(a.manifold.dim), a.rank)]
    return sp.expand(sp.Add(*acc))


def full_contraction(a: TensorField, b: TensorField) -> sp.Expr:
    """a_K b^K over all index tuples (p! times form_inner on forms)."""
    if a.manifold is not b.manifold or a.types != b.types:
        raise FrameError("full contraction needs identically shaped tensors")
    bup = _raised_comp(b)
    acc = []
    for idx in itertools.product(range(a.manifold.dim), repeat=a.rank):
        if a.comp[idx] != 0 and bup[idx] != 0:
            acc.append(a.comp[idx] * bup[idx])
    return sp.expand(sp.Add(*acc))


def norm_squared(t: TensorField) -> sp.Expr:
    if t.rank == 1:
        return sp.expand(full_contraction(t if t.types == DOWN else flat(t),
                                          t if t.types == DOWN else flat(t)))
    return form_inner(t, t)


# ---------------------------------------------------------------------------
# exterior algebra

def wedge(a: TensorField, b: TensorField) -> TensorField:
    """Shuffle-convention wedge product of forms."""
    if a.manifold is not b.manifold:
        raise FrameError("wedge requires a common manifold")
    if not (a.form or a.rank == 0) or not (b.form or b.rank == 0):
        raise FrameError("wedge expects forms")
    m = a.manifold
    p, q = a.rank, b.rank
    if p + q > m.dim:
        raise FrameError(f"wedge degree {p}+{q} exceeds dim {m.dim}")
    if p == 0 or q == 0:
        return (a * b.comp[()] if q == 0 else b * a.comp[()])
    entries = {}
    for S in itertools.combinations(range(m.dim), p + q):
        acc = []
        for pick in itertools.combinations(range(p + q), p):
            T = tuple(S[k] for k in pick)
            U = tuple(S[k] for k in range(p + q) if k not in pick)
            av, bv = a.comp[T], b.comp[U]
            if av == 0 or bv == 0:
                continue
            acc.append(_sign_of_arrangement(T + U) * av * bv)
        entries[S] = sp.expand(sp.Add(*acc))
    return form_from_sorted(m, p + q, entries)


def interior(x: TensorField, w: TensorField) -> TensorField:
    """Interior product (iota_X w)(Y_2..Y_p) = w(X, Y_2..Y_p)."""
    if x.types != UP:
        raise FrameError("interior expects a vector field first")
    if w.rank == 0:
        raise FrameError("interior product of a 0-form is undefined")
    m = w.manifold
    n = m.dim
    comp = np.full((n,) * (w.rank - 1), sp.S.Zero, dtype=object)
    for idx in itertools.product(range(n), repeat=w.rank - 1):
        acc = [x.comp[i] * w.comp[(i,) + idx] for i in range(n)
               if x.comp[i] != 0 and w.comp[(i,) + idx] != 0]
        comp[idx] = sp.expand(sp.Add(*acc))
    return TensorField(m, DOWN * (w.rank - 1), comp, form=w.form)


def volume_form(m: FrameManifold) -> TensorField:
    return form_from_sorted(m, m.dim, {tuple(range(m.dim)):
                                       m.orientation * m.vol_scale})


def epsilon_component(m: FrameManifold, idx: Sequence[int]) -> sp.Expr:
    return _sign_of_arrangement(idx) * m.orientation * m.vol_scale


def hodge(w: TensorField) -> TensorField:
    """Hodge dual: the unique form with eta ^ star(w) = <eta, w> nu."""
    m = w.manifold
    n, p = m.dim, w.rank
    if p == 0:
        return volume_form(m) * w.comp[()]
    wup = _raised_comp(w)
    entries = {}
    for J in itertools.combinations(range(n), n - p):
        C = tuple(k for k in range(n) if k not in J)
        entries[J] = sp.expand(wup[C] * epsilon_component(m, C + J))
    return form_from_sorted(m, n - p, entries)


def ext_d(w: TensorField) -> TensorField:
    """Exterior derivative (no 1/(p+1) normalization)."""
    m = w.manifold
    n = m.dim
    if w.rank == 0:
        comp = np.array([m.direct(i, w.comp[()]) for i in range(n)], dtype=object)
        return TensorField(m, DOWN, comp, form=True)
    if not w.form:
        raise FrameError("ext_d expects a differential form")
    p = w.rank
    if p == n:
        raise FrameError(f"no ({p + 1})-forms on a dim-{n} manifold")
    entries = {}
    for K in itertools.combinations(range(n), p + 1):
        acc = []
        for i in range(p + 1):
            rest = K[:i] + K[i + 1:]
            dterm = m.direct(K[i], w.comp[rest])
            if dterm != 0:
                acc.append((-1) ** i * dterm)
        for i, j in itertools.combinations(range(p + 1), 2):
            rest = tuple(K[r] for r in range(p + 1) if r not in (i, j))
            for mm in range(n):
                cm = m.c[mm, K[i], K[j]]
                if cm == 0:
                    continue
                val = w.comp[(mm,) + rest]
                if val != 0:
                    acc.append((-1) ** (i + j) * cm * val)
        entries[K] = sp.expand(sp.Add(*acc))
    return form_from_sorted(m, p + 1, entries)


# ---------------------------------------------------------------------------
# Lie brackets and derivatives

def lie_bracket(x: TensorField, y: TensorField) -> TensorField:
    if x.types != UP or y.types != UP or x.manifold is not y.manifold:
        raise FrameError("lie_bracket expects two vector fields on one manifold")
    m = x.manifold
    n = m.dim
    comp = np.full((n,), sp.S.Zero, dtype=object)
    for k in range(n):
        acc = []
        for i in range(n):
            if x.comp[i] != 0:
                d = m.direct(i, y.comp[k])
                if d != 0:
                    acc.append(x.comp[i] * d)
            if y.comp[i] != 0:
                d = m.direct(i, x.comp[k])
                if d != 0:
                    acc.append(-y.comp[i] * d)
        for i, j in itertools.product(range(n), repeat=2):
            cij = m.c[k, i, j]
            if cij == 0 or x.comp[i] == 0 or y.comp[j] == 0:
                continue
            acc.append(x.comp[i] * y.comp[j] * cij)
        comp[k] = sp.expand(sp.Add(*acc))
    return TensorField(m, UP, comp)


def directional(x: TensorField, f) -> sp.Expr:
    m = x.manifold
    return sp.expand(sp.Add(*[x.comp[i] * m.direct(i, f)
                              for i in range(m.dim) if x.comp[i] != 0]))


def lie_derivative(x: TensorField, t: TensorField) -> TensorField:
    """Lie derivative along x of scalars, vectors, (0,p) and (1,1) tensors."""
    m = t.manifold
    n = m.dim
    if t.types == "":
        return TensorField(m, "", np.array(directional(x, t.comp[()]),
                                           dtype=object).reshape(()))
    if t.types == UP:
        return lie_bracket(x, t)
    if set(t.types) == {DOWN}:
        frame = [basis_vector(m, i) for i in range(n)]
        comp = np.empty(t.comp.shape, dtype=object)
        for idx in itertools.product(range(n), repeat=t.rank):
            acc = [directional(x, t.comp[idx])]
            for slot in range(t.rank):
                br = lie_bracket(x, frame[idx[slot]])
                for mm in range(n):
                    if br.comp[mm] == 0:
                        continue
                    src = idx[:slot] + (mm,) + idx[slot + 1:]
                    if t.comp[src] != 0:
                        acc.append(-br.comp[mm] * t.comp[src])
            comp[idx] = sp.expand(sp.Add(*acc))
        return TensorField(m, t.types, comp, form=t.form)
    if t.types == UP + DOWN:
        # (L_x T)(v) = [x, T(v)] - T([x, v]) on frame vectors
        frame = [basis_vector(m, i) for i in range(n)]
        cols = []
        for j in range(n):
            tv = vector(m, [t.comp[k, j] for k in range(n)])
            col = lie_bracket(x, tv)
            br = lie_bracket(x, frame[j])
            for mm in range(n):
                if br.comp[mm] == 0:
                    continue
                col = col - vector(m, [br.comp[mm] * t.comp[k, mm]
                                       for k in range(n)])
            cols.append(col)
        comp = np.empty((n, n), dtype=object)
        for k, j in itertools.product(range(n), repeat=2):
            comp[k, j] = cols[j].comp[k]
        return TensorField(m, UP + DOWN, comp)
    raise FrameError(f"lie_derivative not implemented for valence {t.types!r}")


# ---------------------------------------------------------------------------
# products

def product_manifold(n_factor: FrameManifold, x_factor: FrameManifold,
                     name: str = "") -> FrameManifold:
    """Direct product with block metric; Lorentzian x Riemannian -> Lorentzian."""
    if n_factor.s_g != -1 or x_factor.s_g != 1:
        raise FrameError("product expects a Lorentzian first factor and a "
                         "Riemannian second factor")
    shared = set(n_factor.labels) & set(x_factor.labels)
    labels = tuple(n_factor.labels) + tuple(
        (l + "'") if l in shared else l for l in x_factor.labels)
    dim = len(labels)
    off = n_factor.dim
    c = np.full((dim, dim, dim), sp.S.Zero, dtype=object)
    g = np.full((dim, dim), sp.S.Zero, dtype=object)
    for k, i, j in itertools.product(range(n_factor.dim), repeat=3):
        c[k, i, j] = n_factor.c[k, i, j]
    for k, i, j in itertools.product(range(x_factor.dim), repeat=3):
        c[k + off, i + off, j + off] = x_factor.c[k, i, j]
    for i, j in itertools.product(range(n_factor.dim), repeat=2):
        g[i, j] = n_factor.g[i, j]
    for i, j in itertools.product(range(x_factor.dim), repeat=2):
        g[i + off, j + off] = x_factor.g[i, j]
    coords = n_factor.coords + x_factor.coords
    m = FrameManifold(labels, c, g,
                      orientation=n_factor.orientation * x_factor.orientation,
                      signature=-1, coords=coords,
                      assumptions=n_factor.assumptions.merged(x_factor.assumptions),
                      name=name or f"{n_factor.name}*{x_factor.name}",
                      validate=False)
    m.factors = [(n_factor, 0), (x_factor, off)]
    return m


def promote(t: TensorField, p: FrameManifold) -> TensorField:
    """Zero-extension of a factor tensor to the product manifold."""
    offs = [off for f, off in p.factors if f is t.manifold]
    if not offs:
        raise FrameError(f"{t.manifold.name} is not a factor of {p.name}")
    off = offs[0]
    n = p.dim
    comp = np.full((n,) * t.rank, sp.S.Zero, dtype=object)
    nd = t.manifold.dim
    for idx in itertools.product(range(nd), repeat=t.rank):
        comp[tuple(i + off for i in idx)] = t.comp[idx]
    return TensorField(p, t.types, comp, form=t.form)


def factor_slice(p: FrameManifold, which: int) -> range:
    f, off = p.factors[which]
    return range(off, off + f.dim)
