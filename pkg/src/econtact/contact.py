"""Epsilon-contact structures on framed 3-manifolds and the null theory.

A structure is a one-form alpha with  alpha = star d(alpha)  and constant
|alpha|^2 = epsilon in {-1, 0, +1}.  Derived objects: the Reeb field
xi = sharp(alpha), the endomorphism  phi(v) = -s_g sharp(iota_v star alpha)
and  h = L_xi phi.  epsilon = 0 (lightlike Reeb field) is the null case,
with the associated square-zero endomorphism J on M x R and Thompson's
three integrability conditions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
import sympy as sp

from . import scalar as sc
from .curvature import Connection, covariant_derivative, levi_civita
from .frames import (DOWN, UP, FrameError, FrameManifold, TensorField,
                     basis_vector, ext_d, flat, full_contraction, hodge,
                     interior, lie_bracket, lie_derivative, one_form, sharp,
                     tensor_product, vector, wedge, zero_tensor)
from .scalar import Assumptions, Verdict, ZeroResult


class ContactError(ValueError):
    pass


@dataclass
class CheckItem:
    name: str
    verdict: Verdict
    witness: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.ZERO


class VerificationFailure(ContactError):
    def __init__(self, message: str, checks: Sequence[CheckItem] = ()):
        super().__init__(message)
        self.checks = list(checks)


def tensor_verdict(t: TensorField, assumptions: Assumptions,
                   seed: int = 0) -> tuple[Verdict, Optional[tuple], Optional[sp.Expr]]:
    """Aggregate component-wise zero test: ZERO if all components are
    canonically zero, NONZERO with the first certified witness component,
    UNKNOWN otherwise."""
    pending = []
    for idx in np.ndindex(t.comp.shape):
        v = sc.simplify(t.comp[idx])
        if v != 0:
            pending.append((idx, v))
    if not pending:
        return Verdict.ZERO, None, None
    unknown = None
    for idx, v in pending:
        r = sc.is_zero(v, assumptions, seed)
        if r.verdict is Verdict.NONZERO:
            return Verdict.NONZERO, idx, v
        if unknown is None:
            unknown = (idx, v)
    return Verdict.UNKNOWN, unknown[0], unknown[1]


# ---------------------------------------------------------------------------
# the structure itself

@dataclass
class EpsilonContactStructure:
    manifold: FrameManifold
    alpha: TensorField
    epsilon: int
    seed: int = 0
    provenance: list[str] = field(default_factory=list)
    frame_basis: Optional[list[TensorField]] = None  # preferred search basis
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def s_g(self) -> int:
        return self.manifold.s_g

    @property
    def assumptions(self) -> Assumptions:
        return self.manifold.assumptions

    def reeb(self) -> TensorField:
        if "xi" not in self._cache:
            self._cache["xi"] = sharp(self.alpha).canonical()
        return self._cache["xi"]

    def phi_endo(self) -> TensorField:
        if "phi" not in self._cache:
            m = self.manifold
            star_a = hodge(self.alpha)
            cols = [sharp(interior(basis_vector(m, j), star_a)) * (-m.s_g)
                    for j in range(m.dim)]
            comp = np.empty((m.dim, m.dim), dtype=object)
            for k, j in itertools.product(range(m.dim), repeat=2):
                comp[k, j] = sp.expand(cols[j].comp[k])
            self._cache["phi"] = TensorField(m, UP + DOWN, comp)
        return self._cache["phi"]

    def h_tensor(self) -> TensorField:
        if "h" not in self._cache:
            self._cache["h"] = lie_derivative(self.reeb(),
                                              self.phi_endo()).canonical()
        return self._cache["h"]

    def levi_civita(self) -> Connection:
        if "lc" not in self._cache:
            self._cache["lc"] = levi_civita(self.manifold)
        return self._cache["lc"]

    def kind(self) -> str:
        if self.s_g > 0:
            return "riemannian-contact"
        return {-1: "lorentzian-contact", 1: "para-contact",
                0: "null-contact"}[self.epsilon]


def verify_epsilon_contact(m: FrameManifold, alpha: TensorField,
                           orientation: str | int = "auto",
                           seed: int = 0) -> EpsilonContactStructure:
    """Check the two defining equations and read epsilon off |alpha|^2.

    ``orientation`` may be +1, -1 or "auto" (try both signs and record the
    choice).  Degenerate alpha (no component certified nonzero) is
    rejected even though alpha = 0 satisfies both equations vacuously.
    """
    if m.dim != 3:
        raise ContactError("epsilon-contact structures live on 3-manifolds")
    if alpha.manifold is not m or alpha.types != DOWN:
        raise ContactError("alpha must be a one-form on the given manifold")
    nz = tensor_verdict(alpha, m.assumptions, seed)
    if nz[0] is not Verdict.NONZERO:
        raise VerificationFailure(
            "alpha is not certified nowhere-vanishing (degenerate input): "
            f"component verdict {nz[0].value}",
            [CheckItem("alpha-nowhere-zero", nz[0])])
    norm = sc.simplify(full_contraction(alpha, alpha))
    coords = m.coordinate_symbols()
    if norm.free_symbols & coords:
        raise VerificationFailure(
            f"|alpha|^2 = {norm} is not constant", [
                CheckItem("alpha-norm-constant", Verdict.NONZERO, str(norm))])
    if norm not in (sp.Integer(-1), sp.Integer(0), sp.Integer(1)):
        raise VerificationFailure(
            f"|alpha|^2 = {norm} is constant but not in {{-1, 0, 1}}", [
                CheckItem("alpha-norm-value", Verdict.NONZERO, str(norm))])
    eps = int(norm)

    tried: list[tuple[int, TensorField]] = []
    signs = (1, -1) if orientation == "auto" else (int(orientation),)
    for sign in signs:
        mm = m.with_orientation(sign)
        aa = TensorField(mm, DOWN, alpha.comp.copy(), form=True)
        residual = (hodge(ext_d(aa)) - aa).canonical()
        if residual.is_zero_tensor():
            s = EpsilonContactStructure(mm, aa, eps, seed)
            if orientation == "auto":
                s.provenance.append(f"orientation auto-detected: {sign:+d}")
            return s
        tried.append((sign, residual))
    wit = "; ".join(
        f"sign {sign:+d}: (star d alpha - alpha)_{idx} = {val}"
        for sign, res in tried for idx, val in res.nonzero_components()[:1])
    raise VerificationFailure(
        f"star d alpha != alpha for tried orientation(s): {wit}",
        [CheckItem("star-dalpha", Verdict.NONZERO, wit)])


# ---------------------------------------------------------------------------
# identity suites

def lemma1_report(s: EpsilonContactStructure) -> list[CheckItem]:
    """The six structural identities every verified structure satisfies."""
    m = s.manifold
    n = m.dim
    alpha, xi, phi = s.alpha, s.reeb(), s.phi_endo()
    da = ext_d(alpha)
    sg, eps = m.s_g, s.epsilon
    g_phi = np.empty((n, n), dtype=object)       # g(v_i, phi v_j)
    phi_g = np.empty((n, n), dtype=object)       # g(phi v_i, v_j)
    phi2 = np.empty((n, n), dtype=object)
    g_phiphi = np.empty((n, n), dtype=object)
    for i, j in itertools.product(range(n), repeat=2):
        g_phi[i, j] = sp.expand(sp.Add(*[m.g[i, k] * phi.comp[k, j]
                                         for k in range(n)]))
        phi_g[i, j] = sp.expand(sp.Add(*[m.g[k, j] * phi.comp[k, i]
                                         for k in range(n)]))
        phi2[i, j] = sp.expand(sp.Add(*[phi.comp[i, k] * phi.comp[k, j]
                                        for k in range(n)]))
        g_phiphi[i, j] = sp.expand(sp.Add(
            *[m.g[k, l] * phi.comp[k, i] * phi.comp[l, j]
              for k, l in itertools.product(range(n), repeat=2)]))
    mk = lambda arr: TensorField(m, DOWN * 2, arr)
    checks = [
        ("g(Id(x)phi) = d alpha",
         mk(g_phi) - da),
        ("-g(phi(x)Id) = d alpha",
         mk(phi_g) * sp.Integer(-1) - da),
        ("phi(xi) = 0",
         vector(m, [sp.Add(*[phi.comp[k, j] * xi.comp[j] for j in range(n)])
                    for k in range(n)])),
        ("alpha o phi = 0",
         one_form(m, [sp.Add(*[alpha.comp[k] * phi.comp[k, j]
                               for k in range(n)]) for j in range(n)])),
        ("phi^2 = s_g(-eps Id + xi(x)alpha)",
         TensorField(m, UP + DOWN, np.array(
             [[sp.expand(phi2[i, j]
                         - sg * (-eps * (1 if i == j else 0)
                                 + xi.comp[i] * alpha.comp[j]))
               for j in range(n)] for i in range(n)], dtype=object))),
        ("g(phi(x)phi) = s_g(eps g - alpha(x)alpha)",
         mk(np.array([[sp.expand(g_phiphi[i, j]
                                 - sg * (eps * m.g[i, j]
                                         - alpha.comp[i] * alpha.comp[j]))
                       for j in range(n)] for i in range(n)], dtype=object))),
    ]
    out = []
    for name, residual in checks:
        verdict, idx, val = tensor_verdict(residual, s.assumptions, s.seed)
        out.append(CheckItem(name, verdict,
                             None if idx is None else f"component {idx}: {val}"))
    return out


def prop2_report(s: EpsilonContactStructure) -> list[CheckItem]:
    """Unconditional Levi-Civita identities of the structure tensors."""
    m = s.manifold
    n = m.dim
    xi, phi, h = s.reeb(), s.phi_endo(), s.h_tensor()
    conn = s.levi_civita()

    dxi = covariant_derivative(conn, xi)       # [a, k]
    nabla_xi_xi = vector(m, [sp.Add(*[xi.comp[a] * dxi.comp[a, k]
                                      for a in range(n)]) for k in range(n)])
    dphi = covariant_derivative(conn, phi)     # [a, k, j]
    nabla_xi_phi = TensorField(m, UP + DOWN, np.array(
        [[sp.expand(sp.Add(*[xi.comp[a] * dphi.comp[a, k, j] for a in range(n)]))
          for j in range(n)] for k in range(n)], dtype=object))
    h_xi = vector(m, [sp.Add(*[h.comp[k, j] * xi.comp[j] for j in range(n)])
                      for k in range(n)])
    trace_h = sp.expand(sp.Add(*[h.comp[k, k] for k in range(n)]))
    lie_alpha = lie_derivative(xi, s.alpha)
    anti = TensorField(m, UP + DOWN, np.array(
        [[sp.expand(sp.Add(*[h.comp[i, k] * phi.comp[k, j]
                             + phi.comp[i, k] * h.comp[k, j]
                             for k in range(n)]))
          for j in range(n)] for i in range(n)], dtype=object))
    gh = np.array([[sp.expand(sp.Add(*[m.g[i, k] * h.comp[k, j]
                                       for k in range(n)]))
                    for j in range(n)] for i in range(n)], dtype=object)
    sym_res = TensorField(m, DOWN * 2, np.array(
        [[sp.expand(gh[i, j] - gh[j, i]) for j in range(n)] for i in range(n)],
        dtype=object))

    items = [
        ("nabla_xi xi = 0", nabla_xi_xi),
        ("nabla_xi phi = 0", nabla_xi_phi),
        ("h(xi) = 0", h_xi),
        ("Tr h = 0", TensorField(m, "", np.array(trace_h, dtype=object).reshape(()))),
        ("L_xi alpha = 0", lie_alpha),
        ("h o phi = -phi o h", anti),
        ("h symmetric wrt g", sym_res),
    ]
    out = []
    for name, residual in items:
        verdict, idx, val = tensor_verdict(residual, s.assumptions, s.seed)
        out.append(CheckItem(name, verdict,
                             None if idx is None else f"component {idx}: {val}"))
    if s.epsilon == 0:
        both = TensorField(m, UP + DOWN, np.array(
            [[sp.expand(sp.Add(*[h.comp[i, k] * phi.comp[k, j] for k in range(n)]))
              for j in range(n)] for i in range(n)], dtype=object))
        verdict, idx, val = tensor_verdict(both, s.assumptions, s.seed)
        out.append(CheckItem("h o phi = 0 (null case)", verdict,
                             None if idx is None else f"component {idx}: {val}"))
    return out


# ---------------------------------------------------------------------------
# contact frames

@dataclass
class ContactFrame:
    xi: TensorField
    u: TensorField
    phi_u: TensorField
    coefficients: tuple
    basis: list[TensorField]

    def vectors(self) -> list[TensorField]:
        return [self.xi, self.u, self.phi_u]


def _rationals_of_height(h: int) -> list[sp.Rational]:
    vals = {sp.Integer(0)}
    for q in range(1, h + 1):
        for p in range(1, h + 1):
            if sp.gcd(p, q) == 1:
                vals.add(sp.Rational(p, q))
                vals.add(sp.Rational(-p, q))
    return sorted(vals, key=lambda r: (max(abs(r.p), r.q), r))


def find_contact_frame(s: EpsilonContactStructure,
                       candidate_basis: Optional[Sequence[TensorField]] = None,
                       max_height: int = 8) -> ContactFrame:
    """Search rational combinations of the basis for the frame vector u.

    u must satisfy g(u, xi) = 1 - eps^2 and g(u, u) = s_g eps exactly; the
    derived pairings of the assembled frame (xi, u, phi(u)) are verified
    before returning.  Raises with the searched height on failure.
    """
    m = s.manifold
    n = m.dim
    xi, phi = s.reeb(), s.phi_endo()
    if candidate_basis is None:
        candidate_basis = s.frame_basis
    basis = list(candidate_basis) if candidate_basis is not None else \
        [basis_vector(m, i) for i in range(n)]
    xi_flat = flat(xi)
    lin = [sc.simplify(sp.Add(*[xi_flat.comp[k] * b.comp[k] for k in range(n)]))
           for b in basis]
    gram = [[sc.simplify(sp.Add(*[m.g[a, b] * bi.comp[a] * bj.comp[b]
                                  for a, b in itertools.product(range(n), repeat=2)]))
             for bj in basis] for bi in basis]
    target_lin = sp.Integer(1 - s.epsilon ** 2)
    target_quad = sp.Integer(m.s_g * s.epsilon)

    def admissible(coeffs) -> bool:
        l = sc.simplify(sp.Add(*[c * lv for c, lv in zip(coeffs, lin)]))
        if l != target_lin:
            return False
        q = sc.simplify(sp.Add(*[coeffs[i] * coeffs[j] * gram[i][j]
                                 for i, j in itertools.product(range(len(basis)),
                                                               repeat=2)]))
        return q == target_quad

    found = None
    for h in range(1, max_height + 1):
        pool = _rationals_of_height(h)
        if len(pool) ** len(basis) > 20000:
            break  # switch to the pivot-solve stage at large heights
        for coeffs in itertools.product(pool, repeat=len(basis)):
            if max((max(abs(c.p), c.q) if c != 0 else 0) for c in coeffs) != h:
                continue
            if admissible(coeffs):
                found = coeffs
                break
        if found:
            break
    if found is None:
        found = _solve_stage(basis, lin, target_lin, admissible, max_height)
    if found is None:
        raise ContactError(
            f"no rational contact-frame vector found up to height {max_height}")
    u = vector(m, [sp.expand(sp.Add(*[c * b.comp[k] for c, b in zip(found, basis)]))
                   for k in range(n)])
    phi_u = vector(m, [sp.expand(sp.Add(*[phi.comp[k, j] * u.comp[j]
                                          for j in range(n)]))
                       for k in range(n)])
    frame = ContactFrame(xi, u, phi_u, found, basis)
    pairings = {
        "g(xi,xi) = eps": _pair(m, xi, xi) - s.epsilon,
        "g(xi,phi u) = 0": _pair(m, xi, phi_u),
        "g(u,phi u) = 0": _pair(m, u, phi_u),
        "g(phi u,phi u) = 1": _pair(m, phi_u, phi_u) - 1,
    }
    for name, res in pairings.items():
        if sc.simplify(res) != 0:
            raise ContactError(f"derived pairing {name} fails: residual {res}")
    return frame


def _pair(m: FrameManifold, x: TensorField, y: TensorField) -> sp.Expr:
    return sp.expand(sp.Add(*[m.g[a, b] * x.comp[a] * y.comp[b]
                              for a, b in itertools.product(range(m.dim), repeat=2)]))


def _solve_stage(basis, lin, target_lin, admissible, max_height):
    """High-height search: pin all but one coefficient, solve the linear
    pairing condition for the last one and keep rational solutions."""
    pivots = [i for i, lv in enumerate(lin) if lv.is_Rational and lv != 0]
    if not pivots:
        return None
    pool = _rationals_of_height(max_height)
    free = len(basis) - 1
    for piv in pivots:
        others = [i for i in range(len(basis)) if i != piv]
        for rest in itertools.product(pool, repeat=free):
            solved = sc.simplify(
                (target_lin - sp.Add(*[c * lin[i] for c, i in zip(rest, others)]))
                / lin[piv])
            if not solved.is_Rational or max(abs(solved.p), solved.q) > max_height:
                continue
            coeffs = [sp.S.Zero] * len(basis)
            coeffs[piv] = solved
            for c, i in zip(rest, others):
                coeffs[i] = c
            if admissible(tuple(coeffs)):
                return tuple(coeffs)
    return None


# ---------------------------------------------------------------------------
# Sasaki / K-contact predicates

def is_sasaki(s: EpsilonContactStructure) -> ZeroResult:
    verdict, idx, val = tensor_verdict(s.h_tensor(), s.assumptions, s.seed)
    witness = None if idx is None else {"component": idx, "value": str(val)}
    return ZeroResult(verdict, witness, val)


def is_k_contact(s: EpsilonContactStructure) -> ZeroResult:
    from .frames import metric_tensor
    lie_g = lie_derivative(s.reeb(), metric_tensor(s.manifold)).canonical()
    verdict, idx, val = tensor_verdict(lie_g, s.assumptions, s.seed)
    witness = None if idx is None else {"component": idx, "value": str(val)}
    return ZeroResult(verdict, witness, val)


def lie_xi_metric(s: EpsilonContactStructure) -> TensorField:
    from .frames import metric_tensor
    return lie_derivative(s.reeb(), metric_tensor(s.manifold)).canonical()


def null_mu(s: EpsilonContactStructure) -> sp.Expr:
    """Extract mu with h = mu xi (x) alpha and verify the factorization."""
    if s.epsilon != 0:
        raise ContactError("mu is defined for null structures only")
    m = s.manifold
    n = m.dim
    h = s.h_tensor()
    rank1 = tensor_product(s.reeb(), s.alpha)
    mu = sp.S.Zero
    for k, j in itertools.product(range(n), repeat=2):
        denom = sc.simplify(rank1.comp[k, j])
        if denom == 0:
            continue
        if sc.is_zero(denom, s.assumptions, s.seed).verdict is Verdict.NONZERO:
            mu = sc.simplify(h.comp[k, j] / denom)
            break
    residual = (h - rank1 * mu).canonical()
    if not residual.is_zero_tensor():
        raise ContactError(
            "h does not factor as mu xi (x) alpha; residual "
            f"{residual.nonzero_components()[:1]} (internal inconsistency)")
    return mu


# ---------------------------------------------------------------------------
# the extended endomorphism J on M x R

@dataclass
class ExtendedJ:
    manifold4: FrameManifold
    j: TensorField               # types 'ud' on the 4-manifold
    structure: EpsilonContactStructure

    def matrix(self) -> sp.Matrix:
        n = self.manifold4.dim
        return sp.Matrix(n, n, lambda i, j: self.j.comp[i, j])

    def matrix_in_frame(self, vectors: Sequence[TensorField]) -> sp.Matrix:
        p = sp.Matrix(4, 4, lambda i, j: vectors[j].comp[i])
        return (p.inv() * self.matrix() * p).applyfunc(sc.simplify)


def extend_j(s: EpsilonContactStructure) -> ExtendedJ:
    """J(v, c dt) = (phi(v) + c xi, alpha(v) dt) on M x R; J^2 = 0 checked."""
    if s.epsilon != 0:
        raise ContactError("the square-zero extension applies to null structures")
    m = s.manifold
    n = m.dim
    labels = m.labels + ("dt",)
    c4 = np.full((n + 1,) * 3, sp.S.Zero, dtype=object)
    for k, i, j in itertools.product(range(n), repeat=3):
        c4[k, i, j] = m.c[k, i, j]
    g4 = np.full((n + 1, n + 1), sp.S.Zero, dtype=object)
    for i, j in itertools.product(range(n), repeat=2):
        g4[i, j] = m.g[i, j]
    g4[n, n] = sp.S.One
    coords4 = m.coords + (sc.coordinate("_taux"),)
    m4 = FrameManifold(labels, c4, g4, m.orientation, -1, coords4,
                       m.assumptions, name=m.name + "xR", validate=False)
    m4.factors = [(m, 0)]
    phi, xi, alpha = s.phi_endo(), s.reeb(), s.alpha
    comp = np.full((n + 1, n + 1), sp.S.Zero, dtype=object)
    for k, j in itertools.product(range(n), repeat=2):
        comp[k, j] = phi.comp[k, j]
    for j in range(n):
        comp[n, j] = alpha.comp[j]
        comp[j, n] = xi.comp[j]
    j_field = TensorField(m4, UP + DOWN, comp)
    sq = np.array([[sp.expand(sp.Add(*[comp[i, k] * comp[k, j]
                                       for k in range(n + 1)]))
                    for j in range(n + 1)] for i in range(n + 1)], dtype=object)
    sq_t = TensorField(m4, UP + DOWN, sq).canonical()
    if not sq_t.is_zero_tensor():
        raise ContactError(f"J^2 != 0: {sq_t.nonzero_components()[:1]}")
    return ExtendedJ(m4, j_field, s)


def nijenhuis(ext: ExtendedJ) -> TensorField:
    """N(v1,v2) = [Jv1,Jv2] - J[v1,Jv2] - J[Jv1,v2] + J^2[v1,v2]."""
    m4 = ext.manifold4
    n = m4.dim
    j = ext.j.comp
    jvec = [vector(m4, [j[k, a] for k in range(n)]) for a in range(n)]
    frame = [basis_vector(m4, a) for a in range(n)]

    def japply(x: TensorField) -> TensorField:
        return vector(m4, [sp.expand(sp.Add(*[j[k, i] * x.comp[i]
                                              for i in range(n)]))
                           for k in range(n)])

    comp = np.full((n, n, n), sp.S.Zero, dtype=object)
    for a, b in itertools.combinations(range(n), 2):
        term = lie_bracket(jvec[a], jvec[b]) \
            - japply(lie_bracket(frame[a], jvec[b])) \
            - japply(lie_bracket(jvec[a], frame[b])) \
            + japply(japply(lie_bracket(frame[a], frame[b])))
        for k in range(n):
            comp[k, a, b] = sp.expand(term.comp[k])
            comp[k, b, a] = sp.expand(-term.comp[k])
    return TensorField(m4, UP + DOWN + DOWN, comp)


@dataclass
class RankReport:
    rank: Optional[int]          # None when assumption-dependent
    unknown_witness: Optional[str] = None


def symbolic_rank(mat: sp.Matrix, assumptions: Assumptions,
                  seed: int = 0) -> RankReport:
    """Rank by fraction-free elimination with tri-state pivoting; rank is
    reported only when every pivot decision is definite."""
    m = mat.applyfunc(sc.simplify)
    rows, cols = m.shape
    rank = 0
    row = 0
    col = 0
    while row < rows and col < cols:
        pivot = None
        pending_unknown = None
        for r in range(row, rows):
            entry = m[r, col]
            if entry == 0:
                continue
            res = sc.is_zero(entry, assumptions, seed)
            if res.verdict is Verdict.NONZERO:
                pivot = r
                break
            if res.verdict is Verdict.UNKNOWN and pending_unknown is None:
                pending_unknown = entry
        if pivot is None:
            if pending_unknown is not None:
                return RankReport(None, f"pivot candidate {pending_unknown} "
                                        "is assumption-dependent")
            col += 1
            continue
        if pivot != row:
            m = m.elementary_row_op("n<->m", row, row2=pivot)
        for r in range(row + 1, rows):
            if m[r, col] != 0:
                factor = sc.simplify(m[r, col] / m[row, col])
                for cc in range(col, cols):
                    m[r, cc] = sc.simplify(m[r, cc] - factor * m[row, cc])
        rank += 1
        row += 1
        col += 1
    return RankReport(rank)


def zero_deformable(ext: ExtendedJ) -> tuple[Optional[bool], RankReport, RankReport]:
    """Constant nilpotent type: ranks of J and J^2 must be definite."""
    mat = ext.matrix()
    r1 = symbolic_rank(mat, ext.structure.assumptions, ext.structure.seed)
    r2 = symbolic_rank(mat * mat, ext.structure.assumptions, ext.structure.seed)
    if r1.rank is None or r2.rank is None:
        return None, r1, r2
    return True, r1, r2


@dataclass
class InvolutivityReport:
    involutive: Optional[bool]
    kappa: Optional[sp.Expr]
    witness: Optional[str] = None


def kernel_involutive(ext: ExtendedJ, frame: ContactFrame) -> InvolutivityReport:
    """ker J = span(xi, phi(u) + dt); closure under the bracket is tested by
    expressing [xi, phi(u) + dt] in the frame (xi, u, phi(u), dt)."""
    m4 = ext.manifold4
    s = ext.structure
    n3 = s.manifold.dim
    lift = lambda v, dt: vector(m4, list(v.comp) + [sp.Integer(dt)])
    k1 = lift(frame.xi, 0)
    k2 = lift(frame.phi_u, 1)
    b = lie_bracket(k1, k2)
    basis4 = [k1, lift(frame.u, 0), k2, basis_vector(m4, n3)]
    p = sp.Matrix(4, 4, lambda i, j: basis4[j].comp[i])
    coeffs = (p.inv() * sp.Matrix(4, 1, lambda i, _: b.comp[i])).applyfunc(sc.simplify)
    # components along u and along phi(u)+dt must vanish for involutivity;
    # the dt part of the bracket is zero, so the k2 coefficient doubles as it
    verdicts = [sc.is_zero(coeffs[i], s.assumptions, s.seed).verdict
                for i in (1, 2, 3)]
    if all(v is Verdict.ZERO for v in verdicts):
        return InvolutivityReport(True, sc.simplify(coeffs[0]))
    if any(v is Verdict.NONZERO for v in verdicts):
        bad = [("u", coeffs[1]), ("phi(u)+dt", coeffs[2]), ("dt", coeffs[3])]
        wit = "; ".join(f"{name}-component {val}" for name, val in bad if val != 0)
        return InvolutivityReport(False, None, wit)
    return InvolutivityReport(None, None, "assumption-dependent components")


def is_integrable(ext: ExtendedJ,
                  frame: Optional[ContactFrame] = None) -> tuple[Optional[bool], dict]:
    """Thompson's three conditions; tri-state conjunction."""
    s = ext.structure
    frame = frame if frame is not None else find_contact_frame(s)
    nij = nijenhuis(ext)
    nv, nidx, nval = tensor_verdict(nij, s.assumptions, s.seed)
    zd, r1, r2 = zero_deformable(ext)
    inv = kernel_involutive(ext, frame)
    detail = {"nijenhuis": (nv, nidx, nval), "zero_deformable": (zd, r1, r2),
              "kernel_involutive": inv}
    parts = [nv is Verdict.ZERO if nv is not Verdict.UNKNOWN else None,
             zd, inv.involutive]
    if any(p is False for p in parts):
        return False, detail
    if any(p is None for p in parts):
        return None, detail
    return True, detail


def sasaki_iff_integrable_report(s: EpsilonContactStructure) -> dict:
    """Cross-check the equivalence of the Sasaki condition with
    integrability of the associated square-zero endomorphism."""
    if s.epsilon != 0:
        raise ContactError("the equivalence is stated for null structures")
    frame = find_contact_frame(s)
    ext = extend_j(s)
    sas = is_sasaki(s)
    integ, detail = is_integrable(ext, frame)
    sas_bool = {Verdict.ZERO: True, Verdict.NONZERO: False,
                Verdict.UNKNOWN: None}[sas.verdict]
    agree = None if (sas_bool is None or integ is None) else (sas_bool == integ)
    return {"sasaki": sas, "integrable": integ, "detail": detail,
            "agree": agree, "frame": frame}


def saskc_criterion(s: EpsilonContactStructure,
                    frame: Optional[ContactFrame] = None) -> sp.Expr:
    """g(L_xi u, u): zero exactly when a Sasakian null structure is K-contact."""
    if s.epsilon != 0:
        raise ContactError("criterion applies to null structures")
    if is_sasaki(s).verdict is not Verdict.ZERO:
        raise ContactError("criterion applies to Sasakian structures only")
    frame = frame if frame is not None else find_contact_frame(s)
    lie_u = lie_bracket(s.reeb(), frame.u)
    return sc.simplify(_pair(s.manifold, lie_u, frame.u))
