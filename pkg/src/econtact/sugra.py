"""Six-dimensional supergravity product solutions and their certification.

Given a Lorentzian and a Riemannian eta-Einstein certificate with matched
constants (lam_sq common, kappa_N = l^2, kappa_X = eps_N l^2), the product
metric chi (+) h together with the flux

    H = lam nu_chi + c l (star_chi alpha_N) ^ alpha_X
        + c l alpha_N ^ (star_h alpha_X) + lam nu_h

solves the bosonic equations of motion

    Ric - (1/4) H o H = 0,   dH = 0,   d star H = 0,   |H|^2 = 0,

where (rho o sigma)(X,Y) is the full index contraction of iota_X rho with
iota_Y sigma (no factorial weight).  The coefficient c is not hard-coded:
``calibrate_flux`` solves for the unique positive rational making the
Einstein equation an identity, which pins down the convention dependence
of the flux normalization (c = 1 under this module's conventions).

When l^2 equals a non-square constant such as 1 - lam_sq, l is kept as a
formal symbol subject to the rewrite l^2 -> kappa_N, applied by
polynomial reduction before any zero test.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import sympy as sp

from . import scalar as sc
from .contact import CheckItem, EpsilonContactStructure, tensor_verdict
from .curvature import (Connection, CurvatureData, levi_civita, lowered_torsion,
                        metricity_residual, ricci_split, riemann,
                        with_skew_torsion)
from .eta_einstein import EtaEinsteinCertificate, classify, compatible_pair
from .frames import (DOWN, FrameError, FrameManifold, TensorField, basis_vector,
                     ext_d, form_inner, hodge, interior, product_manifold,
                     promote, raise_all, volume_form, wedge)
from .scalar import Assumptions, Verdict


class SugraError(ValueError):
    pass


# ---------------------------------------------------------------------------
# relation-aware reduction

Relation = tuple[sp.Symbol, sp.Expr]     # (sym, rhs) meaning sym**2 -> rhs


def reduce_expr(e: sp.Expr, relations: Sequence[Relation]) -> sp.Expr:
    """Eliminate even powers of related symbols by polynomial reduction."""
    e = sp.expand(sp.sympify(e))
    for sym, rhs in relations:
        if sym not in e.free_symbols:
            continue
        p = sp.Poly(e, sym)
        acc = sp.S.Zero
        for (k,), coeff in p.terms():
            acc += coeff * rhs ** (k // 2) * sym ** (k % 2)
        e = sp.expand(acc)
    return e


def reduce_tensor(t: TensorField, relations: Sequence[Relation]) -> TensorField:
    if not relations:
        return t
    return t.map(lambda e: reduce_expr(e, relations))


# ---------------------------------------------------------------------------
# the circle pairing

def circ(rho: TensorField, sigma: TensorField) -> TensorField:
    """(rho o sigma)(X, Y) = full contraction of iota_X rho and iota_Y sigma."""
    if rho.manifold is not sigma.manifold or rho.rank != 3 or sigma.rank != 3:
        raise SugraError("circ expects two 3-forms on one manifold")
    m = rho.manifold
    n = m.dim
    iota_rho = [interior(basis_vector(m, i), rho) for i in range(n)]
    iota_sigma_up = [raise_all(interior(basis_vector(m, j), sigma))
                     for j in range(n)]
    comp = np.empty((n, n), dtype=object)
    for i, j in itertools.product(range(n), repeat=2):
        acc = []
        for a, b in itertools.product(range(n), repeat=2):
            x = iota_rho[i].comp[a, b]
            y = iota_sigma_up[j].comp[a, b]
            if x != 0 and y != 0:
                acc.append(x * y)
        comp[i, j] = sp.expand(sp.Add(*acc))
    return TensorField(m, DOWN * 2, comp)


# ---------------------------------------------------------------------------
# configuration assembly

@dataclass
class SupergravityConfig:
    manifold: FrameManifold                   # dim-6 Lorentzian product
    h_flux: TensorField                       # the 3-form H
    lam: sp.Expr
    ell: sp.Expr
    coefficient: sp.Expr
    relations: list[Relation]
    cert_n: EtaEinsteinCertificate
    cert_x: EtaEinsteinCertificate
    structure_n: EpsilonContactStructure
    structure_x: EpsilonContactStructure
    provenance: list[str] = field(default_factory=list)

    @property
    def assumptions(self) -> Assumptions:
        return self.manifold.assumptions

    def reduced(self, t: TensorField) -> TensorField:
        return reduce_tensor(t, self.relations)


@dataclass
class EomReport:
    checks: list[CheckItem]
    einstein_residual: TensorField
    h_norm_pairing: sp.Expr
    h_norm_contraction: sp.Expr

    @property
    def all_zero(self) -> bool:
        return all(c.verdict is Verdict.ZERO for c in self.checks)


def _product_curvature(m6: FrameManifold) -> CurvatureData:
    if "curvature" not in m6._derived_cache:
        m6._derived_cache["curvature"] = riemann(levi_civita(m6))
    return m6._derived_cache["curvature"]


def flux_pieces(s_n: EpsilonContactStructure, s_x: EpsilonContactStructure,
                p6: FrameManifold) -> dict[str, TensorField]:
    """The four promoted building blocks of the flux ansatz."""
    key = "flux_pieces"
    if key not in p6._derived_cache:
        alpha_n6 = promote(s_n.alpha, p6)
        alpha_x6 = promote(s_x.alpha, p6)
        star_an6 = promote(hodge(s_n.alpha), p6)
        star_ax6 = promote(hodge(s_x.alpha), p6)
        p6._derived_cache[key] = {
            "nu_n": promote(volume_form(s_n.manifold), p6),
            "nu_x": promote(volume_form(s_x.manifold), p6),
            "mixed_nx": wedge(star_an6, alpha_x6),
            "mixed_xn": wedge(alpha_n6, star_ax6),
        }
    return p6._derived_cache[key]


def _product_of(s_n: EpsilonContactStructure,
                s_x: EpsilonContactStructure) -> FrameManifold:
    key = id(s_x)
    cache = s_n.manifold._derived_cache.setdefault("products", {})
    if key not in cache:
        cache[key] = product_manifold(s_n.manifold, s_x.manifold)
    return cache[key]


def assemble_flux(s_n, s_x, lam, ell, coefficient) -> TensorField:
    p6 = _product_of(s_n, s_x)
    pieces = flux_pieces(s_n, s_x, p6)
    return (pieces["nu_n"] * lam + pieces["mixed_nx"] * (coefficient * ell)
            + pieces["mixed_xn"] * (coefficient * ell) + pieces["nu_x"] * lam)


def _default_parameters(cert_n: EtaEinsteinCertificate, lam, ell):
    """Impute flux parameters: lam with lam^2 = lam_sq, ell with
    ell^2 = kappa_N; introduce a formal related symbol when the constant
    is not a perfect square in the grammar."""
    relations: list[Relation] = []

    def fit(value, want_sq, fallback_name):
        if value is not None:
            value = sp.sympify(value)
            if sc.simplify(value ** 2 - want_sq) == 0:
                return value, None
            if value.is_Symbol:
                return value, (value, sc.simplify(want_sq))
            raise SugraError(
                f"{fallback_name}^2 = {sc.simplify(value**2)} does not match "
                f"the required constant {want_sq}")
        root = _rational_sqrt(want_sq)
        if root is not None:
            return root, None
        sym = sp.Symbol(fallback_name, real=True)
        return sym, (sym, sc.simplify(want_sq))

    lam_val, rel = fit(lam, cert_n.lam_sq, "lam")
    if rel:
        relations.append(rel)
    ell_val, rel = fit(ell, cert_n.kappa, "ell")
    if rel:
        relations.append(rel)
    return lam_val, ell_val, relations


def _rational_sqrt(e: sp.Expr) -> Optional[sp.Expr]:
    """A grammar-clean square root of e, or None.

    Works factor by factor on numerator and denominator; every polynomial
    factor must occur to an even power and the rational coefficient must
    be a rational square.  The positive-coefficient representative is
    returned (the flux is insensitive to the sign choice)."""
    e = sc.simplify(e)
    if e.is_Rational:
        if e < 0:
            return None
        r = sp.sqrt(e)
        return r if r.is_Rational else None

    def half_power(part):
        coeff, factors = sp.factor_list(part)
        if coeff < 0:
            return None
        root_c = sp.sqrt(coeff)
        if not root_c.is_Rational:
            return None
        out = root_c
        for base, k in factors:
            if k % 2:
                return None
            out *= base ** (k // 2)
        return out

    num, den = sp.fraction(sp.cancel(sp.together(e)))
    rn, rd = half_power(num), half_power(den)
    if rn is None or rd is None:
        return None
    return sc.simplify(rn / rd)


def build_solution(s_n: EpsilonContactStructure, s_x: EpsilonContactStructure,
                   lam=None, ell=None, coefficient=None,
                   cert_n: Optional[EtaEinsteinCertificate] = None,
                   cert_x: Optional[EtaEinsteinCertificate] = None
                   ) -> SupergravityConfig:
    """Assemble the product configuration after checking compatibility."""
    cert_n = cert_n if cert_n is not None else classify(s_n)
    cert_x = cert_x if cert_x is not None else classify(s_x)
    ok, detail = compatible_pair(cert_n, cert_x)
    if not ok:
        raise SugraError(f"certificates are not compatible: {detail['reason']}")
    lam_val, ell_val, relations = _default_parameters(cert_n, lam, ell)
    if coefficient is None:
        coefficient = calibrate_flux(s_n, s_x, cert_n=cert_n, cert_x=cert_x)
    p6 = _product_of(s_n, s_x)
    h = assemble_flux(s_n, s_x, lam_val, ell_val, sp.sympify(coefficient))
    prov = [f"flux parameters lam = {lam_val}, l = {ell_val}, "
            f"coefficient c = {coefficient}"]
    prov += [f"formal relation {sym}^2 = {rhs}" for sym, rhs in relations]
    return SupergravityConfig(p6, h, lam_val, ell_val, sp.sympify(coefficient),
                              relations, cert_n, cert_x, s_n, s_x, prov)


# ---------------------------------------------------------------------------
# verification

def einstein_residual(cfg: SupergravityConfig) -> TensorField:
    cd = _product_curvature(cfg.manifold)
    hh = circ(cfg.h_flux, cfg.h_flux)
    res = cd.ricci - hh * sp.Rational(1, 4)
    return cfg.reduced(res).canonical()


def verify_eom(cfg: SupergravityConfig, seed: int = 0) -> EomReport:
    """All four residuals; verdicts are tri-state, Zero required for Sol."""
    m = cfg.manifold
    a = cfg.assumptions
    checks = []

    res_e = einstein_residual(cfg)
    v, idx, val = tensor_verdict(res_e, a, seed)
    checks.append(CheckItem("einstein: Ric - (1/4) H o H = 0", v,
                            None if idx is None else f"component {idx}: {val}"))

    dh = cfg.reduced(ext_d(cfg.h_flux)).canonical()
    v, idx, val = tensor_verdict(dh, a, seed)
    checks.append(CheckItem("dH = 0", v,
                            None if idx is None else f"component {idx}: {val}"))

    star_h = hodge(cfg.h_flux)
    dstar = cfg.reduced(ext_d(star_h)).canonical()
    v, idx, val = tensor_verdict(dstar, a, seed)
    checks.append(CheckItem("d star H = 0", v,
                            None if idx is None else f"component {idx}: {val}"))

    top = wedge(cfg.h_flux, star_h)
    nu_comp = m.orientation * m.vol_scale
    pairing = sc.simplify(reduce_expr(
        top.comp[tuple(range(m.dim))] / nu_comp, cfg.relations))
    contraction = sc.simplify(reduce_expr(form_inner(cfg.h_flux, cfg.h_flux),
                                          cfg.relations))
    both_zero = (pairing == 0 and contraction == 0)
    if both_zero:
        verdict = Verdict.ZERO
        wit = None
    else:
        bad = pairing if pairing != 0 else contraction
        r = sc.is_zero(bad, a, seed)
        verdict = r.verdict if r.verdict is not Verdict.ZERO else Verdict.UNKNOWN
        wit = f"|H|^2 = {bad}"
    checks.append(CheckItem("|H|^2 = 0 (pairing and contraction routes)",
                            verdict, wit))
    return EomReport(checks, res_e, pairing, contraction)


@dataclass
class TorsionReport:
    checks: list[CheckItem]
    ricci: TensorField

    @property
    def all_zero(self) -> bool:
        return all(c.verdict is Verdict.ZERO for c in self.checks)


def torsion_ricci_flat(cfg: SupergravityConfig, seed: int = 0) -> TorsionReport:
    """The metric connection with torsion H must be Ricci-flat, and its
    torsion isotropic, closed and co-closed."""
    m = cfg.manifold
    a = cfg.assumptions
    conn = with_skew_torsion(m, cfg.h_flux)
    checks = []

    lt = cfg.reduced(lowered_torsion(conn) - cfg.h_flux).canonical()
    v, idx, val = tensor_verdict(lt, a, seed)
    checks.append(CheckItem("lowered torsion equals H", v,
                            None if idx is None else f"component {idx}: {val}"))

    met = cfg.reduced(metricity_residual(conn)).canonical()
    v, idx, val = tensor_verdict(met, a, seed)
    checks.append(CheckItem("metricity of the torsion connection", v,
                            None if idx is None else f"component {idx}: {val}"))

    cd = riemann(conn)
    ric = cfg.reduced(cd.ricci).canonical()
    v, idx, val = tensor_verdict(ric, a, seed)
    checks.append(CheckItem("Ric of the torsion connection = 0", v,
                            None if idx is None else f"component {idx}: {val}"))

    sym_part, antisym_part = ricci_split(cd)
    v, idx, val = tensor_verdict(cfg.reduced(antisym_part).canonical(), a, seed)
    checks.append(CheckItem("antisymmetric Ricci part = 0", v,
                            None if idx is None else f"component {idx}: {val}"))

    eom = verify_eom(cfg, seed)
    for item in eom.checks[1:]:
        checks.append(CheckItem("torsion is " + item.name, item.verdict,
                                item.witness))
    return TorsionReport(checks, ric)


def torsion_ricci_identity_residual(cfg: SupergravityConfig) -> TensorField:
    """Ric(nabla^H) - (Ric^g - (1/4) H o H), closed/co-closed H assumed."""
    m = cfg.manifold
    conn = with_skew_torsion(m, cfg.h_flux)
    lhs = riemann(conn).ricci
    rhs = _product_curvature(m).ricci - circ(cfg.h_flux, cfg.h_flux) * sp.Rational(1, 4)
    return cfg.reduced(lhs - rhs).canonical()


# ---------------------------------------------------------------------------
# calibration

def calibrate_flux(s_n: EpsilonContactStructure, s_x: EpsilonContactStructure,
                   cert_n: Optional[EtaEinsteinCertificate] = None,
                   cert_x: Optional[EtaEinsteinCertificate] = None) -> sp.Rational:
    """Unique c > 0 making the Einstein equation hold identically.

    The flux normalization is convention-laden; rather than hard-coding a
    coefficient, solve for it from the alpha (x) alpha component equations
    and cross-check every component.  A failure here signals an
    inconsistency between the wedge/contraction conventions elsewhere.
    """
    cert_n = cert_n if cert_n is not None else classify(s_n)
    cert_x = cert_x if cert_x is not None else classify(s_x)
    ok, detail = compatible_pair(cert_n, cert_x)
    if not ok:
        raise SugraError(f"certificates are not compatible: {detail['reason']}")
    csym = sp.Symbol("_c", positive=True)
    lam_val, ell_val, relations = _default_parameters(cert_n, None, None)
    p6 = _product_of(s_n, s_x)
    h = assemble_flux(s_n, s_x, lam_val, ell_val, csym)
    cd = _product_curvature(p6)
    res = (cd.ricci - circ(h, h) * sp.Rational(1, 4))
    res = reduce_tensor(res, relations).canonical()
    candidates: Optional[set] = None
    for idx, val in res.nonzero_components():
        cands = _c_candidates(val, csym)
        if cands is None:
            continue
        candidates = cands if candidates is None else candidates & cands
        if candidates == set():
            break
    if not candidates:
        raise SugraError("no flux coefficient solves the Einstein equation; "
                         "convention inconsistency")
    good = []
    for c in sorted(candidates):
        if c <= 0:
            continue
        if res.map(lambda e: e.subs(csym, c)).canonical().is_zero_tensor():
            good.append(c)
    if len(good) != 1:
        raise SugraError(f"flux coefficient not unique or missing: {good}")
    return good[0]


def _c_candidates(e: sp.Expr, csym: sp.Symbol) -> Optional[set]:
    """Rational roots common to every (lam, l, ...)-coefficient of e."""
    e = sp.cancel(sp.together(e))
    num = sp.numer(e)
    if csym not in num.free_symbols:
        return set() if sc.simplify(num) != 0 else None
    others = sorted(num.free_symbols - {csym}, key=str)
    coeffs = ([num] if not others
              else [cf for _, cf in sp.Poly(num, *others).terms()])
    sets = []
    for cp in coeffs:
        if csym not in cp.free_symbols:
            if sc.simplify(cp) != 0:
                return set()
            continue
        roots = sp.roots(sp.Poly(cp, csym))
        sets.append({r for r in roots if r.is_Rational})
    if not sets:
        return None
    return set.intersection(*sets)


# ---------------------------------------------------------------------------
# bookkeeping audit of the alternative convention

def alt_convention_audit() -> dict[str, bool]:
    """Arithmetic audit of the alternative flux bookkeeping.

    With flux coefficients (lam, l/3, l/3, lam) and the stated pairing
    sub-results  nu o nu = -2 chi,  (alpha_N ^ star alpha_X) o same
    = 18 alpha(x)alpha  and  (star alpha_N ^ alpha_X) o same
    = 18 (alpha(x)alpha - |alpha|^2 chi),  the assembled (1/4) H o H
    blocks come out as  -lam^2/2 chi - l^2/2 |alpha|^2 chi
    + l^2 alpha(x)alpha  (and the h-block analog), which is exactly what
    the eta-Einstein matching consumes.  This documents that the
    alternative normalization is internally consistent even though its
    sub-results differ from this module's calibrated c = 1.
    """
    lam, l, eps = sp.symbols("lam l eps")
    coeff = sp.Rational(1, 3) * l
    quarter = sp.Rational(1, 4)
    # Lorentzian block: nu o nu gives -2 chi; one mixed term 18 (aa - eps chi),
    # the other 18 aa.
    chi_blk = quarter * (lam ** 2 * -2 + coeff ** 2 * 18 * -eps)
    aa_blk = quarter * (coeff ** 2 * 18 + coeff ** 2 * 18)
    want_chi = -lam ** 2 / 2 - l ** 2 / 2 * eps
    want_aa = l ** 2
    # Riemannian block: nu o nu gives +2 h; the mixed terms contribute
    # 18 eps (h - aa) and -18 eps aa respectively.
    h_blk = quarter * (lam ** 2 * 2 + coeff ** 2 * 18 * eps)
    ax_blk = quarter * (coeff ** 2 * -18 * eps + coeff ** 2 * -18 * eps)
    want_h = lam ** 2 / 2 + l ** 2 / 2 * eps
    want_ax = -l ** 2 * eps
    return {
        "lorentzian chi block": sc.simplify(chi_blk - want_chi) == 0,
        "lorentzian alpha block": sc.simplify(aa_blk - want_aa) == 0,
        "riemannian h block": sc.simplify(h_blk - want_h) == 0,
        "riemannian alpha block": sc.simplify(ax_blk - want_ax) == 0,
    }
