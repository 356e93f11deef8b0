"""eta-Einstein certification and the built-in catalog of structures.

A verified structure is eta-Einstein (for its epsilon) when

    Ric = (s_g/2)(lam_sq + kappa * eps) g - s_g * kappa * alpha (x) alpha

for real constants lam_sq >= 0 and kappa (kappa >= 0 when Lorentzian).
``classify`` solves the linear system for the two constants and certifies
a vanishing residual; ``compatible_pair`` encodes the matching conditions
under which a Lorentzian and a Riemannian certificate combine into a
six-dimensional product solution (see the sugra module).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import sympy as sp

from . import scalar as sc
from .contact import ContactError, EpsilonContactStructure, verify_epsilon_contact
from .curvature import CurvatureData, levi_civita, riemann
from .frames import (DOWN, FrameError, FrameManifold, TensorField, one_form,
                     tensor_product, vector)
from .scalar import Assumptions, FuncFacts, ParamFacts, Range, Verdict


class NotEtaEinstein(ValueError):
    def __init__(self, message: str, witness=None, least_squares=None):
        super().__init__(message)
        self.witness = witness
        self.least_squares = least_squares


@dataclass
class EtaEinsteinCertificate:
    epsilon: int
    s_g: int
    lam_sq: sp.Expr
    kappa: sp.Expr
    residual: TensorField
    notes: list[str] = field(default_factory=list)

    def model_ricci(self, m: FrameManifold, alpha: TensorField) -> TensorField:
        aa = tensor_product(alpha, alpha)
        half = sp.Rational(1, 2)
        n = m.dim
        comp = np.array(
            [[sp.expand(self.s_g * half * (self.lam_sq + self.kappa * self.epsilon)
                        * m.g[i, j] - self.s_g * self.kappa * aa.comp[i, j])
              for j in range(n)] for i in range(n)], dtype=object)
        return TensorField(m, DOWN * 2, comp)


def _nonneg_check(e: sp.Expr, assumptions: Assumptions, what: str) -> Optional[str]:
    """None if certified/sampled nonnegative, else a failure message."""
    e = sc.simplify(e)
    if e.is_Rational:
        return None if e >= 0 else f"{what} = {e} < 0"
    if e.is_nonnegative:
        return None
    probes = 0
    for binding, polys, var in sc.probe_bindings(e, assumptions, seed=0):
        try:
            v = sc.eval_rational(e, binding, funcs=polys, func_var=var)
        except sc.ScalarError:
            continue
        probes += 1
        if v < 0:
            return f"{what} = {e} is negative at {binding}"
    return None if probes else f"{what} = {e} could not be probed"


def classify(s: EpsilonContactStructure,
             curvature: Optional[CurvatureData] = None) -> EtaEinsteinCertificate:
    """Solve for the eta-Einstein constants and certify the zero residual."""
    m = s.manifold
    n = m.dim
    cd = curvature if curvature is not None else riemann(s.levi_civita())
    ric = cd.ricci
    aa = tensor_product(s.alpha, s.alpha)
    lam_sq, kappa = sp.Dummy("lam_sq"), sp.Dummy("kappa")
    half = sp.Rational(1, 2)
    eqs = []
    for i, j in itertools.combinations_with_replacement(range(n), 2):
        eqs.append(sp.expand(
            ric.comp[i, j]
            - m.s_g * half * (lam_sq + kappa * s.epsilon) * m.g[i, j]
            + m.s_g * kappa * aa.comp[i, j]))
    sols = sp.linsolve(eqs, [lam_sq, kappa])
    if not sols:
        raise NotEtaEinstein(
            "no constants solve the eta-Einstein condition",
            witness=_worst_component(ric, s),
            least_squares=_least_squares(eqs, lam_sq, kappa, s))
    lam_val, kap_val = (sc.simplify(v) for v in next(iter(sols)))
    free = (lam_val.free_symbols | kap_val.free_symbols)
    if {lam_sq, kappa} & free:
        raise NotEtaEinstein("eta-Einstein constants are underdetermined")
    coords = m.coordinate_symbols()
    if free & coords:
        raise NotEtaEinstein(
            f"solved constants ({lam_val}, {kap_val}) are not constant")
    residual = (ric - EtaEinsteinCertificate(
        s.epsilon, m.s_g, lam_val, kap_val,
        residual=None).model_ricci(m, s.alpha)).canonical()
    bad = residual.nonzero_components()
    if bad:
        raise NotEtaEinstein(
            f"residual component {bad[0][0]} = {bad[0][1]} does not vanish",
            witness=bad[0],
            least_squares=_least_squares(eqs, lam_sq, kappa, s))
    notes = []
    msg = _nonneg_check(lam_val, s.assumptions, "lam_sq")
    if msg:
        raise NotEtaEinstein(msg)
    if not lam_val.is_Rational and not lam_val.is_nonnegative:
        notes.append(f"lam_sq = {lam_val} >= 0 verified by admissible sampling")
    if m.s_g < 0:
        msg = _nonneg_check(kap_val, s.assumptions, "kappa")
        if msg:
            raise NotEtaEinstein(msg)
        if not kap_val.is_Rational and not kap_val.is_nonnegative:
            notes.append(f"kappa = {kap_val} >= 0 verified by admissible sampling")
    return EtaEinsteinCertificate(s.epsilon, m.s_g, lam_val, kap_val,
                                  residual, notes)


def _worst_component(ric: TensorField, s: EpsilonContactStructure):
    comps = ric.nonzero_components()
    return comps[0] if comps else None


def _least_squares(eqs, lam_sq, kappa, s: EpsilonContactStructure):
    """Best rational (lam_sq, kappa) at a seeded admissible binding.

    Diagnostic only; solves the 2x2 normal equations of the residual
    system after substituting rational values for all parameters.
    """
    try:
        sym_pool = set().union(*(e.free_symbols for e in eqs)) - {lam_sq, kappa}
        binding_iter = sc.probe_bindings(sp.Add(*[e for e in eqs]) + sp.Add(
            *[sp.S.Zero]), s.assumptions, seed=1)
        for binding, polys, var in binding_iter:
            if set(binding) >= sym_pool:
                rows = []
                rhs = []
                ok = True
                for e in eqs:
                    a = e.coeff(lam_sq)
                    b = e.coeff(kappa)
                    c = e.subs({lam_sq: 0, kappa: 0})
                    try:
                        rows.append((sc.eval_rational(a, binding, funcs=polys,
                                                      func_var=var),
                                     sc.eval_rational(b, binding, funcs=polys,
                                                      func_var=var)))
                        rhs.append(-sc.eval_rational(c, binding, funcs=polys,
                                                     func_var=var))
                    except sc.ScalarError:
                        ok = False
                        break
                if not ok:
                    continue
                ata = sp.zeros(2, 2)
                atb = sp.zeros(2, 1)
                for (a, b), r in zip(rows, rhs):
                    ata += sp.Matrix([[a * a, a * b], [a * b, b * b]])
                    atb += sp.Matrix([[a * r], [b * r]])
                if ata.det() == 0:
                    return None
                sol = ata.solve(atb)
                return {"lam_sq": sol[0], "kappa": sol[1],
                        "binding": {str(k): v for k, v in binding.items()}}
    except Exception:
        return None
    return None


# ---------------------------------------------------------------------------
# Cont spaces

@dataclass(frozen=True)
class ContSpace:
    signature: str               # "L" or "R"
    epsilon: Optional[int]       # None for Riemannian spaces (eps = 1)
    lam_sq: sp.Expr
    kappa: sp.Expr


def cont_space_membership(cert: EtaEinsteinCertificate, space: ContSpace) -> bool:
    want_sig = -1 if space.signature == "L" else 1
    if cert.s_g != want_sig:
        return False
    eps = space.epsilon if space.epsilon is not None else 1
    if cert.epsilon != eps:
        return False
    return (sc.simplify(cert.lam_sq - space.lam_sq) == 0
            and sc.simplify(cert.kappa - space.kappa) == 0)


def compatible_pair(cert_n: EtaEinsteinCertificate,
                    cert_x: EtaEinsteinCertificate) -> tuple[bool, dict]:
    """Matching conditions for a Lorentzian x Riemannian product solution:
    lam_sq agree, kappa_N = l^2 >= 0, kappa_X = eps_N l^2 and eps_X = 1."""
    detail = {"lam_sq": cert_n.lam_sq, "l_sq": cert_n.kappa}
    if cert_n.s_g != -1 or cert_x.s_g != 1:
        detail["reason"] = "signatures must be Lorentzian x Riemannian"
        return False, detail
    if cert_x.epsilon != 1:
        detail["reason"] = f"Riemannian factor has eps = {cert_x.epsilon} != 1"
        return False, detail
    if sc.simplify(cert_n.lam_sq - cert_x.lam_sq) != 0:
        detail["reason"] = (f"lam_sq mismatch: {cert_n.lam_sq} vs {cert_x.lam_sq}")
        return False, detail
    if sc.simplify(cert_x.kappa - cert_n.epsilon * cert_n.kappa) != 0:
        detail["reason"] = (f"kappa_X = {cert_x.kappa} != eps_N l^2 = "
                            f"{cert_n.epsilon} * {cert_n.kappa}")
        return False, detail
    # kappa_N >= 0 was certified when the Lorentzian certificate was issued
    return True, detail


# ---------------------------------------------------------------------------
# catalog

@dataclass
class CatalogEntry:
    name: str
    structure: EpsilonContactStructure
    curvature: CurvatureData
    certificate: Optional[EtaEinsteinCertificate]
    provenance: list[str]
    params: dict[str, sp.Expr]

    @property
    def manifold(self) -> FrameManifold:
        return self.structure.manifold


def _mk_manifold(labels, brackets, metric, signature, assumptions, name,
                 coords=None) -> FrameManifold:
    n = len(labels)
    c = np.full((n, n, n), sp.S.Zero, dtype=object)
    for (i, j), vec in brackets.items():
        for k, val in vec.items():
            c[k, i, j] = sp.sympify(val)
            c[k, j, i] = -sp.sympify(val)
    g = np.array([[sp.sympify(metric[i][j]) for j in range(n)] for i in range(n)],
                 dtype=object)
    return FrameManifold(labels, c, g, 1, signature, coords=coords,
                         assumptions=assumptions, name=name)


_EUCLID3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
_MINK3 = [[-1, 0, 0], [0, 1, 0], [0, 0, 1]]
_LIGHT3 = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]


def _sub(value, rat):
    return sc.simplify(sp.sympify(value).subs(rat, simultaneous=True))


@dataclass
class _EntrySpec:
    builder: Callable
    param_names: tuple[str, ...]
    # substitution admissibility per parameter (the example's stated range)
    admits: dict[str, ParamFacts]


def _entry_su2(rat: dict) -> CatalogEntry:
    lam = sc.parameter("lambda")
    facts = {lam: ParamFacts(nonzero=True)}
    a = Assumptions({k: v for k, v in facts.items() if k not in rat})
    sub = lambda e: _sub(e, rat)
    m = _mk_manifold(
        ["e1", "e2", "e3"],
        {(1, 2): {0: 1}, (2, 0): {1: sub(lam**2)}, (0, 1): {2: sub(lam**2)}},
        _EUCLID3, 1, a, "su2")
    alpha = one_form(m, [1, 0, 0])
    s = verify_epsilon_contact(m, alpha, "auto")
    prov = ["unit-norm coframe direction e^1 is the defining one-form"]
    return _finish("su2", s, prov, rat,
                   expected=(1, sub(lam**2), sub(lam**2 - 1)))


def _entry_sl2_lor(rat: dict) -> CatalogEntry:
    lam = sc.parameter("lambda")
    facts = {lam: ParamFacts(nonzero=True,
                             square_range=Range(sp.Integer(0), sp.Integer(1),
                                                lo_open=True))}
    a = Assumptions({k: v for k, v in facts.items() if k not in rat})
    sub = lambda e: _sub(e, rat)
    m = _mk_manifold(
        ["e0", "e1", "e2"],
        {(0, 1): {2: sub(lam**2)}, (0, 2): {1: sub(-lam**2)}, (1, 2): {0: -1}},
        _MINK3, -1, a, "sl2-lor")
    alpha = one_form(m, [1, 0, 0])
    s = verify_epsilon_contact(m, alpha, "auto")
    prov = ["defining one-form encoded as the coframe dual e^0 "
            "(the source text labels it with the frame vector e_0)"]
    return _finish("sl2-lor", s, prov, rat,
                   expected=(-1, sub(lam**2), sub(1 - lam**2)))


def _entry_sl2_para(rat: dict) -> CatalogEntry:
    lam = sc.parameter("lambda")
    facts = {lam: ParamFacts(nonzero=True,
                             square_range=Range(sp.Integer(1), None))}
    a = Assumptions({k: v for k, v in facts.items() if k not in rat})
    sub = lambda e: _sub(e, rat)
    m = _mk_manifold(
        ["e0", "e1", "e2"],
        {(1, 2): {0: sub(-lam**2)}, (1, 0): {2: sub(-lam**2)}, (2, 0): {1: 1}},
        _MINK3, -1, a, "sl2-para")
    alpha = one_form(m, [0, 1, 0])
    s = verify_epsilon_contact(m, alpha, "auto")
    return _finish("sl2-para", s, [], rat,
                   expected=(1, sub(lam**2), sub(lam**2 - 1)))


def _entry_sl2_null(rat: dict) -> CatalogEntry:
    a0 = sc.parameter("alpha0")
    facts = {a0: ParamFacts(nonzero=True)}
    a = Assumptions({k: v for k, v in facts.items() if k not in rat})
    sub = lambda e: _sub(e, rat)
    m = _mk_manifold(
        ["e0", "e1", "e2"],
        {(1, 2): {0: -2, 2: -1}, (1, 0): {0: 1}, (2, 0): {1: 1}},
        _MINK3, -1, a, "sl2-null")
    alpha = one_form(m, [sub(a0), 0, sub(-a0)])
    s = verify_epsilon_contact(m, alpha, "auto")
    inv_a0 = sub(1 / a0)
    s.frame_basis = [vector(m, [inv_a0, 0, 0]), vector(m, [0, 1, 0]),
                     vector(m, [0, 0, inv_a0])]
    prov = ["defining one-form encoded as the coframe combination "
            "alpha0 (e^0 - e^2) (the source text uses frame-vector labels)"]
    return _finish("sl2-null", s, prov, rat,
                   expected=(0, sp.Integer(1), sub(a0 ** -2)))


def _entry_sasnokc(rat: dict) -> CatalogEntry:
    ap = sc.parameter("a")
    facts = {ap: ParamFacts(nonzero=True)}
    a = Assumptions({k: v for k, v in facts.items() if k not in rat})
    sub = lambda e: _sub(e, rat)
    m = _mk_manifold(
        ["e+", "e-", "e2"],
        {(0, 1): {0: sub(ap), 2: -1}, (0, 2): {0: 1}, (1, 2): {1: -1, 2: sub(ap)}},
        _LIGHT3, -1, a, "sl2-sasnokc")
    alpha = one_form(m, [0, 1, 0])
    s = verify_epsilon_contact(m, alpha, "auto")
    prov = ["second displayed structure equation emended to d e^- = e^- ^ e^2 "
            "(the source displays 'd e^+' twice); this is the unique reading "
            "for which (g, e^-) is a null structure with Reeb field e_+",
            "parameter a defaults to the assumption a != 0; substitute a = 0 "
            "for the K-contact member of the family"]
    return _finish("sl2-sasnokc", s, prov, rat, expected=None)


def _entry_r3_null(rat: dict) -> CatalogEntry:
    t, x, y = (sc.coordinate(n) for n in ("t", "x", "y"))
    q = sc.function_head("q")
    a = Assumptions(funcs={"q": FuncFacts(nowhere_zero=True)})
    m = _mk_manifold(["dt", "dx", "dy"], {}, _MINK3, -1, a, "r3-null",
                     coords=(t, x, y))
    f = sp.exp(y) * q(x - t)
    alpha = one_form(m, [f, -f, 0])
    s = verify_epsilon_contact(m, alpha, "auto")
    finv = sp.exp(-y) * q(x - t) ** -1
    s.frame_basis = [vector(m, [finv, -finv, 0]), vector(m, [finv, finv, 0]),
                     vector(m, [0, 0, 1])]
    prov = ["profile function argument fixed as q(x - t) throughout; the "
            "source text alternates q(x - t) / q(t - x), which only reflects "
            "the arbitrary profile"]
    return _finish("r3-null", s, prov, rat, expected=(0, sp.Integer(0),
                                                      sp.Integer(0)))


def _finish(name, s, prov, rat, expected) -> CatalogEntry:
    s.provenance.extend(prov)
    cd = riemann(levi_civita(s.manifold))
    cert = None
    if expected is not None:
        cert = classify(s, cd)
        eps, want_l, want_k = expected
        if (cert.epsilon != eps or sc.simplify(cert.lam_sq - want_l) != 0
                or sc.simplify(cert.kappa - want_k) != 0):
            raise NotEtaEinstein(
                f"catalog entry {name} certificate "
                f"({cert.epsilon}, {cert.lam_sq}, {cert.kappa}) does not match "
                f"the expected ({eps}, {want_l}, {want_k})")
    else:
        try:
            cert = classify(s, cd)
        except NotEtaEinstein:
            cert = None
    return CatalogEntry(name, s, cd, cert, list(s.provenance),
                        {str(k): v for k, v in rat.items()})


_CATALOG: dict[str, _EntrySpec] = {
    "su2": _EntrySpec(_entry_su2, ("lambda",),
                      {"lambda": ParamFacts(nonzero=True)}),
    "sl2-lor": _EntrySpec(_entry_sl2_lor, ("lambda",),
                          {"lambda": ParamFacts(
                              nonzero=True,
                              square_range=Range(sp.Integer(0), sp.Integer(1),
                                                 lo_open=True))}),
    "sl2-para": _EntrySpec(_entry_sl2_para, ("lambda",),
                           {"lambda": ParamFacts(
                               square_range=Range(sp.Integer(1), None))}),
    "sl2-null": _EntrySpec(_entry_sl2_null, ("alpha0",),
                           {"alpha0": ParamFacts(nonzero=True)}),
    "sl2-sasnokc": _EntrySpec(_entry_sasnokc, ("a",), {"a": ParamFacts()}),
    "r3-null": _EntrySpec(_entry_r3_null, (), {}),
}

_cache: dict = {}


def catalog_names() -> list[str]:
    return sorted(_CATALOG)


def catalog(name: str, params: Optional[dict] = None) -> CatalogEntry:
    """Construct (and fully re-verify) a built-in example.

    ``params`` substitutes rational values for the entry's parameters; the
    values must satisfy the example's stated range.
    """
    if name not in _CATALOG:
        raise KeyError(f"unknown catalog entry {name!r}; "
                       f"known: {', '.join(catalog_names())}")
    spec = _CATALOG[name]
    params = params or {}
    unknown = set(params) - set(spec.param_names)
    if unknown:
        raise ContactError(f"{name} has no parameter(s) {sorted(unknown)}")
    rat = {}
    for pname, value in params.items():
        value = sp.Rational(value)
        if not spec.admits[pname].admits(value):
            raise ContactError(
                f"{name}: parameter {pname} = {value} is outside the "
                f"example's stated range")
        rat[sc.parameter(pname)] = value
    key = (name, tuple(sorted((str(k), v) for k, v in rat.items())))
    if key not in _cache:
        _cache[key] = spec.builder(rat)
    return _cache[key]
