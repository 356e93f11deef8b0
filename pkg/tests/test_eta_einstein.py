import itertools

import numpy as np
import pytest
import sympy as sp

from econtact import contact as ct
from econtact import eta_einstein as ee
from econtact import frames as fr
from econtact import scalar as sc
from econtact.eta_einstein import (ContSpace, NotEtaEinstein, catalog,
                                   classify, compatible_pair,
                                   cont_space_membership)
from econtact.frames import basis_form, ext_d, form_from_sorted, one_form

from conftest import assert_tensor_zero_by_sampling

lam = sc.parameter("lambda")
alpha0 = sc.parameter("alpha0")
a_par = sc.parameter("a")


class TestClassify:
    @pytest.mark.parametrize("name,eps,lam_sq,kappa", [
        ("su2", 1, lam**2, lam**2 - 1),
        ("sl2-lor", -1, lam**2, 1 - lam**2),
        ("sl2-para", 1, lam**2, lam**2 - 1),
        ("sl2-null", 0, sp.Integer(1), alpha0**-2),
    ])
    def test_catalog_certificates(self, catalog_entries, name, eps, lam_sq,
                                  kappa):
        cert = catalog_entries[name].certificate
        assert cert.epsilon == eps
        assert sc.simplify(cert.lam_sq - lam_sq) == 0
        assert sc.simplify(cert.kappa - kappa) == 0
        assert cert.residual.is_zero_tensor()

    def test_round_case_is_einstein(self):
        cert = catalog("su2", {"lambda": 1}).certificate
        assert cert.lam_sq == 1 and cert.kappa == 0

    def test_r3_flat_certificate(self, catalog_entries):
        cert = catalog_entries["r3-null"].certificate
        assert cert.lam_sq == 0 and cert.kappa == 0

    def test_residual_cross_checked_by_sampling(self, catalog_entries):
        for name in ("su2", "sl2-lor", "sl2-para", "sl2-null"):
            entry = catalog_entries[name]
            cert = entry.certificate
            model = cert.model_ricci(entry.manifold, entry.structure.alpha)
            assert_tensor_zero_by_sampling(entry.curvature.ricci - model,
                                           entry.manifold.assumptions,
                                           bindings=10)

    def test_scalar_curvature_matches_certified_trace(self, catalog_entries):
        for name in ("su2", "sl2-lor", "sl2-para", "sl2-null"):
            entry = catalog_entries[name]
            cert = entry.certificate
            want = cert.s_g * (sp.Rational(3, 2) * cert.lam_sq
                               + sp.Rational(1, 2) * cert.kappa * cert.epsilon)
            assert sc.simplify(entry.curvature.scalar - want) == 0

    def test_sasnokc_not_eta_einstein(self, catalog_entries):
        entry = catalog_entries["sl2-sasnokc"]
        assert entry.certificate is None
        with pytest.raises(NotEtaEinstein):
            classify(entry.structure)

    def test_not_eta_einstein_carries_diagnostics(self, catalog_entries):
        entry = catalog_entries["sl2-sasnokc"]
        try:
            classify(entry.structure)
        except NotEtaEinstein as exc:
            assert exc.witness is not None or exc.least_squares is not None

    def test_lorentzian_negative_kappa_rejected(self):
        # an sl2-lor geometry outside the declared range would need
        # kappa = 1 - lam^2 < 0; classify must refuse it
        lam_big = sc.parameter("lambda")
        a = sc.Assumptions(params={lam_big: sc.ParamFacts(
            square_range=sc.Range(sp.Integer(4), None))})
        from conftest import make_frame3
        m = make_frame3(["e0", "e1", "e2"],
                        {(0, 1): {2: lam_big**2}, (0, 2): {1: -lam_big**2},
                         (1, 2): {0: -1}},
                        [[-1, 0, 0], [0, 1, 0], [0, 0, 1]], -1, "lor-big", a)
        s = ct.verify_epsilon_contact(m, one_form(m, [1, 0, 0]))
        with pytest.raises(NotEtaEinstein, match="kappa"):
            classify(s)


class TestContSpaces:
    def test_lor_membership(self, catalog_entries):
        cert = catalog_entries["sl2-lor"].certificate
        assert cont_space_membership(cert, ContSpace("L", -1, lam**2,
                                                     1 - lam**2))

    def test_para_membership(self, catalog_entries):
        cert = catalog_entries["sl2-para"].certificate
        assert cont_space_membership(cert, ContSpace("L", 1, lam**2,
                                                     lam**2 - 1))

    def test_riem_membership(self, catalog_entries):
        cert = catalog_entries["su2"].certificate
        assert cont_space_membership(cert, ContSpace("R", None, lam**2,
                                                     lam**2 - 1))

    def test_signature_mismatch(self, catalog_entries):
        cert = catalog_entries["su2"].certificate
        assert not cont_space_membership(cert, ContSpace("L", 1, lam**2,
                                                         lam**2 - 1))

    def test_null_membership(self, catalog_entries):
        cert = catalog_entries["sl2-null"].certificate
        assert cont_space_membership(cert, ContSpace("L", 0, sp.Integer(1),
                                                     alpha0**-2))


class TestCompatiblePair:
    def test_lor_riem(self, catalog_entries):
        ok, detail = compatible_pair(catalog_entries["sl2-lor"].certificate,
                                     catalog_entries["su2"].certificate)
        assert ok
        assert sc.simplify(detail["l_sq"] - (1 - lam**2)) == 0

    def test_para_riem(self, catalog_entries):
        ok, detail = compatible_pair(catalog_entries["sl2-para"].certificate,
                                     catalog_entries["su2"].certificate)
        assert ok
        assert sc.simplify(detail["l_sq"] - (lam**2 - 1)) == 0

    def test_null_riem_needs_round_factor(self, catalog_entries):
        cert_n = catalog_entries["sl2-null"].certificate
        ok, _ = compatible_pair(cert_n, catalog("su2", {"lambda": 1}).certificate)
        assert ok
        ok2, detail = compatible_pair(cert_n, catalog_entries["su2"].certificate)
        assert not ok2 and "lam_sq" in detail["reason"]

    def test_wrong_signature_order(self, catalog_entries):
        ok, detail = compatible_pair(catalog_entries["su2"].certificate,
                                     catalog_entries["su2"].certificate)
        assert not ok and "Lorentzian" in detail["reason"]

    def test_only_l_squared_enters(self, catalog_entries):
        # matching is stated through l^2 = kappa_N, so it cannot see the
        # sign of l; both sign choices below build the same pair data
        ok, detail = compatible_pair(catalog_entries["sl2-lor"].certificate,
                                     catalog_entries["su2"].certificate)
        assert ok
        l_sq = detail["l_sq"]
        assert sc.simplify(l_sq - (-sp.sqrt(l_sq)) ** 2) == 0


class TestCatalog:
    def test_su2_bracket_table(self, catalog_entries):
        m = catalog_entries["su2"].manifold
        # [e2,e3] = e1, [e3,e1] = lam^2 e2, [e1,e2] = lam^2 e3
        assert m.c[0, 1, 2] == 1
        assert sc.simplify(m.c[1, 2, 0] - lam**2) == 0
        assert sc.simplify(m.c[2, 0, 1] - lam**2) == 0

    def test_null_bracket_table(self, catalog_entries):
        m = catalog_entries["sl2-null"].manifold
        # [e1,e2] = -2 e0 - e2, [e1,e0] = e0, [e2,e0] = e1
        assert m.c[0, 1, 2] == -2 and m.c[2, 1, 2] == -1
        assert m.c[0, 1, 0] == 1
        assert m.c[1, 2, 0] == 1

    def test_sasnokc_maurer_cartan_relations(self, catalog_entries):
        # d e+ = -a e+ ^ e- - e+ ^ e2,  d e- = e- ^ e2 (emended),
        # d e2 = e+ ^ e- - a e- ^ e2
        m = catalog_entries["sl2-sasnokc"].manifold
        de_plus = ext_d(basis_form(m, (0,)))
        want_plus = form_from_sorted(m, 2, {(0, 1): -a_par, (0, 2): -1})
        assert (de_plus - want_plus).canonical().is_zero_tensor()
        de_minus = ext_d(basis_form(m, (1,)))
        want_minus = form_from_sorted(m, 2, {(1, 2): sp.S.One})
        assert (de_minus - want_minus).canonical().is_zero_tensor()
        de_two = ext_d(basis_form(m, (2,)))
        want_two = form_from_sorted(m, 2, {(0, 1): sp.S.One, (1, 2): -a_par})
        assert (de_two - want_two).canonical().is_zero_tensor()

    def test_entry_provenance_records_emendation(self, catalog_entries):
        notes = " ".join(catalog_entries["sl2-sasnokc"].provenance)
        assert "emended" in notes

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            catalog("nope")

    def test_out_of_range_rejected(self):
        with pytest.raises(ct.ContactError, match="range"):
            catalog("sl2-para", {"lambda": sp.Rational(1, 2)})
        with pytest.raises(ct.ContactError, match="range"):
            catalog("sl2-null", {"alpha0": 0})
        with pytest.raises(ct.ContactError, match="range"):
            catalog("su2", {"lambda": 0})

    def test_sasnokc_admits_zero_substitution(self):
        entry = catalog("sl2-sasnokc", {"a": 0})
        assert entry.structure.epsilon == 0

    def test_entries_reverify_from_cache(self, catalog_entries):
        again = catalog("su2")
        assert again is catalog_entries["su2"]
