"""Command-line interface: manifest ingestion, dispatch, reports.

Commands
--------
check INPUT            epsilon-contact verification + identity suites
classify INPUT         eta-Einstein certificate
null-analysis INPUT    mu, J-extension, integrability, Sasaki/K-contact
product INPUT INPUT    product solution: EOM + torsion certification
catalog [NAME]         list or run a built-in example

INPUT is a manifest path or @name for a built-in catalog entry.  Exit
codes: 0 all pass, 1 verification failure, 2 input error, 3 an Unknown
verdict is present.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

import sympy as sp

from . import contact as ct
from . import eta_einstein as ee
from . import sugra as sg
from .contact import CheckItem, ContactError, VerificationFailure
from .frames import FrameError
from .manifest import ManifestError, load_manifest
from .report import Report
from .scalar import ScalarError, Verdict

_TRI = {Verdict.ZERO: "true", Verdict.NONZERO: "false",
        Verdict.UNKNOWN: "unknown"}


def _parse_params(text: Optional[str]) -> dict:
    out = {}
    if not text:
        return out
    for chunk in text.split(","):
        if "=" not in chunk:
            raise ManifestError(f"--params expects k=v pairs, got {chunk!r}")
        k, v = chunk.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _load_structure(spec: str, args) -> tuple[ct.EpsilonContactStructure, str,
                                              Optional[ee.CatalogEntry]]:
    params = _parse_params(args.params)
    if spec.startswith("@"):
        name = spec[1:]
        entry = ee.catalog(name, {k: sp.Rational(v) for k, v in params.items()}
                           if params else None)
        s = entry.structure
        if args.orientation != "auto":
            s = ct.verify_epsilon_contact(s.manifold, s.alpha,
                                          int(args.orientation), args.seed)
            s.provenance.extend(entry.provenance)
            s.frame_basis = entry.structure.frame_basis
        return s, name, entry
    mf = load_manifest(spec, substitutions=params or None)
    orientation = args.orientation if args.orientation == "auto" \
        else int(args.orientation)
    s = ct.verify_epsilon_contact(mf.manifold, mf.alpha, orientation, args.seed)
    return s, mf.name, None


def _emit(report: Report, args) -> int:
    text = report.to_json() if args.format == "json" else report.to_text()
    sys.stdout.write(text)
    return report.exit_code


def _structure_findings(s: ct.EpsilonContactStructure, report: Report) -> None:
    report.findings["epsilon"] = s.epsilon
    report.findings["kind"] = s.kind()
    report.provenance.extend(s.provenance)


def run_check(s: ct.EpsilonContactStructure, report: Report) -> None:
    _structure_findings(s, report)
    report.add_pass("alpha = star d alpha and |alpha|^2 = epsilon", True)
    for item in ct.lemma1_report(s):
        report.add_check(item)
    for item in ct.prop2_report(s):
        report.add_check(item)


def run_classify(s: ct.EpsilonContactStructure, report: Report,
                 entry: Optional[ee.CatalogEntry] = None) -> None:
    _structure_findings(s, report)
    try:
        cert = entry.certificate if entry is not None and entry.certificate \
            else ee.classify(s)
    except ee.NotEtaEinstein as exc:
        report.add_pass("eta-Einstein residual vanishes", False, str(exc))
        if exc.least_squares:
            report.findings["least_squares_diagnostic"] = {
                k: str(v) for k, v in exc.least_squares.items()}
        return
    if cert is None:
        report.add_pass("eta-Einstein residual vanishes", False,
                        "no certificate for this entry")
        return
    report.add_pass("eta-Einstein residual vanishes", True)
    report.findings["certificate"] = {
        "epsilon": cert.epsilon,
        "signature": "L" if cert.s_g < 0 else "R",
        "lam_sq": str(cert.lam_sq),
        "kappa": str(cert.kappa),
    }
    report.provenance.extend(cert.notes)


def run_null_analysis(s: ct.EpsilonContactStructure, report: Report) -> None:
    if s.epsilon != 0:
        raise ContactError(
            f"null-analysis applies to epsilon = 0 structures; got epsilon "
            f"= {s.epsilon}")
    _structure_findings(s, report)
    report.findings["mu"] = str(ct.null_mu(s))
    rep = ct.sasaki_iff_integrable_report(s)
    sas = rep["sasaki"]
    report.findings["sasaki"] = _TRI[sas.verdict]
    if sas.witness:
        report.findings["sasaki_witness"] = str(sas.witness)
    kc = ct.is_k_contact(s)
    report.findings["k_contact"] = _TRI[kc.verdict]
    if kc.witness:
        report.findings["k_contact_witness"] = str(kc.witness)
    integ = rep["integrable"]
    report.findings["j_integrable"] = ("unknown" if integ is None
                                       else str(bool(integ)).lower())
    nv, nidx, nval = rep["detail"]["nijenhuis"]
    report.findings["nijenhuis_vanishes"] = _TRI[nv]
    zd, r1, r2 = rep["detail"]["zero_deformable"]
    report.findings["j_ranks"] = f"({r1.rank}, {r2.rank})"
    inv = rep["detail"]["kernel_involutive"]
    report.findings["kernel_involutive"] = ("unknown" if inv.involutive is None
                                            else str(inv.involutive).lower())
    report.add_pass("Sasaki condition agrees with J-integrability",
                    rep["agree"])
    frame = rep["frame"]
    report.provenance.append(
        f"contact frame coefficients {frame.coefficients} over the search basis")
    if sas.verdict is Verdict.ZERO:
        crit = ct.saskc_criterion(s, frame)
        report.findings["k_contact_criterion g(L_xi u, u)"] = str(crit)
    if kc.verdict is Verdict.ZERO:
        report.add_pass("K-contact null structure is Sasaki",
                        sas.verdict is Verdict.ZERO)


def run_product(s_n, s_x, report: Report, seed: int = 0) -> None:
    cert_n, cert_x = ee.classify(s_n), ee.classify(s_x)
    ok, detail = ee.compatible_pair(cert_n, cert_x)
    report.add_pass("certificates form a compatible pair", ok,
                    None if ok else detail.get("reason"))
    if not ok:
        return
    c = sg.calibrate_flux(s_n, s_x, cert_n=cert_n, cert_x=cert_x)
    report.findings["flux_coefficient"] = str(c)
    cfg = sg.build_solution(s_n, s_x, cert_n=cert_n, cert_x=cert_x,
                            coefficient=c)
    report.findings["lam"] = str(cfg.lam)
    report.findings["l"] = str(cfg.ell)
    report.provenance.extend(cfg.provenance)
    for item in sg.verify_eom(cfg, seed).checks:
        report.add_check(item)
    for item in sg.torsion_ricci_flat(cfg, seed).checks:
        report.add_check(item)


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="econtact",
        description="Verify epsilon-contact structures and their "
                    "six-dimensional supergravity products.")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for witness sampling (default 0)")
    parser.add_argument("--format", choices=["text", "json"], default="text")
    parser.add_argument("--orientation", choices=["auto", "+1", "-1"],
                        default="auto")
    parser.add_argument("--params", default=None,
                        help="comma-separated k=v parameter substitutions")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("check", "classify", "null-analysis"):
        p = sub.add_parser(name)
        p.add_argument("input", help="manifest path or @catalog-name")
    p = sub.add_parser("product")
    p.add_argument("input_n", help="Lorentzian factor (path or @name)")
    p.add_argument("input_x", help="Riemannian factor (path or @name)")
    p = sub.add_parser("catalog")
    p.add_argument("name", nargs="?", help="entry to run (omit to list)")
    args = parser.parse_args(argv)

    try:
        if args.command == "catalog" and not args.name:
            for name in ee.catalog_names():
                sys.stdout.write(name + "\n")
            return 0
        if args.command == "product":
            report = Report("product", [args.input_n, args.input_x],
                            args.seed, args.orientation)
            s_n, name_n, _ = _load_structure(args.input_n, args)
            s_x, name_x, _ = _load_structure(args.input_x, args)
            report.inputs = [name_n, name_x]
            report.provenance.extend(s_n.provenance)
            report.provenance.extend(s_x.provenance)
            run_product(s_n, s_x, report, args.seed)
            return _emit(report, args)
        if args.command == "catalog":
            spec = "@" + args.name
            report = Report("catalog", [args.name], args.seed, args.orientation)
            s, name, entry = _load_structure(spec, args)
            run_check(s, report)
            run_classify(s, report, entry)
            if s.epsilon == 0:
                run_null_analysis(s, report)
            return _emit(report, args)
        report = Report(args.command, [args.input], args.seed, args.orientation)
        s, name, entry = _load_structure(args.input, args)
        report.inputs = [name]
        if args.command == "check":
            run_check(s, report)
        elif args.command == "classify":
            run_classify(s, report, entry)
        else:
            run_null_analysis(s, report)
        return _emit(report, args)
    except VerificationFailure as exc:
        report = Report(args.command, _inputs_of(args), args.seed,
                        args.orientation)
        for item in exc.checks:
            report.add_check(item)
        if not exc.checks:
            report.add_pass("verification", False, str(exc))
        report.findings["failure"] = str(exc)
        _emit(report, args)
        return 1
    except (ManifestError, ScalarError, FrameError, ContactError,
            sg.SugraError, ee.NotEtaEinstein, KeyError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def _inputs_of(args) -> list[str]:
    if args.command == "product":
        return [args.input_n, args.input_x]
    return [getattr(args, "input", getattr(args, "name", "") or "")]


if __name__ == "__main__":
    sys.exit(main())
