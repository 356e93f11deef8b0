"""Exact frame calculus for epsilon-contact 3-manifolds and their
six-dimensional supergravity product solutions."""

from .scalar import (Assumptions, FuncFacts, ParamFacts, Range, ScalarError,
                     Verdict, ZeroResult, coordinate, differentiate,
                     eval_rational, function_head, is_zero, parameter,
                     parse_scalar, simplify)
from .frames import (DegenerateMetric, FrameError, FrameManifold, TensorField,
                     basis_form, basis_vector, ext_d, flat, form_inner,
                     full_contraction, hodge, interior, lie_bracket,
                     lie_derivative, metric_tensor, one_form,
                     product_manifold, promote, sharp, tensor_product, vector,
                     volume_form, wedge, zero_tensor)
from .curvature import (Connection, CurvatureData, covariant_derivative,
                        levi_civita, lowered_torsion, metricity_residual,
                        ricci_of, riemann, torsion_tensor, with_skew_torsion)
from .contact import (ContactError, ContactFrame, EpsilonContactStructure,
                      ExtendedJ, VerificationFailure, extend_j,
                      find_contact_frame, is_k_contact, is_sasaki,
                      is_integrable, kernel_involutive, lemma1_report,
                      nijenhuis, null_mu, prop2_report,
                      sasaki_iff_integrable_report, saskc_criterion,
                      verify_epsilon_contact, zero_deformable)
from .eta_einstein import (CatalogEntry, ContSpace, EtaEinsteinCertificate,
                           NotEtaEinstein, catalog, catalog_names, classify,
                           compatible_pair, cont_space_membership)
from .sugra import (EomReport, SugraError, SupergravityConfig, build_solution,
                    calibrate_flux, circ, torsion_ricci_flat, verify_eom)
from .manifest import Manifest, ManifestError, load_manifest, parse_manifest
from .report import Report

__version__ = "0.1.0"
