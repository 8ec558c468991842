"""Secondary characteristic classes of foliations, exactly and numerically.

An exact graded-commutative differential algebra (rational-function
coefficients over the Gaussian rationals, normal-form monomials in
declared odd generators) carries local models of foliated charts and
their infinitesimal deformations.  On top of it the package builds the
Godbillon-Vey/Bott representative theta∧(d theta)^q, its infinitesimal
derivative theta_dot∧(d theta)^q, the degree-(2q+2) deformation class
theta_dot∧theta∧(d theta)^q, the circle-twist construction with fiber
integration, and verifies the relevant chain-level identities exactly.
A numeric layer evaluates the representatives on parametrized cycles
(the unit three-sphere in Hopf coordinates, the circle, products) by
spectral quadrature.

Command line: see `folchar --help` (subcommands run, sweep, check).
"""

from .cdga import (FormExpr, GeneratorDecl, RewriteRule, RewriteSystem, Universe,
                   exterior_d, param_derivative, reduce_mod_ideal, wedge)
from .classes import (ClassRep, PROP31_SIGN, Prop31Report, bott_rep, dbott_rep,
                      fiber_integrate, fiber_integrate_class, flk_rep, s1_twist,
                      verify_prop31)
from .errors import (ArgumentError, DeclarationError, FolcharError, ManifestError,
                     RewriteError, SingularEvaluationError, SolverError,
                     UnsupportedCoefficientError)
from .foliation import (DTHETA_SIGN, ChartFoliation, DeformationData, IdentityReport,
                        IDENTITY_NAMES, VectorValuedForm, check_dtheta_power,
                        check_lemma21_closed, check_lp_lemma, check_prop31_expansion,
                        covariant_d, lp_representative, projective_curvature,
                        solve_connection, theta_wedge, verify_identity)
from .manifest import load_manifest, parse_expression, universe_from_dict, universe_to_dict
from .models import (S3Family, bott_closed_form, dbott_closed_form, derivative_crosscheck,
                     flk_fiber_closed_form, s3_chart, s3_deformation, s3_universe,
                     s3_volume_form)
from .numeric import (Axis, ParamManifold, QuadratureSpec, builtin, class_coefficient,
                      evaluate_form, evaluate_on_tangents, integrate)
from .scalars import ComplexRational, Poly, Scalar

__version__ = "0.1.0"

__all__ = [
    "FormExpr", "GeneratorDecl", "RewriteRule", "RewriteSystem", "Universe",
    "wedge", "exterior_d", "reduce_mod_ideal", "param_derivative",
    "ComplexRational", "Poly", "Scalar",
    "ChartFoliation", "DeformationData", "VectorValuedForm",
    "covariant_d", "theta_wedge", "projective_curvature", "lp_representative",
    "solve_connection", "verify_identity", "IdentityReport", "IDENTITY_NAMES",
    "check_dtheta_power", "check_lp_lemma", "check_prop31_expansion",
    "check_lemma21_closed", "DTHETA_SIGN",
    "ClassRep", "bott_rep", "dbott_rep", "flk_rep", "s1_twist",
    "fiber_integrate", "fiber_integrate_class", "verify_prop31",
    "Prop31Report", "PROP31_SIGN",
    "Axis", "ParamManifold", "QuadratureSpec", "builtin",
    "evaluate_form", "evaluate_on_tangents", "integrate", "class_coefficient",
    "S3Family", "s3_universe", "s3_chart", "s3_deformation", "s3_volume_form",
    "bott_closed_form", "dbott_closed_form", "flk_fiber_closed_form",
    "derivative_crosscheck",
    "load_manifest", "parse_expression", "universe_to_dict", "universe_from_dict",
    "FolcharError", "DeclarationError", "ArgumentError", "RewriteError",
    "SolverError", "UnsupportedCoefficientError", "SingularEvaluationError",
    "ManifestError",
]
