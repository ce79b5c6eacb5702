"""curvcert: certified bounded primitives and contact structures on
negatively curved model spaces.

The library builds explicit chart models (flat, curvature -1, the
complex hyperbolic ball, rotationally symmetric pinched profiles),
verifies the Jacobi comparison that drives radial attenuation, applies
the radial homotopy operator to closed bounded forms with the uniform
sup-norm bound 1/(k-1), and certifies the contact geometry of distance
spheres together with the convergence of their contact forms to the
boundary sphere.  Every inequality ships as a seeded, reproducible
certificate.
"""

from .conventions import CONVENTION_TAG, SCHEMA_VERSION
from .errors import (ClosednessError, CurvcertError, DegenerateInputError,
                     DomainError, QuadratureError, SchemaError, ValidationError)
from .spaces import (ModelSpace, WarpProfile, CurvatureAudit, euclidean,
                     hyperbolic, complex_hyperbolic, warped,
                     standard_warped_quadratic, metric_at, christoffel_at,
                     riemann_at, riemann_closed_at, sectional_curvature,
                     curvature_audit, complex_structure, h_inner, h_norm,
                     orthonormal_frame, gram_schmidt)
from .geodesics import (GeodesicRay, JacobiSolution, MonotoneReport,
                        RadialTransport, distance, exp_map, log_map, make_ray,
                        geodesic_flow, geodesic_scaling, pushforward_scaling,
                        pushforward_matrices, radial_transport,
                        jacobi_comparison, ratio_monotone_check)
from .forms import (KFormField, RadialField, SupEstimate, constant_form,
                    coordinate_form, eval_form, interior_product, wedge,
                    exterior_derivative, pullback_linear, pullback_scaling,
                    h_norm_form, sup_norm_estimate, comass_estimate,
                    unit_radial)
from .primitive import (BoundCertificate, ChainRecord, PrimitiveProblem,
                        bound_certificate, closedness_audit, exactness_audit,
                        kaehler_primitive, primitive_components_at,
                        primitive_field, sinh_ratio_bound)
from .contact import (SphereFrame, beta_covector, beta_field, beta_norm,
                      contact_defect, dbeta_fd, dbeta_via_hessian,
                      distance_function, dr_covector, gradient_r,
                      grad_beta_operator_norm, hessian_r, hessian_r_matrix,
                      kaehler_form, levi_positivity, levi_vs_dbeta_residual,
                      sphere_frame)
from .horizon import (HorizonChart, HorizonReport, horizon_limit_report,
                      horizon_pullback, normalized_beta_pullback, overlap_audit,
                      standard_contact_form, stereographic_jacobian,
                      stereographic_point)
from .experiments import ExperimentConfig, fixture_form, replay_point, run
from .emit import (ResultRecord, config_hash, emit, read_csv_record,
                   record_from_json, record_to_csv, record_to_json,
                   validate_record)

__version__ = "0.1.0"
