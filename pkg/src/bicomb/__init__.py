"""Exact Wasserstein-1 on finitely supported measures, injective hulls of
finite metrics, conical geodesic bicombings with defect certificates, the
half-plane example, improvement operators, and constructive extension to
the hull."""

from .barycenter import (BarycenterConfig, BarycenterError, BarycenterReport,
                         RoundBudgetError, SizeCapError,
                         approx_sigma_convex_hull, b_n, beta_rational,
                         sigma_beta)
from .chains import (Chain, ChainBudgetError, cauchy_check,
                     chain_fixed_point, chain_fixed_point_batch,
                     chain_spacing_defect, composition_defect,
                     consistency_bound_check, s_n, sigma_n, subdivide)
from .doss import (WitnessSearchResult, banach_witness_search,
                   doss_membership, doss_set_finite, doss_violation,
                   w1_to_dirac)
from .extension import (ConstraintStore, ExtensionBudgetError, ExtensionError,
                        ball_intersection_point, build_S_map,
                        certify_extension, extend_point, extended_bicombing,
                        extension_handle)
from .halfplane import (WITNESS_PAIR, beta_H, beta_lp, beta_vertex,
                        distinctness_certificate, interpolation_family,
                        sigma_H)
from .handles import (Bicombing, DefectReport, GridError, Isometry,
                      identity_isometry, linear_bicombing)
from .sampling import (random_rational_metric, random_weights,
                       rational_point, rng_from_seed, sample_grid_t,
                       sample_point, sample_points)
from .moduli import (DoReport, InvolutionError, PreconditionError,
                     SweepConfig, conical_defect, conjugate,
                     consistency_defect, convexity_defect, d_o,
                     equivariance_defect, evaluate_witness, geodesic_defect,
                     interpolate, iterate_reversal, reversal_step,
                     reversibility_defect, straightness_defect,
                     strengthened_defect, symmetrize_involution)
from .spaces import (FiniteMetric, MetricAxiomError, Space, SpaceError,
                     SpaceMismatchError, dist, finite_space, halfplane_space,
                     linf_space, metric_from_dict, point_key, validate_metric)
from .tightspan import (ExtremalFunction, TightSpanError, embed,
                        embedding_isometry_defect, ex_bicombing, is_extremal,
                        lipschitz_extend_real, make_tightspan, retract,
                        retract_with_stats, sample_extremal, star,
                        star_residual)
from .wasserstein import (DualPotential, Measure, MeasureError,
                          TransportResult, dirac, kantorovich_dual, measure,
                          pushforward, w1_general, w1_two_point, w1_uniform)

__version__ = "0.1.0"
