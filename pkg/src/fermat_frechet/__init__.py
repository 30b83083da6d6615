"""Weighted Fermat trees over every incongruent simplex a length multiset realizes."""

from .curvature import CurvatureEstimate, estimate_curvature, multitree_curvature_consensus
from .dekster_wilker import (DWQuery, in_dw_euclidean, in_dw_hyperbolic, in_dw_spherical,
                             lambda_euclidean, lambda_hyperbolic, lambda_spherical,
                             m_spherical, spherical_domain_constants)
from .enumeration import (CanonicalAssignment, EnumerationOptions, FrechetMultisimplex,
                          canonical_key, enumerate_incongruent, max_count, stirling_bound)
from .errors import HemisphereError, InfeasibleError, NumericalError
from .geometry import (CurvedSpace, basepoint, cos_vertex_angle, exp_map,
                       geodesic_distance, log_map, project_to_model)
from .immersion import (CombinedTuple, combine, godel_immersion_check,
                        isoperimetric_perturbation_sweep, normalized_weight_solve,
                        schoenberg_rho_search)
from .inverse import (InfinityFamily, PlanarFermatSolution, infinity_distances,
                      infinity_limit_inverse, inverse_weights, inverse_weights_tetrahedron,
                      inverse_weights_triangle, planar_fermat_phi, solve_infinity_tree)
from .realizability import (RealizabilityReport, euclidean_volume, hyperbolic_cm_det,
                            hyperbolic_realizable, milnor_ideal_regular_bound,
                            milnor_orthosimplex_volume, realize_in_space,
                            schoenberg_euclidean, schoenberg_spherical, spherical_cm_det,
                            triangle_area_curved)
from .solver import (Classification, FermatTree, MultitreeSolution, SimplexRealization,
                     branch_bound_check, classify, classify_edges, first_order_residual,
                     kplane_triangle_equations_residual, multitree_solve, solve_fermat,
                     volume_additivity_check)
from .tetra3k import (TetraConfig, a03_of, a04_of, boundary_dihedral, eliminate_alpha,
                      euclidean_a03_a04, h012, tetra_multitree_conditions)

__version__ = "0.1.0"
