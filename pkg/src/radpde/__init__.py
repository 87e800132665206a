"""Numerical laboratory for radially symmetric quasilinear problems.

Hardy weights, Green kernels, fundamental tones, Q_V-capacities and a
monotone sub/supersolution pipeline for the equation
Delta_{p,f} u + a u^{p-1} - b F(u) = 0 on model manifolds, together with a
prescribed-scalar-curvature front-end.
"""

from .errors import *  # noqa: F401,F403
from .geometry import (CurvatureProfile, ModelManifold, WarpingFunction,
                       flat_model, hyperbolic_model, radial_laplacian_coeff,
                       solve_jacobi)
from .hardy import (HardyWeight, ZetaReport, chi_flat_closed, chi_general,
                    chi_hyperbolic_closed, chi_limit, chi_recursion_step,
                    hardy_weight, multipole_weight, space_form_distance,
                    zeta_check)
from .green import (GreenKernel, green_hardy_weight, green_kernel,
                    is_subcritical_model, make_green_kernel,
                    subcriticality_state)
from .mesh import (DiscreteFunction, PotentialProfile, RadialMesh,
                   annulus_mesh, ball_mesh, lagrangian, mass_matrix, picone,
                   qv_energy, qv_residual, qv_residual_vector,
                   stiffness_matrix)
from .spectral import (ToneResult, ap_consistency_check, fundamental_tone,
                       yamabe_invariant_upper_bound)
from .solver import (CoefficientProfile, DeltaInfo, Nonlinearity, SolveReport,
                     compute_delta, compute_delta_info, dirichlet_solve,
                     hyperbolic_exact_solution, monotone_iteration,
                     multi_solution_sequence, necessary_condition_check,
                     obstacle_complementarity, obstacle_solve,
                     pasting_min_check, run_pipeline,
                     uniform_lower_bound_check, uniform_upper_bound_check)
from .capacity import (CapacityResult, capacitor_solve, classify_criticality,
                       global_capacity)
from .yamabe import (ConformalReport, YamabeProblem,
                     conformal_laplacian_subcritical, reconstruct_curvatures,
                     run_prescribed_curvature, to_coefficients)

__version__ = "0.1.0"
