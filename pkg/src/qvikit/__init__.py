"""qvikit: Douglas-Rachford splitting solver and verification toolkit for
quasi-variational inequalities with moving (non-self) constraint sets."""

from .baseline_solver import BaselineParams, sample_point, solve_baseline
from .dr_solver import (DRParams, ParamCheck, Problem, SolveReport, Trace,
                        TripleState, default_params, residual, rho_map,
                        solve_dr, theoretical_bound, validate_params,
                        weighted_distance, weighted_norm)
from .operators import (AffineMap, ConvergenceError, GeneralMap,
                        contraction_modulus, estimate_constants,
                        optimal_stepsize, reflected_resolvent, resolvent,
                        resolvent_batch)
from .sets import (Box, ConvexSet, CustomMovingSet, MovingSet, Polytope,
                   SamplerConfig, Segment, SegmentFamily, TranslatedSet,
                   as_point, constant_moving_set, hausdorff_estimate,
                   localized_hausdorff_estimate, translate)
from .verify import (check_hausdorff_lipschitz,
                     check_localized_hausdorff_bound,
                     check_projection_lipschitz, grid_localized_hausdorff,
                     segment_family_instance, shifted_square_problem,
                     shifted_square_solution, table_starts)

__version__ = "0.1.0"

__all__ = [
    "AffineMap", "BaselineParams", "Box", "ConvergenceError", "ConvexSet",
    "CustomMovingSet", "DRParams", "GeneralMap", "MovingSet", "ParamCheck",
    "Polytope", "Problem", "SamplerConfig", "Segment", "SegmentFamily",
    "SolveReport", "Trace", "TranslatedSet", "TripleState", "as_point",
    "check_hausdorff_lipschitz", "check_localized_hausdorff_bound",
    "check_projection_lipschitz", "constant_moving_set",
    "contraction_modulus", "default_params", "estimate_constants",
    "grid_localized_hausdorff", "hausdorff_estimate",
    "localized_hausdorff_estimate", "optimal_stepsize",
    "reflected_resolvent", "resolvent", "resolvent_batch", "residual",
    "rho_map", "sample_point", "segment_family_instance",
    "shifted_square_problem", "shifted_square_solution", "solve_baseline",
    "solve_dr", "table_starts", "theoretical_bound", "translate",
    "validate_params", "weighted_distance", "weighted_norm", "__version__",
]
