"""selbal: exact tools for selective balancing of unit-vector families."""

from .bounds import (SigmaBracket, binomial_volume_bound_holds,
                     prop1_threshold, shell_pigeonhole_bound, sigma_bracket)
from .construction import (ConstructionParams, PlannedParameters,
                           build_instance, figure_example, nested_subsets,
                           plan_parameters)
from .errors import (ArithmeticOverflow, BudgetExceeded, ContractViolation,
                     ParameterError, PreconditionFailure, SelbalError)
from .geometry import (LatticeShell, PointSet, find_shell, is_strictly_convex,
                       lonely_points, lonely_witness_for, shell_profile)
from .solver import (ProofTrace, Verdict, boundary_combinations,
                     explain_lower_bound, sample_random, solve_branch_bound,
                     solve_exhaustive, solve_float, solve_mitm,
                     structural_verify)
from .vectorspace import (ScaledVector, SignVector, UnitVectorFamily, combine,
                          coordinate_index, coordinate_point, family_from_dict,
                          family_to_dict, is_balancing_witness, load_instance,
                          norm_sq_scaled, save_instance)

__version__ = "0.1.0"
