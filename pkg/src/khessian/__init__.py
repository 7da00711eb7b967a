"""Radial solutions of a fourth-order Hessian-type problem on the unit ball.

The radial equation is reduced, via ``r = exp(-t)``, to a second-order
problem on the half-line which is solved by Green-kernel fixed-point
iteration (Picard or monotone), together with solvability thresholds in
``lambda`` and a shooting oracle.
"""

from .bounds import (BoundsReport, Classification, HypothesisError, bounds_report, classify_lambda,
                     cond2_threshold, h_tilde, necessary_bound, nonexistence_threshold,
                     quadratic_constant)
from .datum import Datum, ForcingProfile, from_samples, h1_eval, h1_l1_norm, load_datum
from .green import BcFamily, LinearSolveResult, apply_forward, apply_inverse, residual
from .grid import (Grid, GridFunction, NormKind, WeightedNormKind, cumulative_backward,
                   cumulative_forward, integrate, make_grid, mu_norm, norm)
from .monotone import (MonotoneRun, NoUpperSolution, OrderingViolation, lower_solution,
                       monotone_iterate, upper_constant)
from .oracle import Outcome, ShootResult, fate, find_decaying, shoot
from .picard import PicardConfig, Solution, linear_seed, nonlinearity, picard_step, solve_picard
from .reconstruction import (RadialProfile, export_profile, pde_residual, profile_from_w,
                             symmetry_check, w_to_profile)

__all__ = [name for name in dir() if not name.startswith("_")]
