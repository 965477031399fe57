"""Painleve analysis and special solutions of the generalized Henon-Heiles
system: dominant balances and resonances, three-parameter Laurent/Puiseux
local solutions in the C = -16/5 and C = -4/3 cases, convergence
certificates for them, and first-order polynomial subequation fitting."""

__version__ = "0.1.0"

from .convergence import ConvergenceCertificate, bound_step, certify
from .errors import (CompatibilityViolation, ContractViolation,
                     InsufficientPrefix, SingularityApproach,
                     UnsupportedParameter)
from .integrate import integrate_numeric
from .laurent import (BranchSpec, RecurrenceStep, SeriesSolution,
                      branch_residue, build_series, c1_fourth_power,
                      compatibility_defect, enumerate_branches,
                      f_minus1_squared, leading_x_coefficient,
                      recurrence_determinant, singular_step_indices,
                      step_recurrence)
from .linalg import DenseMatrix, LinearSolution, determinant, solve_linear
from .model import (FourthOrderForm, PhaseState, PolynomialODESystem,
                    build_henon_heiles, energy, energy_series,
                    reduce_to_fourth_order, residual_of_series,
                    state_from_series)
from .painleve import (CandidateC, ClassificationVerdict, DominantBalance,
                       ResonanceSet, candidate_C_values, classify,
                       find_dominant_balances, resonances)
from .scalars import (Scalar, as_scalar, default_precision, nth_root,
                      set_default_precision)
from .series import PuiseuxSeries
from .subequation import (FitResult, QuarticForm, ResiduePair,
                          SubequationAnsatz, fit, mobius_squared_series,
                          residue_pairing, transform_quartic,
                          weierstrass_p_series)

__all__ = [name for name in dir() if not name.startswith("_")]
