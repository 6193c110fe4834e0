"""Equilibrium analysis for an optimal-investment model with vintage capital.

Capital is indexed by age s in [0, s_bar] and decays at rate mu while it
ages. A firm chooses boundary investment u0 (new machines) and distributed
investment u1(s) (maintenance across ages) to maximize discounted revenue
minus quadratic costs. This package computes the stationary equilibrium of
that problem in closed form on a uniform age grid, checks sufficient
conditions for its uniqueness, cross-validates it against an independent
discrete fixed-point oracle, and simulates the age-transport dynamics.

Main entry points:

  ModelParams, validate      problem data and validation
  assemble                   stationary equilibrium (profiles + residuals)
  check_contraction          uniqueness conditions with margins
  discrete_oracle.build      independent Picard oracle
  simulate, profit           explicit transport scheme
  cli.main                   the vintage-eq command line
"""

from .model import (ControlPair, GridFunction, GridMismatch, ModelParams,
                    ModelValidationError, RevenueSpec, revenue, revenue_prime,
                    validate, violations)
from .operators import (Quadrature, a_inverse_apply, a_inverse_delta,
                        adjoint_inverse_apply, b_star_apply, conjugate_cost,
                        control_norm, cost, integrate, multiplier_half_beta,
                        pairing, resolvent_apply, semigroup_apply,
                        trapezoid_weights)
from .equilibrium import (BracketFailure, EquilibriumResult, Residuals,
                          alpha_bar, assemble, compute_w1, compute_w2,
                          extremality_residual, solve_eta,
                          stationarity_residual)
from .conditions import (AlphaNotInV, ConditionEntry, ConditionReport,
                         WrongFamily, alpha_v_norm_sq, check_contraction,
                         check_remark45)
from .discrete_oracle import (DiscreteOperators, NoConvergence,
                              equilibrium_profiles, operator_norm,
                              picard_fixed_point, residual_weak_form)
from .pde_sim import (HorizonMismatch, OpenLoopConstant, OpenLoopTimeTable,
                      StationaryEquilibriumFeedback, Trajectory, output_rate,
                      profit, simulate, step, write_trajectory_csv)
from . import discrete_oracle

__version__ = "0.1.0"

__all__ = [
    "AlphaNotInV", "BracketFailure", "ConditionEntry", "ConditionReport",
    "ControlPair", "DiscreteOperators", "EquilibriumResult", "GridFunction",
    "GridMismatch", "HorizonMismatch", "ModelParams", "ModelValidationError",
    "NoConvergence", "OpenLoopConstant", "OpenLoopTimeTable", "Quadrature",
    "Residuals", "RevenueSpec", "StationaryEquilibriumFeedback", "Trajectory",
    "WrongFamily", "a_inverse_apply", "a_inverse_delta",
    "adjoint_inverse_apply", "alpha_bar", "alpha_v_norm_sq", "assemble",
    "b_star_apply", "check_contraction", "check_remark45", "compute_w1",
    "compute_w2", "conjugate_cost", "control_norm", "cost",
    "discrete_oracle", "equilibrium_profiles", "extremality_residual",
    "integrate", "multiplier_half_beta", "operator_norm", "output_rate",
    "pairing", "picard_fixed_point", "profit", "resolvent_apply", "revenue",
    "revenue_prime", "residual_weak_form", "semigroup_apply", "simulate",
    "solve_eta", "stationarity_residual", "step", "trapezoid_weights",
    "validate", "violations", "write_trajectory_csv",
]
