"""Sufficient conditions for uniqueness of the equilibrium.

The fixed-point map T x = R'(<alpha, x>) w1 + w2 is a contraction (hence the
equilibrium exists and is unique) whenever

    lam + mu  >  N * ||B||^2 * L_mult * L_rev * |alpha|_V^2,

where N bounds the operator norm of (A0*)^{-1} (two admissible bounds: 1/mu
from the generation estimate, s_bar/sqrt(2) from the kernel's area),
||B|| = 1, L_mult = max(1/(2 beta0), max_s 1/(2 beta1(s))) is the Lipschitz
constant of the extremal-control multiplier, L_rev is the global Lipschitz
constant of R', and |alpha|_V^2 = int alpha^2 + int (alpha' - mu alpha)^2
requires alpha in V, i.e. alpha(s_bar) = 0.

The condition is sufficient only: a failing report never asserts that the
equilibrium is non-unique. ``check_contraction`` reports both norm-bound
variants; ``check_remark45`` additionally evaluates the quadratic-revenue
shortcut that replaces L_mult by the looser (1/2)(1 + 1/beta0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams
from .operators import integrate, pairing

__all__ = [
    "AlphaNotInV",
    "WrongFamily",
    "ConditionEntry",
    "ConditionReport",
    "alpha_v_norm_sq",
    "check_contraction",
    "check_remark45",
]

ALPHA_END_TOL = 1e-9

_NOTE = ("sufficient only: every holding entry guarantees a unique equilibrium; "
         "a failing report does not assert non-existence or non-uniqueness")


class AlphaNotInV(ValueError):
    """alpha(s_bar) != 0, so the |alpha|_V constant is undefined."""


class WrongFamily(ValueError):
    """The quadratic-revenue shortcut was requested for another family."""


@dataclass(frozen=True, eq=False)
class ConditionEntry:
    name: str
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return bool(self.lhs > self.rhs)

    @property
    def margin(self) -> float:
        return float(self.lhs - self.rhs)

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": float(self.lhs),
                "rhs": float(self.rhs), "holds": self.holds,
                "margin": self.margin}


@dataclass(frozen=True, eq=False)
class ConditionReport:
    entries: list[ConditionEntry]
    constants: dict = field(default_factory=dict)
    note: str = _NOTE

    def entry(self, name: str) -> ConditionEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def any_holds(self) -> bool:
        return any(e.holds for e in self.entries)

    @property
    def best_margin(self) -> float:
        return max(e.margin for e in self.entries)

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries],
                "constants": dict(sorted(self.constants.items())),
                "note": self.note}


def _alpha_prime(params: ModelParams) -> np.ndarray:
    # Centered differences inside, second-order one-sided at the ends.
    return np.gradient(params.alpha.values, params.h, edge_order=2)


def alpha_v_norm_sq(params: ModelParams) -> float:
    """|alpha|_V^2 = int alpha^2 + int (alpha' - mu alpha)^2, alpha' by
    centered differences."""
    a = params.alpha
    if abs(float(a.values[-1])) > ALPHA_END_TOL:
        raise AlphaNotInV(
            f"alpha(s_bar) = {a.values[-1]:.3e} exceeds {ALPHA_END_TOL}")
    adj = _alpha_prime(params) - params.mu * a.values
    return pairing(a, a) + integrate(a.with_values(adj * adj))


def _common_constants(params: ModelParams) -> dict:
    mult = max(1.0 / (2.0 * params.beta0),
               float(np.max(1.0 / (2.0 * params.beta1.values))))
    return {
        "norm_bound_1_over_mu": 1.0 / params.mu,
        "norm_bound_age_span": params.s_bar / np.sqrt(2.0),
        "b_norm": 1.0,
        "multiplier_lipschitz": mult,
    }


def check_contraction(params: ModelParams) -> ConditionReport:
    """Evaluate lam + mu > N * L_mult * L_rev * |alpha|_V^2 for both norm
    bounds N in {1/mu, s_bar/sqrt(2)}. Raises AlphaNotInV when alpha is not
    in V."""
    av2 = alpha_v_norm_sq(params)
    consts = _common_constants(params)
    lrev = params.revenue.lipschitz_r_prime
    coupling = consts["multiplier_lipschitz"] * lrev * av2
    lhs = params.lam + params.mu
    entries = [
        ConditionEntry("inverse_bound_1_over_mu", lhs,
                       consts["norm_bound_1_over_mu"] * coupling),
        ConditionEntry("inverse_bound_age_span", lhs,
                       consts["norm_bound_age_span"] * coupling),
    ]
    consts.update({
        "alpha_v_norm_sq": av2,
        "revenue_prime_lipschitz": lrev,
        "best_variant": min(entries, key=lambda e: e.rhs).name,
    })
    return ConditionReport(entries=entries, constants=consts)


def check_remark45(params: ModelParams) -> ConditionReport:
    """Quadratic-revenue variant: L_rev = 2a, and the loose multiplier bound
    (1/2)(1 + 1/beta0) evaluated alongside the exact one. Reported for both
    norm-bound variants (four entries)."""
    if params.revenue.family != "quadratic":
        raise WrongFamily(
            f"quadratic revenue required, got '{params.revenue.family}'")
    av2 = alpha_v_norm_sq(params)
    consts = _common_constants(params)
    a_coef = params.revenue.coef["a"]
    lrev = 2.0 * a_coef
    loose = 0.5 * (1.0 + 1.0 / params.beta0)
    lhs = params.lam + params.mu
    entries = []
    for bound_name, mult in (("loose_multiplier", loose),
                             ("exact_multiplier", consts["multiplier_lipschitz"])):
        coupling = mult * lrev * av2
        entries.append(ConditionEntry(
            f"{bound_name}_1_over_mu", lhs,
            consts["norm_bound_1_over_mu"] * coupling))
        entries.append(ConditionEntry(
            f"{bound_name}_age_span", lhs,
            consts["norm_bound_age_span"] * coupling))

    # The historical display integrand for |alpha|_V^2 (int alpha^2 +
    # int alpha'^2 - mu alpha(0)^2) is surfaced for comparison but decides
    # nothing.
    ap = _alpha_prime(params)
    a = params.alpha
    display = (pairing(a, a) + integrate(a.with_values(ap * ap))
               - params.mu * float(a.values[0]) ** 2)
    consts.update({
        "alpha_v_norm_sq": av2,
        "alpha_v_norm_sq_quadratic_display": display,
        "revenue_prime_lipschitz": lrev,
        "loose_multiplier_bound": loose,
        "best_variant": min(entries, key=lambda e: e.rhs).name,
    })
    return ConditionReport(entries=entries, constants=consts)
