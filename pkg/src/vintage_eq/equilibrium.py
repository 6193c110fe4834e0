"""Equilibrium assembly for the vintage-capital problem.

A stationary equilibrium is a profile x_bar with A x_bar + B u* = 0 where the
control u* is extremal for the current-value co-state. Eliminating the
co-state reduces the fixed-point map to

    T x = R'(<alpha, x>) w1 + w2,

with two model-determined profiles

    w1(s) = (abar(0)/(2 beta0)) e^{-mu s}
            + int_0^s e^{-mu(s-sig)} abar(sig)/(2 beta1(sig)) dsig,
    w2(s) = -(q0/(2 beta0)) e^{-mu s}
            - int_0^s e^{-mu(s-sig)} q1(sig)/(2 beta1(sig)) dsig,

where abar = (lam - A0*)^{-1} alpha. Pairing with alpha collapses the fixed
point to one scalar equation eta = R'(c2 + c1 eta), c1 = <alpha, w1>,
c2 = <alpha, w2>; then x_bar = w2 + eta w1, the equilibrium control is
u0* = (eta abar(0) - q0)/(2 beta0), u1* = (eta abar - q1)/(2 beta1), and the
stationary co-state is p_bar = -eta abar.

``solve_eta`` uses closed forms for the quadratic and log families and a
guarded bisection for power/custom revenue. ``assemble`` returns the profiles
together with three self-diagnosis residuals (scalar equation, stationarity
ODE, extremality), each computed through an independent code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import operators as ops
from .model import ControlPair, GridFunction, ModelParams, revenue_prime

__all__ = [
    "BracketFailure",
    "Residuals",
    "EquilibriumResult",
    "alpha_bar",
    "compute_w1",
    "compute_w2",
    "solve_eta",
    "assemble",
    "stationarity_residual",
    "extremality_residual",
]

_BISECT_TOL = 1e-12
# 2**40 ~ 1.1e12. Expanding further risks spurious brackets once float
# absorption makes g(eta) = eta - R'(c2 + c1*eta) round to zero.
_MAX_BRACKET_DOUBLINGS = 40


class BracketFailure(RuntimeError):
    """No sign change found for the scalar equilibrium equation."""


@dataclass(frozen=True, eq=False)
class Residuals:
    scalar_equation: float
    stationarity: float
    extremality: float


@dataclass(frozen=True, eq=False)
class EquilibriumResult:
    eta: float                 # equilibrium marginal revenue R'(<alpha, x_bar>)
    c1: float                  # <alpha, w1>
    c2: float                  # <alpha, w2>
    x_bar: GridFunction        # equilibrium capital profile
    w1: GridFunction
    w2: GridFunction
    alpha_bar: GridFunction    # (lam - A0*)^{-1} alpha
    u_star: ControlPair        # equilibrium investment
    p_bar: GridFunction        # stationary co-state, equals -eta * alpha_bar
    residuals: Residuals


def alpha_bar(params: ModelParams) -> GridFunction:
    """abar = (lam - A0*)^{-1} alpha, the discounted forward value of alpha."""
    return ops.resolvent_apply(params.alpha, params.mu, params.lam)


def compute_w1(params: ModelParams, abar: GridFunction | None = None) -> GridFunction:
    """Revenue-response profile w1 (response of the stock to a unit of
    marginal revenue routed through the extremal control)."""
    if abar is None:
        abar = alpha_bar(params)
    boundary = (-float(abar.values[0]) / (2.0 * params.beta0)) * a_inv_delta(params)
    body = -ops.a_inverse_apply(abar / (params.beta1 * 2.0), params.mu)
    return boundary + body


def compute_w2(params: ModelParams) -> GridFunction:
    """Linear-cost offset profile w2 (stock response to the linear costs q)."""
    boundary = (params.q0 / (2.0 * params.beta0)) * a_inv_delta(params)
    body = ops.a_inverse_apply(params.q1 / (params.beta1 * 2.0), params.mu)
    return boundary + body


def a_inv_delta(params: ModelParams) -> GridFunction:
    return ops.a_inverse_delta(params.mu, params.s_bar, params.n_cells)


def _bisect(g, lo: float, hi: float, tol: float) -> float:
    glo = g(lo)
    ghi = g(hi)
    if glo > 0.0 or ghi < 0.0:
        raise BracketFailure(f"no sign change on [{lo}, {hi}]: g={glo:.3e},{ghi:.3e}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) <= tol:
            return mid
        if gm < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-17 * max(1.0, abs(mid)):
            return 0.5 * (lo + hi)
    return 0.5 * (lo + hi)


def solve_eta(params: ModelParams, c1: float, c2: float) -> float:
    """Solve eta = R'(c2 + c1*eta) for the unique equilibrium slope.

    Closed forms: quadratic eta = (b - 2a c2)/(1 + 2a c1); log via the
    rationalized quadratic-root formula (with the linear-branch guard
    eta = 1 when c1 + c2 <= 0, and the c1 -> 0 limit eta = R'(c2)).
    Power/custom revenue fall back to bisection on the strictly increasing
    g(eta) = eta - R'(c2 + c1 eta), bracketed on [0, R'(c2)] when R'(c2) > 0
    and otherwise by geometric expansion from [-1, 1].
    """
    rev = params.revenue
    if c1 < 0:
        raise ValueError(f"c1 must be nonnegative, got {c1}")

    if rev.family == "quadratic":
        a = rev.coef["a"]
        b = rev.coef["b"]
        return (b - 2.0 * a * c2) / (1.0 + 2.0 * a * c1)

    if rev.family == "log":
        if c1 < 1e-12:
            return revenue_prime(rev, c2)
        if c1 + c2 <= 0.0:
            # Root lies where the output Q = c2 + c1*eta is negative and the
            # extension has constant slope 1.
            return 1.0
        disc = math.sqrt((1.0 + c2) ** 2 + 4.0 * c1)
        if 1.0 + c2 > 0.0:
            return 2.0 / (disc + 1.0 + c2)
        return (disc - (1.0 + c2)) / (2.0 * c1)

    if rev.family == "custom" and not rev.concave:
        raise ValueError("custom revenue must be concave to solve the "
                         "scalar equilibrium equation")

    def g(eta: float) -> float:
        return eta - revenue_prime(rev, c2 + c1 * eta)

    rp0 = revenue_prime(rev, c2)
    if rp0 > 0.0 and g(0.0) <= 0.0 <= g(rp0):
        return _bisect(g, 0.0, rp0, _BISECT_TOL)

    lo, hi = -1.0, 1.0
    for _ in range(_MAX_BRACKET_DOUBLINGS):
        if g(lo) <= 0.0:
            break
        lo *= 2.0
    else:
        raise BracketFailure("no lower bracket after geometric expansion")
    for _ in range(_MAX_BRACKET_DOUBLINGS):
        if g(hi) >= 0.0:
            break
        hi *= 2.0
    else:
        raise BracketFailure("no upper bracket after geometric expansion")
    return _bisect(g, lo, hi, _BISECT_TOL)


def assemble(params: ModelParams) -> EquilibriumResult:
    """Compute the stationary equilibrium and its diagnostic residuals."""
    abar = alpha_bar(params)
    w1 = compute_w1(params, abar)
    w2 = compute_w2(params)
    c1 = ops.pairing(params.alpha, w1)
    c2 = ops.pairing(params.alpha, w2)
    eta = solve_eta(params, c1, c2)

    x_bar = w2 + eta * w1
    abar0 = float(abar.values[0])
    u_star = ControlPair(
        (eta * abar0 - params.q0) / (2.0 * params.beta0),
        (abar * eta - params.q1) / (params.beta1 * 2.0),
    )
    p_bar = abar * (-eta)

    scalar_res = abs(eta - revenue_prime(params.revenue, c2 + c1 * eta))
    result = EquilibriumResult(
        eta=eta, c1=c1, c2=c2, x_bar=x_bar, w1=w1, w2=w2, alpha_bar=abar,
        u_star=u_star, p_bar=p_bar,
        residuals=Residuals(scalar_equation=scalar_res,
                            stationarity=float("nan"),
                            extremality=float("nan")),
    )
    res = Residuals(
        scalar_equation=scalar_res,
        stationarity=stationarity_residual(result, params),
        extremality=extremality_residual(result, params),
    )
    return EquilibriumResult(
        eta=eta, c1=c1, c2=c2, x_bar=x_bar, w1=w1, w2=w2, alpha_bar=abar,
        u_star=u_star, p_bar=p_bar, residuals=res,
    )


def stationarity_residual(result: EquilibriumResult, params: ModelParams) -> float:
    """Defect of the stationarity ODE x' + mu x = u1*, x(0) = u0*.

    Interior derivative by centered differences (O(h^2)); the boundary
    condition enters as |x_bar(0) - u0*|.
    """
    x = result.x_bar.values
    h = result.x_bar.h
    dx = (x[2:] - x[:-2]) / (2.0 * h)
    interior = dx + params.mu * x[1:-1] - result.u_star.u1.values[1:-1]
    boundary = abs(x[0] - result.u_star.u0)
    return max(float(np.max(np.abs(interior))), boundary)


def extremality_residual(result: EquilibriumResult, params: ModelParams) -> float:
    """Distance of u* from the extremal control M_{1/2beta}(-B* p_bar - q),
    with the co-state recomputed from scratch through the resolvent."""
    q_out = ops.pairing(params.alpha, result.x_bar)
    gprime = params.alpha * (-revenue_prime(params.revenue, q_out))
    p_indep = ops.resolvent_apply(gprime, params.mu, params.lam)
    mbp = ops.b_star_apply(-p_indep)
    shifted = ControlPair(mbp.u0 - params.q0, mbp.u1 - params.q1)
    u_check = ops.multiplier_half_beta(shifted, params.beta0, params.beta1)
    return ops.control_norm(result.u_star - u_check)
