"""Independent dense-matrix cross-check of the equilibrium computation.

Everything here is assembled from scratch: the exponential-kernel weights are
re-derived below (sharing no code with the operator module beyond the
GridFunction container), stored as dense triangular matrices, and the
equilibrium is reached by Picard iteration on T x = R'(<alpha, x>) w1 + w2
rather than through the scalar closed form. A disagreement between this path
and the assembled closed form points at a sign or composition error in one of
them; agreement at the quadrature order certifies both.

Also provided: a weak-form residual that tests a candidate (x, u) pair
against smooth test functions vanishing at s_bar (the duality pairing
<x, phi' - mu phi> + <u1, phi> + u0 phi(0) must vanish at a stationary
point), and a deterministic power iteration for discrete operator norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .model import ControlPair, GridFunction, ModelParams, revenue_prime

__all__ = [
    "NoConvergence",
    "DiscreteOperators",
    "build",
    "equilibrium_profiles",
    "picard_fixed_point",
    "residual_weak_form",
    "operator_norm",
]

_N_TEST_FUNCTIONS = 16


class NoConvergence(RuntimeError):
    """Picard iteration hit max_iter; carries the trailing step norms."""

    def __init__(self, message: str, step_norms: list[float]):
        super().__init__(message)
        self.step_norms = step_norms


@dataclass(frozen=True, eq=False)
class DiscreteOperators:
    """Dense-matrix realizations on one uniform grid.

    a_inv     A^{-1} on H inputs (lower triangular, nonpositive kernel)
    adj_inv   (A0*)^{-1}        (upper triangular)
    resolvent (lam - A0*)^{-1}  (upper triangular)
    quad_weights  trapezoid node weights, summing to s_bar
    delta_vec     A^{-1} delta_0 sampled on the nodes: -e^{-mu s_j}
    """

    n_cells: int
    s_bar: float
    mu: float
    lam: float
    nodes: np.ndarray
    a_inv: np.ndarray
    adj_inv: np.ndarray
    resolvent: np.ndarray
    quad_weights: np.ndarray
    delta_vec: np.ndarray


def _cell_moments(rho: float, h: float) -> tuple[float, float]:
    """(m0, m1) = (int_0^h e^{-rho t} dt, int_0^h t e^{-rho t} dt),
    derived directly from the antiderivatives, series-guarded near 0."""
    x = rho * h
    if x < 0.02:
        # int_0^1 e^{-x u} du and int_0^1 u e^{-x u} du by Taylor series.
        i0 = 1.0 - x / 2.0 + x * x / 6.0 - x ** 3 / 24.0 + x ** 4 / 120.0 - x ** 5 / 720.0
        i1 = (1.0 / 2.0 - x / 3.0 + x * x / 8.0 - x ** 3 / 30.0 + x ** 4 / 144.0
              - x ** 5 / 840.0)
        return h * i0, h * h * i1
    em = math.exp(-x)
    m0 = (1.0 - em) / rho
    m1 = (1.0 - (1.0 + x) * em) / (rho * rho)
    return m0, m1


def _shift_kernel_weights(rho: float, h: float) -> tuple[float, float]:
    """Weights (near, far) of the two nodes of a cell in the exact integral
    of the linear interpolant against e^{-rho * (distance)}; 'near' is the
    node where the kernel equals 1."""
    m0, m1 = _cell_moments(rho, h)
    w_far = m1 / h
    return m0 - w_far, w_far


def _forward_matrix(n: int, rho: float, h: float) -> np.ndarray:
    """Matrix of f |-> int_0^{s_j} e^{-rho(s_j - sig)} fhat(sig) dsig."""
    w_near, w_far = _shift_kernel_weights(rho, h)
    d = math.exp(-rho * h)
    powers = d ** np.arange(n + 1)
    col_far = np.zeros(n + 1)
    col_far[1:] = w_far * powers[: n]          # f_k as left node of cell k
    t_far = toeplitz(col_far, np.zeros(n + 1))
    t_near = toeplitz(w_near * powers, np.zeros(n + 1))
    t_near[:, 0] = 0.0                          # node 0 is never a right node
    return t_far + t_near


def _backward_matrix(n: int, rho: float, h: float) -> np.ndarray:
    """Matrix of f |-> int_{s_j}^{s_bar} e^{-rho(sig - s_j)} fhat(sig) dsig."""
    w_near, w_far = _shift_kernel_weights(rho, h)
    d = math.exp(-rho * h)
    powers = d ** np.arange(n + 1)
    col_near = np.zeros(n + 1)
    col_near[0] = w_near                        # diagonal entry
    t_near = toeplitz(col_near, w_near * powers)
    t_near[:, n] = 0.0                          # node n is never a left node
    row_far = np.zeros(n + 1)
    row_far[1:] = w_far * powers[: n]
    t_far = toeplitz(np.zeros(n + 1), row_far)
    return t_near + t_far


def build(params: ModelParams, n_cells: int | None = None) -> DiscreteOperators:
    """Assemble the dense kernel matrices, optionally on a different grid
    (model grid functions are then resampled by linear interpolation)."""
    n = params.n_cells if n_cells is None else int(n_cells)
    if n < 8:
        raise ValueError(f"oracle resolution must be >= 8 cells, got {n}")
    h = params.s_bar / n
    nodes = np.linspace(0.0, params.s_bar, n + 1)
    weights = np.full(n + 1, h)
    weights[0] = weights[-1] = 0.5 * h
    return DiscreteOperators(
        n_cells=n,
        s_bar=params.s_bar,
        mu=params.mu,
        lam=params.lam,
        nodes=nodes,
        a_inv=-_forward_matrix(n, params.mu, h),
        adj_inv=-_backward_matrix(n, params.mu, h),
        resolvent=_backward_matrix(n, params.mu + params.lam, h),
        quad_weights=weights,
        delta_vec=-np.exp(-params.mu * nodes),
    )


def _resample(f: GridFunction, nodes: np.ndarray) -> np.ndarray:
    return np.interp(nodes, f.nodes, f.values)


def equilibrium_profiles(disc: DiscreteOperators,
                         params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """(w1, w2) node vectors built purely from the dense matrices."""
    alpha = _resample(params.alpha, disc.nodes)
    beta1 = _resample(params.beta1, disc.nodes)
    q1 = _resample(params.q1, disc.nodes)
    abar = disc.resolvent @ alpha
    w1 = -(disc.a_inv @ (abar / (2.0 * beta1))) \
        - (abar[0] / (2.0 * params.beta0)) * disc.delta_vec
    w2 = (disc.a_inv @ (q1 / (2.0 * beta1))) \
        + (params.q0 / (2.0 * params.beta0)) * disc.delta_vec
    return w1, w2


def picard_fixed_point(disc: DiscreteOperators, params: ModelParams,
                       x0: GridFunction | None = None, tol: float = 1e-12,
                       max_iter: int = 500) -> tuple[GridFunction, int, float]:
    """Iterate x <- R'(<alpha, x>) w1 + w2 until the step norm (discrete L^2)
    drops to tol.

    Returns (fixed point, iterations performed, fitted step contraction rate).
    The rate is the geometric fit over the last (up to) 10 nonzero step
    norms; 0.0 when fewer than two usable steps exist. Raises NoConvergence
    when max_iter is exhausted.
    """
    alpha = _resample(params.alpha, disc.nodes)
    w1, w2 = equilibrium_profiles(disc, params)
    w = disc.quad_weights
    x = np.zeros(disc.n_cells + 1) if x0 is None else _resample(x0, disc.nodes)

    step_norms: list[float] = []
    for it in range(1, max_iter + 1):
        q_out = float(w @ (alpha * x))
        x_next = revenue_prime(params.revenue, q_out) * w1 + w2
        diff = x_next - x
        dnorm = math.sqrt(float(w @ (diff * diff)))
        step_norms.append(dnorm)
        x = x_next
        if dnorm <= tol:
            return (GridFunction(disc.s_bar, disc.n_cells, x), it,
                    _fit_rate(step_norms))
    raise NoConvergence(
        f"no convergence after {max_iter} iterations "
        f"(last step norm {step_norms[-1]:.3e})", step_norms[-10:])


def _fit_rate(step_norms: list[float]) -> float:
    tail = [d for d in step_norms[-10:] if d > 0.0]
    if len(tail) < 2:
        return 0.0
    k = np.arange(len(tail), dtype=float)
    slope = np.polyfit(k, np.log(tail), 1)[0]
    return float(np.exp(slope))


def _test_functions(disc: DiscreteOperators) -> list[tuple[np.ndarray, np.ndarray]]:
    """(phi, phi') pairs: phi_i = t^i (1 - t), t = s/s_bar, i = 0..15.
    All vanish at s_bar, so they lie in the domain of A0*."""
    s_bar = disc.s_bar
    t = disc.nodes / s_bar
    out = []
    for i in range(_N_TEST_FUNCTIONS):
        phi = t ** i * (1.0 - t)
        if i == 0:
            dphi = -np.ones_like(t) / s_bar
        else:
            dphi = (i * t ** (i - 1) * (1.0 - t) - t ** i) / s_bar
        out.append((phi, dphi))
    return out


def residual_weak_form(x: GridFunction, u: ControlPair, params: ModelParams,
                       disc: DiscreteOperators) -> float:
    """max_i |<x, phi_i' - mu phi_i> + <u1, phi_i> + u0 phi_i(0)| / ||phi_i||.

    Zero (to quadrature order) exactly when (x, u) is a stationary pair of
    the transport dynamics; O(1) under sign or composition errors.
    """
    w = disc.quad_weights
    xv = _resample(x, disc.nodes)
    u1 = _resample(u.u1, disc.nodes)
    worst = 0.0
    for phi, dphi in _test_functions(disc):
        defect = (float(w @ (xv * (dphi - params.mu * phi)))
                  + float(w @ (u1 * phi)) + u.u0 * phi[0])
        norm = math.sqrt(float(w @ (phi * phi)))
        worst = max(worst, abs(defect) / norm)
    return worst


def operator_norm(matrix: np.ndarray, quad_weights: np.ndarray,
                  iterations: int = 300) -> float:
    """Operator norm w.r.t. the weighted discrete L^2 norm, by deterministic
    power iteration on the symmetrized matrix."""
    sq = np.sqrt(quad_weights)
    sym = (sq[:, None] * matrix) / sq[None, :]
    gram = sym.T @ sym
    v = 1.0 + np.linspace(0.0, 1.0, matrix.shape[0])
    v /= np.linalg.norm(v)
    lam_prev = 0.0
    for _ in range(iterations):
        v = gram @ v
        lam = float(np.linalg.norm(v))
        if lam == 0.0:
            return 0.0
        v /= lam
        if abs(lam - lam_prev) <= 1e-14 * max(lam, 1.0):
            lam_prev = lam
            break
        lam_prev = lam
    return math.sqrt(lam_prev)
