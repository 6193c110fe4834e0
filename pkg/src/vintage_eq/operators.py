"""Discrete realizations of the age-structure operators.

The state space is H = L^2(0, s_bar). The generator A0 f = -f' - mu f with
f(0) = 0 drives aging-with-decay; its semigroup is the decaying right shift
(e^{tA0} x)(s) = e^{-mu t} x(s-t) 1_{s >= t}. The operators below are the
building blocks of the equilibrium reduction:

  a_inverse_apply       (A^{-1} f)(s)      = -int_0^s e^{-mu(s-sig)} f(sig) dsig
  a_inverse_delta       [A^{-1} delta_0](s) = -e^{-mu s}
  adjoint_inverse_apply ((A0*)^{-1} f)(s)  = -int_s^s_bar e^{-mu(sig-s)} f(sig) dsig
  resolvent_apply       ((lam-A0*)^{-1} f)(s) = int_s^s_bar e^{-(mu+lam)(sig-s)} f dsig
  b_star_apply          B* v = (v(0), v)
  multiplier_half_beta  (u0, u1) -> (u0/(2 beta0), u1/(2 beta1))

All integrals against the exponential kernels integrate the piecewise-linear
interpolant of the node samples exactly on every cell (closed-form cell
weights), so the only discretization error is the interpolation error of the
integrand, O(h^2). Integrals without a kernel use the composite trapezoid
rule, exact on piecewise-linear integrands. The boundary mass delta_0 is
never discretized; compositions involving B use the closed form above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .model import ControlPair, GridFunction, GridMismatch, ModelParams

__all__ = [
    "ControlPair",
    "Quadrature",
    "integrate",
    "pairing",
    "trapezoid_weights",
    "semigroup_apply",
    "a_inverse_apply",
    "a_inverse_delta",
    "adjoint_inverse_apply",
    "resolvent_apply",
    "b_star_apply",
    "multiplier_half_beta",
    "conjugate_cost",
    "cost",
    "control_norm",
    "h_norm",
]


def trapezoid_weights(s_bar: float, n_cells: int) -> np.ndarray:
    """Composite trapezoid node weights; they sum to s_bar (up to rounding)."""
    h = s_bar / n_cells
    w = np.full(n_cells + 1, h)
    w[0] = 0.5 * h
    w[-1] = 0.5 * h
    return w


@dataclass(frozen=True, eq=False)
class Quadrature:
    """Tagged quadrature rule bound to one grid (only 'trapezoid' exists)."""

    s_bar: float
    n_cells: int
    rule: str = "trapezoid"

    @property
    def weights(self) -> np.ndarray:
        return trapezoid_weights(self.s_bar, self.n_cells)

    def integrate(self, values: np.ndarray) -> float:
        return float(self.weights @ np.asarray(values, dtype=float))


def integrate(f: GridFunction) -> float:
    """int_0^s_bar f(s) ds by the composite trapezoid rule."""
    v = f.values
    return float(f.h * (0.5 * (v[0] + v[-1]) + v[1:-1].sum()))


def pairing(f: GridFunction, g: GridFunction) -> float:
    """H inner product <f, g> = int f g."""
    f._require_same_grid(g)
    v = f.values * g.values
    return float(f.h * (0.5 * (v[0] + v[-1]) + v[1:-1].sum()))


def h_norm(f: GridFunction) -> float:
    """Discrete L^2(0, s_bar) norm."""
    return math.sqrt(max(pairing(f, f), 0.0))


# -- exponential-kernel cell weights ----------------------------------------
#
# On one cell of width h with decay rate rho, the exact integral of the
# linear interpolant against the kernel needs
#   E0(x) = int_0^1 e^{-x t} dt       = (1 - e^{-x})/x
#   E1(x) = int_0^1 t e^{-x t} dt     = (1 - (1+x) e^{-x})/x^2
# at x = rho*h. E1 is evaluated by series for small x (cancellation).


def _e0(x: float) -> float:
    if x == 0.0:
        return 1.0
    return -math.expm1(-x) / x


def _e1(x: float) -> float:
    if x < 0.02:
        return (0.5 - x / 3.0 + x * x / 8.0 - x ** 3 / 30.0 + x ** 4 / 144.0
                - x ** 5 / 840.0 + x ** 6 / 5760.0)
    return (1.0 - (1.0 + x) * math.exp(-x)) / (x * x)


def _cell_weights(rho: float, h: float) -> tuple[float, float]:
    """(near, far) node weights of one cell; 'near' is the node at the
    evaluation end of the kernel (where the kernel equals 1)."""
    x = rho * h
    e0 = _e0(x)
    e1 = _e1(x)
    return h * (e0 - e1), h * e1


def _conv_forward(values: np.ndarray, rho: float, h: float) -> np.ndarray:
    """I_j = int_0^{s_j} e^{-rho (s_j - sig)} fhat(sig) dsig, cell-exact."""
    w_near, w_far = _cell_weights(rho, h)
    d = math.exp(-rho * h)
    g = w_far * values[:-1] + w_near * values[1:]
    out = np.zeros_like(values)
    # I_j = d * I_{j-1} + g_{j-1}: one-pole recursive filter.
    out[1:] = lfilter([1.0], [1.0, -d], g)
    return out


def _conv_backward(values: np.ndarray, rho: float, h: float) -> np.ndarray:
    """J_j = int_{s_j}^{s_bar} e^{-rho (sig - s_j)} fhat(sig) dsig, cell-exact."""
    w_near, w_far = _cell_weights(rho, h)
    d = math.exp(-rho * h)
    g = w_near * values[:-1] + w_far * values[1:]
    out = np.zeros_like(values)
    out[:-1] = lfilter([1.0], [1.0, -d], g[::-1])[::-1]
    return out


# -- operators ---------------------------------------------------------------


def semigroup_apply(x: GridFunction, t: float, mu: float) -> GridFunction:
    """Decaying right shift (e^{tA0} x)(s) = e^{-mu t} x(s-t), zero for s < t."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    nodes = x.nodes
    shifted = np.interp(nodes - t, nodes, x.values, left=0.0, right=0.0)
    shifted[nodes < t] = 0.0
    return x.with_values(math.exp(-mu * t) * shifted)


def a_inverse_apply(f: GridFunction, mu: float) -> GridFunction:
    """(A^{-1} f)(s) = -int_0^s e^{-mu(s-sig)} f(sig) dsig on H inputs."""
    return f.with_values(-_conv_forward(f.values, mu, f.h))


def a_inverse_delta(mu: float, s_bar: float, n_cells: int) -> GridFunction:
    """[A^{-1} delta_0](s) = -e^{-mu s}: response to a unit boundary mass."""
    nodes = np.linspace(0.0, s_bar, n_cells + 1)
    return GridFunction(s_bar, n_cells, -np.exp(-mu * nodes))


def adjoint_inverse_apply(f: GridFunction, mu: float) -> GridFunction:
    """((A0*)^{-1} f)(s) = -int_s^s_bar e^{-mu(sig-s)} f(sig) dsig."""
    return f.with_values(-_conv_backward(f.values, mu, f.h))


def resolvent_apply(f: GridFunction, mu: float, lam: float) -> GridFunction:
    """((lam - A0*)^{-1} f)(s) = int_s^s_bar e^{-(mu+lam)(sig-s)} f(sig) dsig.

    With lam = 0 this is exactly -adjoint_inverse_apply (same code path).
    """
    if mu + lam <= 0:
        raise ValueError("resolvent requires mu + lam > 0")
    return f.with_values(_conv_backward(f.values, mu + lam, f.h))


def b_star_apply(v: GridFunction) -> ControlPair:
    """B* v = (v(0), v): adjoint of the boundary+distributed injection."""
    return ControlPair(float(v.values[0]), v)


def multiplier_half_beta(u: ControlPair, beta0: float,
                         beta1: GridFunction) -> ControlPair:
    """Componentwise multiplication by 1/(2 beta)."""
    return ControlPair(u.u0 / (2.0 * beta0), u.u1 / (beta1 * 2.0))


def cost(u: ControlPair, params: ModelParams) -> float:
    """Investment cost h0(u) = beta0 u0^2 + q0 u0 + int beta1 u1^2 + q1 u1."""
    if not u.u1.same_grid(params.alpha):
        raise GridMismatch("control grid does not match model grid")
    dist = params.beta1 * u.u1 * u.u1 + params.q1 * u.u1
    return params.beta0 * u.u0 ** 2 + params.q0 * u.u0 + integrate(dist)


def conjugate_cost(u: ControlPair, params: ModelParams) -> float:
    """Fenchel conjugate h0*(u) = (u0-q0)^2/(4 beta0) + int (u1-q1)^2/(4 beta1)."""
    if not u.u1.same_grid(params.alpha):
        raise GridMismatch("control grid does not match model grid")
    num = (u.u1 - params.q1)
    dist = num * num / (params.beta1 * 4.0)
    return (u.u0 - params.q0) ** 2 / (4.0 * params.beta0) + integrate(dist)


def control_norm(u: ControlPair) -> float:
    """Norm on U = R x H: sqrt(u0^2 + ||u1||^2)."""
    return math.sqrt(u.u0 ** 2 + pairing(u.u1, u.u1))
