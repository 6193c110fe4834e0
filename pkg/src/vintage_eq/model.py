"""Model data for the vintage-capital investment problem.

Capital is indexed by age s in [0, s_bar] and depreciates at rate mu. New
capital is installed at the boundary (age 0) at rate u0 and maintenance
investment u1(s) is spread over ages. Output is the weighted stock
Q = int_0^s_bar alpha(s) y(s) ds, sold at concave revenue R(Q), and
investment carries quadratic costs beta0*u0^2 + q0*u0 (boundary) and
int beta1*u1^2 + q1*u1 (distributed). Profits are discounted at rate lambda.

This module holds the passive data: grid functions on a uniform age grid,
the cost/technology parameters, and the revenue family (quadratic, log,
power, or custom callables). ``validate`` enforces every model invariant
at once and reports the complete violation list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "GridFunction",
    "ModelParams",
    "RevenueSpec",
    "ControlPair",
    "GridMismatch",
    "ModelValidationError",
    "revenue",
    "revenue_prime",
    "validate",
    "violations",
]

# Violation codes reported by validate().
NON_POSITIVE_RATE = "NonPositiveRate"
COST_FLOOR_VIOLATED = "CostFloorViolated"
GRID_MISMATCH = "GridMismatch"
NON_CONCAVE_REVENUE = "NonConcaveRevenue"
NEGATIVE_ALPHA = "NegativeAlpha"

# Probe grid on which concavity / derivative consistency of custom revenue
# callables is spot-checked.
_CONCAVITY_PROBES = np.linspace(-5.0, 10.0, 20)


class GridMismatch(ValueError):
    """Two grid functions (or a control and a model) live on different grids."""


class ModelValidationError(ValueError):
    """Raised by validate(); carries the complete list of (code, message)."""

    def __init__(self, violation_list: Sequence[tuple[str, str]]):
        self.violations = list(violation_list)
        lines = "; ".join(f"{code}: {msg}" for code, msg in self.violations)
        super().__init__(f"invalid model: {lines}")


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real function on the uniform age grid {j*h : j=0..n_cells}, h = s_bar/n_cells.

    Stores node samples; between nodes the function is understood as the
    piecewise-linear interpolant. Instances are immutable (the sample array
    is copied and frozen) so they can be shared across threads freely.
    """

    s_bar: float
    n_cells: int
    values: np.ndarray

    def __post_init__(self):
        if not (isinstance(self.n_cells, (int, np.integer)) and self.n_cells >= 2):
            raise ValueError(f"n_cells must be an integer >= 2, got {self.n_cells}")
        if not (math.isfinite(self.s_bar) and self.s_bar > 0):
            raise ValueError(f"s_bar must be finite and positive, got {self.s_bar}")
        vals = np.asarray(self.values, dtype=float).copy()
        if vals.shape != (self.n_cells + 1,):
            raise ValueError(
                f"values must have shape ({self.n_cells + 1},), got {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "s_bar", float(self.s_bar))
        object.__setattr__(self, "n_cells", int(self.n_cells))

    # -- construction -----------------------------------------------------

    @staticmethod
    def constant(c: float, s_bar: float, n_cells: int) -> "GridFunction":
        return GridFunction(s_bar, n_cells, np.full(n_cells + 1, float(c)))

    @staticmethod
    def from_callable(fn: Callable[[np.ndarray], np.ndarray],
                      s_bar: float, n_cells: int) -> "GridFunction":
        nodes = np.linspace(0.0, s_bar, n_cells + 1)
        return GridFunction(s_bar, n_cells, np.asarray(fn(nodes), dtype=float))

    @staticmethod
    def from_samples(samples: Sequence[float], s_bar: float) -> "GridFunction":
        arr = np.asarray(samples, dtype=float)
        return GridFunction(s_bar, arr.size - 1, arr)

    # -- geometry ----------------------------------------------------------

    @property
    def h(self) -> float:
        return self.s_bar / self.n_cells

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.s_bar, self.n_cells + 1)

    def same_grid(self, other: "GridFunction") -> bool:
        return self.n_cells == other.n_cells and self.s_bar == other.s_bar

    def _require_same_grid(self, other: "GridFunction") -> None:
        if not self.same_grid(other):
            raise GridMismatch(
                f"grid mismatch: (s_bar={self.s_bar}, n={self.n_cells}) vs "
                f"(s_bar={other.s_bar}, n={other.n_cells})"
            )

    def value_at(self, s: float) -> float:
        """Piecewise-linear value at age s (clamped to [0, s_bar])."""
        return float(np.interp(s, self.nodes, self.values))

    # -- arithmetic (grids must match exactly) ------------------------------

    def with_values(self, vals: np.ndarray) -> "GridFunction":
        return GridFunction(self.s_bar, self.n_cells, vals)

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._require_same_grid(other)
            return self.with_values(self.values + other.values)
        return self.with_values(self.values + float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            self._require_same_grid(other)
            return self.with_values(self.values - other.values)
        return self.with_values(self.values - float(other))

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            self._require_same_grid(other)
            return self.with_values(self.values * other.values)
        return self.with_values(self.values * float(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GridFunction):
            self._require_same_grid(other)
            return self.with_values(self.values / other.values)
        return self.with_values(self.values / float(other))

    def __neg__(self):
        return self.with_values(-self.values)


@dataclass(frozen=True, eq=False)
class ControlPair:
    """Investment control: boundary rate u0 (scalar) and distributed rate u1."""

    u0: float
    u1: GridFunction

    def __sub__(self, other: "ControlPair") -> "ControlPair":
        return ControlPair(self.u0 - other.u0, self.u1 - other.u1)

    def __add__(self, other: "ControlPair") -> "ControlPair":
        return ControlPair(self.u0 + other.u0, self.u1 + other.u1)

    def scale(self, c: float) -> "ControlPair":
        return ControlPair(c * self.u0, self.u1 * c)


@dataclass(frozen=True, eq=False)
class RevenueSpec:
    """Concave revenue Q -> R(Q) with its derivative and Lipschitz data.

    ``family`` is one of "quadratic", "log", "power", "custom". The built-in
    factories fill in the derivative and the global Lipschitz constant of R'
    used by the uniqueness conditions.
    """

    family: str
    r: Callable[[float], float]
    r_prime: Callable[[float], float]
    lipschitz_r_prime: float
    concave: bool
    coef: dict

    @staticmethod
    def quadratic(a: float, b: float) -> "RevenueSpec":
        """R(Q) = -a*Q^2 + b*Q with a > 0."""
        a = float(a)
        b = float(b)
        return RevenueSpec(
            family="quadratic",
            r=lambda q: -a * q * q + b * q,
            r_prime=lambda q: b - 2.0 * a * q,
            lipschitz_r_prime=2.0 * a,
            concave=a > 0,
            coef={"a": a, "b": b},
        )

    @staticmethod
    def log() -> "RevenueSpec":
        """R(Q) = ln(1+Q) for Q >= 0, linearly extended (R = Q) for Q < 0."""
        return RevenueSpec(
            family="log",
            r=lambda q: math.log1p(q) if q >= 0.0 else q,
            r_prime=lambda q: 1.0 / (1.0 + q) if q >= 0.0 else 1.0,
            lipschitz_r_prime=1.0,
            concave=True,
            coef={},
        )

    @staticmethod
    def power(gamma: float) -> "RevenueSpec":
        """R(Q) = (1+Q)^gamma - 1 for Q >= 0 (gamma in (0,1)), gamma*Q for Q < 0."""
        g = float(gamma)
        return RevenueSpec(
            family="power",
            r=lambda q: (1.0 + q) ** g - 1.0 if q >= 0.0 else g * q,
            r_prime=lambda q: g * (1.0 + q) ** (g - 1.0) if q >= 0.0 else g,
            lipschitz_r_prime=g * (1.0 - g),
            concave=0.0 < g < 1.0,
            coef={"gamma": g},
        )

    @staticmethod
    def custom(r: Callable[[float], float], r_prime: Callable[[float], float],
               lipschitz_r_prime: float, concave: bool) -> "RevenueSpec":
        return RevenueSpec("custom", r, r_prime, float(lipschitz_r_prime),
                           bool(concave), {})


def revenue(spec: RevenueSpec, q: float) -> float:
    return float(spec.r(q))


def revenue_prime(spec: RevenueSpec, q: float) -> float:
    """Marginal revenue R'(Q)."""
    return float(spec.r_prime(q))


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Full parameter set of the investment problem on one age grid.

    mu     depreciation rate (> 0)
    lam    discount rate (> 0)
    s_bar  maximal age (> 0, finite)
    alpha  output weight per age (>= 0), grid function
    beta0  boundary quadratic cost coefficient (>= floor > 0)
    beta1  distributed quadratic cost coefficient, grid function (>= floor)
    q0     boundary linear cost coefficient
    q1     distributed linear cost coefficient, grid function
    revenue  concave revenue family
    """

    mu: float
    lam: float
    s_bar: float
    alpha: GridFunction
    beta0: float
    beta1: GridFunction
    q0: float
    q1: GridFunction
    revenue: RevenueSpec

    @property
    def n_cells(self) -> int:
        return self.alpha.n_cells

    @property
    def h(self) -> float:
        return self.alpha.h

    @property
    def nodes(self) -> np.ndarray:
        return self.alpha.nodes


def violations(params: ModelParams, beta_floor: float = 1e-9) -> list[tuple[str, str]]:
    """Collect the complete list of model invariant violations (may be empty)."""
    out: list[tuple[str, str]] = []

    for name, val in (("mu", params.mu), ("lambda", params.lam),
                      ("s_bar", params.s_bar)):
        if not (math.isfinite(val) and val > 0.0):
            out.append((NON_POSITIVE_RATE,
                        f"{name} must be finite and strictly positive, got {val}"))

    ref = params.alpha
    if ref.s_bar != params.s_bar:
        out.append((GRID_MISMATCH,
                    f"alpha grid spans s_bar={ref.s_bar}, model has {params.s_bar}"))
    for name, gf in (("beta1", params.beta1), ("q1", params.q1)):
        if not ref.same_grid(gf):
            out.append((GRID_MISMATCH,
                        f"{name} grid (s_bar={gf.s_bar}, n={gf.n_cells}) does not "
                        f"match alpha grid (s_bar={ref.s_bar}, n={ref.n_cells})"))

    if not (math.isfinite(params.beta0) and params.beta0 >= beta_floor):
        out.append((COST_FLOOR_VIOLATED,
                    f"beta0={params.beta0} below floor {beta_floor}"))
    b1min = float(np.min(params.beta1.values))
    if not (math.isfinite(b1min) and b1min >= beta_floor):
        out.append((COST_FLOOR_VIOLATED,
                    f"min beta1={b1min} below floor {beta_floor}"))

    amin = float(np.min(params.alpha.values))
    if amin < 0.0:
        out.append((NEGATIVE_ALPHA,
                    f"alpha must be nonnegative, min value {amin}"))

    rev = params.revenue
    if not rev.concave:
        out.append((NON_CONCAVE_REVENUE,
                    f"revenue family '{rev.family}' not flagged concave"))
    else:
        # Spot-check that R' is nonincreasing on the probe grid.
        rp = [rev.r_prime(q) for q in _CONCAVITY_PROBES]
        diffs = np.diff(rp)
        if np.any(diffs > 1e-12):
            out.append((NON_CONCAVE_REVENUE,
                        "marginal revenue increases on the probe grid "
                        f"(max increase {float(np.max(diffs)):.3e})"))
    return out


def validate(params: ModelParams, beta_floor: float = 1e-9) -> ModelParams:
    """Return params unchanged if every invariant holds, else raise with all violations."""
    bad = violations(params, beta_floor=beta_floor)
    if bad:
        raise ModelValidationError(bad)
    return params
