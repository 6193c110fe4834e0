"""Semigroup, integral-operator kernels, quadrature, and cost identities."""

import math

import numpy as np
import pytest

from vintage_eq import (ControlPair, GridFunction, a_inverse_apply,
                        a_inverse_delta, adjoint_inverse_apply, b_star_apply,
                        conjugate_cost, control_norm, cost, integrate,
                        multiplier_half_beta, pairing, resolvent_apply,
                        semigroup_apply, trapezoid_weights)
from vintage_eq import discrete_oracle as do
from vintage_eq import operators as ops

from conftest import model_a


def test_trapezoid_weights_sum_to_length():
    for n in (2, 7, 64):
        w = trapezoid_weights(1.7, n)
        assert w.sum() == pytest.approx(1.7, abs=1e-14)
        assert w[0] == pytest.approx(w[-1])
        assert np.all(w > 0)


def test_integrate_matches_numpy_trapezoid():
    f = GridFunction.from_callable(lambda s: np.cos(2.0 * s), 1.5, 57)
    ref = np.trapezoid(f.values, dx=f.h)
    assert integrate(f) == pytest.approx(ref, rel=1e-14)


def test_semigroup_shifts_and_decays():
    n = 300
    x = GridFunction.from_callable(lambda s: np.sin(3.0 * s) + 1.0, 1.0, n)
    t = 30 * x.h  # multiple of h, so the shift is exact at the nodes
    y = semigroup_apply(x, t, mu=2.0)
    s = x.nodes
    expected = np.where(s >= t - 1e-15,
                        math.exp(-2.0 * t) * np.interp(s - t, s, x.values),
                        0.0)
    assert np.max(np.abs(y.values - expected)) < 1e-14


def test_semigroup_is_nilpotent_after_s_bar():
    x = GridFunction.constant(1.0, 1.0, 50)
    y = semigroup_apply(x, 1.0 + 1e-9, mu=0.3)
    assert np.all(y.values == 0.0)


def test_semigroup_composition_property():
    n = 200
    x = GridFunction.from_callable(lambda s: s * (1.0 - s), 1.0, n)
    a = semigroup_apply(semigroup_apply(x, 0.2, mu=1.0), 0.3, mu=1.0)
    b = semigroup_apply(x, 0.5, mu=1.0)
    assert np.max(np.abs(a.values - b.values)) < 1e-12


def test_a_inverse_constant_closed_form():
    """(A^-1 1)(s) = -(1 - e^{-mu s})/mu, exactly reproduced by the
    exponential-kernel rule for data that are piecewise linear."""
    n = 128
    mu = 0.7
    f = GridFunction.constant(1.0, 2.0, n)
    g = a_inverse_apply(f, mu)
    s = f.nodes
    ref = -(1.0 - np.exp(-mu * s)) / mu
    assert np.max(np.abs(g.values - ref)) < 1e-12


def test_a_inverse_linear_closed_form():
    # f(s) = s with mu = 1: -int_0^s e^{-(s-t)} t dt = -(s - 1 + e^{-s}).
    n = 200
    f = GridFunction.from_callable(lambda s: s, 1.0, n)
    g = a_inverse_apply(f, 1.0)
    s = f.nodes
    ref = -(s - 1.0 + np.exp(-s))
    assert np.max(np.abs(g.values - ref)) < 1e-12


def test_a_inverse_delta_kernel():
    d = a_inverse_delta(0.9, 1.0, 64)
    assert np.allclose(d.values, -np.exp(-0.9 * d.nodes), atol=1e-15)


def test_adjoint_inverse_constant_closed_form():
    # ((A0*)^-1 1)(s) = -(1 - e^{-mu (s_bar - s)})/mu.
    n = 128
    mu = 1.3
    f = GridFunction.constant(1.0, 1.0, n)
    g = adjoint_inverse_apply(f, mu)
    s = f.nodes
    ref = -(1.0 - np.exp(-mu * (1.0 - s))) / mu
    assert np.max(np.abs(g.values - ref)) < 1e-12


def test_resolvent_at_zero_equals_adjoint_inverse():
    """(lam - A0*)^-1 at lam = 0 is -(A0*)^-1, bit for bit (same code path)."""
    n = 100
    f = GridFunction.from_callable(lambda s: np.cos(s), 1.0, n)
    a = resolvent_apply(f, mu=0.8, lam=0.0)
    b = adjoint_inverse_apply(f, mu=0.8)
    assert np.array_equal(a.values, -b.values)


def test_resolvent_constant_closed_form():
    # ((lam - A0*)^-1 1)(s) = (1 - e^{-(mu+lam)(s_bar-s)})/(mu+lam).
    n = 256
    mu, lam = 1.0, 1.0
    f = GridFunction.constant(1.0, 1.0, n)
    g = resolvent_apply(f, mu, lam)
    s = f.nodes
    rho = mu + lam
    ref = (1.0 - np.exp(-rho * (1.0 - s))) / rho
    assert np.max(np.abs(g.values - ref)) < 1e-12
    # Benchmark value at the boundary: (1 - e^{-2})/2.
    assert g.values[0] == pytest.approx(0.4323323583816937, abs=1e-14)


def test_adjoint_pairing_identity(rng):
    """<A^-1 f, g> = <f, (A0*)^-1 g> up to quadrature error O(h^2)."""
    n = 400
    for _ in range(10):
        fv = rng.standard_normal(3)
        gv = rng.standard_normal(3)
        f = GridFunction.from_callable(
            lambda s: fv[0] + fv[1] * s + fv[2] * np.sin(s), 1.0, n)
        g = GridFunction.from_callable(
            lambda s: gv[0] + gv[1] * s + gv[2] * np.cos(s), 1.0, n)
        lhs = pairing(a_inverse_apply(f, 1.1), g)
        rhs = pairing(f, adjoint_inverse_apply(g, 1.1))
        assert lhs == pytest.approx(rhs, abs=5e-5)


def test_b_star_reads_boundary_and_body():
    v = GridFunction.from_callable(lambda s: 2.0 - s, 1.0, 30)
    u = b_star_apply(v)
    assert u.u0 == 2.0
    assert np.array_equal(u.u1.values, v.values)


def test_multiplier_and_costs():
    n = 40
    params = model_a(n)
    u = ControlPair(2.0, GridFunction.constant(3.0, 1.0, n))
    m = multiplier_half_beta(u, params.beta0, params.beta1)
    assert m.u0 == pytest.approx(2.0)  # u0 / (2 * 0.5)
    assert np.allclose(m.u1.values, 3.0)
    assert cost(u, params) == pytest.approx(0.5 * 4.0 + 0.5 * 9.0)
    assert conjugate_cost(u, params) == pytest.approx(4.0 / 2.0 + 9.0 / 2.0)
    assert control_norm(u) == pytest.approx(math.sqrt(4.0 + 9.0))


def test_fenchel_young_inequality(rng):
    """h0(u) + h0*(p) >= <p, u> for the quadratic cost and its conjugate."""
    n = 60
    params = model_a(n)
    for _ in range(50):
        u = ControlPair(rng.normal(), GridFunction.from_samples(
            rng.standard_normal(n + 1), 1.0))
        p = ControlPair(rng.normal(), GridFunction.from_samples(
            rng.standard_normal(n + 1), 1.0))
        h = cost(u, params)
        hstar = conjugate_cost(p, params)
        dual = p.u0 * u.u0 + pairing(p.u1, u.u1)
        assert h + hstar >= dual - 1e-12


def test_conjugate_cost_tightness():
    """Equality in Fenchel-Young at p = cost gradient (2 beta u + q)."""
    n = 50
    params = model_a(n)
    u = ControlPair(1.3, GridFunction.from_callable(lambda s: 1.0 + s, 1.0, n))
    p = ControlPair(2.0 * params.beta0 * u.u0 + params.q0,
                    params.beta1 * 2.0 * u.u1 + params.q1)
    gap = (cost(u, params) + conjugate_cost(p, params)
           - (p.u0 * u.u0 + pairing(p.u1, u.u1)))
    assert abs(gap) < 1e-12


def test_exponential_cell_weights_match_hat_integrals():
    """Cell weights are the integrals of the linear hat functions against
    e^{-rho(h - t)} over one cell; adaptive quadrature is the reference.
    The naive closed forms cancel catastrophically for small rho*h, which is
    exactly what the series branch protects against."""
    from scipy.integrate import quad

    h = 0.01
    for rho in (1e-9, 1e-5, 1e-3, 0.1, 1.9, 2.1, 50.0, 300.0):
        x = rho * h
        near, far = ops._cell_weights(rho, h)
        assert near > 0 and far > 0
        e0_ref = quad(lambda t: math.exp(-x * t), 0.0, 1.0, epsabs=1e-15)[0]
        e1_ref = quad(lambda t: t * math.exp(-x * t), 0.0, 1.0, epsabs=1e-15)[0]
        assert near == pytest.approx(h * (e0_ref - e1_ref), rel=1e-9)
        assert far == pytest.approx(h * e1_ref, rel=1e-9)
        # Degenerate limit: both weights approach the trapezoid value h/2.
        if x < 1e-4:
            assert near == pytest.approx(h / 2.0, rel=1e-3)
            assert far == pytest.approx(h / 2.0, rel=1e-3)


def test_exponential_cell_weights_continuous_at_series_threshold():
    # The implementation switches to a Taylor series below x = 0.02; at the
    # seam both formulas must produce the same value to rounding error.
    x = 0.02
    series = (0.5 - x / 3.0 + x * x / 8.0 - x ** 3 / 30.0 + x ** 4 / 144.0
              - x ** 5 / 840.0 + x ** 6 / 5760.0)
    direct = ops._e1(x)  # x < 0.02 is false, so this takes the direct branch
    assert series == pytest.approx(direct, abs=1e-12)


def test_discrete_operator_norm_within_theory():
    """Power iteration on the discrete (A0*)^-1 stays below min(1/mu,
    s_bar/sqrt(2)) for a few parameter draws."""
    from vintage_eq import ModelParams, RevenueSpec

    rng = np.random.default_rng(7)
    n = 200
    for _ in range(5):
        mu = rng.uniform(0.3, 4.0)
        s_bar = rng.uniform(0.3, 2.5)
        params = ModelParams(
            mu=mu, lam=1.0, s_bar=s_bar,
            alpha=GridFunction.constant(1.0, s_bar, n),
            beta0=0.5,
            beta1=GridFunction.constant(0.5, s_bar, n),
            q0=0.0,
            q1=GridFunction.constant(0.0, s_bar, n),
            revenue=RevenueSpec.quadratic(0.5, 1.0),
        )
        disc = do.build(params)
        nrm = do.operator_norm(disc.adj_inv, disc.quad_weights)
        assert nrm <= min(1.0 / mu, s_bar / math.sqrt(2.0)) + 1e-3
