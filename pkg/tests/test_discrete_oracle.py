"""Independent dense-matrix oracle: kernels, Picard iteration, residuals."""

import math

import numpy as np
import pytest

from vintage_eq import (ControlPair, GridFunction, ModelParams, NoConvergence,
                        RevenueSpec, assemble, check_contraction,
                        revenue_prime, validate)
from vintage_eq import discrete_oracle as do

from conftest import model_a, model_b, contraction_model, random_model


def test_kernel_matrices_are_triangular():
    disc = do.build(model_a(50))
    assert np.allclose(disc.a_inv, np.tril(disc.a_inv))
    assert np.allclose(disc.adj_inv, np.triu(disc.adj_inv))
    assert np.allclose(disc.resolvent, np.triu(disc.resolvent))
    # Volterra structure: zero first row / last row respectively.
    assert np.all(disc.a_inv[0] == 0.0)
    assert np.all(disc.adj_inv[-1] == 0.0)
    assert np.all(disc.resolvent[-1] == 0.0)


def test_oracle_a_inverse_constant_closed_form():
    disc = do.build(model_a(200))
    ones = np.ones(201)
    got = disc.a_inv @ ones
    s = disc.nodes
    ref = -(1.0 - np.exp(-s))
    assert np.max(np.abs(got - ref)) < 1e-12


def test_oracle_resolvent_constant_closed_form():
    disc = do.build(model_a(200))
    ones = np.ones(201)
    got = disc.resolvent @ ones
    s = disc.nodes
    ref = (1.0 - np.exp(-2.0 * (1.0 - s))) / 2.0
    assert np.max(np.abs(got - ref)) < 1e-12


def test_oracle_quadrature_weights():
    disc = do.build(model_a(64))
    assert disc.quad_weights.sum() == pytest.approx(1.0, abs=1e-14)


def test_oracle_minimum_resolution():
    with pytest.raises(ValueError):
        do.build(model_a(50), n_cells=4)


def test_oracle_profiles_match_closed_form():
    params = model_b(300)
    disc = do.build(params)
    w1o, w2o = do.equilibrium_profiles(disc, params)
    res = assemble(params)
    assert np.max(np.abs(w1o - res.w1.values)) < 1e-12
    assert np.max(np.abs(w2o - res.w2.values)) < 1e-12


def test_w2_sign_arbitration_against_weak_form():
    """On a model with pure linear costs the adopted w2 sign yields a weak
    residual that vanishes at second order, while the flipped sign leaves an
    O(1) defect. This pins the sign convention independently of the
    closed-form module."""
    n = 400
    params = ModelParams(
        mu=1.0, lam=1.0, s_bar=1.0,
        alpha=GridFunction.constant(0.0, 1.0, n),
        beta0=0.5,
        beta1=GridFunction.constant(0.5, 1.0, n),
        q0=1.0,
        q1=GridFunction.constant(0.5, 1.0, n),
        revenue=RevenueSpec.quadratic(0.5, 1.0),
    )
    disc = do.build(params)
    _, w2 = do.equilibrium_profiles(disc, params)
    # With alpha = 0 the equilibrium is x_bar = w2, u* = -q/(2 beta).
    u = ControlPair(-params.q0 / (2.0 * params.beta0),
                    params.q1 * (-1.0 / (2.0 * 0.5)))
    w2_fn = GridFunction.from_samples(w2, params.s_bar)
    r_good = do.residual_weak_form(w2_fn, u, params, disc)
    r_flip = do.residual_weak_form(w2_fn * (-1.0), u, params, disc)
    assert r_good < 5e-3
    assert r_flip > 0.1
    assert r_flip / r_good > 100.0


def test_picard_zero_alpha_converges_immediately():
    """With alpha = 0 the fixed-point map is constant, so one step from the
    zero start lands exactly on the equilibrium."""
    n = 100
    params = ModelParams(
        mu=1.0, lam=1.0, s_bar=1.0,
        alpha=GridFunction.constant(0.0, 1.0, n),
        beta0=0.5,
        beta1=GridFunction.constant(0.5, 1.0, n),
        q0=0.3,
        q1=GridFunction.constant(0.1, 1.0, n),
        revenue=RevenueSpec.quadratic(0.5, 1.0),
    )
    disc = do.build(params)
    x_fix, iters, _ = do.picard_fixed_point(disc, params)
    assert iters <= 2
    _, w2 = do.equilibrium_profiles(disc, params)
    assert np.max(np.abs(x_fix.values - w2)) < 1e-14


def test_picard_linear_revenue_two_steps():
    """R(Q) = b Q has constant slope, so T is constant after the first
    application and Picard stops within two iterations."""
    n = 100
    linear = RevenueSpec.custom(r=lambda q: 0.7 * q,
                                r_prime=lambda q: 0.7 + 0.0 * q,
                                lipschitz_r_prime=0.0, concave=True)
    params = ModelParams(
        mu=1.0, lam=1.0, s_bar=1.0,
        alpha=GridFunction.constant(1.0, 1.0, n),
        beta0=0.5,
        beta1=GridFunction.constant(0.5, 1.0, n),
        q0=0.0,
        q1=GridFunction.constant(0.0, 1.0, n),
        revenue=linear,
    )
    disc = do.build(params)
    x_fix, iters, _ = do.picard_fixed_point(disc, params)
    assert iters <= 2
    w1o, w2o = do.equilibrium_profiles(disc, params)
    ref = w2o + 0.7 * w1o
    assert np.max(np.abs(x_fix.values - ref)) < 1e-13


def test_picard_agrees_with_closed_form_on_random_contraction_models(rng):
    for _ in range(25):
        params = contraction_model(rng, n_cells=120)
        disc = do.build(params)
        res = assemble(params)
        x_fix, _, _ = do.picard_fixed_point(disc, params)
        diff = x_fix.values - res.x_bar.values
        dist = math.sqrt(float(disc.quad_weights @ (diff * diff)))
        scale = 1.0 + math.sqrt(float(disc.quad_weights
                                      @ (res.x_bar.values ** 2)))
        assert dist <= 1e-8 * scale


def test_picard_rate_within_certificate(rng):
    """The fitted geometric rate never exceeds the certified contraction
    modulus rhs/(lam + mu) by more than a small calibration slack."""
    for _ in range(10):
        params = contraction_model(rng, n_cells=120)
        report = check_contraction(params)
        best_rhs = min(e.rhs for e in report.entries)
        modulus = best_rhs / (params.lam + params.mu)
        disc = do.build(params)
        _, iters, rate = do.picard_fixed_point(disc, params)
        if iters >= 4 and rate is not None:
            assert rate <= modulus + 0.05


def test_grid_refinement_second_order():
    """Restricting the n and 2n fixed points to the coarse grid shows a
    Richardson ratio near 4."""
    xs = {}
    for n in (100, 200, 400):
        params = model_a(n)
        disc = do.build(params)
        x, _, _ = do.picard_fixed_point(disc, params)
        xs[n] = (x.values, disc.quad_weights)
    d1 = xs[200][0][::2] - xs[100][0]
    d2 = xs[400][0][::2] - xs[200][0]
    n1 = math.sqrt(float(xs[100][1] @ (d1 * d1)))
    n2 = math.sqrt(float(xs[200][1] @ (d2 * d2)))
    assert n1 / n2 == pytest.approx(4.0, abs=0.3)


def test_weak_form_residual_second_order():
    prev = None
    for n in (200, 400, 800):
        params = model_a(n)
        disc = do.build(params)
        res = assemble(params)
        r = do.residual_weak_form(res.x_bar, res.u_star, params, disc)
        if prev is not None:
            assert prev / r == pytest.approx(4.0, abs=0.3)
        prev = r


def test_weak_form_residual_detects_perturbation():
    params = model_a(400)
    disc = do.build(params)
    res = assemble(params)
    bumped = res.x_bar + GridFunction.from_callable(
        lambda s: 0.1 * (1.0 + np.sin(2.0 * s)), 1.0, 400)
    r = do.residual_weak_form(bumped, res.u_star, params, disc)
    assert r >= 0.05


def test_no_convergence_raises_with_history():
    params = ModelParams(
        mu=1.0, lam=1.0, s_bar=1.0,
        alpha=GridFunction.constant(1.0, 1.0, 60),
        beta0=0.5,
        beta1=GridFunction.constant(0.5, 1.0, 60),
        q0=0.0,
        q1=GridFunction.constant(0.0, 1.0, 60),
        revenue=RevenueSpec.quadratic(5.0, 1.0),
    )
    disc = do.build(params)
    with pytest.raises(NoConvergence) as err:
        do.picard_fixed_point(disc, params, max_iter=30)
    assert len(err.value.step_norms) > 0
    assert err.value.step_norms[-1] > 1.0


def test_operator_norm_matches_dense_svd():
    """The weighted power iteration reproduces the exact largest singular
    value of sqrt(W) M sqrt(W)^-1 computed densely."""
    params = model_a(80)
    disc = do.build(params)
    w = disc.quad_weights
    sq = np.sqrt(w)
    sym = sq[:, None] * disc.adj_inv / sq[None, :]
    ref = np.linalg.svd(sym, compute_uv=False)[0]
    got = do.operator_norm(disc.adj_inv, w)
    assert got == pytest.approx(ref, rel=1e-10)


def test_oracle_independent_of_start_point(rng):
    params = model_a(100)
    disc = do.build(params)
    x_a, _, _ = do.picard_fixed_point(disc, params)
    x0 = GridFunction.from_samples(rng.standard_normal(101), 1.0)
    x_b, _, _ = do.picard_fixed_point(disc, params, x0=x0)
    assert np.max(np.abs(x_a.values - x_b.values)) < 1e-10
