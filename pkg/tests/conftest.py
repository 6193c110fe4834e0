"""Shared model builders for the test suite."""

import numpy as np
import pytest

from vintage_eq import GridFunction, ModelParams, RevenueSpec, validate


def model_a(n_cells=400):
    """Flat benchmark: mu = lam = 1, s_bar = 1, alpha = 1, beta = 1/2, q = 0,
    quadratic revenue R(Q) = -Q^2/2 + Q."""
    return ModelParams(
        mu=1.0, lam=1.0, s_bar=1.0,
        alpha=GridFunction.constant(1.0, 1.0, n_cells),
        beta0=0.5,
        beta1=GridFunction.constant(0.5, 1.0, n_cells),
        q0=0.0,
        q1=GridFunction.constant(0.0, 1.0, n_cells),
        revenue=RevenueSpec.quadratic(0.5, 1.0),
    )


def model_b(n_cells=400):
    """Same as model_a but alpha(s) = 1 - s, which vanishes at s_bar."""
    return ModelParams(
        mu=1.0, lam=1.0, s_bar=1.0,
        alpha=GridFunction.from_callable(lambda s: 1.0 - s, 1.0, n_cells),
        beta0=0.5,
        beta1=GridFunction.constant(0.5, 1.0, n_cells),
        q0=0.0,
        q1=GridFunction.constant(0.0, 1.0, n_cells),
        revenue=RevenueSpec.quadratic(0.5, 1.0),
    )


def random_revenue(rng):
    k = rng.integers(0, 3)
    if k == 0:
        return RevenueSpec.quadratic(rng.uniform(0.1, 1.0), rng.uniform(0.5, 2.0))
    if k == 1:
        return RevenueSpec.log()
    return RevenueSpec.power(rng.uniform(0.2, 0.8))


def random_model(rng, n_cells=200, with_linear_costs=True):
    """A random valid model across all three built-in revenue families."""
    s_bar = rng.uniform(0.5, 2.0)
    nodes = np.linspace(0.0, s_bar, n_cells + 1)
    # Smooth nonnegative output weight.
    a0 = rng.uniform(0.3, 1.5)
    a1 = rng.uniform(-0.3, 0.3)
    a2 = rng.uniform(0.0, 0.5)
    alpha_vals = a0 + a1 * nodes + a2 * np.sin(2.0 * nodes / s_bar)
    alpha_vals = np.maximum(alpha_vals, 0.0)
    q_scale = 0.3 if with_linear_costs else 0.0
    params = ModelParams(
        mu=rng.uniform(0.2, 3.0),
        lam=rng.uniform(0.2, 3.0),
        s_bar=s_bar,
        alpha=GridFunction.from_samples(alpha_vals, s_bar),
        beta0=rng.uniform(0.2, 2.0),
        beta1=GridFunction.constant(rng.uniform(0.2, 2.0), s_bar, n_cells),
        q0=rng.uniform(-q_scale, q_scale),
        q1=GridFunction.constant(rng.uniform(-q_scale, q_scale), s_bar, n_cells),
        revenue=random_revenue(rng),
    )
    return validate(params)


def contraction_model(rng, n_cells=200):
    """A random model with alpha in V scaled until check_contraction holds."""
    from vintage_eq import check_contraction

    s_bar = rng.uniform(0.5, 2.0)
    nodes = np.linspace(0.0, s_bar, n_cells + 1)
    # alpha vanishing at s_bar so it belongs to V.
    c = rng.uniform(0.3, 1.0)
    alpha_vals = c * (s_bar - nodes) / s_bar * (1.0 + 0.3 * np.sin(3.0 * nodes / s_bar))
    alpha_vals = np.maximum(alpha_vals, 0.0)
    alpha_vals[-1] = 0.0
    mu = rng.uniform(0.5, 2.0)
    lam = rng.uniform(0.5, 2.0)
    beta0 = rng.uniform(0.4, 1.5)

    for _ in range(60):
        params = ModelParams(
            mu=mu, lam=lam, s_bar=s_bar,
            alpha=GridFunction.from_samples(alpha_vals, s_bar),
            beta0=beta0,
            beta1=GridFunction.constant(beta0, s_bar, n_cells),
            q0=rng.uniform(-0.1, 0.1),
            q1=GridFunction.constant(rng.uniform(-0.1, 0.1), s_bar, n_cells),
            revenue=RevenueSpec.quadratic(0.5, 1.0),
        )
        if check_contraction(params).any_holds:
            return validate(params)
        alpha_vals = alpha_vals * 0.7
    raise AssertionError("could not scale alpha into the contraction region")


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
