"""
Sufficient conditions for a unique equilibrium
==============================================

The equilibrium map is a contraction when the discount-plus-depreciation
rate dominates a product of operator norms and Lipschitz constants. Two
interchangeable bounds exist for the inverse generator norm, 1/mu and
s_bar/sqrt(2), and the certificate keeps whichever gives more room.

The conditions require the productivity profile to vanish at the maximal
age. A flat profile therefore cannot be certified (which does not mean
the equilibrium is not unique; the conditions are sufficient only).

Run from the repository root:

    python3 demos/02_uniqueness_conditions.py
"""

import numpy as np

from vintage_eq import (AlphaNotInV, GridFunction, ModelParams, RevenueSpec,
                        check_contraction, check_remark45)

n = 800

# ----------------------------------------------------------------------
# A model with decaying productivity alpha(s) = 1 - s. It vanishes at
# s_bar = 1, so both certificate variants apply.
nodes = np.linspace(0.0, 1.0, n + 1)
params = ModelParams(
    mu=1.0, lam=1.0, s_bar=1.0,
    alpha=GridFunction.from_samples(1.0 - nodes, 1.0),
    beta0=0.5,
    beta1=GridFunction.constant(0.5, 1.0, n),
    q0=0.0,
    q1=GridFunction.constant(0.0, 1.0, n),
    revenue=RevenueSpec.quadratic(0.5, 1.0),
)

report = check_contraction(params)
print("contraction certificate, alpha(s) = 1 - s")
print(f"  |alpha|_V^2               : {report.constants['alpha_v_norm_sq']:.6f}")
print(f"  lhs (lambda + mu)         : {report.entries[0].lhs:.6f}")
for e in report.entries:
    tag = "holds" if e.holds else "fails"
    print(f"  {e.name:28s} rhs={e.rhs:.6f} margin={e.margin:+.6f} ({tag})")
print(f"  best variant: {report.constants['best_variant']}")

# The quadratic-revenue shortcut replaces the sharp multiplier constant
# with a looser but very readable one. It is displayed alongside the
# sharp bound; it never decides the certificate.
shortcut = check_remark45(params)
disp = shortcut.constants["alpha_v_norm_sq_quadratic_display"]
print("quadratic shortcut")
print(f"  display integrand  : {disp:.6f}")
print(f"  loose multiplier   : {shortcut.constants['loose_multiplier_bound']:.6f}")
print(f"  any variant holds  : {shortcut.any_holds}")

# ----------------------------------------------------------------------
# The flat benchmark has alpha(s_bar) = 1, so the certificate refuses to
# evaluate rather than report a meaningless number.
flat = ModelParams(
    mu=1.0, lam=1.0, s_bar=1.0,
    alpha=GridFunction.constant(1.0, 1.0, n),
    beta0=0.5,
    beta1=GridFunction.constant(0.5, 1.0, n),
    q0=0.0,
    q1=GridFunction.constant(0.0, 1.0, n),
    revenue=RevenueSpec.quadratic(0.5, 1.0),
)
try:
    check_contraction(flat)
except AlphaNotInV as err:
    print(f"flat profile rejected as expected: {err}")

# ----------------------------------------------------------------------
# Scaling productivity down relaxes the condition quadratically: the rhs
# scales with |alpha|^2 while the lhs stays put.
for scale in (1.0, 0.5, 0.25):
    scaled = ModelParams(
        mu=1.0, lam=1.0, s_bar=1.0,
        alpha=GridFunction.from_samples(scale * (1.0 - nodes), 1.0),
        beta0=0.5,
        beta1=GridFunction.constant(0.5, 1.0, n),
        q0=0.0,
        q1=GridFunction.constant(0.0, 1.0, n),
        revenue=RevenueSpec.quadratic(0.5, 1.0),
    )
    rep = check_contraction(scaled)
    best = rep.entry(rep.constants["best_variant"])
    print(f"  scale {scale:4.2f}: best rhs={best.rhs:.6f} "
          f"margin={best.margin:+.6f}")
