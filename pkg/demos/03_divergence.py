"""
Choosing the beam divergence
============================

Widening the beam spreads the same power thinner. Below a critical link
constant the narrowest beam the optics allow is best; above it there is
an interior optimum omega_btm, and in weak turbulence a flat stretch where
the coverage radius stays above half a pitch.
"""
import numpy as np

from acqtime import DEFAULT_SCENARIO, evaluate, optimal_divergence
from acqtime.optimizer import b_sigma_min

URAD = 1e-6
sigma = DEFAULT_SCENARIO.sigma
print(f"B_sigma_min = {b_sigma_min(sigma) / sigma**2:.2f} sigma^2")

for turb in ("turb1", "turb2", "turb5"):
    sc = DEFAULT_SCENARIO.replace(turb=turb, omega_limit_urad=22.8)
    dec = optimal_divergence(sc.B, sigma, sc.omega_limit)
    print(f"{turb}: B = {sc.B / sigma**2:.1f} sigma^2 -> {dec.branch.value}, "
          f"omega_opt = {dec.omega_opt / URAD:.2f} urad")

# the turb1 plateau: T_M does not move while g/d >= 1/2
sc = DEFAULT_SCENARIO.replace(turb="turb1")
for w in np.arange(14.0, 36.0, 2.0):
    ev = evaluate(sc.replace(omega_urad=w))
    print(f"    omega = {w:4.1f} urad   g = {ev.g / URAD:5.2f} urad   T_M = {ev.T_M:7.2f} s")
