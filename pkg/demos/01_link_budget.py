"""
Link budget
===========

How far off the beam axis can a receiver sit and still see the SNR
threshold? The answer is the coverage radius g, and everything in the
scan design follows from it.
"""
from acqtime import TURBULENCE_PRESETS, DEFAULT_SCENARIO, coverage_radius, link_constant_B, max_divergence
from acqtime.link_budget import required_power

URAD = 1e-6
link = DEFAULT_SCENARIO.link()
sigma = DEFAULT_SCENARIO.sigma

# The whole budget (power, optics, turbulence, noise, threshold) collapses
# into one constant B with units of angle squared.
print("level   B / sigma^2   omega_max (urad)   g at 20 urad (urad)")
for name, turb in TURBULENCE_PRESETS.items():
    B = link_constant_B(link, turb)
    print(f"{name}   {B / sigma**2:10.2f}   {max_divergence(B, sigma) / URAD:16.2f}"
          f"   {coverage_radius(20 * URAD, B, sigma) / URAD:18.2f}")

# Turn it around: what transmit power puts the threshold exactly half a pitch out?
turb3 = TURBULENCE_PRESETS["turb3"]
for d in (30.0, 31.86, 40.0):
    p = required_power(20 * URAD, d * URAD, 0.5, link, turb3, sigma)
    print(f"pitch {d:5.2f} urad needs {p * 1e3:6.1f} mW for full coverage")
