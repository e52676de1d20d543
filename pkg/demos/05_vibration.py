"""
Platform vibration
==================

Jitter smears the beam, which lowers the peak but raises the average power
far from the axis. For a narrow enough beam a little vibration shortens the
acquisition; sigma_opt is where that stops paying off.
"""
import numpy as np

from acqtime import DEFAULT_SCENARIO, vibration_analysis
from acqtime.scenario import expected_time

URAD = 1e-6
sc = DEFAULT_SCENARIO.replace(pitch_d_urad=100.0)
B = sc.B
for omega in (16.0, 20.0, 24.0, 30.0):
    dec = vibration_analysis(B, omega * URAD, sigma=sc.sigma)
    label = "none" if dec.sigma_opt is None else f"{dec.sigma_opt / URAD:.2f} urad"
    print(f"omega = {omega:4.1f} urad: sigma_opt = {label}")
print(f"jitter of {sc.sigma / URAD:.0f} urad helps for omega below {dec.omega_sigma_limit / URAD:.2f} urad")

for s in np.arange(0.0, 14.0, 2.0):
    print(f"    sigma = {s:4.1f} urad   T_M(omega=20) = {expected_time(sc.replace(sigma_urad=s)):8.1f} s")
