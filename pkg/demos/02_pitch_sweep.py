"""
Choosing the spiral pitch
=========================

A tight spiral covers everything but takes long to trace; a loose one is
fast but leaves gaps. The expected multi-scan time is lowest when the
coverage radius reaches exactly half a pitch.
"""
import numpy as np

from acqtime import DEFAULT_SCENARIO, evaluate, optimal_pitch

URAD = 1e-6

for turb in ("turb1", "turb3", "turb5"):
    sc = DEFAULT_SCENARIO.replace(turb=turb)
    d_opt = optimal_pitch(sc.scan().omega, sc.B, sc.sigma)
    pitches = np.linspace(20, 100, 17)
    times = [evaluate(sc.replace(pitch_d_urad=d)).T_M for d in pitches]
    best = evaluate(sc.replace(pitch_d_urad=d_opt / URAD)).T_M
    print(f"{turb}: d_opt = {d_opt / URAD:.2f} urad, T_M = {best:.1f} s")
    for d, t in zip(pitches, times):
        print(f"    d = {d:5.1f} urad   T_M = {t:8.1f} s")
