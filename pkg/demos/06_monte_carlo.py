"""
Monte Carlo check
=================

The simulator knows nothing about the closed forms: it draws a receiver
position per scan, measures the radial distance to the nearest spiral arm
and flips a coin for field detection. Its averages should land on the
analytic numbers.
"""
from acqtime import DEFAULT_SCENARIO, McConfig, Mode, evaluate, run_mc

for d, U in ((32.0, 0.8), (40.0, 1.3), (60.0, 2.0)):
    sc = DEFAULT_SCENARIO.replace(pitch_d_urad=d, fou_u_mrad=U)
    ev = evaluate(sc)
    rep = run_mc(sc, McConfig(trials=100_000, seed=1, workers=4))
    print(f"d = {d:4.1f} urad, U = {U:.1f} mrad: T_M {ev.T_M:7.1f} s analytic, "
          f"{rep.mean_time:7.1f} +/- {rep.ci95_halfwidth:.1f} s simulated; "
          f"P_S {ev.chain.P_S:.4f} vs {rep.per_scan_success_rate:.4f}")

# the physical mode replaces the coverage test with sampled jitter and fades
rep = run_mc(DEFAULT_SCENARIO, McConfig(trials=5000, seed=2, mode=Mode.PHYSICAL, dwell_samples=2000))
print(f"physical mode, long dwell: P_S {rep.per_scan_success_rate:.4f} +/- {rep.per_scan_se:.4f}")
