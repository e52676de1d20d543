"""
Choosing the field of uncertainty
=================================

A larger search region catches the receiver more often per scan but each
scan is longer. The optimum depends on the reset time through a single
normalised number T_hat_a; the old fixed rule U = 1.3 kappa is close only
when resets are slow and field detection is reliable.
"""
from acqtime import DEFAULT_SCENARIO, evaluate, optimal_fou
from acqtime.optimizer import time_vs_fou

base = DEFAULT_SCENARIO.replace(pitch_d_urad=48.0)
for reset, p_v in ((10.0, 0.9), (10.0, 0.95), (30.0, 0.99)):
    sc = base.replace(reset_s=reset, p_v=p_v)
    scan, chain = sc.scan(), evaluate(sc).chain
    root = optimal_fou(scan, chain, "root")
    fit = optimal_fou(scan, chain, "fit")
    kappa = scan.pointing_std
    t_opt = time_vs_fou(scan, chain, root.U_opt)
    t_rule = time_vs_fou(scan, chain, 1.3 * kappa)
    print(f"T_a = {reset:4.1f} s, P_V = {p_v:.2f}: T_hat_a = {root.T_hat_a:.4f}, "
          f"U_opt = {root.U_opt / kappa:.3f} kappa (fit {fit.U_opt / kappa:.3f}), "
          f"T_M {t_opt:.1f} s vs {t_rule:.1f} s at 1.3 kappa")
