"""Command-line front end.

Exit codes: 0 success, 1 failed validation check, 2 unreadable or invalid
scenario file, 3 model domain error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from acqtime import optimizer as opt
from acqtime.link_budget import DomainError
from acqtime.montecarlo import CapExceededError, McConfig, Mode, run_mc
from acqtime.scenario import (
    URAD,
    Scenario,
    ScenarioError,
    dump_scenario,
    evaluate,
    load_scenario,
)
from acqtime.validation import run_checks

EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_DOMAIN = 3

# sweep variable -> (scenario key, unit label)
SWEEP_VARS = {
    "pitch": ("pitch_d_urad", "urad"),
    "omega": ("omega_urad", "urad"),
    "fou": ("fou_u_mrad", "mrad"),
    "sigma": ("sigma_urad", "urad"),
}
CSV_HEADER = "var,value,T_M_analytic_s,P_S,tau,g_urad"


def fmt(x: float) -> str:
    """Shortest round-trip representation."""
    return repr(float(x))


def cmd_eval(scenario: Scenario, args, out) -> int:
    if args.dump_scenario:
        out.write(dump_scenario(scenario))
        return 0
    ev = evaluate(scenario)
    c = ev.chain
    rows = [
        ("B", ev.B, "rad^2", f"({ev.B / scenario.sigma**2:.2f} sigma^2)" if scenario.sigma > 0 else ""),
        ("omega_max", ev.omega_max / URAD, "urad", ""),
        ("g", ev.g / URAD, "urad", ""),
        ("tau", c.tau, "", ""),
        ("P_SNR", c.P_SNR, "", ""),
        ("P_R", c.P_R, "", ""),
        ("P_U", c.P_U, "", ""),
        ("P_S", c.P_S, "", ""),
        ("T_U", ev.T_U, "s", ""),
        ("T_S", ev.T_S, "s", ""),
        ("T_M", ev.T_M, "s", ""),
    ]
    if args.json:
        json.dump({name: value for name, value, _, _ in rows}, out, indent=2)
        out.write("\n")
    else:
        for name, value, unit, note in rows:
            out.write(f"{name:10s} {value:.6g} {unit} {note}".rstrip() + "\n")
    return 0


def cmd_optimize(scenario: Scenario, args, out) -> int:
    B, sigma = scenario.B, scenario.sigma
    scan = scenario.scan()
    target = args.target
    if target == "pitch":
        d_opt = opt.optimal_pitch(scan.omega, B, sigma)
        t_m = evaluate(scenario.replace(pitch_d_urad=d_opt / URAD)).T_M
        out.write(f"d_opt      {d_opt / URAD:.6g} urad\nT_M        {t_m:.6g} s\n")
    elif target == "omega":
        dec = opt.optimal_divergence(B, sigma, scenario.omega_limit)
        t_m = evaluate(scenario.replace(omega_urad=dec.omega_opt / URAD)).T_M
        out.write(f"branch     {dec.branch.value}\n")
        out.write(f"omega_opt  {dec.omega_opt / URAD:.6g} urad\n")
        if dec.omega_btm is not None:
            out.write(f"omega_btm  {dec.omega_btm / URAD:.6g} urad\n")
        out.write(f"B          {B / sigma**2:.4g} sigma^2\nB_sig_min  {dec.B_sigma_min / sigma**2:.4g} sigma^2\n"
                  if sigma > 0 else "")
        out.write(f"T_M        {t_m:.6g} s\n")
    elif target == "fou":
        chain = evaluate(scenario).chain
        root = opt.optimal_fou(scan, chain, "root")
        kappa = scan.pointing_std
        out.write(f"T_hat_a    {root.T_hat_a:.6g}\n")
        out.write(f"eta_root   {root.eta_opt:.6g}\nU_opt_root {root.U_opt / kappa:.6g} kappa\n")
        try:
            fit = opt.optimal_fou(scan, chain, "fit")
            out.write(f"eta_fit    {fit.eta_opt:.6g}\nU_opt_fit  {fit.U_opt / kappa:.6g} kappa "
                      f"({100 * (fit.U_opt / root.U_opt - 1):+.3f}%)\n")
        except DomainError as exc:
            out.write(f"eta_fit    n/a ({exc})\n")
        out.write(f"T_M        {opt.min_time_at_fou(scan, chain, root):.6g} s\n")
    elif target == "vibration":
        vib = opt.vibration_analysis(B, scenario.omega_limit, sigma)
        if vib.sigma_opt is None:
            out.write("sigma_opt  none (T_M increases with sigma at this omega_limit)\n")
        else:
            t_m = evaluate(scenario.replace(omega_urad=scenario.omega_limit / URAD,
                                            sigma_urad=vib.sigma_opt / URAD)).T_M
            out.write(f"sigma_opt  {vib.sigma_opt / URAD:.6g} urad\nT_M        {t_m:.6g} s\n")
        out.write(f"omega_sigma_limit {vib.omega_sigma_limit / URAD:.6g} urad\n")
    return 0


def cmd_sweep(scenario: Scenario, args, out) -> int:
    key, _ = SWEEP_VARS[args.var]
    if not args.from_ < args.to or args.steps < 2:
        raise ScenarioError("sweep needs --from < --to and --steps >= 2")
    values = np.linspace(args.from_, args.to, args.steps)
    with_mc = args.trials is not None
    lines = [CSV_HEADER + (",T_M_mc_s,mc_ci95_s" if with_mc else "")]
    bad = 0
    for i, value in enumerate(values):
        point = scenario.replace(**{key: float(value)})
        try:
            ev = evaluate(point)
            cells = [args.var, fmt(value), fmt(ev.T_M), fmt(ev.chain.P_S), fmt(ev.chain.tau), fmt(ev.g / URAD)]
            if with_mc:
                row_seed = int(np.random.SeedSequence(args.seed, spawn_key=(i,)).generate_state(1, np.uint64)[0])
                rep = run_mc(point, McConfig(trials=args.trials, seed=row_seed, mode=Mode(args.mode)))
                cells += [fmt(rep.mean_time), fmt(rep.ci95_halfwidth)]
        except (DomainError, CapExceededError) as exc:
            bad += 1
            print(f"warning: {args.var}={value!r}: {exc}", file=sys.stderr)
            cells = [args.var, fmt(value)] + ["nan"] * (6 if with_mc else 4)
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_DOMAIN if bad else 0


def cmd_mc(scenario: Scenario, args, out) -> int:
    rep = run_mc(scenario, McConfig(trials=args.trials or 100_000, seed=args.seed, mode=Mode(args.mode),
                                    workers=args.workers))
    ev = evaluate(scenario)
    out.write(f"mode            {rep.mode.value}\ntrials          {rep.trials}\nseed            {rep.seed}\n")
    out.write(f"success_rate    {rep.success_rate:.6g}\n")
    out.write(f"mean_time       {rep.mean_time:.6g} s +/- {rep.ci95_halfwidth:.3g} (95%)\n")
    out.write(f"analytic T_M    {ev.T_M:.6g} s\n")
    out.write(f"per_scan_rate   {rep.per_scan_success_rate:.6g} +/- {rep.per_scan_se:.2g} (1 SE)\n")
    out.write(f"analytic P_S    {ev.chain.P_S:.6g}\n")
    return 0


def cmd_validate(scenario: Scenario, args, out) -> int:
    trials = 100_000 if args.trials is None else args.trials
    checks = run_checks(scenario, trials=trials, seed=args.seed)
    for check in checks:
        out.write(check.line() + "\n")
    failed = [c for c in checks if c.status == "FAIL"]
    out.write(f"{len(checks) - len(failed)}/{len(checks)} checks without failure\n")
    return EXIT_CHECK_FAILED if failed else 0


COMMANDS = {"eval": cmd_eval, "optimize": cmd_optimize, "sweep": cmd_sweep, "mc": cmd_mc, "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="acqtime", description="Multi-scan laser link acquisition time model")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--scenario", required=True, help="scenario file (key = value lines)")
        return p

    p = add("eval", "evaluate the analytic chain")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--dump-scenario", action="store_true", help="print the parsed scenario and exit")

    p = add("optimize", "closed-form optimum of one design variable")
    p.add_argument("--target", choices=["pitch", "omega", "fou", "vibration"], required=True)

    p = add("sweep", "tabulate T_M over one variable as CSV")
    p.add_argument("--var", choices=sorted(SWEEP_VARS), required=True)
    p.add_argument("--from", dest="from_", type=float, required=True, help="start, in the scenario key's unit")
    p.add_argument("--to", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--trials", type=int, help="add Monte Carlo columns with this many trials per row")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="geometric")
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = add("mc", "Monte Carlo simulation")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="geometric")
    p.add_argument("--workers", type=int, default=1)

    p = add("validate", "run the self-check suite")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"error: {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        return COMMANDS[args.command](scenario, args, out)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DomainError, CapExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
