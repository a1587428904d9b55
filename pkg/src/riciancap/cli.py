"""Command-line interface.

    riciancap sweep    --config PATH --sweep AXIS --trials N --seed S --out PATH
                       --units nats|bits --no-mc --workers W
    riciancap point    single scenario: analytic stats (+ optional Monte Carlo)
    riciancap optimize water-filling covariance for the uncorrelated channel
    riciancap config   print the default configuration as YAML
"""

import argparse
import json
import math
import os
import sys

from .channel import baseline_spec, effective_channel, gaussianity_diagnostics, scalar_covariance
from .config import AXES, SweepConfig, dump_config, load_config
from .errors import ConfigError, RicianCapError
from .montecarlo import McConfig, estimate
from .outage import outage_rate
from .replica import asymptotic_stats, solve_fixed_point
from .sweep import render_summary, report_errors, run_sweep, write_csv, write_summary
from .waterfill import optimize_uncorrelated

LN2 = math.log(2.0)


def _k_db(text: str) -> float:
    return -math.inf if text.strip().lower() in ("-inf", "rayleigh") else float(text)


def _summary_path(out: str) -> str:
    root, _ = os.path.splitext(out)
    return root + "_summary.csv"


def cmd_sweep(args) -> int:
    try:
        cfg = load_config(args.config) if args.config else SweepConfig()
        if args.sweep and args.sweep != cfg.sweep_axis:
            cfg = cfg.with_axis(args.sweep)
    except ConfigError as exc:
        print(json.dumps({"errors": [{"field": exc.field, "line": exc.line, "error": str(exc)}]}), file=sys.stderr)
        return 2
    mc = cfg.mc
    if args.trials is not None or args.seed is not None:
        mc = McConfig(
            trials=args.trials if args.trials is not None else mc.trials,
            master_seed=args.seed if args.seed is not None else mc.master_seed,
            batch=mc.batch,
        )
    out = args.out or cfg.output_path
    cfg = SweepConfig(
        scenario=cfg.scenario, sweep_axis=cfg.sweep_axis, axis_values=cfg.axis_values,
        snr_grid_db=cfg.snr_grid_db, outage_epsilons=cfg.outage_epsilons, mc=mc, output_path=out,
    )

    report = run_sweep(cfg, with_mc=not args.no_mc, workers=args.workers)
    write_csv(report, out, units=args.units)
    if not args.no_mc:
        summary = report_errors(report)
        write_summary(summary, _summary_path(out))
        print(render_summary(summary))
    print(f"wrote {len(report.rows)} rows to {out}")
    if report.failures:
        print(json.dumps({"errors": report.failures}), file=sys.stderr)
        return 1
    return 0


def cmd_point(args) -> int:
    spec = baseline_spec(args.n_r, args.n_t, args.k_db, args.alpha, args.snr_db)
    q = scalar_covariance(spec)
    eff = effective_channel(spec, q)
    fp = solve_fixed_point(eff)
    st = asymptotic_stats(eff, fp)
    scale = 1.0 / LN2 if args.units == "bits" else 1.0
    unit = args.units
    print(f"w = {fp.w:.12g}  z = {fp.z:.12g}  ({fp.method}, {fp.iterations} iterations)")
    print(f"mean   = {st.mean_nats * scale:.8g} {unit}")
    print(f"stdev  = {st.std_nats * scale:.8g} {unit}")
    print(f"gamma  = {st.gamma:.8g}  margin = {st.stability_margin:.8g}")
    for eps in args.eps:
        i_eps = outage_rate(st, eps)
        note = "  (negative under the Gaussian surrogate, shown as 0)" if i_eps < 0 else ""
        print(f"I_{eps:g} = {max(i_eps, 0.0) * scale:.8g} {unit}{note}")
    if spec.rho > 0:
        dom_r, dom_t = gaussianity_diagnostics(eff)
        print(f"dominance ratios: rx {dom_r:.4g} / {spec.n_r}, tx {dom_t:.4g} / {spec.n_t}")
    if args.trials:
        est = estimate(spec, q, McConfig(args.trials, args.seed), args.eps, workers=args.workers)
        print(f"MC mean  = {est.mean_nats * scale:.8g} +- {est.stderr_mean * scale:.2g} {unit}")
        print(f"MC stdev = {est.std_nats * scale:.8g} {unit}")
        for eps in args.eps:
            print(f"MC I_{eps:g} = {est.quantiles[eps] * scale:.8g} {unit}")
    return 0


def cmd_optimize(args) -> int:
    spec = baseline_spec(args.n_r, args.n_t, args.k_db, 0.0, args.snr_db)
    sol = optimize_uncorrelated(spec, power=args.power)
    scale = 1.0 / LN2 if args.units == "bits" else 1.0
    print(f"capacity = {sol.capacity_nats * scale:.10g} {args.units}  "
          f"({sol.outer_iterations} outer iterations)")
    print(f"w = {sol.w:.10g}  z = {sol.z:.10g}  water level = {sol.xi:.10g}")
    print("eigenvalue      power")
    for lam, p in zip(sol.eigvals, sol.q_bar_diag):
        print(f"{lam:10.6g}  {p:10.6g}")
    return 0


def cmd_config(args) -> int:
    sys.stdout.write(dump_config(SweepConfig()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="riciancap", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a parameter sweep and write CSV")
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--sweep", choices=AXES, metavar="AXIS", help=f"one of {', '.join(AXES)}")
    p.add_argument("--trials", type=int, metavar="N")
    p.add_argument("--seed", type=int, metavar="S")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--units", choices=("nats", "bits"), default="nats")
    p.add_argument("--no-mc", action="store_true", help="analytic columns only")
    p.add_argument("--workers", type=int, default=1, help="Monte-Carlo worker threads")
    p.set_defaults(func=cmd_sweep)

    def scenario_args(sp, with_alpha=True):
        sp.add_argument("--n-r", type=int, default=4)
        sp.add_argument("--n-t", type=int, default=4)
        sp.add_argument("--k-db", type=_k_db, default=10.0, help="Rice factor in dB, or -inf")
        if with_alpha:
            sp.add_argument("--alpha", type=float, default=0.0)
        sp.add_argument("--snr-db", type=float, default=10.0)
        sp.add_argument("--units", choices=("nats", "bits"), default="nats")

    p = sub.add_parser("point", help="analytic statistics for one scenario")
    scenario_args(p)
    p.add_argument("--eps", type=float, nargs="+", default=[0.1, 0.01])
    p.add_argument("--trials", type=int, default=0, help="also run Monte Carlo")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("optimize", help="fixed-point water-filling (T = R = I)")
    scenario_args(p, with_alpha=False)
    p.add_argument("--power", type=float, default=None, help="trace budget (default: linear SNR)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("config", help="print the default YAML configuration")
    p.set_defaults(func=cmd_config)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RicianCapError as exc:
        print(json.dumps({"errors": [{"error": f"{type(exc).__name__}: {exc}"}]}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
