"""Parameter sweeps: analytic statistics vs the Monte-Carlo oracle, to CSV."""

from dataclasses import dataclass, field
import csv
import io
import math
import statistics

import numpy as np

from .channel import (
    baseline_spec,
    dominance_warning,
    effective_channel,
    gaussianity_diagnostics,
    scalar_covariance,
)
from .config import SweepConfig
from .errors import RicianCapError
from .montecarlo import empirical_outage, estimate
from .outage import outage_rate
from .replica import asymptotic_stats, solve_fixed_point

COLUMNS = (
    "axis_name", "axis_value", "n_t", "n_r", "k_db", "alpha", "snr_db",
    "w", "z", "mu_nats", "sigma_nats", "gamma", "stability_margin",
    "outage_eps", "outage_analytic_nats", "mc_mean", "mc_stderr", "mc_std",
    "mc_quantile", "rel_err_mean", "rel_err_std", "rel_err_outage",
    "dom_r", "dom_t", "warn",
)

# columns holding information quantities; --units bits rescales only these
NATS_COLUMNS = frozenset(
    {"mu_nats", "sigma_nats", "outage_analytic_nats", "mc_mean", "mc_stderr", "mc_std", "mc_quantile"}
)


@dataclass
class SweepReport:
    config: SweepConfig
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)


def point_parameters(cfg: SweepConfig, axis_value, snr_db: float) -> dict:
    """Scenario parameters for one (axis value, SNR) grid point."""
    sc = cfg.scenario
    p = {"n_r": sc.n_r, "n_t": sc.n_t, "k_db": sc.rice_k_db, "alpha": sc.alpha, "snr_db": snr_db}
    axis = cfg.sweep_axis
    if axis == "antennas":
        p["n_r"] = p["n_t"] = int(axis_value)
    elif axis == "tx_rx_ratio":
        # n_t = ceil(kappa n_r); round first so 0.75 * 4 does not become 4
        p["n_t"] = max(1, math.ceil(round(axis_value * sc.n_r, 9)))
    elif axis == "rice_k_db":
        p["k_db"] = float(axis_value)
    elif axis == "alpha":
        p["alpha"] = float(axis_value)
    elif axis == "snr_db":
        p["snr_db"] = float(axis_value)
    return p


def _grid(cfg: SweepConfig):
    for value in cfg.axis_values:
        snrs = (float(value),) if cfg.sweep_axis == "snr_db" else cfg.snr_grid_db
        for snr in snrs:
            yield value, snr


def _rel(a, b):
    if a is None or b is None:
        return None
    if b == 0.0:
        return 0.0 if a == 0.0 else math.inf
    return abs(a - b) / abs(b)


def compute_point(cfg: SweepConfig, axis_value, snr_db: float, with_mc: bool = True, workers: int = 1) -> list:
    """CSV rows (one per outage epsilon) for a single grid point."""
    p = point_parameters(cfg, axis_value, snr_db)
    spec = baseline_spec(p["n_r"], p["n_t"], p["k_db"], p["alpha"], p["snr_db"])
    q = scalar_covariance(spec)
    eff = effective_channel(spec, q)
    fp = solve_fixed_point(eff)
    st = asymptotic_stats(eff, fp)

    warns = []
    try:
        dom_r, dom_t = gaussianity_diagnostics(eff)
    except RicianCapError:
        dom_r = dom_t = None
    if dom_r is not None and dominance_warning(dom_r, spec.n_r):
        warns.append("dominant_rx_eigenmode")
    if dom_t is not None and dominance_warning(dom_t, spec.n_t):
        warns.append("dominant_tx_eigenmode")

    est = None
    if with_mc:
        est = estimate(spec, q, cfg.mc, quantile_probs=cfg.outage_epsilons, workers=workers)

    rows = []
    for eps in cfg.outage_epsilons:
        i_eps = outage_rate(st, eps)
        row_warn = list(warns)
        if i_eps < 0.0:
            row_warn.append("negative_outage")
        mc_q = empirical_outage(est, eps) if est is not None else None
        rows.append({
            "axis_name": cfg.sweep_axis,
            "axis_value": axis_value,
            "n_t": spec.n_t,
            "n_r": spec.n_r,
            "k_db": p["k_db"],
            "alpha": p["alpha"],
            "snr_db": p["snr_db"],
            "w": fp.w,
            "z": fp.z,
            "mu_nats": st.mean_nats,
            "sigma_nats": st.std_nats,
            "gamma": st.gamma,
            "stability_margin": st.stability_margin,
            "outage_eps": eps,
            "outage_analytic_nats": i_eps,
            "mc_mean": est.mean_nats if est else None,
            "mc_stderr": est.stderr_mean if est else None,
            "mc_std": est.std_nats if est else None,
            "mc_quantile": mc_q,
            "rel_err_mean": _rel(st.mean_nats, est.mean_nats) if est else None,
            "rel_err_std": _rel(st.std_nats, est.std_nats) if est else None,
            "rel_err_outage": _rel(i_eps, mc_q) if est else None,
            "dom_r": dom_r,
            "dom_t": dom_t,
            "warn": ";".join(row_warn),
        })
    return rows


def run_sweep(cfg: SweepConfig, with_mc: bool = True, workers: int = 1) -> SweepReport:
    """Evaluate every grid point in axis order.

    A failing point produces rows marked ``failed:`` in the warn column and
    an entry in ``report.failures``; the sweep carries on.
    """
    report = SweepReport(config=cfg)
    for value, snr in _grid(cfg):
        try:
            report.rows.extend(compute_point(cfg, value, snr, with_mc=with_mc, workers=workers))
        except (RicianCapError, ArithmeticError, ValueError) as exc:
            p = point_parameters(cfg, value, snr)
            msg = f"{type(exc).__name__}: {exc}"
            report.failures.append({"axis_value": value, "snr_db": snr, "error": msg})
            for eps in cfg.outage_epsilons:
                row = dict.fromkeys(COLUMNS)
                row.update(
                    axis_name=cfg.sweep_axis, axis_value=value, n_t=p["n_t"], n_r=p["n_r"],
                    k_db=p["k_db"], alpha=p["alpha"], snr_db=snr, outage_eps=eps,
                    warn=f"failed: {msg}",
                )
                report.rows.append(row)
    return report


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def render_csv(report: SweepReport, units: str = "nats") -> str:
    if units not in ("nats", "bits"):
        raise ValueError(f"units must be 'nats' or 'bits', got {units!r}")
    scale = 1.0 / math.log(2.0) if units == "bits" else 1.0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in report.rows:
        out = []
        for col in COLUMNS:
            v = row.get(col)
            if col in NATS_COLUMNS and v is not None and scale != 1.0:
                v = v * scale
            out.append(_fmt(v))
        writer.writerow(out)
    return buf.getvalue()


def write_csv(report: SweepReport, path: str, units: str = "nats") -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(report, units))


def report_errors(report: SweepReport) -> list:
    """Max and median relative error per metric over the successful rows.

    The mean and standard-deviation errors are counted once per grid point
    (they repeat across epsilon rows); outage errors once per row.
    """
    seen = set()
    errs = {"mean": [], "std": [], "outage": []}
    for row in report.rows:
        if row.get("rel_err_outage") is not None:
            errs["outage"].append(row["rel_err_outage"])
        key = (row["axis_value"], row["snr_db"])
        if key in seen or row.get("rel_err_mean") is None:
            continue
        seen.add(key)
        errs["mean"].append(row["rel_err_mean"])
        errs["std"].append(row["rel_err_std"])
    summary = []
    for metric, values in errs.items():
        summary.append({
            "metric": metric,
            "count": len(values),
            "max_rel_err": max(values) if values else None,
            "median_rel_err": statistics.median(values) if values else None,
        })
    return summary


def render_summary(summary: list) -> str:
    lines = [f"{'metric':<8} {'points':>6} {'max rel err':>12} {'median':>10}"]
    for s in summary:
        mx = "n/a" if s["max_rel_err"] is None else f"{100 * s['max_rel_err']:.3f}%"
        md = "n/a" if s["median_rel_err"] is None else f"{100 * s['median_rel_err']:.3f}%"
        lines.append(f"{s['metric']:<8} {s['count']:>6} {mx:>12} {md:>10}")
    return "\n".join(lines)


def write_summary(summary: list, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("metric", "count", "max_rel_err", "median_rel_err"))
        for s in summary:
            writer.writerow((s["metric"], s["count"], _fmt(s["max_rel_err"]), _fmt(s["median_rel_err"])))
