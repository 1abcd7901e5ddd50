"""Command-line entry point: ``spdcrate <subcommand> --config FILE``.

Exit codes: 0 success, 2 configuration error, 3 numerical convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import cavity, depletion, detection, phasematch, rates, squeezing
from .config import (RunConfig, depletion_spec, detection_inputs, load_config, parse_sweep,
                     parse_quantity, ring_experiment, spdc_config)
from .errors import ConfigError, ConvergenceError, SingularDenominator

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 2, 3


def fmt(x) -> str:
    """Compact, locale-free number text: 9.48645e7, 0.405285, 12."""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    s = format(float(x), ".6g")
    return s.replace("e+0", "e").replace("e+", "e").replace("e-0", "e-")


class Output:
    """A key=value summary plus an optional table; emitted as keyvalue or csv."""

    def __init__(self, summary: dict, header: list[str] | None = None, rows: list[list] | None = None):
        self.summary = summary
        self.header = header
        self.rows = rows or []

    def keyvalue(self) -> str:
        return "".join(f"{k} = {fmt(v)}\n" for k, v in self.summary.items())

    def csv(self) -> str:
        if self.header is None:
            header, rows = list(self.summary), [list(self.summary.values())]
        else:
            header, rows = self.header, self.rows
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
        return buf.getvalue()


# ----------------------------------------------------------------- rate

REGIMES = ("single_mode", "multimode_total", "narrowband", "waveguide")


def _rate_for(run: RunConfig) -> rates.RateResult:
    cfg = spdc_config(run)
    regime = run.section("spdc").get("regime", "single_mode")
    if regime == "single_mode" or regime == "waveguide":
        return rates.single_mode_rate(cfg)
    if regime == "multimode_total":
        return rates.rate_total_type1(cfg)
    if regime == "narrowband":
        bw = parse_quantity(run.section("spdc").get("filter_bandwidth"), "spdc.filter_bandwidth")
        return rates.rate_narrowband_filtered(cfg, bw)
    raise ConfigError(f"spdc.regime must be one of {REGIMES}, got {regime!r}")


def cmd_rate(run: RunConfig, args) -> Output:
    if args.sweep:
        sweep = parse_sweep(*args.sweep)
        rows = []
        for v in sweep.values():
            res = _rate_for(run.with_override("spdc", sweep.parameter, v))
            rows.append([sweep.parameter, v, res.per_milliwatt, res.regime.value, res.provenance])
        return Output({"parameter": sweep.parameter, "points": len(rows)},
                      ["parameter", "value", "rate_pairs_per_s_per_mW", "regime", "provenance"], rows)
    res = _rate_for(run)
    summary = {"rate_pairs_per_s_per_mW": res.per_milliwatt, "rate_pairs_per_s": res.pairs_per_second,
               "regime": res.regime.value, "provenance": res.provenance}
    if args.oracle:
        if run.section("spdc").get("regime", "single_mode") not in ("single_mode", "waveguide"):
            raise ConfigError("--oracle applies to the single_mode and waveguide regimes")
        oracle = rates.rate_sm_quadrature(spdc_config(run))
        summary["oracle_rate_pairs_per_s_per_mW"] = oracle.per_milliwatt
        summary["closed_form_over_oracle"] = res.per_milliwatt / oracle.per_milliwatt
    return Output(summary, ["parameter", "value", "rate_pairs_per_s_per_mW", "regime", "provenance"],
                  [["", "", res.per_milliwatt, res.regime.value, res.provenance]])


# ------------------------------------------------------------------ mrr

def _mrr_summary(run: RunConfig) -> dict:
    exp = ring_experiment(run)
    ring = exp.ring
    rho = abs(ring.rho)
    summary = {"rho": rho, "alpha": ring.alpha, "buildup_B": ring.buildup_B,
               "finesse": cavity.finesse(rho, ring.alpha) if rho > 0 else 0.0}
    if exp.d_eff > 0:
        omega_p = 2.0 * math.pi * 299792458.0 / exp.lambda_p
        peak = cavity.peak_pair_rate(exp.d_eff, exp.indices, omega_p, exp.L_x, exp.L_y, ring.L, rho,
                                     ring.buildup_B, exp.power)
        summary["peak_rate_pairs_per_s_per_mW"] = peak.per_milliwatt
    summary["eta_r"] = cavity.heralding_efficiency(ring, exact=False)
    if rho > 0:
        # D/J ratio is frequency independent; anti-resonance avoids the critical-coupling pole
        summary["eta_r_exact"] = cavity.heralding_efficiency(ring, math.pi / ring.t_dc, exact=True)
    if rho > 0:
        summary["r_thresh"] = cavity.opo_threshold(ring.Gamma, ring.L, rho)
    return summary


def cmd_mrr(run: RunConfig, args) -> Output:
    if args.sweep:
        sweep = parse_sweep(*args.sweep)
        rows, header = [], None
        for v in sweep.values():
            s = _mrr_summary(run.with_override("ring", sweep.parameter, v))
            header = header or ["parameter", "value", *s]
            rows.append([sweep.parameter, v, *s.values()])
        return Output({"parameter": sweep.parameter, "points": len(rows)}, header, rows)
    summary = _mrr_summary(run)
    ring = ring_experiment(run).ring
    n = int(run.section("ring").get("spectrum_points", 401))
    theta = np.linspace(-math.pi, math.pi, n)
    nu = theta / ring.t_dc
    G, _ = cavity.ring_transfer(ring, theta)
    rows = [[t, f, abs(g)] for t, f, g in zip(theta, nu, G)]
    header = ["theta", "nu_rad_per_s", "transmission"]
    if abs(ring.rho) > 0:
        try:
            psi2 = cavity.biphoton_spectrum(ring, nu)
        except SingularDenominator:
            warnings.warn("biphoton spectrum diverges on resonance (rho = alpha at r = 0); column omitted")
        else:
            rows = [r + [p] for r, p in zip(rows, psi2)]
            header.append("biphoton_spectrum")
    return Output(summary, header, rows)


# -------------------------------------------------------------- deplete

def cmd_deplete(run: RunConfig, args) -> Output:
    spec = depletion_spec(run)
    td = depletion.depletion_time(spec)
    summary = {"g2_per_s2": spec.g2, "N_p0": spec.N_p0, "T_D_s": td.quadrature,
               "T_D_elliptic_s": td.elliptic, "T_D_closed_form_s": td.closed_form,
               "closed_form_imag_residue": td.closed_form_imag_residue}
    t_max = spec.t_max if spec.t_max is not None else 1.2 * td.quadrature
    t = np.linspace(0.0, t_max, int(run.section("depletion").get("points", 201)))
    traj = depletion.integrate_depletion(spec, t)
    approx = depletion.regime_approximations(spec, t, td.quadrature)
    summary["N1_max"] = float(np.max(traj.N1))
    rows = [list(r) for r in zip(t / td.quadrature, traj.N1, approx.sinh_approx, approx.sech_approx, approx.hybrid)]
    return Output(summary, ["t_over_TD", "N1_ode", "sinh_approx", "sech_approx", "hybrid"], rows)


# -------------------------------------------------------------- squeeze

def cmd_squeeze(run: RunConfig, args) -> Output:
    cfg = spdc_config(run)
    n_modes = int(run.section("spdc").get("n_modes", 511))
    disc = squeezing.discretize_coupling(cfg, n_modes)
    n_sm = disc.pair_fraction * squeezing.evolve_pairs(disc.spec)
    t_dc = disc.spec.interaction_time
    mode_sum = rates.rate_sm_mode_sum(cfg, disc.detunings, disc.spacing)
    summary = {"n_modes": n_modes, "mean_pump_photons": disc.spec.mean_pump_photons,
               "interaction_time_s": t_dc, "N_SM": n_sm, "rate_pairs_per_s": n_sm / t_dc,
               "mode_sum_rate_pairs_per_s": mode_sum,
               "relative_difference": (n_sm / t_dc - mode_sum) / mode_sum}
    return Output(summary)


# -------------------------------------------------------------- extract

def cmd_extract(run: RunConfig, args) -> Output:
    rec, mi = detection_inputs(run, args.record, args.model)
    est = detection.extract_pair_rate(rec, mi.model, seed=args.seed, sigma_C=mi.sigma_C, sigma_eta=mi.sigma_eta)
    return Output({"N_pairs_per_s": est.value, "sigma": est.sigma})


# ------------------------------------------------------------------ qpm

def cmd_qpm(run: RunConfig, args) -> Output:
    sec = run.data.get("qpm", {})
    order = int(sec.get("order", args.order))
    summary = {"order": order, "rate_factor": phasematch.qpm_rate_factor(order),
               "fourier_amplitude": phasematch.qpm_fourier_amp(order)}
    x = np.linspace(0.0, float(sec.get("max_L_over_Lambda", 5.0)), int(sec.get("points", 201)))
    curve = phasematch.qpm_growth_curve(x)
    rows = [list(r) for r in zip(curve["L_over_Lambda"], curve["unpoled"], curve["poled"], curve["parabolic_approx"])]
    return Output(summary, ["L_over_Lambda", "unpoled", "poled", "parabolic_approx"], rows)


COMMANDS = {"rate": cmd_rate, "mrr": cmd_mrr, "deplete": cmd_deplete, "squeeze": cmd_squeeze,
            "extract": cmd_extract, "qpm": cmd_qpm}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run configuration")
    common.add_argument("--output", help="write to this file instead of stdout")
    common.add_argument("--format", choices=("csv", "keyvalue"), default="keyvalue")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--sweep", nargs=3, metavar=("PARAM", "START..STOP", "STEPS"))
    p = argparse.ArgumentParser(prog="spdcrate", description="Absolute SPDC pair-rate toolkit.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("rate", parents=[common], help="closed-form pair rate")
    r.add_argument("--oracle", action="store_true", help="also integrate numerically and print the ratio")
    sub.add_parser("mrr", parents=[common], help="micro-ring spectrum, peak rate, heralding, threshold")
    sub.add_parser("deplete", parents=[common], help="pump depletion time and trajectory")
    sub.add_parser("squeeze", parents=[common], help="multimode squeezing pair number")
    e = sub.add_parser("extract", parents=[common], help="pair rate from measured counts")
    e.add_argument("--record", help="detection record TOML")
    e.add_argument("--model", help="detection model TOML")
    q = sub.add_parser("qpm", parents=[common], help="quasi-phase-matching factor and growth curve")
    q.add_argument("--order", type=int, default=1)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            run = load_config(args.config)
        elif args.command in ("qpm", "extract"):
            run = RunConfig({}, Path.cwd())
        else:
            raise ConfigError("--config is required")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            out = COMMANDS[args.command](run, args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    text = out.csv() if args.format == "csv" else out.keyvalue()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        sys.stdout.write(out.keyvalue())
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
