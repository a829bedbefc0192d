"""Scenario runner: one command per named experiment, artifacts on disk.

Each run kind binds the library modules into a pipeline, writes CSV tables
plus a JSON summary into the output directory, and gates the result on the
validity reports.  All CSV and JSON outputs embed the provenance object
(scenario hash, solver tolerances, truncation, seed), so a finished run
directory is self-describing and identical reruns produce identical bytes.

Exit codes: 0 on success, 2 on scenario validation problems, 3 on numerical
failure (integrator breakdown or a hard gate).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .drive import adiabaticity_report, rwa_validity_report, solve_carriers, with_solved_carriers
from .dynamics import (
    DensityMatrix,
    build_dressed_basis,
    build_jump_channels,
    build_term_table,
    closed_retention,
    open_retention,
    propagate_closed,
    propagate_master,
)
from .errors import ParseError, SimulationError, ValidationError
from .mcwf import ensemble_average, jump_statistics
from .observables import bundle_observables, find_extremum, g2_delayed, g2_from_expectations
from .rabi import compute_spectrum
from .scenario import Scenario, apply_overrides, load_scenario, scenario_hash
from .timeseries import TimeSeries

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

CLOSED_RTOL = 1e-9
OPEN_RTOL = 1e-7
ATOL = 1e-12

# adiabaticity above the report threshold only degrades transfer quality;
# past this ratio the dark state is not followed at all and results are junk
HARD_ADIABATIC_RATIO = 1.0
# fraction of the peak bundle intensity that still counts as emission when
# windowing the correlator anchor search
ANCHOR_INTENSITY_FRAC = 1e-3
TRUNCATION_GROWTH = 1.5
CARRIER_SHIFT_TOL = 1e-6

# end of the pulse pair: envelopes are at exp(-9) of peak three widths out
PULSE_TAIL_WIDTHS = 3.0


def bundled_scenario_names() -> list[str]:
    root = resources.files("photonbundles.scenarios")
    return sorted(p.name[: -len(".scenario")] for p in root.iterdir() if p.name.endswith(".scenario"))


def resolve_scenario(ref: str) -> Scenario:
    """Accept either a bundled scenario name or a path to a scenario file."""
    path = Path(ref)
    if path.suffix == ".scenario" or path.exists():
        return load_scenario(path)
    root = resources.files("photonbundles.scenarios")
    cand = root / f"{ref}.scenario"
    if cand.is_file():
        with resources.as_file(cand) as real:
            return load_scenario(real)
    known = ", ".join(bundled_scenario_names())
    raise ParseError(f"no scenario file or bundled scenario named {ref!r}; bundled: {known}")


# ---------------------------------------------------------------------------
# gates and provenance


def evaluate_gates(s: Scenario, spec, pt) -> dict:
    """Validity reports plus the binary convergence gate for drive kinds."""
    tgt = s.target
    nf2 = int(math.ceil(s.space.n_fock * TRUNCATION_GROWTH))
    spec2 = compute_spectrum(s.model, nf2)
    c1 = solve_carriers(spec, s.model, tgt)
    c2 = solve_carriers(spec2, s.model, tgt)
    carrier_shift = max(abs(a - b) for a, b in zip(c1, c2))
    occ_hi = 2 * tgt.m + tgt.M
    coeff_shift = max(
        abs(spec.coefficient(tgt.n, tgt.M) - spec2.coefficient(tgt.n, tgt.M)),
        abs(spec.coefficient(tgt.n, occ_hi) - spec2.coefficient(tgt.n, occ_hi)),
    )
    trunc_ok = carrier_shift < CARRIER_SHIFT_TOL and coeff_shift < CARRIER_SHIFT_TOL

    lo = min(pt.center_first) - pt.width
    hi = max(pt.center_first) + pt.width
    ad = adiabaticity_report(spec, pt, tgt, np.linspace(lo, hi, 257))
    rwa = rwa_validity_report(spec, pt, tgt)

    hard = []
    if not trunc_ok:
        hard.append("truncation_convergence")
    if ad.max_ratio > HARD_ADIABATIC_RATIO:
        hard.append("adiabaticity")
    return {
        "truncation_convergence": {
            "passed": trunc_ok,
            "n_fock": s.space.n_fock,
            "n_fock_enlarged": nf2,
            "carrier_shift": carrier_shift,
            "coefficient_shift": coeff_shift,
            "tolerance": CARRIER_SHIFT_TOL,
        },
        "adiabaticity": ad.to_json(),
        "rwa": rwa.to_json(),
        "hard_failures": hard,
    }


def build_provenance(s: Scenario, overrides: dict, extra: dict | None = None) -> dict:
    prov = {
        "scenario": s.name,
        "kind": s.kind,
        "scenario_hash": scenario_hash(s),
        "package_version": __version__,
        "seed": s.seed,
        "cycles": s.resolved_cycles if s.kind != "coeff-sweep" else None,
        "overrides": {k: v for k, v in sorted(overrides.items())},
        "truncation": {"n_fock": s.space.n_fock},
    }
    if extra:
        prov.update(extra)
    return prov


# ---------------------------------------------------------------------------
# shared pipeline pieces


def _prepare(s: Scenario):
    spec = compute_spectrum(s.model, s.space.n_fock)
    pt = with_solved_carriers(s.pulse_train(), spec, s.model, s.target)
    return spec, pt


def _time_grid(s: Scenario, horizon: float) -> np.ndarray:
    n = s.resolved_points_per_cycle * s.resolved_cycles
    return np.linspace(0.0, horizon, n + 1)


def _emission_window(series, n: int) -> tuple[float, float] | None:
    """Span where the bundle intensity is a resolvable fraction of its peak.

    Statistic extrema are only searched here; outside, the normalizing
    denominator drops below the integrator tolerance and the masked
    statistic is numerical noise.
    """
    inten = series.column(f"bundle{n}_intensity")
    lit = np.flatnonzero(inten >= ANCHOR_INTENSITY_FRAC * inten.max())
    if lit.size == 0:
        return None
    return float(series.axis[lit[0]]), float(series.axis[lit[-1]])


def _population_cycle_peaks(times, pops, label, period, n_cycles):
    """Peak target population and its time, per cycle and overall."""
    per_cycle = []
    for k in range(n_cycles):
        sel = (times >= k * period) & (times < (k + 1) * period)
        if not np.any(sel):
            continue
        i = int(np.argmax(pops[sel]))
        per_cycle.append({"cycle": k, "time": float(times[sel][i]), "value": float(pops[sel][i])})
    best = max(per_cycle, key=lambda d: d["value"]) if per_cycle else None
    return per_cycle, best


# ---------------------------------------------------------------------------
# kind runners; each returns the results section of the summary


def _run_closed(s: Scenario, out: Path, prov: dict) -> dict:
    spec, pt = _prepare(s)
    basis = build_dressed_basis(spec, s.model, s.space)
    table = build_term_table(basis, pt, retention=closed_retention(), target=s.target)
    horizon = (s.resolved_cycles - 1) * pt.period + max(pt.center_first) + PULSE_TAIL_WIDTHS * pt.width
    t_grid = _time_grid(s, horizon)
    psi0 = basis.unit_state(s.initial_state)
    res = propagate_closed(table, psi0, t_grid, rtol=CLOSED_RTOL, atol=ATOL)

    res.populations.to_csv(out / "populations.csv", provenance=prov)
    tgt = s.target
    target_label = f"b{2 * tgt.m + tgt.M}"
    ladder = {f"b{tgt.M}", f"d{tgt.n}", target_label}
    rest = sum(
        res.population(lb)[-1] for lb in basis.labels if lb not in ladder
    )
    return {
        "final_target_population": float(res.population(target_label)[-1]),
        "target_label": target_label,
        "final_mediator_population": float(res.population(f"d{tgt.n}")[-1]),
        "final_other_population": float(rest),
        "norm_drift": float(res.norm_drift),
        "n_steps": int(res.n_steps),
    }


def _run_master(s: Scenario, out: Path, prov: dict) -> dict:
    spec, pt = _prepare(s)
    basis = build_dressed_basis(spec, s.model, s.space, n_keep=s.resolved_n_keep)
    channels = build_jump_channels(basis, s.decay, s.space)
    rho0 = DensityMatrix.pure(basis, s.initial_state)
    t_grid = _time_grid(s, s.resolved_cycles * pt.period)
    orders = sorted(set(s.correlator_orders))
    res = propagate_master(
        basis,
        channels,
        pt,
        rho0,
        t_grid,
        target=s.target,
        rtol=OPEN_RTOL,
        atol=ATOL,
        observables=bundle_observables(basis, orders),
    )
    res.populations.to_csv(out / "populations.csv", provenance=prov)

    stat_cols: dict[str, np.ndarray] = {}
    extrema = {}
    for n in orders:
        series = g2_from_expectations(res, n)
        stat_cols.update(series.columns)
        first = series.slice(0.0, pt.period)
        window = _emission_window(first, n) or (0.0, pt.period)
        try:
            t_hi, v_hi = find_extremum(first, "max", window=window, column=f"g{n}_2")
            t_lo, v_lo = find_extremum(first, "min", window=window, column=f"g{n}_2")
            extrema[f"g{n}_2"] = {
                "max": {"time": t_hi, "value": v_hi},
                "min": {"time": t_lo, "value": v_lo},
            }
        except SimulationError as exc:  # fully masked column: report, don't fail the run
            extrema[f"g{n}_2"] = {"error": str(exc)}
    TimeSeries(t_grid, stat_cols, metadata={"orders": orders}).to_csv(
        out / "bundle_stats.csv", provenance=prov
    )

    tgt = s.target
    target_label = f"b{2 * tgt.m + tgt.M}"
    pops = res.population(target_label)
    per_cycle, best = _population_cycle_peaks(t_grid, pops, target_label, pt.period, s.resolved_cycles)
    return {
        "target_label": target_label,
        "peak_target_population": best,
        "peak_target_population_per_cycle": per_cycle,
        "g2_extrema_first_cycle": extrema,
        "trace_drift": float(res.trace_drift),
        "min_population": float(res.min_population),
        "n_steps": int(res.n_steps),
    }


def _run_trajectory(s: Scenario, out: Path, prov: dict) -> dict:
    spec, pt = _prepare(s)
    basis = build_dressed_basis(spec, s.model, s.space, n_keep=s.resolved_n_keep)
    channels = build_jump_channels(basis, s.decay, s.space)
    psi0 = basis.unit_state(s.initial_state)
    t_grid = _time_grid(s, s.resolved_cycles * pt.period)
    ens = ensemble_average(
        basis, channels, pt, psi0, t_grid, n_traj=s.n_traj, seed0=s.seed, target=s.target
    )

    cols = dict(ens.mean_populations.columns)
    cols.update({f"SE_{k[2:]}": v for k, v in ens.se_populations.columns.items()})
    TimeSeries(t_grid, cols, metadata={"n_traj": s.n_traj}).to_csv(
        out / "mean_populations.csv", provenance=prov
    )

    rows = [
        (i, ev.time, ev.channel, ev.src_label, ev.dst_label)
        for i, jumps in enumerate(ens.jump_records)
        for ev in jumps
    ]
    with open(out / "jumps.csv", "w", newline="") as fh:
        fh.write("# provenance: " + json.dumps(prov, sort_keys=True) + "\n")
        fh.write("trajectory,time,channel,source,destination\r\n")
        for r in rows:
            fh.write(f"{r[0]},{r[1]!r},{r[2]},{r[3]},{r[4]}\r\n")

    stats = jump_statistics(ens, pt, channel="a")
    bundle = s.target.bundle_size
    with open(out / "jump_histogram.csv", "w", newline="") as fh:
        fh.write("# provenance: " + json.dumps(prov, sort_keys=True) + "\n")
        fh.write("a_jumps_per_cycle,occurrences,fraction\r\n")
        total = stats.counts.size
        for k, v in sorted(stats.count_histogram.items()):
            fh.write(f"{k},{v},{v / total!r}\r\n")
    return {
        "n_traj": s.n_traj,
        "n_cycles": stats.n_cycles,
        "bundle_size": bundle,
        "jump_histogram": {str(k): v for k, v in sorted(stats.count_histogram.items())},
        "fraction_exact_bundle": stats.fraction_with(bundle),
        "total_jumps": int(sum(len(j) for j in ens.jump_records)),
    }


def _run_correlators(s: Scenario, out: Path, prov: dict) -> dict:
    spec, pt = _prepare(s)
    basis = build_dressed_basis(spec, s.model, s.space, n_keep=s.resolved_n_keep)
    channels = build_jump_channels(basis, s.decay, s.space)
    rho0 = DensityMatrix.pure(basis, s.initial_state)
    orders = sorted(set(s.correlator_orders))

    # anchor search: equal-time statistics over the first cycle
    t_grid = _time_grid(s, pt.period)
    res = propagate_master(
        basis,
        channels,
        pt,
        rho0,
        t_grid,
        target=s.target,
        rtol=OPEN_RTOL,
        atol=ATOL,
        observables=bundle_observables(basis, orders),
    )
    if s.decay.a <= 0:
        raise ValidationError("correlators need a positive cavity decay rate for the tau scan")
    tau = np.linspace(0.0, 3.0 / s.decay.a, s.tau_points + 1)

    results = {}
    for n in orders:
        series = g2_from_expectations(res, n)
        # anchor: the super-Poissonian peak of the plain statistic, or the
        # sub-Poissonian dip of a bundle statistic
        window = _emission_window(series, n)
        ts, _ = find_extremum(series, "max" if n == 1 else "min", window=window, column=f"g{n}_2")
        cr = g2_delayed(
            basis, channels, pt, rho0, n, ts, tau_grid=tau, rates=s.decay, rtol=OPEN_RTOL
        )
        cols = {
            f"g{n}_2": cr.values,
            f"numerator_{n}": cr.numerator,
            f"denominator_{n}": cr.denominator,
        }
        TimeSeries(cr.tau, cols, axis_name="tau", metadata={"anchor_time": cr.anchor_time}).to_csv(
            out / f"correlator_g{n}.csv", provenance=prov
        )
        zero = float(cr.values[0])
        later = cr.values[1:] if cr.tau[0] == 0.0 else cr.values
        results[f"g{n}_2"] = {
            "anchor_time": float(cr.anchor_time),
            "equal_time_value": zero,
            "fraction_tau_below_equal_time": float(np.mean(later < zero)),
            "fraction_tau_above_equal_time": float(np.mean(later > zero)),
        }
    return {"orders": orders, "tau_max": float(tau[-1]), "correlators": results}


def _run_coeff_sweep(s: Scenario, out: Path, prov: dict) -> dict:
    sw = s.sweep
    lams = np.linspace(sw.coupling_min, sw.coupling_max, sw.points)
    even_occ = list(range(2, sw.max_occupation + 1, 2))
    odd_occ = list(range(3, sw.max_occupation + 1, 2))
    cols: dict[str, np.ndarray] = {
        **{f"C0_{m}": np.zeros(lams.size) for m in even_occ},
        **{f"C1_{m}": np.zeros(lams.size) for m in odd_occ},
    }
    from dataclasses import replace as dc_replace

    for i, lam in enumerate(lams):
        spec_i = compute_spectrum(dc_replace(s.model, coupling=float(lam)), s.space.n_fock)
        for m in even_occ:
            cols[f"C0_{m}"][i] = spec_i.coefficient(0, m)
        for m in odd_occ:
            cols[f"C1_{m}"][i] = spec_i.coefficient(1, m)
    TimeSeries(lams, cols, axis_name="coupling", metadata={"n_fock": s.space.n_fock}).to_csv(
        out / "coefficients.csv", provenance=prov
    )
    peak = {k: float(np.max(np.abs(v))) for k, v in cols.items()}
    return {"points": int(lams.size), "max_abs_coefficient": peak}


RUNNERS = {
    "closed": _run_closed,
    "master": _run_master,
    "trajectory": _run_trajectory,
    "correlators": _run_correlators,
    "coeff-sweep": _run_coeff_sweep,
}


def run_scenario(s: Scenario, out_dir: str | Path | None = None, overrides: dict | None = None) -> dict:
    """Execute a scenario, write artifacts, and return the summary dict.

    The summary is also written to ``summary.json`` in the output directory.
    A hard gate failure still writes all artifacts; the status field and the
    process exit code carry the failure.
    """
    overrides = overrides or {}
    out = Path(out_dir) if out_dir else Path(s.out_dir or f"runs/{s.name}_{s.kind}")
    out.mkdir(parents=True, exist_ok=True)

    gates = None
    extra = {}
    if s.kind != "coeff-sweep":
        spec, pt = _prepare(s)
        gates = evaluate_gates(s, spec, pt)
        extra = {
            "carriers": [float(c) for c in pt.carriers],
            "tolerances": {
                "rtol": CLOSED_RTOL if s.kind == "closed" else OPEN_RTOL,
                "atol": ATOL,
                "freq_cap": closed_retention().freq_cap if s.kind == "closed" else open_retention().freq_cap,
            },
        }
        if s.kind in ("master", "trajectory", "correlators"):
            extra["truncation_retained"] = s.resolved_n_keep
    prov = build_provenance(s, overrides, extra)

    results = RUNNERS[s.kind](s, out, prov)

    status = "ok"
    if gates and gates["hard_failures"]:
        status = "gate_failed: " + ", ".join(gates["hard_failures"])
    summary = {
        "status": status,
        "scenario": s.to_dict(),
        "provenance": prov,
        "gates": gates,
        "results": results,
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


# ---------------------------------------------------------------------------
# argument handling


def _parse_overrides(pairs: list[str]) -> dict:
    out: dict[str, object] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ParseError(f"override {pair!r} is not of the form key=value")
        key, _, raw = pair.partition("=")
        key = key.strip()
        if not key:
            raise ParseError(f"override {pair!r} has an empty key")
        try:
            out[key] = yaml.safe_load(raw)
        except yaml.YAMLError:
            raise ParseError(f"override {pair!r} has an unparseable value") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonbundles",
        description="Run bundled or user-supplied simulation scenarios and write artifacts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="execute a scenario")
    runp.add_argument("scenario", help="bundled scenario name or path to a .scenario file")
    runp.add_argument("--kind", choices=["closed", "master", "trajectory", "correlators", "coeff-sweep"])
    runp.add_argument("--out-dir", help="artifact directory (default runs/<name>_<kind>)")
    runp.add_argument("--seed", type=int, help="override the scenario seed")
    runp.add_argument("--n-traj", type=int, help="override the trajectory count")
    runp.add_argument("--cycles", type=int, help="override the number of drive cycles")
    runp.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="dotted-path scenario override, e.g. pulses.width=2000 (repeatable)",
    )
    runp.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("list", help="list bundled scenarios")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if args.command == "list":
        for name in bundled_scenario_names():
            print(name)
        return EXIT_OK

    try:
        s = resolve_scenario(args.scenario)
        overrides = _parse_overrides(args.override)
        if args.kind:
            overrides["kind"] = args.kind
        if args.seed is not None:
            overrides["run.seed"] = args.seed
        if args.n_traj is not None:
            overrides["run.n_traj"] = args.n_traj
        if args.cycles is not None:
            overrides["run.cycles"] = args.cycles
        s = apply_overrides(s, overrides)
        summary = run_scenario(s, args.out_dir, overrides)
    except (ParseError, ValidationError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SimulationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    _print_summary(summary)
    return EXIT_OK if summary["status"] == "ok" else EXIT_NUMERICAL


def _print_summary(summary: dict) -> None:
    res = summary["results"]
    kind = summary["scenario"]["kind"]
    name = summary["scenario"]["name"]
    if kind == "closed":
        line = f"final {res['target_label']} population {res['final_target_population']:.4f}"
    elif kind == "master":
        best = res["peak_target_population"]
        line = (
            f"peak {res['target_label']} population {best['value']:.4f} at t={best['time']:.0f}"
            if best
            else "no population peak found"
        )
    elif kind == "trajectory":
        line = (
            f"{res['n_traj']} trajectories, fraction with exactly "
            f"{res['bundle_size']} emission jumps per cycle: {res['fraction_exact_bundle']:.3f}"
        )
    elif kind == "correlators":
        parts = [
            f"g{n}(0)={v['equal_time_value']:.3f}" for n, v in
            ((k.split("_")[0][1:], v) for k, v in res["correlators"].items())
        ]
        line = "; ".join(parts)
    else:
        line = f"{res['points']} sweep points"
    gates = summary.get("gates") or {}
    flags = []
    ad = gates.get("adiabaticity")
    if ad and ad.get("flagged"):
        flags.append(f"adiabaticity ratio {ad['max_ratio']:.3f} above {ad['threshold']}")
    rwa = gates.get("rwa")
    if rwa and rwa.get("flagged"):
        flags.append("retained-term bound above threshold")
    suffix = f"  [flags: {'; '.join(flags)}]" if flags else ""
    print(f"{name} ({kind}): {line}{suffix}  status={summary['status']}")


if __name__ == "__main__":
    sys.exit(main())
