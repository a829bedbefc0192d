"""Rebuild the fixture run directories used by the vitest suite.

Every directory mimics one completed solver run: the CSV artifacts are
written by the solver package's own ``TimeSeries`` writer so the renderer is
tested against the exact on-disk format, while the numbers themselves are
small synthetic curves chosen to exercise gaps, bands, bars and log axes.

Run from anywhere:

    python3 frontend/test/fixtures/regenerate.py
"""

import json
import shutil
from pathlib import Path

import numpy as np

from photonbundles.timeseries import TimeSeries

HERE = Path(__file__).resolve().parent

# target level, mediator level, start level, recorded statistic orders
LEVELS = {
    "two_photon": ("b2", "d0", "b0", [1, 2]),
    "three_photon": ("b3", "d1", "b1", [1, 3]),
    "four_photon": ("b4", "d0", "b0", [1, 2, 4]),
    "six_photon": ("b6", "d0", "b0", [1, 6]),
}

PERIOD = 84000.0


def _summary(path: Path, name: str, kind: str) -> None:
    payload = {
        "scenario": {"name": name, "kind": kind},
        "status": "completed",
        "provenance": {"package_version": "fixture", "scenario": name, "kind": kind},
    }
    with open(path / "summary.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)


def _prov(name: str, kind: str) -> dict:
    return {"package_version": "fixture", "scenario": name, "kind": kind}


def _ladder_columns(target: str, mediator: str, start: str, t: np.ndarray) -> dict:
    # smooth stand-ins: start drains into target through a small mediator bump
    u = (t - 0.35 * PERIOD) / (0.08 * PERIOD)
    transfer = 0.995 / (1.0 + np.exp(-u))
    cols = {}
    for m in range(8):
        cols[f"P_b{m}"] = np.full_like(t, 1e-6)
    for n in range(3):
        cols[f"P_d{n}"] = np.full_like(t, 1e-8)
    cols[f"P_{start}"] = 1.0 - transfer
    cols[f"P_{mediator}"] = 4e-4 * np.exp(-(u**2)) + 1e-9
    cols[f"P_{target}"] = transfer
    return cols


def _write_closed(name: str) -> None:
    target, mediator, start, _ = LEVELS[name]
    out = HERE / f"{name}_closed"
    out.mkdir(parents=True, exist_ok=True)
    t = np.linspace(0.0, 0.7 * PERIOD, 41)
    TimeSeries(t, _ladder_columns(target, mediator, start, t)).to_csv(
        out / "populations.csv", provenance=_prov(name, "closed")
    )
    _summary(out, name, "closed")


def _write_master(name: str) -> None:
    target, mediator, start, orders = LEVELS[name]
    out = HERE / f"{name}_master"
    out.mkdir(parents=True, exist_ok=True)
    t = np.linspace(0.0, PERIOD, 57)
    TimeSeries(t, _ladder_columns(target, mediator, start, t)).to_csv(
        out / "populations.csv", provenance=_prov(name, "master")
    )
    cols = {}
    for n in orders:
        g = 0.5 + 2.0 * np.exp(-(((t - 0.45 * PERIOD) / (0.1 * PERIOD)) ** 2))
        # first samples masked: no emission yet, statistic undefined
        g[:2] = np.nan
        # mid-cycle dropout exercises gap rendering
        g[20:22] = np.nan
        cols[f"g{n}_2"] = g / n
        cols[f"bundle{n}_intensity"] = 1e-3 * np.exp(
            -(((t - 0.5 * PERIOD) / (0.12 * PERIOD)) ** 2)
        )
    TimeSeries(t, cols, metadata={"orders": orders}).to_csv(
        out / "bundle_stats.csv", provenance=_prov(name, "master")
    )
    _summary(out, name, "master")


def _write_trajectory(name: str) -> None:
    target, mediator, start, _ = LEVELS[name]
    bundle = int(target[1:])
    out = HERE / f"{name}_trajectory"
    out.mkdir(parents=True, exist_ok=True)
    prov = _prov(name, "trajectory")
    t = np.linspace(0.0, PERIOD, 37)
    cols = _ladder_columns(target, mediator, start, t)
    cols.update({f"SE_{k[2:]}": np.full_like(t, 0.01) for k in list(cols)})
    TimeSeries(t, cols, metadata={"n_traj": 20}).to_csv(
        out / "mean_populations.csv", provenance=prov
    )
    with open(out / "jumps.csv", "w", newline="") as fh:
        fh.write("# provenance: " + json.dumps(prov, sort_keys=True) + "\n")
        fh.write("trajectory,time,channel,source,destination\r\n")
        for i in range(3):
            for k in range(bundle):
                fh.write(f"{i},{50000.0 + 300.0 * k!r},a,{target},b{bundle - 1 - k}\r\n")
    with open(out / "jump_histogram.csv", "w", newline="") as fh:
        fh.write("# provenance: " + json.dumps(prov, sort_keys=True) + "\n")
        fh.write("a_jumps_per_cycle,occurrences,fraction\r\n")
        for k, frac in ((0, 0.05), (bundle, 0.9), (bundle + 2, 0.05)):
            fh.write(f"{k},{int(round(20 * frac))},{frac!r}\r\n")
    _summary(out, name, "trajectory")


def _write_correlators(name: str) -> None:
    _, _, _, orders = LEVELS[name]
    out = HERE / f"{name}_correlators"
    out.mkdir(parents=True, exist_ok=True)
    tau = np.linspace(0.0, 30000.0, 31)
    for n in orders:
        zero = 3.0 if n == 1 else 0.4 / n
        g = zero + (1.0 - zero) * (1.0 - np.exp(-tau / 8000.0))
        den = np.full_like(tau, 2.5e-7)
        TimeSeries(
            tau,
            {f"g{n}_2": g, f"numerator_{n}": g * den, f"denominator_{n}": den},
            axis_name="tau",
            metadata={"anchor_time": 4500.0},
        ).to_csv(out / f"correlator_g{n}.csv", provenance=_prov(name, "correlators"))
    _summary(out, name, "correlators")


def _write_sweep() -> None:
    out = HERE / "fig2_sweep_coeff-sweep"
    out.mkdir(parents=True, exist_ok=True)
    lam = np.linspace(0.0, 1.5, 31)
    cols = {}
    for m in (2, 4, 6):
        cols[f"C0_{m}"] = (-0.6) ** (m // 2) * np.tanh(lam) ** m
    for m in (3, 5, 7):
        cols[f"C1_{m}"] = (-0.5) ** (m // 2) * np.tanh(lam) ** (m - 1)
    TimeSeries(lam, cols, axis_name="coupling", metadata={"n_fock": 40}).to_csv(
        out / "coefficients.csv", provenance=_prov("fig2_sweep", "coeff-sweep")
    )
    _summary(out, "fig2_sweep", "coeff-sweep")


def _write_broken() -> None:
    # master directory whose statistics file lost a column
    src = HERE / "two_photon_master"
    out = HERE / "broken_missing_column"
    if out.exists():
        shutil.rmtree(out)
    shutil.copytree(src, out)
    stats = (out / "bundle_stats.csv").read_text()
    (out / "bundle_stats.csv").write_text(stats.replace("g2_2", "g2_x"))

    # master directory missing the statistics file entirely
    out = HERE / "broken_missing_file"
    if out.exists():
        shutil.rmtree(out)
    shutil.copytree(src, out)
    (out / "bundle_stats.csv").unlink()

    # closed directory whose populations file has no rows at all
    out = HERE / "broken_empty_csv"
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "populations.csv", "w") as fh:
        fh.write("# provenance: " + json.dumps(_prov("two_photon", "closed")) + "\n")
    _summary(out, "two_photon", "closed")


def main() -> None:
    for name in LEVELS:
        _write_closed(name)
        _write_master(name)
        _write_trajectory(name)
        _write_correlators(name)
    _write_sweep()
    _write_broken()
    print(f"fixtures written under {HERE}")


if __name__ == "__main__":
    main()
