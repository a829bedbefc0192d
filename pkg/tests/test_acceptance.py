"""End-to-end gates over the bundled scenarios.

Every test here pins one headline quantity of the shipped pipeline at its
stated tolerance, driving the bundled scenario files through the same entry
points a user would call.  Known shortfalls are strict-xfail with the
measured numbers in the reason, so they stay visible without hiding
regressions; tolerances are never widened to make a line pass.

The module reruns the heavy ensembles, so it is by far the slowest part of
the suite (tens of minutes).  Everything is deterministic: seeds come from
the scenario files or are pinned below.
"""

import dataclasses
import json
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from photonbundles import cli, mcwf
from photonbundles import dynamics as dyn
from photonbundles.drive import PulseTrain, with_solved_carriers
from photonbundles.effective import analytic_g2_equal_time, build_lambda_system, hamiltonian_at
from photonbundles.hilbert import ModelParams, SpaceConfig
from photonbundles.rabi import compute_spectrum
from photonbundles.timeseries import TimeSeries

SCENARIOS = ("two_photon", "three_photon", "four_photon", "six_photon")

# headline transfer probabilities of the four dissipative scenarios
PEAK_TARGETS = {
    "two_photon": 0.713,
    "three_photon": 0.326,
    "four_photon": 0.575,
    "six_photon": 0.421,
}


def _run(name: str, kind: str, out: Path, *overrides: str):
    args = ["run", name, "--kind", kind, "--out-dir", str(out)]
    for ov in overrides:
        args += ["--override", ov]
    code = cli.main(args)
    with open(out / "summary.json") as fh:
        return code, json.load(fh)


def _ladder(s):
    tgt = s.target
    return (f"b{tgt.M}", f"d{tgt.n}", f"b{2 * tgt.m + tgt.M}")


def _build(s, n_keep=None):
    spec = compute_spectrum(s.model, s.space.n_fock)
    pt = with_solved_carriers(s.pulse_train(), spec, s.model, s.target)
    basis = dyn.build_dressed_basis(spec, s.model, s.space, n_keep=n_keep)
    channels = dyn.build_jump_channels(basis, s.decay, s.space)
    return spec, pt, basis, channels


# ---------------------------------------------------------------------------
# shared runs (module scope: each heavy computation happens once)


@pytest.fixture(scope="module")
def closed_runs(tmp_path_factory):
    out = {}
    for name in SCENARIOS:
        d = tmp_path_factory.mktemp(f"closed_{name}")
        out[name] = (*_run(name, "closed", d), d)
    return out


@pytest.fixture(scope="module")
def peak_runs(tmp_path_factory):
    out = {}
    for name in SCENARIOS:
        d = tmp_path_factory.mktemp(f"master_{name}")
        out[name] = (*_run(name, "master", d, "run.cycles=1", "run.points_per_cycle=281"), d)
    return out


@pytest.fixture(scope="module")
def correlator_runs(tmp_path_factory):
    out = {}
    for name, orders in (("two_photon", "[1,2]"), ("four_photon", "[1,4]")):
        d = tmp_path_factory.mktemp(f"corr_{name}")
        out[name] = (*_run(name, "correlators", d,
                           f"run.correlator_orders={orders}",
                           "run.tau_points=60",
                           "run.points_per_cycle=360"), d)
    return out


@pytest.fixture(scope="module")
def two_photon_ensemble():
    s = cli.resolve_scenario("two_photon")
    spec, pt, basis, channels = _build(s, n_keep=s.resolved_n_keep)
    grid = np.linspace(0.0, pt.period, 36)
    ens = mcwf.ensemble_average(
        basis, channels, pt, basis.unit_state(s.initial_state), grid,
        n_traj=500, seed0=s.seed, target=s.target,
    )
    master = dyn.propagate_master(
        basis, channels, pt, dyn.DensityMatrix.pure(basis, s.initial_state), grid,
        target=s.target, rtol=1e-7,
    )
    return {"pt": pt, "basis": basis, "ens": ens, "master": master}


@pytest.fixture(scope="module")
def four_photon_ensemble():
    s = cli.resolve_scenario("four_photon")
    spec, pt, basis, channels = _build(s, n_keep=s.resolved_n_keep)
    grid = np.linspace(0.0, pt.period, 36)
    # pinned sampling seed for the frozen histogram below
    ens = mcwf.ensemble_average(
        basis, channels, pt, basis.unit_state(s.initial_state), grid,
        n_traj=300, seed0=413, target=s.target,
    )
    return {"pt": pt, "ens": ens}


# ---------------------------------------------------------------------------
# gates


class TestParityStructure:
    """Selection-rule zeros in the coupled-block eigenvectors are exact."""

    @pytest.mark.parametrize("coupling", [0.3, 0.6, 1.2])
    def test_cross_parity_coefficients_vanish(self, coupling):
        spec = compute_spectrum(ModelParams(coupling=coupling), 40, check_convergence=False)
        ks = np.arange(spec.n_fock)
        for n in range(spec.eigenvalues.size):
            g, e = spec.coeff_g[n], spec.coeff_e[n]
            if spec.parity[n] == 1:
                worst = max(np.abs(g[ks % 2 == 1]).max(), np.abs(e[ks % 2 == 0]).max())
            else:
                worst = max(np.abs(g[ks % 2 == 0]).max(), np.abs(e[ks % 2 == 1]).max())
            assert worst < 1e-10


class TestClosedTransfer:
    """Drive-only runs: near-unit transfer through the dark state."""

    def test_fidelity_containment_and_effective_model(self, closed_runs):
        for name in SCENARIOS:
            code, summary, out = closed_runs[name]
            assert code == 0, name
            r = summary["results"]
            assert r["final_target_population"] >= 0.99, name
            assert r["final_other_population"] <= 5e-3, name
            assert self._effective_gap(name, out) <= 0.02, name

    @staticmethod
    def _effective_gap(name, out):
        # pointwise gap between the exact ladder populations and the
        # three-level model propagated on the same grid
        s = cli.resolve_scenario(name)
        series = TimeSeries.from_csv(out / "populations.csv")
        spec = compute_spectrum(s.model, s.space.n_fock)
        pt = with_solved_carriers(s.pulse_train(), spec, s.model, s.target)
        sys3 = build_lambda_system(spec, pt, s.target)
        ladder = _ladder(s)
        y0 = np.zeros(3, dtype=complex)
        y0[ladder.index(s.initial_state)] = 1.0
        t = series.axis
        sol = solve_ivp(
            lambda tt, y: -1j * (hamiltonian_at(sys3, tt) @ y),
            (t[0], t[-1]), y0, t_eval=t, rtol=1e-10, atol=1e-12, method="DOP853",
        )
        pops = np.abs(sol.y.T) ** 2
        return max(
            float(np.max(np.abs(pops[:, i] - series.column(f"P_{lb}"))))
            for i, lb in enumerate(ladder)
        )

    @pytest.mark.xfail(
        strict=True,
        reason="frozen mediator residue at the bundled operating points exceeds the "
        "5e-4 budget (measured 5.3e-4 / 4.7e-4 / 7.6e-4 / 2.4e-3 for the two-, three-, "
        "four-, six-photon scenarios); an uncapped term model makes it larger, so the "
        "overshoot is physics of these drive parameters, not truncation",
    )
    def test_mediator_residue_budget(self, closed_runs):
        for name in SCENARIOS:
            _, summary, _ = closed_runs[name]
            assert summary["results"]["final_mediator_population"] <= 5e-4, name


class TestDissipativePeaks:
    """Transfer peaks with all decay channels open."""

    def test_peak_target_population(self, peak_runs):
        for name, want in PEAK_TARGETS.items():
            code, summary, _ = peak_runs[name]
            assert code == 0, name
            got = summary["results"]["peak_target_population"]["value"]
            assert got == pytest.approx(want, abs=0.03), name


class TestDarkStatePrediction:
    """Equal-time statistic of the plain field vs the transfer-mixture estimate."""

    @pytest.fixture(scope="class")
    def comparison(self, peak_runs):
        code, summary, out = peak_runs["two_photon"]
        assert code == 0
        stats = TimeSeries.from_csv(out / "bundle_stats.csv")
        s = cli.resolve_scenario("two_photon")
        spec = compute_spectrum(s.model, s.space.n_fock)
        pt = with_solved_carriers(s.pulse_train(), spec, s.model, s.target)
        sys3 = build_lambda_system(spec, pt, s.target)
        # comparison window: transfer onset to the end of the pulse pair
        sel = (stats.axis >= 4000.0) & (stats.axis <= max(pt.center_first) + pt.width)
        t = stats.axis[sel]
        g1 = stats.column("g1_2")[sel]
        h = np.array([hamiltonian_at(sys3, tt) for tt in t])
        theta = np.arctan2(np.abs(h[:, 0, 1]), np.abs(h[:, 1, 2]))
        return t, g1, analytic_g2_equal_time(theta)

    @pytest.mark.xfail(
        strict=True,
        reason="the mixture estimate assumes the exact moments track the instantaneous "
        "dark state; they lag it early in the window (deviation 1.8x at t=4000, with "
        "excursions past 10% until t~5900, roughly the first fifth of the window)",
    )
    def test_within_ten_percent_over_window(self, comparison):
        t, g1, ana = comparison
        assert np.all(np.abs(g1 - ana) <= 0.1 * ana)

    def test_end_of_window_value(self, comparison):
        t, g1, ana = comparison
        assert g1[-1] == pytest.approx(0.5, abs=0.05)


class TestBundleStatistics:
    """Equal-time extremes and delayed ordering at the located anchors."""

    def test_statistic_extremes_and_delayed_ordering(self, correlator_runs):
        for name, n in (("two_photon", 2), ("four_photon", 4)):
            code, summary, _ = correlator_runs[name]
            assert code == 0, name
            cs = summary["results"]["correlators"]
            plain, bundle = cs["g1_2"], cs[f"g{n}_2"]
            # super-Poissonian peak of the plain statistic, sub-Poissonian
            # dip of the bundle statistic, both inside the emission window
            assert plain["equal_time_value"] > 1.0, name
            assert bundle["equal_time_value"] < 1.0, name
            assert plain["fraction_tau_below_equal_time"] >= 0.95, name
            assert bundle["fraction_tau_above_equal_time"] >= 0.95, name


class TestOracleEquivalences:
    """Independent cross-checks of the dissipative machinery."""

    def test_cascade_matches_rate_equations(self):
        # drive off, cavity decay only: the photon ladder is a death process
        # with binomial occupation probabilities
        kappa = 1e-3
        p = ModelParams(omega_b=-6.0, coupling=0.6)
        cfg = SpaceConfig(n_fock=8)
        spec = compute_spectrum(p, 8, check_convergence=False)
        basis = dyn.build_dressed_basis(spec, p, cfg, n_keep=4)
        channels = dyn.build_jump_channels(basis, dyn.DecayRates(a=kappa, ge=0.0, bg=0.0), cfg)
        pt = PulseTrain(amp_peak=(1e-30, 1e-30), center_first=(100.0, 80.0),
                        width=100.0, period=5000.0, n_cycles=1, carriers=(1.0, 2.0))
        t_grid = np.linspace(0.0, 2.0 / kappa, 9)
        res = dyn.propagate_master(
            basis, channels, pt, dyn.DensityMatrix.pure(basis, "b2"), t_grid, rtol=1e-9
        )
        surv = np.exp(-kappa * t_grid)
        assert np.max(np.abs(res.population("b2") - surv**2)) < 1e-4
        assert np.max(np.abs(res.population("b1") - 2 * surv * (1 - surv))) < 1e-4
        assert np.max(np.abs(res.population("b0") - (1 - surv) ** 2)) < 1e-4

    def test_ensemble_tracks_master_within_three_standard_errors(self, two_photon_ensemble):
        ens = two_photon_ensemble["ens"]
        master = two_photon_ensemble["master"]
        worst = 0.0
        for lb in two_photon_ensemble["basis"].labels:
            pm = np.clip(master.population(lb), 0.0, 1.0)
            # binomial floor keeps nearly-empty bins from dividing by zero
            floor = np.sqrt(pm * (1.0 - pm) / ens.n_traj)
            se = np.maximum(np.maximum(ens.se_populations.column(f"P_{lb}"), floor), 1e-12)
            z = np.abs(ens.mean_populations.column(f"P_{lb}") - master.population(lb)) / se
            worst = max(worst, float(z.max()))
        assert worst <= 3.0  # measured 2.44 with 500 trajectories

    def test_dissipator_phase_gauge(self):
        # populations cannot depend on the arbitrary phase of each dressed column
        s = cli.resolve_scenario("two_photon")
        spec, pt, basis, channels = _build(s, n_keep=s.resolved_n_keep)
        rng = np.random.default_rng(7)
        ph = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, basis.size))
        twisted = dataclasses.replace(basis, transform=basis.transform * ph[None, :])
        t_grid = np.linspace(3000.0, 9000.0, 40)
        rho0 = dyn.DensityMatrix.pure(basis, s.initial_state)
        kw = dict(target=s.target, rtol=1e-7)
        res_a = dyn.propagate_master(basis, channels, pt, rho0, t_grid, **kw)
        res_b = dyn.propagate_master(
            twisted, dyn.build_jump_channels(twisted, s.decay, s.space), pt, rho0, t_grid, **kw
        )
        dev = max(
            float(np.max(np.abs(res_a.population(lb) - res_b.population(lb))))
            for lb in basis.labels
        )
        assert dev < 1e-10

    def test_truncation_doubling_shifts_below_tolerance(self):
        s = cli.resolve_scenario("two_photon")

        def closed_finals(n_fock):
            scaled = dataclasses.replace(s, space=SpaceConfig(n_fock=n_fock))
            spec = compute_spectrum(scaled.model, n_fock)
            pt = with_solved_carriers(scaled.pulse_train(), spec, scaled.model, scaled.target)
            basis = dyn.build_dressed_basis(spec, scaled.model, scaled.space)
            table = dyn.build_term_table(basis, pt, retention=dyn.closed_retention(),
                                         target=scaled.target)
            grid = np.linspace(0.0, max(pt.center_first) + 3.0 * pt.width, 121)
            res = dyn.propagate_closed(table, basis.unit_state(s.initial_state), grid, rtol=1e-9)
            ladder = _ladder(s)
            rest = sum(res.population(lb)[-1] for lb in basis.labels if lb not in ladder)
            return np.array([res.population(ladder[2])[-1], res.population(ladder[1])[-1], rest])

        def open_peak(n_fock, n_keep):
            scaled = dataclasses.replace(s, space=SpaceConfig(n_fock=n_fock))
            spec, pt, basis, channels = _build(scaled, n_keep=n_keep)
            grid = np.linspace(0.0, 12000.0, 130)
            res = dyn.propagate_master(
                basis, channels, pt, dyn.DensityMatrix.pure(basis, s.initial_state), grid,
                target=s.target, rtol=1e-7,
            )
            return float(np.max(res.population(_ladder(s)[2])))

        assert np.max(np.abs(closed_finals(40) - closed_finals(80))) < 1e-3
        assert abs(open_peak(40, 12) - open_peak(80, 24)) < 1e-3


class TestTrajectoryJumpStructure:
    """Per-cycle emission jump counts match the bundle size."""

    def test_two_photon_cycles_release_exactly_two(self, two_photon_ensemble):
        js = mcwf.jump_statistics(two_photon_ensemble["ens"], two_photon_ensemble["pt"],
                                  channel="a")
        assert sum(js.count_histogram.values()) == 500
        # measured histogram {2: 489, 4: 10, 1: 1}
        assert js.fraction_with(2) >= 0.9, f"histogram {js.count_histogram}"

    def test_four_photon_cycles_release_exactly_four(self, four_photon_ensemble):
        js = mcwf.jump_statistics(four_photon_ensemble["ens"], four_photon_ensemble["pt"],
                                  channel="a")
        assert sum(js.count_histogram.values()) == 300
        # remainder reflects the imperfect transfer; measured {4: 298, 0: 2}
        assert js.fraction_with(4) >= 0.8, f"histogram {js.count_histogram}"
