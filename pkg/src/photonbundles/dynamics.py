"""Time evolution in the dressed interaction picture.

The propagation basis concatenates the reservoir-level product states
|b,0> .. |b,n_fock-1> with a retained set of dressed states of the coupled
block, ordered by energy.  The static Hamiltonian is diagonal there, so the
interaction picture turns the two-tone drive into a table of rotating terms
(one per dressed state, reservoir occupation, drive, and sideband sign) and
turns every rank-1 decay channel into itself times a pure phase, which the
dissipator does not see.

Retention policy: terms rotating faster than a cap are dropped.  A term of
amplitude A and detuning D perturbs populations at order (A/D)^2, which for
the pulse parameters in the bundled scenarios is far below every acceptance
tolerance once |D| exceeds a few cavity frequencies; the cap defaults are
chosen with measured convergence margins (see the tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _engine
from .drive import BundleTarget, PulseTrain, envelope
from .errors import (
    PositivityViolation,
    StepSizeUnderflow,
    ValidationError,
    ZeroDenominator,
)
from .hilbert import ModelParams, SpaceConfig, build_atomic_flip, build_quadrature
from .rabi import RabiSpectrum
from .timeseries import TimeSeries

ENERGY_ORDER_TOL = 1e-9
CHANNEL_RATE_FLOOR_REL = 1e-16
DENOM_FLOOR = 1e-14


def default_retained_count(tgt: BundleTarget) -> int:
    """Dressed states kept in the propagation basis for a given target."""
    return 2 * tgt.bundle_size + 8


@dataclass(frozen=True)
class DressedBasis:
    """Propagation basis: reservoir sector plus retained dressed states.

    labels name each state ("b3" is |b,3>, "d1" is the second dressed state
    by energy); energies holds the static eigenvalues and transform embeds
    each basis state as a column in the product space.
    """

    labels: tuple[str, ...]
    energies: np.ndarray
    transform: np.ndarray
    n_b: int
    n_dressed: int
    params: ModelParams
    spectrum: RabiSpectrum

    @property
    def size(self) -> int:
        return self.n_b + self.n_dressed

    def index_b(self, m: int) -> int:
        if not 0 <= m < self.n_b:
            raise IndexError(f"reservoir occupation {m} outside basis")
        return m

    def index_dressed(self, k: int) -> int:
        if not 0 <= k < self.n_dressed:
            raise IndexError(f"dressed index {k} outside retained set")
        return self.n_b + k

    def unit_state(self, label: str) -> np.ndarray:
        psi = np.zeros(self.size, dtype=complex)
        psi[self.labels.index(label)] = 1.0
        return psi


def build_dressed_basis(
    spec: RabiSpectrum, p: ModelParams, cfg: SpaceConfig, n_keep: int | None = None
) -> DressedBasis:
    """Assemble the propagation basis from a diagonalized coupled block.

    n_keep limits the retained dressed states (None keeps all 2*n_fock, in
    which case the transform is square and unitary).
    """
    if spec.n_fock != cfg.n_fock:
        raise ValidationError("spectrum and space truncation disagree")
    if n_keep is None:
        n_keep = spec.n_states
    if not 1 <= n_keep <= spec.n_states:
        raise ValidationError(f"cannot keep {n_keep} of {spec.n_states} dressed states")
    n_b = cfg.n_fock
    labels = tuple(f"b{m}" for m in range(n_b)) + tuple(f"d{k}" for k in range(n_keep))
    energies = np.concatenate(
        [p.omega_b + p.omega_c * np.arange(n_b), spec.eigenvalues[:n_keep]]
    )
    transform = np.zeros((cfg.dim, n_b + n_keep), dtype=complex)
    for m in range(n_b):
        transform[cfg.index("b", m), m] = 1.0
    for k in range(n_keep):
        transform[:, n_b + k] = spec.eigenvector_composite(k, cfg)
    return DressedBasis(labels, energies, transform, n_b, n_keep, p, spec)


@dataclass(frozen=True)
class TermRetention:
    """Which rotating terms of the drive survive in the propagation.

    freq_cap drops terms rotating faster than this (in cavity-frequency
    units); amp_floor drops terms whose peak amplitude is negligible (this
    removes the exact parity zeros); b_occ_max, when set, drops terms
    acting on reservoir occupations above it.
    """

    freq_cap: float = math.inf
    amp_floor: float = 1e-12
    b_occ_max: int | None = None


def closed_retention() -> TermRetention:
    """Default retention for norm-preserving runs (tight tolerances)."""
    return TermRetention(freq_cap=8.0)


def open_retention() -> TermRetention:
    """Default retention for dissipative runs (tolerances set by decay scales)."""
    return TermRetention(freq_cap=2.5)


@dataclass(frozen=True)
class TermTable:
    """Flat rotating-term representation of the drive Hamiltonian."""

    n_states: int
    labels: tuple[str, ...]
    rows: np.ndarray
    cols: np.ndarray
    amps: np.ndarray
    freqs: np.ndarray
    pulse: np.ndarray
    pulse_params: np.ndarray
    energies: np.ndarray

    @property
    def n_terms(self) -> int:
        return self.rows.size

    def max_frequency(self) -> float:
        return float(np.max(np.abs(self.freqs))) if self.freqs.size else 0.0


def _pulse_params(pt: PulseTrain) -> np.ndarray:
    return np.array(
        [pt.center_first[0], pt.center_first[1], pt.width, pt.period, float(pt.n_cycles)],
        dtype=float,
    )


def build_term_table(
    basis: DressedBasis,
    pt: PulseTrain,
    retention: TermRetention | None = None,
    target: BundleTarget | None = None,
) -> TermTable:
    """Expand the two-tone drive into rotating terms in the dressed basis.

    When a target is given, the two slow terms that implement its transfer
    legs are verified to survive retention (a misconfigured cap would
    silently remove the physics).
    """
    if min(pt.carriers) <= 0:
        raise ValidationError("carriers must be solved before building the term table")
    ret = retention or TermRetention()
    spec = basis.spectrum
    p = basis.params
    b_max = basis.n_b - 1 if ret.b_occ_max is None else min(ret.b_occ_max, basis.n_b - 1)

    rows, cols, amps, freqs, pulses = [], [], [], [], []
    for k in range(basis.n_dressed):
        row = basis.index_dressed(k)
        e_gap_base = spec.eigenvalues[k] - p.omega_b
        for m in range(b_max + 1):
            c_coef = spec.coefficient(k, m)
            for l in (1, 2):
                amp = 0.5 * c_coef * pt.amp_peak[l - 1]
                if abs(amp) < ret.amp_floor:
                    continue
                for sgn in (1.0, -1.0):
                    freq = e_gap_base - m * p.omega_c + sgn * pt.carriers[l - 1]
                    if abs(freq) > ret.freq_cap:
                        continue
                    rows.append(row)
                    cols.append(m)
                    amps.append(amp)
                    freqs.append(freq)
                    pulses.append(l - 1)

    table = TermTable(
        n_states=basis.size,
        labels=basis.labels,
        rows=np.array(rows, dtype=np.int64),
        cols=np.array(cols, dtype=np.int64),
        amps=np.array(amps, dtype=float),
        freqs=np.array(freqs, dtype=float),
        pulse=np.array(pulses, dtype=np.int64),
        pulse_params=_pulse_params(pt),
        energies=basis.energies.copy(),
    )
    if target is not None:
        for l, m in ((1, target.M), (2, target.bundle_size)):
            hit = (
                (table.rows == basis.index_dressed(target.n))
                & (table.cols == m)
                & (table.pulse == l - 1)
                & (np.abs(table.freqs - target.detuning) < 1e-9)
            )
            if not np.any(hit):
                raise ValidationError(
                    f"retention removed the resonant leg of drive {l} "
                    f"(occupation {m}); relax freq_cap/amp_floor or fix carriers"
                )
    return table


def effective_term_table(spec: RabiSpectrum, pt: PulseTrain, tgt: BundleTarget) -> TermTable:
    """Term table of the reduced three-level model, same engine as the full one.

    Basis order (|b,M>, dressed mediator, |b,2m+M>); labels match the full
    dressed basis so population columns line up across the two propagations.
    """
    c1 = spec.coefficient(tgt.n, tgt.M)
    c2 = spec.coefficient(tgt.n, tgt.bundle_size)
    labels = (f"b{tgt.M}", f"d{tgt.n}", f"b{tgt.bundle_size}")
    rows = [1, 1]
    cols = [0, 2]
    amps = [0.5 * c1 * pt.amp_peak[0], 0.5 * c2 * pt.amp_peak[1]]
    freqs = [0.0, 0.0]
    pulses = [0, 1]
    if tgt.detuning != 0.0:
        rows.append(1)
        cols.append(1)
        amps.append(tgt.detuning)
        freqs.append(0.0)
        pulses.append(-1)
    return TermTable(
        n_states=3,
        labels=labels,
        rows=np.array(rows, dtype=np.int64),
        cols=np.array(cols, dtype=np.int64),
        amps=np.array(amps, dtype=float),
        freqs=np.array(freqs, dtype=float),
        pulse=np.array(pulses, dtype=np.int64),
        pulse_params=_pulse_params(pt),
        energies=np.zeros(3),
    )


def build_interaction_hamiltonian(
    basis: DressedBasis,
    pt: PulseTrain,
    t: float,
    retention: TermRetention | None = None,
) -> np.ndarray:
    """Dense drive Hamiltonian in the rotating frame at one instant."""
    table = build_term_table(basis, pt, retention)
    h = np.zeros((basis.size, basis.size), dtype=complex)
    e1, e2 = envelope(pt, 1, t) / pt.amp_peak[0], envelope(pt, 2, t) / pt.amp_peak[1]
    env = {-1: 1.0, 0: e1, 1: e2}
    for i in range(table.n_terms):
        c = table.amps[i] * env[int(table.pulse[i])] * np.exp(1j * table.freqs[i] * t)
        r, q = table.rows[i], table.cols[i]
        h[r, q] += c
        if r != q:
            h[q, r] += np.conj(c)
    return h


@dataclass(frozen=True)
class DecayRates:
    """Bath coupling rates (cavity, upper atomic transition, lower one)."""

    a: float = 1e-4
    ge: float = 1e-4
    bg: float = 1e-4

    def __post_init__(self):
        if min(self.a, self.ge, self.bg) < 0:
            raise ValidationError("decay rates must be nonnegative")


@dataclass(frozen=True)
class JumpChannel:
    """Rank-1 lowering channel |dst><src| with its golden-rule rate."""

    channel: str
    src: int
    dst: int
    rate: float


def build_jump_channels(
    basis: DressedBasis, rates: DecayRates, cfg: SpaceConfig
) -> list[JumpChannel]:
    """All energy-lowering transitions of the three bath coupling operators.

    The rate of (src -> dst) through operator A is kappa * |<dst|A|src>|^2,
    keeping only pairs with E_src > E_dst (zero-temperature bath, constant
    spectral density).
    """
    t_mat = basis.transform
    ops = {
        "a": (rates.a, build_quadrature(cfg).dense()),
        "ge": (rates.ge, build_atomic_flip("g", "e", cfg).dense()),
        "bg": (rates.bg, build_atomic_flip("b", "g", cfg).dense()),
    }
    chans: list[JumpChannel] = []
    e = basis.energies
    for name, (kappa, op) in ops.items():
        if kappa == 0.0:
            continue
        w = t_mat.conj().T @ op @ t_mat
        floor = kappa * CHANNEL_RATE_FLOOR_REL
        for src in range(basis.size):
            for dst in range(basis.size):
                if e[src] <= e[dst] + ENERGY_ORDER_TOL:
                    continue
                rate = kappa * abs(w[dst, src]) ** 2
                if rate > floor:
                    chans.append(JumpChannel(name, src, dst, float(rate)))
    return chans


def _channel_arrays(basis_size: int, channels: list[JumpChannel]):
    src = np.array([c.src for c in channels], dtype=np.int64)
    dst = np.array([c.dst for c in channels], dtype=np.int64)
    rate = np.array([c.rate for c in channels], dtype=float)
    gamma = np.zeros(basis_size)
    np.add.at(gamma, src, rate)
    return src, dst, rate, gamma


@dataclass(frozen=True)
class DensityMatrix:
    """State of the open system in the propagation basis."""

    dim: int
    entries: np.ndarray
    time_tag: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.entries)
        if m.shape != (self.dim, self.dim):
            raise ValidationError("density matrix shape disagrees with dim")
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValidationError("density matrix is not Hermitian")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > 1e-6:
            raise ValidationError(f"trace is {tr}, not 1")

    @staticmethod
    def pure(basis: DressedBasis, label: str, time_tag: float = 0.0) -> "DensityMatrix":
        psi = basis.unit_state(label)
        return DensityMatrix(basis.size, np.outer(psi, psi.conj()), time_tag)


def _population_series(times, pops, labels, metadata) -> TimeSeries:
    cols = {f"P_{labels[i]}": pops[:, i].copy() for i in range(len(labels))}
    return TimeSeries(np.asarray(times, dtype=float), cols, metadata=metadata)


@dataclass(frozen=True)
class ClosedResult:
    """Norm-preserving propagation output sampled on the request grid."""

    times: np.ndarray
    states: np.ndarray
    populations: TimeSeries
    norm_drift: float
    n_steps: int

    def population(self, label: str) -> np.ndarray:
        return self.populations.column(f"P_{label}")


def _auto_steps(table: TermTable, hmax: float | None, h0: float | None):
    width = table.pulse_params[2]
    fmax = table.max_frequency()
    if hmax is None:
        hmax = 0.5 * width
    if h0 is None:
        h0 = min(0.05, 0.2 / max(1.0, fmax))
    return float(h0), float(hmax)


def propagate_closed(
    table: TermTable,
    psi0: np.ndarray,
    t_grid,
    *,
    rtol: float = 1e-8,
    atol: float = 1e-12,
    hmax: float | None = None,
    h0: float | None = None,
) -> ClosedResult:
    """Integrate the rotating-frame Schroedinger equation on a sample grid."""
    t_grid = np.asarray(t_grid, dtype=float)
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-9:
        raise ValidationError("initial state must be normalized")
    if psi0.size != table.n_states:
        raise ValidationError("state dimension disagrees with the term table")
    h0, hmax = _auto_steps(table, hmax, h0)
    gamma = np.zeros(table.n_states)
    states, n_steps, status = _engine._propagate_psi(
        t_grid, psi0, table.rows, table.cols, table.amps, table.freqs,
        table.pulse, table.pulse_params, gamma, rtol, atol, h0, hmax,
    )
    if status == 1:
        raise StepSizeUnderflow("adaptive step collapsed below the floor")
    norms = np.linalg.norm(states, axis=1)
    pops = np.abs(states) ** 2
    series = _population_series(t_grid, pops, table.labels, {"kind": "closed"})
    series.columns["norm"] = norms
    return ClosedResult(t_grid, states, series, float(np.max(np.abs(norms - 1.0))), int(n_steps))


@dataclass(frozen=True)
class MasterResult:
    """Dissipative propagation output.

    expectations maps observable names to complex series sampled on the
    grid (lab-frame values; the sampling undoes the interaction-picture
    phases).  snapshots holds the interaction-picture density matrices
    requested via snapshot_indices.
    """

    times: np.ndarray
    populations: TimeSeries
    expectations: dict[str, np.ndarray]
    snapshots: list[DensityMatrix]
    rho_final: DensityMatrix
    trace_drift: float
    herm_dev: float
    min_population: float
    n_steps: int

    def population(self, label: str) -> np.ndarray:
        return self.populations.column(f"P_{label}")


def rho_to_lab(basis_or_energies, rho: np.ndarray, t: float) -> np.ndarray:
    """Undo the interaction-picture phases of a density matrix at time t."""
    e = (
        basis_or_energies.energies
        if isinstance(basis_or_energies, DressedBasis)
        else np.asarray(basis_or_energies, dtype=float)
    )
    phase = np.exp(-1j * e * t)
    return phase[:, None] * rho * phase.conj()[None, :]


def rho_to_interaction(basis_or_energies, rho_lab: np.ndarray, t: float) -> np.ndarray:
    """Inverse of rho_to_lab."""
    e = (
        basis_or_energies.energies
        if isinstance(basis_or_energies, DressedBasis)
        else np.asarray(basis_or_energies, dtype=float)
    )
    phase = np.exp(1j * e * t)
    return phase[:, None] * rho_lab * phase.conj()[None, :]


def propagate_master(
    basis: DressedBasis,
    channels: list[JumpChannel],
    pt: PulseTrain,
    rho0: DensityMatrix,
    t_grid,
    *,
    retention: TermRetention | None = None,
    target: BundleTarget | None = None,
    observables: dict[str, np.ndarray] | None = None,
    snapshot_indices=None,
    rtol: float = 1e-7,
    atol: float = 1e-12,
    hmax: float | None = None,
    h0: float | None = None,
    positivity_tol: float = 1e-6,
    check_positivity: bool = True,
) -> MasterResult:
    """Integrate the dressed-basis master equation on a sample grid.

    Coherent dynamics comes from the retained drive terms (default
    open-system retention); every decay channel acts as a time-independent
    rank-1 dissipator.  Observables are D x D lab-frame matrices whose
    phased expectation values are sampled at every grid point.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if rho0.dim != basis.size:
        raise ValidationError("initial density matrix dimension disagrees with basis")
    table = build_term_table(basis, pt, retention or open_retention(), target)
    src, dst, rate, gamma = _channel_arrays(basis.size, channels)
    obs_names = list(observables) if observables else []
    obs = (
        np.stack([np.asarray(observables[k], dtype=complex) for k in obs_names])
        if obs_names
        else np.zeros((0, basis.size, basis.size), dtype=complex)
    )
    snap_idx = (
        np.asarray(sorted(snapshot_indices), dtype=np.int64)
        if snapshot_indices is not None
        else np.zeros(0, dtype=np.int64)
    )
    h0, hmax = _auto_steps(table, hmax, h0)
    pops, obs_vals, snaps, rho_final, n_steps, status = _engine._propagate_rho(
        t_grid, np.asarray(rho0.entries, dtype=complex), table.rows, table.cols,
        table.amps, table.freqs, table.pulse, table.pulse_params, gamma,
        src, dst, rate, basis.energies, obs, snap_idx, rtol, atol, h0, hmax,
    )
    if status == 1:
        raise StepSizeUnderflow("adaptive step collapsed below the floor")

    trace_drift = float(np.max(np.abs(pops.sum(axis=1) - 1.0)))
    herm_dev = float(np.max(np.abs(rho_final - rho_final.conj().T)))
    min_pop = float(pops.min())
    if check_positivity:
        if min_pop < -positivity_tol:
            raise PositivityViolation(
                f"population fell to {min_pop:.3e}; tighten integrator tolerances"
            )
        eigs = np.linalg.eigvalsh(0.5 * (rho_final + rho_final.conj().T))
        if float(eigs.min()) < -positivity_tol:
            raise PositivityViolation(
                f"final state eigenvalue {eigs.min():.3e}; tighten integrator tolerances"
            )
    series = _population_series(t_grid, pops, basis.labels, {"kind": "master"})
    expectations = {k: obs_vals[:, i].copy() for i, k in enumerate(obs_names)}
    snapshots = [
        DensityMatrix(basis.size, snaps[i], float(t_grid[snap_idx[i]]))
        for i in range(snap_idx.size)
    ]
    return MasterResult(
        t_grid, series, expectations, snapshots,
        DensityMatrix(basis.size, rho_final, float(t_grid[-1])),
        trace_drift, herm_dev, min_pop, int(n_steps),
    )


@dataclass(frozen=True)
class CorrelatorResult:
    """Two-time bundle correlation scan at a fixed anchor time."""

    order: int
    anchor_time: float
    tau: np.ndarray
    values: np.ndarray
    numerator: np.ndarray
    denominator: np.ndarray
    denominator_anchor: float

    def series(self) -> TimeSeries:
        return TimeSeries(
            self.tau,
            {f"g{self.order}_2": self.values},
            axis_name="tau",
            metadata={"anchor_time": self.anchor_time, "order": self.order},
        )


def two_time_correlator(
    basis: DressedBasis,
    channels: list[JumpChannel],
    pt: PulseTrain,
    rho0: DensityMatrix,
    N: int,
    t: float,
    tau_grid,
    *,
    retention: TermRetention | None = None,
    rtol: float = 1e-7,
    atol: float = 1e-12,
) -> CorrelatorResult:
    """Delayed bundle correlation by the regression recipe.

    The state is propagated to the anchor time, conditioned on an N-bundle
    detection there (sandwiched by the lab-frame bundle-lowering power), and
    the conditioned operator is propagated over the delay grid with the same
    generator; the result is normalized by the unconditioned expectations at
    both times.
    """
    from .observables import build_X  # post-processing module; import here to avoid a cycle

    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.ndim != 1 or tau_grid.size == 0:
        raise ValidationError("tau_grid must be a nonempty 1-d array")
    if np.any(tau_grid < 0) or np.any(np.diff(tau_grid) <= 0):
        raise ValidationError("tau_grid must be nonnegative and strictly increasing")

    xop = build_X(basis)
    xn = np.linalg.matrix_power(xop.X, N)
    m1 = xn.conj().T @ xn

    # unconditioned state at the anchor
    if t > rho0.time_tag:
        res = propagate_master(
            basis, channels, pt, rho0, np.array([rho0.time_tag, t]),
            retention=retention, rtol=rtol, atol=atol, check_positivity=False,
        )
        rho_t = res.rho_final.entries
    elif t == rho0.time_tag:
        rho_t = np.asarray(rho0.entries, dtype=complex)
    else:
        raise ValidationError("anchor time precedes the initial state's time tag")

    rho_lab = rho_to_lab(basis, rho_t, t)
    d_anchor = float(np.trace(m1 @ rho_lab).real)
    if d_anchor < DENOM_FLOOR:
        raise ZeroDenominator(
            f"bundle expectation at the anchor is {d_anchor:.3e}; nothing to correlate"
        )
    sigma_lab = xn @ rho_lab @ xn.conj().T
    sigma_i = rho_to_interaction(basis, sigma_lab, t)

    abs_grid = t + tau_grid
    prepend = tau_grid[0] > 0.0
    engine_grid = np.concatenate([[t], abs_grid]) if prepend else abs_grid

    def _scan(mat_start: np.ndarray) -> np.ndarray:
        table = build_term_table(basis, pt, retention or open_retention())
        src, dst, rate, gamma = _channel_arrays(basis.size, channels)
        obs = m1[None, :, :].astype(complex)
        h0, hmax = _auto_steps(table, None, None)
        _, obs_vals, _, _, _, status = _engine._propagate_rho(
            engine_grid, mat_start.astype(complex), table.rows, table.cols, table.amps,
            table.freqs, table.pulse, table.pulse_params, gamma, src, dst, rate,
            basis.energies, obs, np.zeros(0, dtype=np.int64), rtol, atol, h0, hmax,
        )
        if status == 1:
            raise StepSizeUnderflow("adaptive step collapsed below the floor")
        vals = obs_vals[:, 0]
        return vals[1:] if prepend else vals

    numer = _scan(sigma_i).real
    denom = _scan(rho_t).real
    if np.any(denom < DENOM_FLOOR):
        bad = float(abs_grid[np.argmin(denom)])
        raise ZeroDenominator(f"bundle expectation vanished at t = {bad:g}")
    values = numer / (d_anchor * denom)
    return CorrelatorResult(N, t, tau_grid, values, numer, denom, d_anchor)


def propagate_closed_lab(
    p: ModelParams,
    cfg: SpaceConfig,
    pt: PulseTrain,
    psi0: np.ndarray,
    t_grid,
    *,
    rtol: float = 1e-9,
    atol: float = 1e-12,
) -> np.ndarray:
    """Product-basis propagation of the full time-dependent Hamiltonian.

    This is the frame-equivalence oracle: no rotating frame, no term
    dropping, cost O(dim^2) per evaluation.  Returns states on the grid.
    """
    from .hilbert import build_bare_hamiltonian

    t_grid = np.asarray(t_grid, dtype=float)
    h_static = build_bare_hamiltonian(p, cfg).dense()
    v_drive = build_atomic_flip("b", "g", cfg).dense()
    states, status = _engine._propagate_psi_dense(
        t_grid, np.asarray(psi0, dtype=complex), h_static, v_drive,
        pt.amp_peak[0], pt.amp_peak[1], _pulse_params(pt),
        np.asarray(pt.carriers, dtype=float), rtol, atol, 1e-3, 0.05,
    )
    if status == 1:
        raise StepSizeUnderflow("adaptive step collapsed below the floor")
    return states
