"""Quantum-jump unraveling of the dressed-basis master equation.

Randomness is pre-drawn from a PCG64 stream per trajectory: pair 2k of the
stream is the k-th norm threshold, pair 2k+1 selects the k-th jump channel.
Trajectory i of an ensemble seeded with seed0 uses the i-th spawned child
of SeedSequence(seed0), and a single run with seed s uses the first child
of SeedSequence(s), so trajectory 0 of an ensemble reproduces the single
run with the same seed.  Growing the jump buffer extends the same stream,
so results do not depend on the initial buffer size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _engine
from .dynamics import (
    DressedBasis,
    JumpChannel,
    PulseTrain,
    TermRetention,
    _auto_steps,
    _channel_arrays,
    build_term_table,
    open_retention,
    _population_series,
)
from .drive import BundleTarget
from .errors import NormUnderflow, StepSizeUnderflow, ValidationError
from .timeseries import TimeSeries

MAX_JUMP_BUFFER = 1 << 20


@dataclass(frozen=True)
class JumpEvent:
    """One detected quantum jump."""

    time: float
    channel: str
    src_label: str
    dst_label: str


@dataclass(frozen=True)
class TrajectoryRecord:
    """Single stochastic realization sampled on the request grid."""

    times: np.ndarray
    populations: TimeSeries
    jumps: tuple[JumpEvent, ...]
    n_steps: int
    states: np.ndarray | None = None

    def population(self, label: str) -> np.ndarray:
        return self.populations.column(f"P_{label}")

    def jump_times(self, channel: str | None = None) -> np.ndarray:
        return np.array([j.time for j in self.jumps if channel is None or j.channel == channel])


def _draw_uniform_pairs(seed_seq: np.random.SeedSequence, buffer: int):
    gen = np.random.Generator(np.random.PCG64(seed_seq))
    u = gen.random(2 * buffer)
    return u[0::2].copy(), u[1::2].copy()


def _run_one(
    basis, channels, table, psi0, t_grid, seed_seq, rtol, atol, jump_buffer,
    jump_time_tol, keep_states,
) -> TrajectoryRecord:
    src, dst, rate, gamma = _channel_arrays(basis.size, channels)
    h0, hmax = _auto_steps(table, None, None)
    buffer = jump_buffer
    while True:
        thresholds, chan_unis = _draw_uniform_pairs(seed_seq, buffer)
        states, jump_times, jump_channels, n_jumps, n_steps, status = _engine._run_trajectory(
            t_grid, psi0, table.rows, table.cols, table.amps, table.freqs, table.pulse,
            table.pulse_params, gamma, src, dst, rate, thresholds, chan_unis,
            rtol, atol, h0, hmax, jump_time_tol,
        )
        if status != 2:
            break
        buffer *= 4
        if buffer > MAX_JUMP_BUFFER:
            raise ValidationError(
                f"more than {MAX_JUMP_BUFFER} jumps on one trajectory; check the rates"
            )
    if status == 1:
        raise StepSizeUnderflow("adaptive step collapsed below the floor")
    if status == 3:
        raise NormUnderflow("state norm vanished without crossing the jump threshold")

    jumps = tuple(
        JumpEvent(
            float(jump_times[k]),
            channels[jump_channels[k]].channel,
            basis.labels[channels[jump_channels[k]].src],
            basis.labels[channels[jump_channels[k]].dst],
        )
        for k in range(n_jumps)
    )
    pops = np.abs(states) ** 2
    series = _population_series(t_grid, pops, basis.labels, {"kind": "trajectory"})
    return TrajectoryRecord(
        t_grid, series, jumps, int(n_steps), states if keep_states else None
    )


def run_trajectory(
    basis: DressedBasis,
    channels: list[JumpChannel],
    pt: PulseTrain,
    psi0: np.ndarray,
    t_grid,
    seed: int,
    *,
    retention: TermRetention | None = None,
    target: BundleTarget | None = None,
    rtol: float = 1e-7,
    atol: float = 1e-12,
    jump_buffer: int = 64,
    jump_time_tol: float = 1e-3,
    keep_states: bool = False,
) -> TrajectoryRecord:
    """One stochastic realization with a reproducible seed."""
    t_grid = np.asarray(t_grid, dtype=float)
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-9:
        raise ValidationError("initial state must be normalized")
    if not channels:
        raise ValidationError("trajectory unraveling needs at least one jump channel")
    table = build_term_table(basis, pt, retention or open_retention(), target)
    child = np.random.SeedSequence(seed).spawn(1)[0]
    return _run_one(
        basis, channels, table, psi0, t_grid, child, rtol, atol,
        jump_buffer, jump_time_tol, keep_states,
    )


@dataclass(frozen=True)
class EnsembleResult:
    """Trajectory-averaged populations with standard errors.

    jump_times_per_trajectory keeps every trajectory's cavity-channel jump
    record grouped by channel name, which is what the per-cycle counting
    statistics consume.
    """

    times: np.ndarray
    mean_populations: TimeSeries
    se_populations: TimeSeries
    n_traj: int
    jump_records: tuple[tuple[JumpEvent, ...], ...]
    records: tuple[TrajectoryRecord, ...] | None = None

    def population(self, label: str) -> np.ndarray:
        return self.mean_populations.column(f"P_{label}")

    def standard_error(self, label: str) -> np.ndarray:
        return self.se_populations.column(f"P_{label}")


def ensemble_average(
    basis: DressedBasis,
    channels: list[JumpChannel],
    pt: PulseTrain,
    psi0: np.ndarray,
    t_grid,
    n_traj: int,
    seed0: int,
    *,
    retention: TermRetention | None = None,
    target: BundleTarget | None = None,
    rtol: float = 1e-7,
    atol: float = 1e-12,
    jump_buffer: int = 64,
    jump_time_tol: float = 1e-3,
    keep_records: bool = False,
) -> EnsembleResult:
    """Average of n_traj independent trajectories (Welford accumulation)."""
    t_grid = np.asarray(t_grid, dtype=float)
    psi0 = np.asarray(psi0, dtype=complex)
    if n_traj < 1:
        raise ValidationError("need at least one trajectory")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-9:
        raise ValidationError("initial state must be normalized")
    if not channels:
        raise ValidationError("trajectory unraveling needs at least one jump channel")
    table = build_term_table(basis, pt, retention or open_retention(), target)
    children = np.random.SeedSequence(seed0).spawn(n_traj)

    mean = np.zeros((t_grid.size, basis.size))
    m2 = np.zeros_like(mean)
    all_jumps: list[tuple[JumpEvent, ...]] = []
    records: list[TrajectoryRecord] = []
    for i in range(n_traj):
        rec = _run_one(
            basis, channels, table, psi0, t_grid, children[i], rtol, atol,
            jump_buffer, jump_time_tol, keep_records,
        )
        pops = np.stack([rec.population(lbl) for lbl in basis.labels], axis=1)
        delta = pops - mean
        mean += delta / (i + 1)
        m2 += delta * (pops - mean)
        all_jumps.append(rec.jumps)
        if keep_records:
            records.append(rec)

    se = np.sqrt(m2 / (n_traj * (n_traj - 1))) if n_traj > 1 else np.full_like(mean, np.nan)
    meta = {"kind": "ensemble", "n_traj": n_traj, "seed0": seed0}
    return EnsembleResult(
        t_grid,
        _population_series(t_grid, mean, basis.labels, meta),
        _population_series(t_grid, se, basis.labels, {**meta, "statistic": "se"}),
        n_traj,
        tuple(all_jumps),
        tuple(records) if keep_records else None,
    )


@dataclass(frozen=True)
class JumpStatistics:
    """Per-cycle jump-count distribution for one channel."""

    channel: str
    n_traj: int
    n_cycles: int
    counts: np.ndarray
    count_histogram: dict[int, int]
    fraction_exact: dict[int, float]

    def fraction_with(self, k: int) -> float:
        return self.fraction_exact.get(k, 0.0)


def jump_statistics(
    ensemble: EnsembleResult, pt: PulseTrain, channel: str = "a"
) -> JumpStatistics:
    """Count channel jumps in each drive cycle across all trajectories.

    Cycle k spans [k*period, (k+1)*period) from the start of the sample
    grid; counts has shape (n_traj, n_cycles).
    """
    t0 = float(ensemble.times[0])
    horizon = float(ensemble.times[-1])
    n_cycles = max(1, int(np.ceil((horizon - t0) / pt.period - 1e-9)))
    counts = np.zeros((ensemble.n_traj, n_cycles), dtype=np.int64)
    for i, jumps in enumerate(ensemble.jump_records):
        for j in jumps:
            if j.channel != channel:
                continue
            k = int((j.time - t0) // pt.period)
            if 0 <= k < n_cycles:
                counts[i, k] += 1
    flat = counts.ravel()
    hist: dict[int, int] = {}
    for c in flat:
        hist[int(c)] = hist.get(int(c), 0) + 1
    total = flat.size
    frac = {k: v / total for k, v in sorted(hist.items())}
    return JumpStatistics(channel, ensemble.n_traj, n_cycles, counts, hist, frac)
