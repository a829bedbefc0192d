"""Emission statistics of bundle states.

The detector couples to the mode quadrature, so the natural lowering
operator in the dressed basis keeps only the matrix elements that lower the
energy; correlations of N-photon bundles replace it by its N-th power.
Equal-time statistics come from density-matrix snapshots or from engine
expectation channels; delayed statistics delegate to the regression recipe
in `dynamics`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    ENERGY_ORDER_TOL,
    CorrelatorResult,
    DecayRates,
    DensityMatrix,
    DressedBasis,
    JumpChannel,
    PulseTrain,
    rho_to_lab,
    two_time_correlator,
)
from .errors import EmptyWindow, PositivityViolation, ValidationError
from .hilbert import SpaceConfig, build_quadrature
from .timeseries import TimeSeries

logger = logging.getLogger(__name__)

DENOM_FLOOR = 1e-14
NEGATIVE_CLIP = 1e-10


@dataclass(frozen=True)
class BundleOperator:
    """Energy-lowering part of the quadrature in the dressed basis.

    X keeps <dst|(a + a')|src> only where the static energy strictly drops,
    so X is strictly triangular in energy ordering and nilpotent.
    """

    X: np.ndarray
    basis: DressedBasis

    def power(self, N: int) -> np.ndarray:
        if N < 1:
            raise ValidationError("bundle order must be a positive integer")
        return np.linalg.matrix_power(self.X, N)

    def moment_ops(self, N: int) -> tuple[np.ndarray, np.ndarray]:
        """((X^N)' X^N, (X^2N)' X^2N): denominator and numerator observables.

        The numerator uses that X'^N X'^N X^N X^N equals (X^2N)'(X^2N) for a
        nilpotent triangular X, which avoids forming the fourth moment from
        non-commuting factors.
        """
        xn = self.power(N)
        x2n = self.power(2 * N)
        return xn.conj().T @ xn, x2n.conj().T @ x2n


def build_X(basis: DressedBasis) -> BundleOperator:
    """Quadrature restricted to energy-lowering transitions."""
    cfg = SpaceConfig(n_fock=basis.n_b)
    quad = build_quadrature(cfg).dense()
    w = basis.transform.conj().T @ quad @ basis.transform
    e = basis.energies
    lower = (e[:, None] + ENERGY_ORDER_TOL) < e[None, :]
    return BundleOperator(np.where(lower, w, 0.0), basis)


def _clip_negative(values: np.ndarray, what: str) -> np.ndarray:
    worst = float(values.min(initial=0.0))
    if worst < -NEGATIVE_CLIP:
        raise PositivityViolation(f"{what} reached {worst:.3e}, beyond round-off")
    if worst < 0.0:
        logger.info("clipped %s round-off (%e) to zero", what, worst)
    return np.where(values < 0.0, 0.0, values)


def g2_equal_time(
    rho_series: list[DensityMatrix],
    basis: DressedBasis,
    N: int,
    xop: BundleOperator | None = None,
) -> TimeSeries:
    """Same-time N-bundle intensity correlation from state snapshots.

    Points where the bundle intensity is below the floor are masked (NaN);
    tiny negative round-off is clipped to zero, anything worse raises.
    """
    xop = xop or build_X(basis)
    m1, m2 = xop.moment_ops(N)
    times = np.array([s.time_tag for s in rho_series])
    numer = np.empty(times.size)
    denom = np.empty(times.size)
    for i, snap in enumerate(rho_series):
        lab = rho_to_lab(basis, np.asarray(snap.entries, dtype=complex), snap.time_tag)
        numer[i] = float(np.trace(m2 @ lab).real)
        denom[i] = float(np.trace(m1 @ lab).real)
    return _g2_series(times, numer, denom, N)


def g2_from_expectations(result, N: int) -> TimeSeries:
    """Same-time correlation from engine expectation channels.

    Expects the propagation to have sampled observables named
    ``bundle{N}_den`` and ``bundle{N}_num`` (see `bundle_observables`).
    """
    numer = result.expectations[f"bundle{N}_num"].real.copy()
    denom = result.expectations[f"bundle{N}_den"].real.copy()
    return _g2_series(np.asarray(result.times, dtype=float), numer, denom, N)


def bundle_observables(basis: DressedBasis, orders) -> dict[str, np.ndarray]:
    """Lab-frame observable set for sampling bundle moments during a run."""
    xop = build_X(basis)
    out: dict[str, np.ndarray] = {}
    for N in orders:
        m1, m2 = xop.moment_ops(N)
        out[f"bundle{N}_den"] = m1
        out[f"bundle{N}_num"] = m2
    return out


def _g2_series(times, numer, denom, N) -> TimeSeries:
    numer = _clip_negative(numer, f"order-{N} bundle numerator")
    denom = _clip_negative(denom, f"order-{N} bundle denominator")
    values = np.full(times.size, np.nan)
    ok = denom > DENOM_FLOOR
    values[ok] = numer[ok] / denom[ok] ** 2
    masked = int(np.sum(~ok))
    if masked:
        logger.info("masked %d of %d points with bundle intensity below floor", masked, times.size)
    return TimeSeries(
        times,
        {f"g{N}_2": values, f"bundle{N}_intensity": denom},
        metadata={"order": N, "masked_points": masked},
    )


def g2_delayed(
    basis: DressedBasis,
    channels: list[JumpChannel],
    pt: PulseTrain,
    rho0: DensityMatrix,
    N: int,
    t_anchor: float,
    tau_grid=None,
    rates: DecayRates | None = None,
    **kwargs,
) -> CorrelatorResult:
    """Delayed N-bundle correlation versus delay at a fixed anchor time.

    Default delay grid covers (0, 3/kappa_a] with 300 points, kappa_a taken
    from `rates` (or the default rates when omitted).
    """
    if tau_grid is None:
        kappa_a = (rates or DecayRates()).a
        if kappa_a <= 0:
            raise ValidationError("cannot size the default delay grid with kappa_a = 0")
        tau_grid = np.linspace(0.0, 3.0 / kappa_a, 301)[1:]
    return two_time_correlator(basis, channels, pt, rho0, N, t_anchor, tau_grid, **kwargs)


def find_extremum(
    series: TimeSeries,
    kind: str = "max",
    window: tuple[float, float] | None = None,
    column: str | None = None,
) -> tuple[float, float]:
    """Refined location and value of the extreme point of one column.

    Scans grid samples inside the window (earliest wins on exact ties),
    then refines through the quadratic fit of the extreme sample and its
    neighbors.  Masked (NaN) samples are ignored.
    """
    if kind not in ("max", "min"):
        raise ValidationError("kind must be 'max' or 'min'")
    if column is None:
        if len(series.columns) != 1:
            main = [c for c in series.columns if c.startswith("g")]
            if len(main) != 1:
                raise ValidationError("ambiguous series; pass column=")
            column = main[0]
        else:
            column = next(iter(series.columns))
    t = np.asarray(series.axis, dtype=float)
    v = np.asarray(series.column(column), dtype=float)
    sel = np.isfinite(v)
    if window is not None:
        sel &= (t >= window[0]) & (t <= window[1])
    if not np.any(sel):
        raise EmptyWindow("no finite samples inside the window")
    idx = np.where(sel)[0]
    vals = v[idx]
    pos = int(np.argmax(vals)) if kind == "max" else int(np.argmin(vals))
    i = idx[pos]

    # quadratic refinement when both neighbors are usable grid points
    if 0 < i < t.size - 1 and np.isfinite(v[i - 1]) and np.isfinite(v[i + 1]):
        t0, t1, t2 = t[i - 1], t[i], t[i + 1]
        y0, y1, y2 = v[i - 1], v[i], v[i + 1]
        denom = (t0 - t1) * (t0 - t2) * (t1 - t2)
        a = (t2 * (y1 - y0) + t1 * (y0 - y2) + t0 * (y2 - y1)) / denom
        b = (t2 * t2 * (y0 - y1) + t1 * t1 * (y2 - y0) + t0 * t0 * (y1 - y2)) / denom
        if (kind == "max" and a < 0.0) or (kind == "min" and a > 0.0):
            tv = -b / (2.0 * a)
            if t0 <= tv <= t2:
                c = y1 - a * t1 * t1 - b * t1
                return float(tv), float(a * tv * tv + b * tv + c)
    return float(t[i]), float(v[i])
