"""Two-tone Gaussian pulse trains and the resonance bookkeeping around them.

The transfer scheme drives the reservoir-level transition with two carriers.
Drive 1 connects |b,M> to the mediating dressed state, drive 2 connects the
dressed state to |b,2m+M>; a pulse train repeats the pair every period so the
cavity is reloaded after each emission burst.  All frequencies are in units
of the cavity frequency and times in its inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NegativeCarrier, ValidationError
from .rabi import RabiSpectrum, eta
from .hilbert import ModelParams

EIGENSYSTEM_FLOOR = 1e-14
PARITY_ZERO_FLOOR = 1e-30


@dataclass(frozen=True)
class BundleTarget:
    """Which dressed state mediates the transfer and which Fock states it bridges.

    The cycle starts from |b, M>, passes through dressed state n, and ends in
    |b, 2m+M>; m photon pairs are added on top of the seed occupation M.  The
    parity pairing M = n mod 2 is required for both legs to be parity-allowed.
    """

    n: int
    M: int
    m: int
    detuning: float = 0.0

    def __post_init__(self):
        if self.M not in (0, 1):
            raise ValidationError(f"seed occupation M must be 0 or 1, got {self.M}")
        if self.M != self.n % 2:
            raise ValidationError(
                f"parity pairing violated: M={self.M} but dressed index n={self.n} "
                f"requires M={self.n % 2}"
            )
        if self.m < 1:
            raise ValidationError(f"photon pairs per cycle must be >= 1, got {self.m}")

    @property
    def bundle_size(self) -> int:
        """Photons released per cycle once the loaded state cascades out."""
        return 2 * self.m + self.M


@dataclass(frozen=True)
class PulseTrain:
    """Periodic pair of Gaussian envelopes with fixed carriers.

    amp_peak and center_first are (drive 1, drive 2) tuples; each envelope is
    amp * sum_k exp(-(t - center - k*period)^2 / width^2) over the requested
    cycles plus one guard Gaussian on each side, so evaluation just before the
    first center or just after the last stays smooth.
    """

    amp_peak: tuple[float, float]
    center_first: tuple[float, float]
    width: float
    period: float
    n_cycles: int
    carriers: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.width <= 0:
            raise ValidationError("pulse width must be positive")
        if self.period <= 0:
            raise ValidationError("pulse period must be positive")
        if self.n_cycles < 1:
            raise ValidationError("need at least one cycle")
        if min(self.amp_peak) < 0:
            raise ValidationError("peak amplitudes must be nonnegative")

    def tail_error_bound(self) -> float:
        """Envelope error of the finite cycle sum, relative to the peak."""
        return math.exp(-((self.period / (2.0 * self.width)) ** 2))


def envelope(pt: PulseTrain, l: int, t) -> np.ndarray | float:
    """Envelope of drive l (1 or 2) at time(s) t."""
    if l not in (1, 2):
        raise ValueError("drive index must be 1 or 2")
    amp = pt.amp_peak[l - 1]
    t0 = pt.center_first[l - 1]
    tt = np.asarray(t, dtype=float)
    ks = np.arange(-1, pt.n_cycles + 1)
    centers = t0 + ks * pt.period
    out = amp * np.exp(-(((tt[..., None] - centers) / pt.width) ** 2)).sum(axis=-1)
    return out if tt.ndim else float(out)


def suggested_horizon(pt: PulseTrain, pad: float = 3.0) -> float:
    """Time by which every requested cycle of both envelopes has passed."""
    last = max(pt.center_first) + (pt.n_cycles - 1) * pt.period
    return last + pad * pt.width


def solve_carriers(spec: RabiSpectrum, p: ModelParams, tgt: BundleTarget) -> tuple[float, float]:
    """Carrier frequencies putting both drive legs a common offset from resonance.

    Drive l bridges |b, m_l> and dressed state n with m_1 = M, m_2 = 2m+M;
    each carrier sits below the bare transition by the requested detuning,
    so the slow term of either leg rotates at exactly +detuning and the
    carriers always differ by 2m (in cavity-frequency units).
    """
    e_n = float(spec.eigenvalues[tgt.n])
    base = e_n - p.omega_b - tgt.detuning
    w1 = base - tgt.M * p.omega_c
    w2 = base - tgt.bundle_size * p.omega_c
    for l, w in ((1, w1), (2, w2)):
        if w <= 0:
            raise NegativeCarrier(f"drive {l} carrier solved to {w:.6g} <= 0")
    return w1, w2


def with_solved_carriers(
    pt: PulseTrain, spec: RabiSpectrum, p: ModelParams, tgt: BundleTarget
) -> PulseTrain:
    """Copy of pt with carriers set from the resonance condition."""
    return replace(pt, carriers=solve_carriers(spec, p, tgt))


def phase_detuning(
    spec: RabiSpectrum, p: ModelParams, omega_l: float, n: int, m: int, sign: int
) -> float:
    """Rotation rate of one interaction term: E_n - omega_b - m*omega_c + sign*omega_l."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return float(spec.eigenvalues[n]) - p.omega_b - m * p.omega_c + sign * omega_l


def effective_coupling(spec: RabiSpectrum, pt: PulseTrain, l: int, n: int, m: int, t):
    """Half the envelope of drive l weighted by the dressed-state overlap (n, m)."""
    return 0.5 * spec.coefficient(n, m) * envelope(pt, l, t)


def mixing_angles(spec: RabiSpectrum, pt: PulseTrain, tgt: BundleTarget, t):
    """Angles (theta, phi) and gap frequency of the reduced three-level model.

    theta in [0, pi/2] parameterizes the dark state, phi in [0, pi/2) splits
    the two bright states, and the gap frequency sets the instantaneous
    eigenvalue scale.  All three broadcast over t.
    """
    ratio = eta(spec, tgt.n, tgt.M, tgt.m)
    c2 = abs(spec.coefficient(tgt.n, tgt.bundle_size))
    env1 = np.asarray(envelope(pt, 1, t), dtype=float)
    env2 = np.asarray(envelope(pt, 2, t), dtype=float)
    gap = 0.5 * c2 * np.sqrt((ratio * env1) ** 2 + env2**2)
    theta = np.arctan2(ratio * env1, env2)
    half = 0.5 * tgt.detuning
    phi = np.arctan2(gap, half + np.sqrt(half**2 + gap**2))
    if np.ndim(t) == 0:
        return float(theta), float(phi), float(gap)
    return theta, phi, gap


@dataclass(frozen=True)
class AdiabaticityReport:
    """Worst ratio of dark-state rotation rate to the bright-state gap."""

    max_ratio: float
    time_of_max: float
    threshold: float
    flagged: bool
    n_points: int
    n_masked: int

    def to_json(self) -> dict:
        return {
            "max_ratio": self.max_ratio,
            "time_of_max": self.time_of_max,
            "threshold": self.threshold,
            "flagged": self.flagged,
            "n_points": self.n_points,
            "n_masked": self.n_masked,
        }


def adiabaticity_report(
    spec: RabiSpectrum,
    pt: PulseTrain,
    tgt: BundleTarget,
    t_grid: np.ndarray,
    *,
    threshold: float = 0.1,
    gap_floor_rel: float = 1e-3,
) -> AdiabaticityReport:
    """Check |d theta/dt| << bright-state eigenvalue magnitudes on a grid.

    The rotation rate is a central finite difference.  Points where the gap
    frequency is below gap_floor_rel times its grid maximum are masked out:
    with both envelopes off the dark-state angle is undefined and no
    population moves, so the ratio carries no information there.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 3:
        raise ValueError("need a 1-d grid with at least 3 points")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    theta, _, gap = mixing_angles(spec, pt, tgt, t_grid)
    theta_dot = np.gradient(theta, t_grid)
    half = 0.5 * tgt.detuning
    root = np.sqrt(half**2 + gap**2)
    gap_min = np.minimum(np.abs(half + root), np.abs(half - root))
    keep = gap >= gap_floor_rel * float(np.max(gap))
    n_masked = int(np.sum(~keep))
    ratio = np.abs(theta_dot[keep]) / np.maximum(gap_min[keep], 1e-300)
    i = int(np.argmax(ratio))
    max_ratio = float(ratio[i])
    t_max = float(t_grid[keep][i])
    return AdiabaticityReport(
        max_ratio=max_ratio,
        time_of_max=t_max,
        threshold=threshold,
        flagged=max_ratio > threshold,
        n_points=int(t_grid.size),
        n_masked=n_masked,
    )


@dataclass(frozen=True)
class RwaValidityReport:
    """Worst drive-strength-to-detuning ratios of the discarded fast terms.

    counter_rotating covers every retained state driven through the fast
    (sum-frequency) term of either drive; cross_talk covers the slow term of
    either drive acting on retained states other than the target, including
    drive 1 evaluated at drive 2's occupation and vice versa.
    """

    max_ratio_counter: float
    max_ratio_cross: float
    worst: dict = field(default_factory=dict)
    threshold: float = 0.1
    flagged: bool = False
    n_states_checked: int = 0

    def to_json(self) -> dict:
        return {
            "max_ratio_counter": self.max_ratio_counter,
            "max_ratio_cross": self.max_ratio_cross,
            "worst": dict(self.worst),
            "threshold": self.threshold,
            "flagged": self.flagged,
            "n_states_checked": self.n_states_checked,
        }


def rwa_validity_report(
    spec: RabiSpectrum,
    pt: PulseTrain,
    tgt: BundleTarget,
    *,
    retained: int | None = None,
    threshold: float = 0.1,
) -> RwaValidityReport:
    """Bound the terms dropped when keeping only the two resonant legs.

    Ratios use the envelope peaks, so they hold at every time.  The resonant
    pairs themselves, drive l with the target state at its own occupation and
    the slow sign, are excluded; everything else retained is checked.
    """
    if min(pt.carriers) <= 0:
        raise ValidationError("carriers must be solved before checking validity")
    if retained is None:
        retained = min(2 * tgt.bundle_size + 8, spec.n_states)
    retained = min(retained, spec.n_states)
    p = spec.params
    occupations = (tgt.M, tgt.bundle_size)

    max_counter = 0.0
    max_cross = 0.0
    worst: dict = {}
    for l in (1, 2):
        w_l = pt.carriers[l - 1]
        peak = pt.amp_peak[l - 1]
        for m_occ in occupations:
            if m_occ >= spec.n_fock:
                continue
            for n_p in range(retained):
                num = 0.5 * abs(spec.coefficient(n_p, m_occ)) * peak
                if num < PARITY_ZERO_FLOOR:
                    continue
                for sign, family in ((1, "counter"), (-1, "cross")):
                    if sign == -1 and n_p == tgt.n and m_occ == occupations[l - 1]:
                        continue  # the resonant leg itself
                    det = phase_detuning(spec, p, w_l, n_p, m_occ, sign)
                    r = num / abs(det) if abs(det) > 0 else math.inf
                    if family == "counter":
                        bigger = r > max_counter
                        max_counter = max(max_counter, r)
                    else:
                        bigger = r > max_cross
                        max_cross = max(max_cross, r)
                    if bigger and r >= max(max_counter, max_cross):
                        worst = {
                            "family": family,
                            "drive": l,
                            "state": n_p,
                            "occupation": m_occ,
                            "detuning": det,
                            "ratio": r,
                        }
    overall = max(max_counter, max_cross)
    return RwaValidityReport(
        max_ratio_counter=max_counter,
        max_ratio_cross=max_cross,
        worst=worst,
        threshold=threshold,
        flagged=overall > threshold,
        n_states_checked=retained,
    )
