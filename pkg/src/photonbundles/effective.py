"""Reduced three-level model of one transfer leg pair.

Basis order is (|b,M>, dressed mediator, |b,2m+M>).  With both drives on,
the instantaneous spectrum splits into a dark state confined to the two
reservoir levels and two bright states; adiabatic following of the dark
state is what moves population between the reservoir levels without ever
populating the mediator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .drive import BundleTarget, PulseTrain, effective_coupling
from .errors import DegeneratePoint, UndefinedAtZeroAngle
from .rabi import RabiSpectrum

DEGENERATE_GAP = 1e-14
ZERO_ANGLE_FLOOR = 1e-12


@dataclass(frozen=True)
class LambdaSystem:
    """Three-level reduction: two reservoir levels bridged by one dressed state.

    coupling1 and coupling2 are time functions giving the signed effective
    couplings of the two legs (half the envelope times the dressed-state
    overlap); detuning is the common offset of both carriers.
    """

    target: BundleTarget
    labels: tuple[str, str, str]
    coupling1: Callable[[float], float]
    coupling2: Callable[[float], float]
    detuning: float


def build_lambda_system(spec: RabiSpectrum, pt: PulseTrain, tgt: BundleTarget) -> LambdaSystem:
    """Assemble the reduced model from a spectrum and a pulse train."""
    labels = (
        f"|b,{tgt.M}>",
        f"dressed[{tgt.n}]",
        f"|b,{tgt.bundle_size}>",
    )

    def g1(t):
        return effective_coupling(spec, pt, 1, tgt.n, tgt.M, t)

    def g2(t):
        return effective_coupling(spec, pt, 2, tgt.n, tgt.bundle_size, t)

    return LambdaSystem(tgt, labels, g1, g2, tgt.detuning)


def hamiltonian_at(sys: LambdaSystem, t: float) -> np.ndarray:
    """3x3 Hermitian matrix in the (reservoir, mediator, reservoir) basis."""
    g1 = float(sys.coupling1(t))
    g2 = float(sys.coupling2(t))
    return np.array(
        [
            [0.0, g1, 0.0],
            [g1, sys.detuning, g2],
            [0.0, g2, 0.0],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class InstantaneousEigensystem:
    """Dark and bright eigenpairs of the reduced model at one instant."""

    lambda_dark: float
    psi_dark: np.ndarray
    lambda_plus: float
    psi_plus: np.ndarray
    lambda_minus: float
    psi_minus: np.ndarray

    def pairs(self):
        return (
            (self.lambda_dark, self.psi_dark),
            (self.lambda_plus, self.psi_plus),
            (self.lambda_minus, self.psi_minus),
        )


def instantaneous_eigensystem(sys: LambdaSystem, t: float) -> InstantaneousEigensystem:
    """Closed-form eigensystem of the 3x3 model at time t.

    The dark state is cos(theta)|b,M> - sin(theta)|b,2m+M> with no mediator
    component; the bright states mix the mediator with the orthogonal
    reservoir combination through the angle phi.  Signed couplings are
    handled exactly, so the vectors satisfy the eigenvalue equation to
    machine precision whatever the overlap signs.
    """
    g1 = float(sys.coupling1(t))
    g2 = float(sys.coupling2(t))
    gap = np.hypot(g1, g2)
    if gap < DEGENERATE_GAP:
        raise DegeneratePoint(
            f"both couplings vanish at t={t:g}; the bright doublet is degenerate"
        )
    # direction cosines of the bright reservoir combination
    u1 = g1 / gap
    u2 = g2 / gap
    half = 0.5 * sys.detuning
    root = np.hypot(half, gap)
    phi = np.arctan2(gap, half + root)
    sin_phi, cos_phi = np.sin(phi), np.cos(phi)

    psi_dark = np.array([u2, 0.0, -u1], dtype=complex)
    if u2 < 0:  # canonical phase: the |b,M> component stays nonnegative
        psi_dark = -psi_dark
    psi_plus = np.array([u1 * sin_phi, cos_phi, u2 * sin_phi], dtype=complex)
    psi_minus = np.array([u1 * cos_phi, -sin_phi, u2 * cos_phi], dtype=complex)
    lam_plus = half + root
    lam_minus = half - root
    return InstantaneousEigensystem(0.0, psi_dark, lam_plus, psi_plus, lam_minus, psi_minus)


def analytic_g2_equal_time(theta_2):
    """Estimate of the equal-time two-photon correlation during transfer.

    Models the cavity as a statistical mixture holding the two-photon level
    with weight sin^2(theta_2) and vacuum otherwise.  The normally ordered
    moments of such a mixture give g2 = 1/(2 sin^2 theta_2): the weight
    cancels once in the numerator but twice in the squared denominator.
    Valid while the transfer is slow compared with cavity decay; equals 1/2
    when the dark state points fully at the loaded reservoir level.
    """
    s = np.sin(np.asarray(theta_2, dtype=float))
    if np.any(s <= ZERO_ANGLE_FLOOR):
        raise UndefinedAtZeroAngle(
            "equal-time correlation estimate diverges as the dark-state angle -> 0"
        )
    out = 0.5 / (s * s)
    return float(out) if np.ndim(theta_2) == 0 else out
