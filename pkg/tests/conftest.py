"""Shared fixtures: the two working points used throughout the suite.

Spectra and bases are session scoped because diagonalization at the
production truncations dominates collection time otherwise.
"""

from types import SimpleNamespace

import numpy as np
import pytest

from photonbundles.drive import BundleTarget, PulseTrain, with_solved_carriers
from photonbundles.hilbert import ModelParams, SpaceConfig
from photonbundles.rabi import compute_spectrum
from photonbundles import dynamics as dyn

KAPPA = 1e-4


def _point(model, n_fock, tgt, amp_first, amp_ratio, centers, width, init):
    cfg = SpaceConfig(n_fock=n_fock)
    spec = compute_spectrum(model, n_fock)
    pt = with_solved_carriers(
        PulseTrain(
            amp_peak=(amp_first, amp_first * amp_ratio),
            center_first=centers,
            width=width,
            period=84000.0,
            n_cycles=1,
        ),
        spec,
        model,
        tgt,
    )
    return SimpleNamespace(
        params=model, cfg=cfg, spec=spec, target=tgt, pulses=pt, initial=init
    )


@pytest.fixture(scope="session")
def two_photon():
    """Strong-coupling point loading one photon pair per cycle from vacuum."""
    return _point(
        ModelParams(omega_b=-6.0, coupling=0.6),
        40,
        BundleTarget(n=0, M=0, m=1),
        0.008,
        6.8538,
        (7960.0, 5760.0),
        2200.0,
        "b0",
    )


@pytest.fixture(scope="session")
def four_photon():
    """Very strong coupling point loading two pairs per cycle."""
    return _point(
        ModelParams(omega_b=-10.0, coupling=1.2),
        60,
        BundleTarget(n=0, M=0, m=2),
        0.006,
        3.1814,
        (7960.0, 5760.0),
        2200.0,
        "b0",
    )


@pytest.fixture(scope="session")
def two_photon_basis(two_photon):
    return dyn.build_dressed_basis(
        two_photon.spec, two_photon.params, two_photon.cfg, n_keep=12
    )


@pytest.fixture(scope="session")
def two_photon_channels(two_photon, two_photon_basis):
    rates = dyn.DecayRates(a=KAPPA, ge=KAPPA, bg=KAPPA)
    return dyn.build_jump_channels(two_photon_basis, rates, two_photon.cfg)
