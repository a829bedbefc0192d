"""Reduced three-level model: closed-form eigensystem and the transfer estimate."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photonbundles.drive import BundleTarget, PulseTrain, effective_coupling, with_solved_carriers
from photonbundles.effective import (
    analytic_g2_equal_time,
    build_lambda_system,
    hamiltonian_at,
    instantaneous_eigensystem,
)
from photonbundles.errors import DegeneratePoint, UndefinedAtZeroAngle
from photonbundles.hilbert import ModelParams
from photonbundles.rabi import compute_spectrum


@pytest.fixture(scope="module")
def lam_system(two_photon):
    tp = two_photon
    return build_lambda_system(tp.spec, tp.pulses, tp.target)


def test_hamiltonian_is_hermitian_3x3(lam_system):
    for t in (4000.0, 6860.0, 9000.0):
        h = hamiltonian_at(lam_system, t)
        assert h.shape == (3, 3)
        assert np.allclose(h, h.conj().T)


def test_couplings_match_drive_module(two_photon, lam_system):
    tp = two_photon
    t = 6500.0
    g1 = effective_coupling(tp.spec, tp.pulses, 1, tp.target.n, tp.target.M, t)
    g2 = effective_coupling(tp.spec, tp.pulses, 2, tp.target.n, tp.target.bundle_size, t)
    assert lam_system.coupling1(t) == pytest.approx(g1, rel=1e-12)
    assert lam_system.coupling2(t) == pytest.approx(g2, rel=1e-12)


def test_eigensystem_satisfies_eigenvalue_equation(lam_system):
    for t in (4500.0, 6860.0, 9500.0):
        h = hamiltonian_at(lam_system, t)
        eig = instantaneous_eigensystem(lam_system, t)
        for lam, psi in eig.pairs():
            assert np.linalg.norm(h @ psi - lam * psi) < 1e-12
            assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)


def test_dark_state_avoids_the_mediator(lam_system):
    eig = instantaneous_eigensystem(lam_system, 6860.0)
    assert eig.lambda_dark == 0.0
    assert eig.psi_dark[1] == 0.0
    # bright states are orthogonal to the dark state and to each other
    assert abs(eig.psi_plus @ eig.psi_dark.conj()) < 1e-12
    assert abs(eig.psi_plus @ eig.psi_minus.conj()) < 1e-12


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=-0.01, max_value=0.01),
    st.floats(min_value=-0.01, max_value=0.01),
    st.floats(min_value=-0.5, max_value=0.5),
)
def test_eigensystem_closed_form_for_any_signed_couplings(g1, g2, detuning):
    """Signed couplings and detuning never break the closed form."""
    class Stub:
        coupling1 = staticmethod(lambda t: g1)
        coupling2 = staticmethod(lambda t: g2)
    stub = Stub()
    stub.detuning = detuning
    if np.hypot(g1, g2) < 1e-12:
        with pytest.raises(DegeneratePoint):
            instantaneous_eigensystem(stub, 0.0)
        return
    h = np.array(
        [[0.0, g1, 0.0], [g1, detuning, g2], [0.0, g2, 0.0]], dtype=complex
    )
    eig = instantaneous_eigensystem(stub, 0.0)
    for lam, psi in eig.pairs():
        assert np.linalg.norm(h @ psi - lam * psi) < 1e-10


class TestAnalyticEqualTimeEstimate:
    def test_full_transfer_gives_one_half(self):
        assert analytic_g2_equal_time(np.pi / 2) == pytest.approx(0.5, abs=1e-14)

    def test_mixture_form(self):
        # vacuum + loaded-level mixture: weight cancels once in the numerator,
        # twice in the squared denominator
        for theta in (0.3, 0.7, 1.2):
            expected = 0.5 / np.sin(theta) ** 2
            assert analytic_g2_equal_time(theta) == pytest.approx(expected, rel=1e-12)

    def test_equal_mixing_gives_unity(self):
        assert analytic_g2_equal_time(np.pi / 4) == pytest.approx(1.0, rel=1e-12)

    def test_vectorized(self):
        thetas = np.array([0.5, 1.0, np.pi / 2])
        vals = analytic_g2_equal_time(thetas)
        assert vals.shape == (3,)
        assert vals[-1] == pytest.approx(0.5)

    def test_undefined_at_zero_angle(self):
        with pytest.raises(UndefinedAtZeroAngle):
            analytic_g2_equal_time(0.0)
        with pytest.raises(UndefinedAtZeroAngle):
            analytic_g2_equal_time(np.array([0.5, 0.0]))
