"""Coupled-block spectrum against a dense diagonalization oracle.

The production path solves two real tridiagonal parity chains; the oracle
here diagonalizes the full coupled block built from explicit operators,
which shares no code with the chain construction.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photonbundles.errors import DegenerateCoefficient, TruncationNotConverged
from photonbundles.hilbert import ModelParams, SpaceConfig, build_rabi_hamiltonian
from photonbundles.rabi import (
    classify_parity,
    compute_spectrum,
    eta,
    index_by_parity,
    state_index,
)


def dense_block_spectrum(p: ModelParams, n_fock: int):
    """Oracle: eigensystem of the coupled block from the dense Hamiltonian."""
    cfg = SpaceConfig(n_fock=n_fock)
    h = build_rabi_hamiltonian(p, cfg).dense()
    block = h[n_fock:, n_fock:].real  # coupled (g, e) sector only
    evals, vecs = np.linalg.eigh(block)
    return evals, vecs


@pytest.mark.parametrize("coupling", [0.37, 0.6, 1.2])
def test_eigenvalues_match_dense_oracle(coupling):
    p = ModelParams(omega_b=-6.0, coupling=coupling)
    n_fock = 24
    spec = compute_spectrum(p, n_fock, check_convergence=False)
    evals, _ = dense_block_spectrum(p, n_fock)
    assert np.max(np.abs(spec.eigenvalues - evals)) < 1e-10


@pytest.mark.parametrize("coupling", [0.37, 1.2])
def test_eigenvectors_match_dense_oracle_up_to_sign(coupling):
    p = ModelParams(omega_b=-6.0, coupling=coupling)
    n_fock = 20
    spec = compute_spectrum(p, n_fock, check_convergence=False)
    _, vecs = dense_block_spectrum(p, n_fock)
    # low-lying states only; the top of a truncated spectrum is not physical
    for k in range(10):
        mine = np.concatenate([spec.coeff_g[k], spec.coeff_e[k]])
        ref = vecs[:, k]
        overlap = abs(mine @ ref)
        assert overlap > 1 - 1e-10


def test_sign_convention_first_nonzero_positive():
    spec = compute_spectrum(ModelParams(coupling=0.6), 16, check_convergence=False)
    for k in range(spec.n_states):
        row = np.empty(2 * spec.n_fock)
        row[0::2] = spec.coeff_g[k]
        row[1::2] = spec.coeff_e[k]
        # interleave in the scan order: g then e at each photon number
        nonzero = row[np.abs(row) > 1e-12]
        assert nonzero[0] > 0


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.05, max_value=1.5))
def test_parity_zeros_are_structural(coupling):
    """Opposite-parity coefficients are exactly zero, not merely small."""
    spec = compute_spectrum(ModelParams(coupling=coupling), 12, check_convergence=False)
    ks = np.arange(spec.n_fock)
    for n in range(8):
        if spec.parity[n] == 1:
            assert np.all(spec.coeff_g[n][ks % 2 == 1] == 0.0)
            assert np.all(spec.coeff_e[n][ks % 2 == 0] == 0.0)
        else:
            assert np.all(spec.coeff_g[n][ks % 2 == 0] == 0.0)
            assert np.all(spec.coeff_e[n][ks % 2 == 1] == 0.0)


def test_classify_parity_consistent_with_labels():
    spec = compute_spectrum(ModelParams(coupling=0.8), 14, check_convergence=False)
    for n in range(10):
        assert classify_parity(spec.coeff_g[n], spec.coeff_e[n]) == spec.parity[n]


def test_parity_sector_indexing_round_trip():
    spec = compute_spectrum(ModelParams(coupling=0.6), 14, check_convergence=False)
    sectors = index_by_parity(spec)
    assert sectors[1].size + sectors[-1].size == spec.n_states
    for parity in (1, -1):
        for rank, idx in enumerate(sectors[parity][:5]):
            assert state_index(spec, parity, rank) == idx
    with pytest.raises(IndexError):
        state_index(spec, 1, 10**6)


def test_normalization_of_coefficient_rows():
    spec = compute_spectrum(ModelParams(coupling=1.2, omega_b=-10.0), 30, check_convergence=False)
    norms = np.sum(spec.coeff_g**2 + spec.coeff_e**2, axis=1)
    assert np.allclose(norms, 1.0, atol=1e-12)


def test_truncation_convergence_check_raises_when_too_small():
    with pytest.raises(TruncationNotConverged):
        compute_spectrum(ModelParams(coupling=1.2), 4, check_margin=4.0)


def test_low_spectrum_stable_under_truncation_growth():
    p = ModelParams(omega_b=-10.0, coupling=1.2)
    a = compute_spectrum(p, 60, check_convergence=False)
    b = compute_spectrum(p, 90, check_convergence=False)
    assert np.max(np.abs(a.eigenvalues[:12] - b.eigenvalues[:12])) < 1e-10
    assert abs(a.coefficient(0, 2) - b.coefficient(0, 2)) < 1e-12


@pytest.mark.parametrize(
    "model,n,M,m,published",
    [
        (dict(omega_b=-6.0, coupling=0.6), 0, 0, 1, 6.8538),
        (dict(omega_b=-6.0, coupling=0.6), 1, 1, 1, 6.4641),
        (dict(omega_b=-10.0, coupling=1.2), 0, 0, 2, 3.1814),
        (dict(omega_b=-10.0, coupling=1.2), 0, 0, 3, 12.6179),
    ],
)
def test_compensation_ratios_match_published_values(model, n, M, m, published):
    """The bundled scenarios quote these drive-strength ratios to 5 digits."""
    spec = compute_spectrum(ModelParams(**model), 60, check_convergence=False)
    assert eta(spec, n, M, m) == pytest.approx(published, abs=5e-4)


def test_eta_rejects_vanishing_denominator():
    # at zero coupling the ground state has no two-photon component
    spec = compute_spectrum(ModelParams(coupling=0.0), 12, check_convergence=False)
    with pytest.raises(DegenerateCoefficient):
        eta(spec, 0, 0, 1)
