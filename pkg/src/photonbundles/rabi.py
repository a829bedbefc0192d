"""Spectrum of the coupled atom-cavity block at arbitrary coupling strength.

The static block Hamiltonian on span{|g,n>, |e,n>} conserves excitation
parity P = (-1)^(n_photons + n_e), so it splits into two decoupled chains
that are tridiagonal when ordered by photon number:

  even block  |g,0>, |e,1>, |g,2>, |e,3>, ...   (P = +1)
  odd block   |e,0>, |g,1>, |e,2>, |g,3>, ...   (P = -1)

Each chain is diagonalized with a symmetric tridiagonal eigensolver, so
every eigenvector is parity-pure by construction and the parity-forbidden
coefficients are exact zeros, not numerical noise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DegenerateCoefficient, EigenstateTrackingLost, TruncationNotConverged
from .hilbert import ModelParams, SpaceConfig
from .timeseries import TimeSeries

SIGN_FIX_TOL = 1e-12
COEFF_FLOOR = 1e-12
TRACKING_MIN_OVERLAP = 0.5


@dataclass(frozen=True)
class RabiSpectrum:
    """Eigendecomposition of the coupled block for one parameter point.

    eigenvalues are ascending over both parity sectors; row k of coeff_g /
    coeff_e holds <g,m|state_k> / <e,m|state_k> for m = 0..n_fock-1, and
    parity[k] is +1 or -1.  All coefficients are real; the overall sign of
    each row is fixed so its first nonzero entry (scanning g then e by
    photon number) is positive.
    """

    params: ModelParams
    n_fock: int
    eigenvalues: np.ndarray
    coeff_g: np.ndarray
    coeff_e: np.ndarray
    parity: np.ndarray

    @property
    def n_states(self) -> int:
        return self.eigenvalues.size

    def coefficient(self, n: int, m: int) -> float:
        """Overlap <g,m|state_n>: the drive connects |b,m> to states through it."""
        return float(self.coeff_g[n, m])

    def eigenvector_composite(self, n: int, cfg: SpaceConfig) -> np.ndarray:
        """Embed dressed state n into the 3 * n_fock composite space."""
        if cfg.n_fock != self.n_fock:
            raise ValueError("SpaceConfig truncation differs from the spectrum's")
        v = np.zeros(cfg.dim, dtype=complex)
        v[cfg.n_fock : 2 * cfg.n_fock] = self.coeff_g[n]
        v[2 * cfg.n_fock :] = self.coeff_e[n]
        return v


def _block_chain(p: ModelParams, n_fock: int, odd: bool):
    """Diagonal and off-diagonal of one parity chain, ordered by photon number."""
    ks = np.arange(n_fock)
    # atom level alternates along the chain; the odd chain starts on |e,0>
    on_e = (ks % 2 == 1) ^ odd
    diag = np.where(on_e, p.omega_e, p.omega_g) + p.omega_c * ks
    off = p.coupling * np.sqrt(np.arange(1.0, n_fock))
    return diag, off


def _diagonalize(p: ModelParams, n_fock: int):
    evals = np.empty(2 * n_fock)
    coeff_g = np.zeros((2 * n_fock, n_fock))
    coeff_e = np.zeros((2 * n_fock, n_fock))
    parity = np.empty(2 * n_fock, dtype=int)

    rows = []
    for odd in (False, True):
        diag, off = _block_chain(p, n_fock, odd)
        w, v = eigh_tridiagonal(diag, off)
        for j in range(n_fock):
            rows.append((w[j], -1 if odd else 1, odd, v[:, j]))
    # stable sort: ties between parity sectors keep the even state first
    rows.sort(key=lambda r: (r[0], r[1] < 0))

    ks = np.arange(n_fock)
    for k, (w, par, odd, vec) in enumerate(rows):
        on_e = (ks % 2 == 1) ^ odd
        g_row = np.where(on_e, 0.0, vec)
        e_row = np.where(on_e, vec, 0.0)
        # global sign: first nonzero coefficient positive, scanning g then e
        interleaved = np.concatenate([g_row, e_row]).reshape(2, -1).T.ravel()
        nz = np.flatnonzero(np.abs(interleaved) > SIGN_FIX_TOL)
        if nz.size and interleaved[nz[0]] < 0:
            g_row = -g_row
            e_row = -e_row
        evals[k] = w
        parity[k] = par
        coeff_g[k] = g_row
        coeff_e[k] = e_row
    return evals, coeff_g, coeff_e, parity


def compute_spectrum(
    p: ModelParams,
    n_fock: int,
    *,
    check_convergence: bool = True,
    check_margin: float = 1.5,
    check_levels: int = 10,
    check_tol: float = 1e-6,
) -> RabiSpectrum:
    """Diagonalize the coupled block at truncation n_fock.

    When check_convergence is set the lowest check_levels eigenvalues are
    recomputed at a check_margin-times larger truncation; disagreement above
    check_tol raises TruncationNotConverged.
    """
    if n_fock < 2:
        raise ValueError("n_fock must be at least 2")
    evals, cg, ce, par = _diagonalize(p, n_fock)
    if check_convergence:
        n_big = int(np.ceil(check_margin * n_fock))
        evals_big, _, _, _ = _diagonalize(p, n_big)
        k = min(check_levels, evals.size)
        drift = float(np.max(np.abs(evals[:k] - evals_big[:k])))
        if drift > check_tol:
            raise TruncationNotConverged(
                f"lowest {k} levels move by {drift:.3e} when n_fock grows "
                f"{n_fock} -> {n_big}; tolerance {check_tol:.1e}"
            )
    return RabiSpectrum(p, n_fock, evals, cg, ce, par)


def diagonalize(p: ModelParams, cfg: SpaceConfig, **kwargs) -> RabiSpectrum:
    """Spectrum of the coupled block at the truncation carried by cfg."""
    return compute_spectrum(p, cfg.n_fock, **kwargs)


def classify_parity(coeff_g_row: np.ndarray, coeff_e_row: np.ndarray, tol: float = 1e-10) -> int:
    """Infer parity from the zero pattern of one coefficient row.

    Returns +1 or -1, or 0 when the row has support in both sectors above
    tol (which indicates the vector is not an eigenstate of parity).
    """
    ks = np.arange(coeff_g_row.size)
    even_support = float(
        np.sum(coeff_g_row[ks % 2 == 0] ** 2) + np.sum(coeff_e_row[ks % 2 == 1] ** 2)
    )
    odd_support = float(
        np.sum(coeff_g_row[ks % 2 == 1] ** 2) + np.sum(coeff_e_row[ks % 2 == 0] ** 2)
    )
    if even_support > tol and odd_support > tol:
        return 0
    return 1 if even_support >= odd_support else -1


def index_by_parity(spectrum: RabiSpectrum) -> dict[int, np.ndarray]:
    """Energy-ordered state indices of each parity sector."""
    return {
        1: np.flatnonzero(spectrum.parity == 1),
        -1: np.flatnonzero(spectrum.parity == -1),
    }


def state_index(spectrum: RabiSpectrum, parity: int, rank: int) -> int:
    """Global index of the rank-th lowest state inside one parity sector.

    Energy ordering across sectors changes with coupling strength (sector
    levels cross); (parity, rank) stays well defined through crossings.
    """
    idx = index_by_parity(spectrum)[parity]
    if rank >= idx.size:
        raise IndexError(f"parity {parity} sector has only {idx.size} states")
    return int(idx[rank])


def eta(spectrum: RabiSpectrum, n: int, M: int, m: int) -> float:
    """Pulse-amplitude compensation ratio |C(n, M) / C(n, 2m+M)|.

    The transfer enters dressed state n from cavity occupation M and leaves
    into occupation 2m+M; equal effective couplings on both legs require the
    entry drive to be stronger by exactly this ratio.
    """
    c1 = spectrum.coefficient(n, M)
    c2 = spectrum.coefficient(n, 2 * m + M)
    if abs(c2) < COEFF_FLOOR:
        raise DegenerateCoefficient(
            f"coefficient ({n}, {2 * m + M}) is {c2:.2e}; the ratio is undefined "
            "(bundle target unreachable at this coupling)"
        )
    return abs(c1 / c2)


def coefficient_sweep(
    p: ModelParams,
    cfg: SpaceConfig,
    lambda_grid,
    n: int,
    m_list,
    *,
    check_convergence: bool = False,
) -> TimeSeries:
    """Table of <g,m|state_n>(coupling) for each m in m_list.

    State identity is followed along the sweep by maximal overlap with the
    previous grid point, and signs are aligned point to point so curves do
    not flip between samples; an overlap below 0.5 raises
    EigenstateTrackingLost (a crossing fell between grid points).  The state
    label n refers to the energy ordering at the first grid point.
    """
    lambda_grid = np.asarray(lambda_grid, dtype=float)
    if lambda_grid.ndim != 1 or lambda_grid.size == 0:
        raise ValueError("lambda_grid must be a nonempty 1-d array")
    if np.any(lambda_grid < 0):
        raise ValueError("coupling values must be nonnegative")
    m_list = list(m_list)
    cols = {f"C_{n}_{m}": np.empty(lambda_grid.size) for m in m_list}

    prev_tracked = None  # (n_states, 2 * n_fock) rows in label order, signs continuous
    for i, lam in enumerate(lambda_grid):
        spec = compute_spectrum(
            replace(p, coupling=float(lam)), cfg.n_fock, check_convergence=check_convergence
        )
        vecs = np.hstack([spec.coeff_g, spec.coeff_e])
        if prev_tracked is None:
            tracked = vecs
        else:
            overlap = prev_tracked @ vecs.T  # rows: labels from previous point
            tracked = np.empty_like(vecs)
            taken = np.zeros(spec.n_states, dtype=bool)
            for label in range(spec.n_states):
                cand = np.argsort(np.abs(overlap[label]))[::-1]
                pick = next(c for c in cand if not taken[c])
                if abs(overlap[label, pick]) < TRACKING_MIN_OVERLAP:
                    raise EigenstateTrackingLost(
                        f"state {label} overlap fell to {abs(overlap[label, pick]):.3f} "
                        f"at coupling {lam:g}; refine the sweep grid"
                    )
                taken[pick] = True
                # sign continuity: align with the previous point's vector
                tracked[label] = vecs[pick] if overlap[label, pick] >= 0 else -vecs[pick]
        prev_tracked = tracked
        for m in m_list:
            cols[f"C_{n}_{m}"][i] = tracked[n, m]
    return TimeSeries(
        axis=lambda_grid,
        columns=cols,
        axis_name="lambda",
        metadata={"state": n, "n_fock": cfg.n_fock},
    )
