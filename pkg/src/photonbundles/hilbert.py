"""Truncated composite Hilbert space: 3-level atom (b, g, e) x Fock mode.

Basis ordering is atom-major and fixed everywhere in the package:
|b,0> ... |b,N-1>, |g,0> ... |g,N-1>, |e,0> ... |e,N-1>, with N = n_fock.
All frequencies, rates and times are in units of the cavity frequency
(omega_c = 1).  Operators are stored dense below dimension 256 and as CSR
sparse matrices above it; eigensolves densify regardless.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

ATOM_LEVELS = ("b", "g", "e")

HERMITICITY_TOL = 1e-12
DENSE_FALLBACK_DIM = 256


@dataclass(frozen=True)
class SpaceConfig:
    """Truncation of the composite space; total dimension is 3 * n_fock."""

    n_fock: int
    atom_levels: int = 3

    def __post_init__(self):
        if self.atom_levels != 3:
            raise ValueError("the composite space has exactly 3 atomic levels (b, g, e)")
        if self.n_fock < 2:
            raise ValueError("n_fock must be at least 2")

    @property
    def dim(self) -> int:
        return 3 * self.n_fock

    def index(self, level: str, n: int) -> int:
        """Flat index of the product state |level, n>."""
        if level not in ATOM_LEVELS:
            raise ValueError(f"unknown atomic level {level!r}")
        if not 0 <= n < self.n_fock:
            raise ValueError(f"Fock index {n} outside truncation {self.n_fock}")
        return ATOM_LEVELS.index(level) * self.n_fock + n


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the driven-atom-cavity model, in omega_c units.

    omega_b, omega_g, omega_e are the three atomic level frequencies
    (ordering omega_b < omega_g < omega_e); coupling is the atom-cavity
    coupling strength of the upper transition (g <-> e) to the mode.
    """

    omega_c: float = 1.0
    omega_e: float = 1.0
    omega_g: float = 0.0
    omega_b: float = -6.0
    coupling: float = 0.6

    def __post_init__(self):
        if not self.omega_b < self.omega_g < self.omega_e:
            raise ValueError("levels must satisfy omega_b < omega_g < omega_e")
        if self.coupling < 0:
            raise ValueError("coupling must be nonnegative")
        if self.omega_c <= 0:
            raise ValueError("omega_c must be positive")


@dataclass(frozen=True)
class OperatorMatrix:
    """Operator on the composite space.

    entries is a dense ndarray below DENSE_FALLBACK_DIM and scipy CSR above;
    hermitian_flag is validated at construction time.
    """

    dim: int
    entries: object
    hermitian_flag: bool = False

    def __post_init__(self):
        if self.hermitian_flag:
            dev = _max_abs(self.entries - _dag_raw(self.entries))
            if dev >= HERMITICITY_TOL:
                raise ValueError(f"operator flagged hermitian deviates by {dev:.3e}")

    def dense(self) -> np.ndarray:
        if sp.issparse(self.entries):
            return self.entries.toarray()
        return np.asarray(self.entries)

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.dim, _dag_raw(self.entries), self.hermitian_flag)


def _dag_raw(m):
    if sp.issparse(m):
        return m.conj().transpose().tocsr()
    return np.asarray(m).conj().T


def _max_abs(m) -> float:
    if sp.issparse(m):
        return 0.0 if m.nnz == 0 else float(np.max(np.abs(m.data)))
    m = np.asarray(m)
    return 0.0 if m.size == 0 else float(np.max(np.abs(m)))


def _store(mat: np.ndarray, dim: int):
    if dim < DENSE_FALLBACK_DIM:
        return mat
    return sp.csr_matrix(mat)


def build_destroy(cfg: SpaceConfig) -> OperatorMatrix:
    """Photon annihilation operator (identity on the atom): <n-1|a|n> = sqrt(n)."""
    n = cfg.n_fock
    a = np.zeros((n, n), dtype=complex)
    ks = np.arange(1, n)
    a[ks - 1, ks] = np.sqrt(ks)
    full = np.kron(np.eye(3), a)
    return OperatorMatrix(cfg.dim, _store(full, cfg.dim), hermitian_flag=False)


def build_atomic_projector(from_level: str, to_level: str, cfg: SpaceConfig) -> OperatorMatrix:
    """|to><from| on the atom, identity on the Fock mode."""
    for lv in (from_level, to_level):
        if lv not in ATOM_LEVELS:
            raise ValueError(f"unknown atomic level {lv!r}")
    block = np.zeros((3, 3), dtype=complex)
    block[ATOM_LEVELS.index(to_level), ATOM_LEVELS.index(from_level)] = 1.0
    full = np.kron(block, np.eye(cfg.n_fock))
    herm = from_level == to_level
    return OperatorMatrix(cfg.dim, _store(full, cfg.dim), hermitian_flag=herm)


def build_atomic_flip(level1: str, level2: str, cfg: SpaceConfig) -> OperatorMatrix:
    """|l1><l2| + |l2><l1| on the atom, identity on the mode.  Hermitian."""
    m = build_atomic_projector(level2, level1, cfg).dense()
    m = m + m.conj().T
    return OperatorMatrix(cfg.dim, _store(m, cfg.dim), hermitian_flag=True)


def build_quadrature(cfg: SpaceConfig) -> OperatorMatrix:
    """a + a-dagger on the composite space.  Hermitian."""
    a = build_destroy(cfg).dense()
    m = a + a.conj().T
    return OperatorMatrix(cfg.dim, _store(m, cfg.dim), hermitian_flag=True)


def build_rabi_hamiltonian(p: ModelParams, cfg: SpaceConfig) -> OperatorMatrix:
    """Static atom-cavity block Hamiltonian, acting as zero on the |b> sector.

    H = omega_e |e><e| + omega_g |g><g| + omega_c a'a (|e><e| + |g><g|)
        + coupling (a + a') (|e><g| + |g><e|)
    """
    n = cfg.n_fock
    dim = cfg.dim
    h = np.zeros((dim, dim), dtype=complex)
    ns = np.arange(n)
    gi = n + ns          # g-block flat indices
    ei = 2 * n + ns      # e-block flat indices
    h[gi, gi] = p.omega_g + p.omega_c * ns
    h[ei, ei] = p.omega_e + p.omega_c * ns
    # coupling (a + a')(|e><g| + |g><e|): connects |g,m> <-> |e,m +/- 1>
    for m in range(n):
        if m + 1 < n:
            v = p.coupling * np.sqrt(m + 1)
            h[2 * n + m + 1, n + m] = v   # <e,m+1| H |g,m>
            h[n + m, 2 * n + m + 1] = v
        if m - 1 >= 0:
            v = p.coupling * np.sqrt(m)
            h[2 * n + m - 1, n + m] = v
            h[n + m, 2 * n + m - 1] = v
    return OperatorMatrix(dim, _store(h, dim), hermitian_flag=True)


def build_bare_hamiltonian(p: ModelParams, cfg: SpaceConfig) -> OperatorMatrix:
    """Full undriven Hamiltonian: the coupled block plus the free |b> sector."""
    h = build_rabi_hamiltonian(p, cfg).dense().copy()
    ns = np.arange(cfg.n_fock)
    h[ns, ns] = p.omega_b + p.omega_c * ns
    return OperatorMatrix(cfg.dim, _store(h, cfg.dim), hermitian_flag=True)


def basis_vector(cfg: SpaceConfig, level: str, n: int) -> np.ndarray:
    """Unit product-basis vector |level, n>."""
    v = np.zeros(cfg.dim, dtype=complex)
    v[cfg.index(level, n)] = 1.0
    return v
