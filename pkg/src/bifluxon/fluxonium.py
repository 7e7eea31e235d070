"""Exact circuit Hamiltonian in a truncated oscillator basis.

The Hamiltonian is

    H = 4 E_C n^2 - E_J cos(phi) + (E_L / 2) (phi + 2 pi phi_ext)^2

built in the eigenbasis of the harmonic part 4 E_C n^2 + (E_L/2) phi^2,
whose level spacing is sqrt(8 E_L E_C) and whose zero-point phase spread
is phi_zpf = (2 E_C / E_L)^(1/4).  The cosine is evaluated spectrally:
diagonalize the tridiagonal phi matrix, apply cos to its eigenvalues and
rotate back.  This stays accurate for the large phi_zpf of heavy circuits
where a series expansion of the cosine would lose precision.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal

from .operators import HermitianOperator, eigen_spectrum
from .params import CircuitParams

DEFAULT_DIM = 120
DEFAULT_LEVELS = 6
CONVERGENCE_TOL_GHZ = 1e-6  # 1 kHz


@dataclass(frozen=True)
class SpectrumTable:
    """Eigenvalues, transitions and optional matrix elements on a flux grid.

    levels[p, k] is the k-th eigenvalue at flux_grid[p] in GHz with the
    ground-state energy subtracted, so levels[:, 0] == 0.  transitions
    maps a level pair (i, j) to the array of f_ij over the grid, and
    elements maps (op, i, j) to matrix-element magnitudes when requested.
    """

    flux_grid: np.ndarray
    levels: np.ndarray
    transitions: dict = field(default_factory=dict)
    elements: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.atleast_1d(np.asarray(self.flux_grid, dtype=float))
        lv = np.asarray(self.levels, dtype=float)
        if lv.shape[0] != grid.shape[0]:
            raise ValueError("levels and flux_grid lengths differ")
        if np.any(np.diff(lv, axis=1) < -1e-12):
            raise ValueError("eigenvalues must be ascending at every flux point")
        object.__setattr__(self, "flux_grid", grid)
        object.__setattr__(self, "levels", lv)
        if not self.transitions:
            k = lv.shape[1]
            trans = {
                (i, j): lv[:, j] - lv[:, i] for i in range(k) for j in range(i + 1, k)
            }
            object.__setattr__(self, "transitions", trans)

    @property
    def n_levels(self) -> int:
        return self.levels.shape[1]

    def transition(self, i: int, j: int) -> np.ndarray:
        """f_ij = level_j - level_i over the flux grid, in GHz."""
        if not 0 <= i < j < self.n_levels:
            raise ValueError(f"need 0 <= i < j < {self.n_levels}, got ({i}, {j})")
        return self.transitions[(i, j)]


def _oscillator_basis(params: CircuitParams, dim: int):
    """phi matrix, its spectral decomposition, and cos(phi) at this truncation."""
    phi_zpf = params.phi_zpf
    off = phi_zpf * np.sqrt(np.arange(1, dim, dtype=float))
    w, v = eigh_tridiagonal(np.zeros(dim), off)
    phi = np.zeros((dim, dim))
    idx = np.arange(dim - 1)
    phi[idx, idx + 1] = off
    phi[idx + 1, idx] = off
    cos_phi = (v * np.cos(w)) @ v.T
    return phi, cos_phi


def _hamiltonian_matrix(params: CircuitParams, dim: int, *, parts=None) -> np.ndarray:
    """Real symmetric matrix of H in the oscillator basis.

    parts, when given, is the (phi, cos_phi) pair from _oscillator_basis,
    letting flux sweeps reuse the flux-independent pieces.
    """
    phi, cos_phi = parts if parts is not None else _oscillator_basis(params, dim)
    w0 = params.oscillator_frequency
    delta = 2.0 * np.pi * params.phi_ext
    h = np.diag(w0 * (np.arange(dim) + 0.5))
    h -= params.e_j * cos_phi
    h += params.e_l * delta * phi
    h += 0.5 * params.e_l * delta**2 * np.eye(dim)
    return h


def build_fluxonium_hamiltonian(params: CircuitParams, dim: int = DEFAULT_DIM) -> HermitianOperator:
    """Circuit Hamiltonian as a dense Hermitian matrix, energies in GHz.

    The external flux enters as a displacement of the phase, 2 pi per
    flux quantum.  dim >= 10 is required; below that the truncation does
    not even hold the displaced well.
    """
    if dim < 10:
        raise ValueError(f"dim must be >= 10, got {dim}")
    return HermitianOperator(_hamiltonian_matrix(params, dim))


def _eigvals(params: CircuitParams, dim: int, k: int, parts=None) -> np.ndarray:
    h = _hamiltonian_matrix(params, dim, parts=parts)
    return eigh(h, eigvals_only=True, subset_by_index=(0, k - 1))


def _eigsys(params: CircuitParams, dim: int):
    return eigh(_hamiltonian_matrix(params, dim))


def charge_matrix(params: CircuitParams, dim: int) -> np.ndarray:
    """Charge operator n = i n_zpf (adag - a) in the oscillator basis."""
    n_zpf = 0.5 / params.phi_zpf
    off = np.sqrt(np.arange(1, dim, dtype=float))
    n = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim - 1)
    n[idx, idx + 1] = -1j * n_zpf * off
    n[idx + 1, idx] = 1j * n_zpf * off
    return n


def phase_matrix(params: CircuitParams, dim: int) -> np.ndarray:
    """Phase operator phi = phi_zpf (a + adag) in the oscillator basis."""
    off = params.phi_zpf * np.sqrt(np.arange(1, dim, dtype=float))
    phi = np.zeros((dim, dim))
    idx = np.arange(dim - 1)
    phi[idx, idx + 1] = off
    phi[idx + 1, idx] = off
    return phi


_OPERATOR_BUILDERS = {"n": charge_matrix, "phi": phase_matrix}


def matrix_element(
    params: CircuitParams,
    op_kind: str,
    i: int,
    j: int,
    dim: int = DEFAULT_DIM,
    *,
    check_convergence: bool = True,
) -> float:
    """|<i| op |j>| between circuit eigenstates, dimensionless.

    op_kind is "n" (charge) or "phi" (phase).  With check_convergence the
    two levels are required not to move by more than 1 kHz when the basis
    is doubled, otherwise the index is rejected as unconverged.
    """
    if op_kind not in _OPERATOR_BUILDERS:
        raise ValueError(f"op_kind must be one of {sorted(_OPERATOR_BUILDERS)}")
    if not (0 <= i < dim and 0 <= j < dim):
        raise ValueError(f"level indices ({i}, {j}) out of range for dim={dim}")
    if check_convergence:
        kk = max(i, j) + 1
        lo = _eigvals(params, dim, kk)
        hi = _eigvals(params, 2 * dim, kk)
        drift = np.abs(lo - hi)[[i, j]].max()
        if drift > CONVERGENCE_TOL_GHZ:
            raise ValueError(
                f"levels ({i}, {j}) not converged at dim={dim}: "
                f"doubling the basis moves them by {drift:.3e} GHz"
            )
    _, vecs = _eigsys(params, dim)
    op = _OPERATOR_BUILDERS[op_kind](params, dim)
    return float(np.abs(vecs[:, i].conj() @ op @ vecs[:, j]))


def flux_sweep(
    params: CircuitParams,
    flux_grid,
    k: int = DEFAULT_LEVELS,
    dim: int = DEFAULT_DIM,
    elements: tuple = (),
) -> SpectrumTable:
    """Diagonalize the circuit on a flux grid.

    The flux value stored in params is ignored; the grid supplies it.
    elements is an optional tuple of (op_kind, i, j) triples whose
    magnitudes are evaluated at every grid point.  Each grid point is an
    independent computation; a failure is re-raised with the offending
    flux value named.
    """
    grid = np.atleast_1d(np.asarray(flux_grid, dtype=float))
    if grid.size == 0:
        raise ValueError("flux grid must be non-empty")
    if not np.all(np.isfinite(grid)):
        raise ValueError("flux grid must contain only finite values")
    parts = _oscillator_basis(params, dim)
    ops = {kind: _OPERATOR_BUILDERS[kind](params, dim) for kind, _, _ in elements}
    levels = np.empty((grid.size, k))
    mags = {key: np.empty(grid.size) for key in elements}
    for p, phi_ext in enumerate(grid):
        try:
            pt = params.at_flux(phi_ext)
            if elements:
                vals, vecs = _eigsys(pt, dim)
                for kind, i, j in elements:
                    mags[(kind, i, j)][p] = np.abs(
                        vecs[:, i].conj() @ ops[kind] @ vecs[:, j]
                    )
            else:
                vals = _eigvals(pt, dim, k, parts=parts)
            levels[p] = vals[:k] - vals[0]
        except Exception as exc:
            raise RuntimeError(f"diagonalization failed at phi_ext={phi_ext}") from exc
    return SpectrumTable(flux_grid=grid, levels=levels, elements=mags)


def convergence_check(
    params: CircuitParams,
    flux: float,
    k: int = DEFAULT_LEVELS,
    dim: int = DEFAULT_DIM,
    *,
    step: int = 5,
    tol_ghz: float = CONVERGENCE_TOL_GHZ,
) -> int:
    """Smallest basis size (on a step-spaced ladder) converged below 1 kHz.

    Scans D = 10, 10+step, ... up to 4*dim and returns the first D for
    which doubling the basis moves none of the k lowest eigenvalues by
    more than tol_ghz.  Raises if the budget is exhausted, reporting the
    worst residual seen at the largest size.
    """
    if dim < 10:
        raise ValueError(f"dim must be >= 10, got {dim}")
    pt = params.at_flux(flux)
    cache: dict[int, np.ndarray] = {}

    def levels(d: int) -> np.ndarray:
        if d not in cache:
            cache[d] = _eigvals(pt, d, k)
        return cache[d]

    start = max(10, k + 2)
    worst = np.inf
    for d in range(start, 4 * dim + 1, step):
        worst = float(np.abs(levels(d) - levels(2 * d)).max())
        if worst <= tol_ghz:
            return d
    raise RuntimeError(
        f"no converged basis size found up to {4 * dim}: "
        f"worst eigenvalue drift {worst:.3e} GHz exceeds {tol_ghz:.1e} GHz"
    )


def eigensystem(params: CircuitParams, dim: int = DEFAULT_DIM, k: int = DEFAULT_LEVELS):
    """(values, vectors) of the k lowest circuit eigenstates."""
    vals, vecs = eigh(
        _hamiltonian_matrix(params, dim), subset_by_index=(0, k - 1)
    )
    return vals, vecs


__all__ = [
    "SpectrumTable",
    "build_fluxonium_hamiltonian",
    "charge_matrix",
    "phase_matrix",
    "matrix_element",
    "flux_sweep",
    "convergence_check",
    "eigensystem",
    "eigen_spectrum",
    "DEFAULT_DIM",
    "DEFAULT_LEVELS",
]
