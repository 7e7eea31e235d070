"""Circuit coupled to its readout resonator: dressed levels and shifts.

The joint Hamiltonian is the circuit projected onto its lowest
eigenstates, tensored with an n_photons-level resonator and coupled
through the charge operator:

    H = H_q + f_r (adag a + 1/2) + g n (adag + a)

Dressed states are labeled by maximum overlap with the bare product
states; the sorted joint eigenvalues are what the spectroscopy fit
consumes.
"""

import numpy as np

from . import fluxonium
from .operators import HermitianOperator, destroy
from .params import CircuitParams, ResonatorParams

DEFAULT_DIM_Q = 8


def build_joint_hamiltonian(
    cp: CircuitParams,
    rp: ResonatorParams,
    dim_q: int = DEFAULT_DIM_Q,
    *,
    dim: int = fluxonium.DEFAULT_DIM,
) -> HermitianOperator:
    """Joint circuit-resonator Hamiltonian, dimension dim_q * n_photons.

    The circuit block is diagonal (its own eigenvalues, ground energy
    kept) and the charge operator is rotated into that eigenbasis before
    coupling.  dim is the oscillator-basis size used for the underlying
    circuit diagonalization.
    """
    if dim_q < 3:
        raise ValueError(f"dim_q must be >= 3, got {dim_q}")
    vals, vecs = fluxonium.eigensystem(cp, dim=dim, k=dim_q)
    n_q = vecs.conj().T @ fluxonium.charge_matrix(cp, dim) @ vecs
    return _assemble_joint(vals, n_q, rp)


def _assemble_joint(qubit_vals, n_q, rp: ResonatorParams) -> HermitianOperator:
    dim_q = len(qubit_vals)
    nph = rp.n_photons
    a = destroy(nph)
    h_r = rp.f_r * (np.diag(np.arange(nph, dtype=float)) + 0.5 * np.eye(nph))
    h = np.kron(np.diag(qubit_vals), np.eye(nph)).astype(complex)
    h += np.kron(np.eye(dim_q), h_r)
    h += rp.g * np.kron(n_q, a + a.T)
    return HermitianOperator(h)


def dressed_assignment(h: HermitianOperator, n_photons: int, labels):
    """Map bare (qubit, photon) labels to dressed energies.

    Assignment is by maximum overlap of each dressed eigenvector with the
    bare product basis.  Raises if any requested overlap drops below 1/2
    or two bare labels claim the same dressed level.
    """
    vals, vecs = np.linalg.eigh(h.entries)
    weights = np.abs(vecs) ** 2
    picked = {}
    taken = {}
    for q, n in labels:
        bare = q * n_photons + n
        alpha = int(np.argmax(weights[bare, :]))
        w = weights[bare, alpha]
        if w < 0.5:
            raise RuntimeError(
                f"dressed-state assignment ambiguous for bare (q={q}, n={n}): "
                f"best overlap {w:.3f} < 0.5"
            )
        if alpha in taken:
            raise RuntimeError(
                f"dressed level {alpha} claimed by both {taken[alpha]} "
                f"and (q={q}, n={n})"
            )
        taken[alpha] = (q, n)
        picked[(q, n)] = float(vals[alpha])
    return picked


def dispersive_shift(
    cp: CircuitParams,
    rp: ResonatorParams,
    level: tuple = (0, 1),
    flux: float = None,
    *,
    dim_q: int = DEFAULT_DIM_Q,
    dim: int = fluxonium.DEFAULT_DIM,
) -> float:
    """Qubit-state-dependent resonator pull chi_ij in GHz.

    chi_ij = [E(q=j, 1 photon) - E(q=j, 0)] - [E(q=i, 1) - E(q=i, 0)]
    with dressed energies assigned by maximum overlap.
    """
    i, j = level
    if flux is not None:
        cp = cp.at_flux(flux)
    if max(i, j) + 2 > dim_q:
        dim_q = max(i, j) + 2
    h = build_joint_hamiltonian(cp, rp, dim_q, dim=dim)
    labels = [(i, 0), (i, 1), (j, 0), (j, 1)]
    energies = dressed_assignment(h, rp.n_photons, labels)
    pull_j = energies[(j, 1)] - energies[(j, 0)]
    pull_i = energies[(i, 1)] - energies[(i, 0)]
    return pull_j - pull_i


def coupling_for_shift(
    cp: CircuitParams,
    rp_sans_g: ResonatorParams,
    chi_target: float,
    *,
    g_hi: float = 0.6,
    dim_q: int = DEFAULT_DIM_Q,
) -> float:
    """Coupling g reproducing a target |chi_01|, by bisection in g.

    chi_target is the magnitude in GHz.  The paper-style tables quote
    chi_01 without the coupling that produced it, so this inversion is
    how the fixture couplings are constructed.
    """
    from dataclasses import replace
    from scipy.optimize import brentq

    def objective(g):
        rp = replace(rp_sans_g, g=g)
        return abs(dispersive_shift(cp, rp, (0, 1), dim_q=dim_q)) - chi_target

    lo = 1e-4
    if objective(lo) > 0:
        raise ValueError("chi target already exceeded at negligible coupling")
    return float(brentq(objective, lo, g_hi, xtol=1e-9))


def labeled_transitions(
    cp: CircuitParams,
    rp: ResonatorParams,
    flux_grid,
    k: int = 8,
    *,
    dim_q: int = DEFAULT_DIM_Q,
    dim: int = fluxonium.DEFAULT_DIM,
) -> fluxonium.SpectrumTable:
    """Sorted joint-system levels over a flux grid, ground subtracted.

    Levels are indexed by plain ascending order, matching the eigenvalue
    indices used in the transition-fit cost.
    """
    grid = np.atleast_1d(np.asarray(flux_grid, dtype=float))
    if grid.size == 0:
        raise ValueError("flux grid must be non-empty")
    levels = np.empty((grid.size, k))
    for p, phi in enumerate(grid):
        try:
            h = build_joint_hamiltonian(cp.at_flux(phi), rp, dim_q, dim=dim)
            vals = np.linalg.eigvalsh(h.entries)
        except Exception as exc:
            raise RuntimeError(f"joint diagonalization failed at phi_ext={phi}") from exc
        levels[p] = vals[:k] - vals[0]
    return fluxonium.SpectrumTable(flux_grid=grid, levels=levels)


__all__ = [
    "build_joint_hamiltonian",
    "dressed_assignment",
    "dispersive_shift",
    "coupling_for_shift",
    "labeled_transitions",
    "DEFAULT_DIM_Q",
]
