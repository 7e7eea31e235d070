"""Dense Hermitian operators and the eigensolver wrapper."""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

HERMITICITY_RTOL = 1e-12


@dataclass(frozen=True)
class HermitianOperator:
    """Dense matrix checked to be Hermitian at construction."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if not is_hermitian(m):
            dev = hermiticity_defect(m)
            raise ValueError(f"matrix is not Hermitian (relative defect {dev:.3e})")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def hermiticity_defect(m: np.ndarray) -> float:
    """max |M - M^dagger| relative to max |M| (0 for the zero matrix)."""
    scale = np.abs(m).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(m - m.conj().T).max() / scale)


def is_hermitian(m: np.ndarray, rtol: float = HERMITICITY_RTOL) -> bool:
    return hermiticity_defect(m) <= rtol


def destroy(dim: int) -> np.ndarray:
    """Bosonic annihilation operator on a dim-level ladder."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


def number(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float))


def eigen_spectrum(h, k: int) -> np.ndarray:
    """k lowest eigenvalues of a Hermitian operator, ascending, in GHz.

    Accepts either a HermitianOperator or a raw array (which is then
    checked for Hermiticity before solving).
    """
    m = h.entries if isinstance(h, HermitianOperator) else np.asarray(h)
    if not is_hermitian(m):
        raise ValueError(
            f"matrix is not Hermitian (relative defect {hermiticity_defect(m):.3e})"
        )
    if k > m.shape[0]:
        raise ValueError(f"requested {k} levels from a dim-{m.shape[0]} operator")
    vals = eigh(m, eigvals_only=True, subset_by_index=(0, k - 1))
    return np.sort(vals)
