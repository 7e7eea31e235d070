import numpy as np
import pytest

from bifluxon import samples
from bifluxon.params import CircuitParams


@pytest.fixture(scope="session")
def sample_a():
    return samples.SAMPLE_A


@pytest.fixture(scope="session")
def sample_b():
    return samples.SAMPLE_B


@pytest.fixture(scope="session")
def harmonic_params():
    """E_J = 0: the circuit reduces to the bare LC oscillator."""
    return CircuitParams(e_j=0.0, e_c=1.59, e_l=0.165, phi_ext=0.0)


@pytest.fixture(scope="session")
def spectrum_a_cache():
    """Levels and key matrix elements of device A, computed once."""
    from bifluxon.fluxonium import eigensystem, matrix_element

    vals, _ = eigensystem(samples.SAMPLE_A, dim=120, k=6)
    return {
        "levels": vals - vals[0],
        "f01": vals[1] - vals[0],
        "f12": vals[2] - vals[1],
        "phi01": matrix_element(samples.SAMPLE_A, "phi", 0, 1, 120,
                                check_convergence=False),
        "phi12": matrix_element(samples.SAMPLE_A, "phi", 1, 2, 120,
                                check_convergence=False),
        "n01": matrix_element(samples.SAMPLE_A, "n", 0, 1, 120,
                              check_convergence=False),
    }
