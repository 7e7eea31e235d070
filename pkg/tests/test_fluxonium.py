import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bifluxon.fluxonium import (
    SpectrumTable,
    build_fluxonium_hamiltonian,
    convergence_check,
    eigen_spectrum,
    eigensystem,
    flux_sweep,
    matrix_element,
)
from bifluxon.operators import hermiticity_defect
from bifluxon.params import CircuitParams


def test_harmonic_limit_spectrum(harmonic_params):
    h = build_fluxonium_hamiltonian(harmonic_params, dim=60)
    vals = eigen_spectrum(h, 5)
    spacings = np.diff(vals)
    expected = np.sqrt(8.0 * 0.165 * 1.59)
    assert expected == pytest.approx(1.4487, abs=1e-4)
    assert np.allclose(spacings, expected, rtol=1e-6)


def test_sample_a_transition_frequencies(sample_a):
    h0 = build_fluxonium_hamiltonian(sample_a, dim=120)
    lv0 = eigen_spectrum(h0, 2)
    assert lv0[1] - lv0[0] == pytest.approx(3.0, abs=0.15)
    h5 = build_fluxonium_hamiltonian(sample_a.at_flux(0.5), dim=120)
    lv5 = eigen_spectrum(h5, 2)
    assert lv5[1] - lv5[0] == pytest.approx(0.150, abs=0.02)


def test_hamiltonian_is_hermitian(sample_a):
    h = build_fluxonium_hamiltonian(sample_a.at_flux(0.232), dim=80)
    assert hermiticity_defect(h.entries) < 1e-12


def test_small_dim_rejected(sample_a):
    with pytest.raises(ValueError, match="dim"):
        build_fluxonium_hamiltonian(sample_a, dim=8)


def test_invalid_energies_rejected():
    with pytest.raises(ValueError):
        CircuitParams(e_j=6.0, e_c=-1.0, e_l=0.1)
    with pytest.raises(ValueError):
        CircuitParams(e_j=-1.0, e_c=1.0, e_l=0.1)


def test_charge_matrix_elements(sample_a, sample_b, spectrum_a_cache):
    assert spectrum_a_cache["n01"] == pytest.approx(0.063, abs=0.006)
    n01b = matrix_element(sample_b, "n", 0, 1, 120, check_convergence=False)
    assert n01b == pytest.approx(0.071, abs=0.007)


def test_parity_selection_rule(sample_a):
    # n is parity odd, so same-parity pairs have vanishing elements at zero flux
    assert matrix_element(sample_a, "n", 0, 0, 100,
                          check_convergence=False) == pytest.approx(0.0, abs=1e-8)
    assert matrix_element(sample_a, "n", 0, 2, 100,
                          check_convergence=False) == pytest.approx(0.0, abs=1e-8)


def test_parity_blocks_of_eigenvectors(sample_a):
    # at zero flux every eigenvector lives on even or odd oscillator indices
    _, vecs = eigensystem(sample_a, dim=80, k=5)
    even = np.arange(0, 80, 2)
    odd = np.arange(1, 80, 2)
    for k in range(5):
        w_even = np.sum(np.abs(vecs[even, k]) ** 2)
        assert min(w_even, 1.0 - w_even) < 1e-12


def test_harmonic_phase_zero_point(harmonic_params):
    phi01 = matrix_element(harmonic_params, "phi", 0, 1, 60,
                           check_convergence=False)
    assert phi01 == pytest.approx((2 * 1.59 / 0.165) ** 0.25, abs=1e-4)
    assert phi01 == pytest.approx(2.095, abs=1e-3)


def test_matrix_element_rejects_unconverged(sample_a):
    with pytest.raises(ValueError, match="not converged"):
        matrix_element(sample_a, "n", 0, 9, 12)


def test_flux_sweep_values(sample_a):
    table = flux_sweep(sample_a, [0.0, 0.5], k=3, dim=120)
    assert table.transition(0, 1)[0] == pytest.approx(3.0, abs=0.15)
    assert table.transition(0, 1)[1] == pytest.approx(0.150, abs=0.02)
    assert table.levels[:, 0] == pytest.approx(0.0)


def test_flux_inversion_symmetry(sample_a):
    table = flux_sweep(sample_a, [-0.25, 0.25], k=4, dim=120)
    assert np.allclose(table.levels[0], table.levels[1], atol=1e-9)


def test_flux_periodicity(sample_a):
    table = flux_sweep(sample_a, [0.13, 1.13], k=4, dim=160)
    assert np.allclose(table.levels[0], table.levels[1], atol=1e-6)


def test_sweep_rejects_bad_grid(sample_a):
    with pytest.raises(ValueError):
        flux_sweep(sample_a, [], k=3)
    with pytest.raises(ValueError):
        flux_sweep(sample_a, [0.0, np.nan], k=3)


def test_variational_monotonicity(sample_a):
    # Rayleigh-Ritz: levels only come down as the basis grows.  The
    # spectrally evaluated cosine is not an exactly nested submatrix
    # family, so the property is checked past the convergence knee where
    # its edge effects sit below 1e-9 GHz.
    cp = CircuitParams(6.0, 0.3, 2.0).at_flux(0.2)  # compact circuit, fast knee
    levels = np.array([eigen_spectrum(
        build_fluxonium_hamiltonian(cp, dim=d), 5) for d in [40, 60, 90, 120]])
    assert np.all(np.diff(levels, axis=0) < 1e-9)
    levels_a = np.array([eigen_spectrum(
        build_fluxonium_hamiltonian(sample_a.at_flux(0.2), dim=d), 5)
        for d in [120, 160, 200]])
    assert np.all(np.diff(levels_a, axis=0) < 1e-9)


def test_convergence_check_sample_a(sample_a):
    d = convergence_check(sample_a, 0.0, k=6, dim=50)
    assert d <= 200


def test_convergence_check_harmonic(harmonic_params):
    # exact in any basis: the scan stops at its smallest candidate
    assert convergence_check(harmonic_params, 0.0, k=3, dim=10) == 10


def test_convergence_check_pathological():
    # a nearly free particle never converges within the size budget
    bad = CircuitParams(e_j=6.01, e_c=1.59, e_l=1e-6)
    with pytest.raises(RuntimeError, match="drift"):
        convergence_check(bad, 0.0, k=4, dim=12)


def test_spectrum_table_validation():
    with pytest.raises(ValueError, match="ascending"):
        SpectrumTable(flux_grid=[0.0], levels=[[0.0, 2.0, 1.0]])
    with pytest.raises(ValueError, match="lengths"):
        SpectrumTable(flux_grid=[0.0, 0.1], levels=[[0.0, 1.0]])


def test_transition_accessor_bounds(sample_a):
    table = flux_sweep(sample_a, [0.0], k=3, dim=60)
    with pytest.raises(ValueError):
        table.transition(1, 1)
    with pytest.raises(ValueError):
        table.transition(0, 3)


@settings(max_examples=15, deadline=None)
@given(
    e_j=st.floats(0.5, 12.0),
    e_c=st.floats(0.3, 3.0),
    e_l=st.floats(0.05, 1.0),
    phi=st.floats(-1.0, 1.0),
)
def test_hermiticity_property(e_j, e_c, e_l, phi):
    cp = CircuitParams(e_j, e_c, e_l, phi)
    h = build_fluxonium_hamiltonian(cp, dim=40)
    assert hermiticity_defect(h.entries) < 1e-12


@settings(max_examples=10, deadline=None)
@given(phi=st.floats(0.0, 0.5))
def test_flux_inversion_property(phi):
    cp = CircuitParams(6.01, 1.59, 0.165)
    plus = eigen_spectrum(build_fluxonium_hamiltonian(cp.at_flux(phi), 80), 4)
    minus = eigen_spectrum(build_fluxonium_hamiltonian(cp.at_flux(-phi), 80), 4)
    assert np.allclose(plus, minus, atol=1e-9)
