import numpy as np
import pytest

from bifluxon.bloch import (
    band_fourier,
    bloch_bands,
    build_dual_hamiltonian,
    build_two_amplitude_hamiltonian,
    dual_spectrum,
    ground_curvature_el,
    interband_omega,
    renormalized_el,
)
from bifluxon.fluxonium import flux_sweep
from bifluxon.params import CircuitParams, DualParams
from bifluxon.samples import DUAL_A, SAMPLE_A

EC = 1.59


@pytest.fixture(scope="module")
def bands_a():
    return band_fourier(bloch_bands(6.01, EC, grid_size=401), k_max=3)


def test_free_rotor_lowest_band():
    bands = bloch_bands(0.0, EC, grid_size=201, s_max=0)
    n = bands.quasicharge_grid
    assert np.allclose(bands.bands[0], 4 * EC * n**2, atol=1e-10)


def test_deep_well_band_spacing():
    # E_J >> E_C: adjacent bands separated by the plasma frequency
    e_j, e_c = 50.0, 0.5
    bands = bloch_bands(e_j, e_c, s_max=1, k_charge=40)
    wp = np.sqrt(8 * e_j * e_c)
    gap = bands.bands[1] - bands.bands[0]
    assert np.all(np.abs(gap - wp) / wp < 0.05)


def test_band_symmetry(bands_a):
    b = bands_a.bands
    assert np.allclose(b, b[:, ::-1], atol=1e-10)


def test_bands_non_crossing(bands_a):
    assert np.all(np.diff(bands_a.bands, axis=0) > 0)


def test_sample_a_band_width(bands_a):
    # lowest-band width ~ twice the single-slip amplitude, a couple hundred MHz
    width = bands_a.band_width(0)
    assert 0.08 < width < 0.30


def test_free_rotor_fourier_analytic():
    # int n^2 cos(2 pi k n) dn over [-1/2, 1/2] gives (-1)^k / (2 pi^2 k^2)
    bands = band_fourier(bloch_bands(0.0, EC, grid_size=401, s_max=0), k_max=2)
    assert bands.fourier[(0, 1)] == pytest.approx(-4 * EC / np.pi**2, rel=1e-3)
    assert bands.fourier[(0, 1)] == pytest.approx(-0.6444, abs=7e-4)
    assert bands.fourier[(0, 2)] == pytest.approx(4 * EC / (4 * np.pi**2), rel=1e-3)
    assert bands.fourier[(0, 2)] == pytest.approx(0.1611, abs=2e-4)


def test_sample_a_single_slip_amplitude(bands_a):
    # bare Fourier amplitude; the fitted device value 153 MHz additionally
    # absorbs the inductive squeezing of the wells, so agreement is loose
    e01 = abs(bands_a.fourier[(0, 1)])
    assert 0.100 < e01 < 0.120
    assert abs(e01 - 0.153) / 0.153 < 0.35


def test_fourier_reconstruction(bands_a):
    # k <= 3 rebuilds the lowest band to a fraction of its width
    err = np.abs(bands_a.reconstruct(0) - bands_a.bands[0]).max()
    assert err < 1e-3 * bands_a.band_width(0)
    for ratio in (3.0, 5.0, 10.0):
        bands = band_fourier(bloch_bands(ratio * EC, EC), k_max=3)
        err = np.abs(bands.reconstruct(0) - bands.bands[0]).max()
        assert err < 0.01 * bands.band_width(0)


def test_grid_validation():
    with pytest.raises(ValueError, match="grid_size"):
        bloch_bands(6.0, 1.5, grid_size=16)
    with pytest.raises(ValueError, match="k_charge"):
        bloch_bands(6.0, 1.5, k_charge=4)


def test_harmonic_interband_values(bands_a):
    bands = interband_omega(bands_a, mode="harmonic")
    amp = (2 * EC / 6.01) ** 0.25
    assert amp == pytest.approx(0.8528, abs=1e-4)
    assert np.allclose(bands.omega[0, 1], amp)
    assert np.allclose(bands.omega[1, 2], amp * np.sqrt(2))
    assert np.allclose(bands.omega[0, 2], 0.0)


def test_numeric_interband_deep_well():
    # in the deep-well regime the numeric coupling approaches the harmonic one
    e_j, e_c = 50.0, 1.0
    bands = bloch_bands(e_j, e_c, grid_size=801, s_max=2, k_charge=40)
    num = interband_omega(bands, mode="numeric")
    harm = (2 * e_c / e_j) ** 0.25
    mid = np.abs(num.omega[0, 1][200:601]).mean()  # away from zone edges
    assert mid == pytest.approx(harm, rel=0.05)


def test_dual_half_flux_splitting_single_band(bands_a):
    # s = 0 with only the k = 1 hopping: degenerate doublet splits by |E_01|
    dp = DualParams(e_s1=abs(bands_a.fourier[(0, 1)]), e_s2=0.0, e_l_star=0.165)
    h = build_two_amplitude_hamiltonian(dp, 0.5)
    vals = np.linalg.eigvalsh(h.entries)
    assert vals[1] - vals[0] == pytest.approx(dp.e_s1, rel=0.01)


def test_two_amplitude_zero_flux_splitting():
    # fitted device amplitudes: the 1-2 gap lands near the tabulated 13 MHz,
    # pushed up a few MHz by the second-order single-slip path through m = 0
    h = build_two_amplitude_hamiltonian(DUAL_A, 0.0)
    vals = np.linalg.eigvalsh(h.entries)
    f21 = (vals[2] - vals[1]) * 1e3
    assert f21 == pytest.approx(13.0, abs=4.0)
    expected = DUAL_A.e_s2 * 1e3 + DUAL_A.e_s1**2 / (4 * np.pi**2 * DUAL_A.e_l_star) * 1e3
    assert f21 == pytest.approx(expected, abs=1.0)


def test_dual_flux_translation():
    t0 = dual_spectrum(DUAL_A, [0.2], k=3)
    t1 = dual_spectrum(DUAL_A, [1.2], k=3)
    assert np.allclose(t0.levels, t1.levels, atol=1e-9)


def test_oracle_equivalence_numeric_interband(bands_a):
    # the band-resolved dual model with the numeric coupling tracks the
    # exact spectrum within 10 MHz for the three lowest levels
    grid = np.linspace(-0.5, 0.5, 11)
    exact = flux_sweep(SAMPLE_A, grid, k=3, dim=160)
    dual = dual_spectrum(bands_a, grid, k=3, e_l=SAMPLE_A.e_l, interband="numeric")
    dev = np.abs(exact.levels - dual.levels).max()
    assert dev < 0.010


def test_interband_off_loses_renormalization(bands_a):
    # without the coupling the kinetic coefficient stays at the bare E_L
    el_eff_on = ground_curvature_el(bands_a, e_l=SAMPLE_A.e_l, interband="numeric")
    el_eff_off = ground_curvature_el(bands_a, e_l=SAMPLE_A.e_l, interband="none")
    assert el_eff_off == pytest.approx(SAMPLE_A.e_l, rel=0.01)
    assert el_eff_on < el_eff_off


def test_harmonic_interband_gives_el_star(bands_a):
    # the perturbative chain behind E_L(1 - E_L/E_J) uses the harmonic coupling
    el_eff = ground_curvature_el(bands_a, e_l=SAMPLE_A.e_l, interband="harmonic")
    assert el_eff == pytest.approx(renormalized_el(SAMPLE_A.e_l, SAMPLE_A.e_j),
                                   rel=0.03)


def test_single_band_has_no_plasmon_level():
    bands0 = band_fourier(bloch_bands(6.01, EC, s_max=0), k_max=3)
    table = dual_spectrum(bands0, [0.0], k=6, e_l=SAMPLE_A.e_l, interband="none")
    exact = flux_sweep(SAMPLE_A, [0.0], k=4, dim=160)
    assert 5.0 < exact.levels[0, 3] < 8.0  # the plasmon sits here
    in_window = (table.levels[0] > 5.0) & (table.levels[0] < 8.0)
    assert not np.any(in_window)


def test_two_amplitude_parabolic_dispersion():
    el_eff = ground_curvature_el(DUAL_A)
    assert el_eff == pytest.approx(DUAL_A.e_l_star, rel=0.02)


def test_renormalized_el_values():
    assert renormalized_el(0.165, 6.01) == pytest.approx(0.16047, abs=1e-5)
    assert abs(renormalized_el(0.165, 6.01) - 0.157) / 0.157 < 0.05
    assert renormalized_el(0.162, 5.76) == pytest.approx(0.15744, abs=1e-5)
    assert abs(renormalized_el(0.162, 5.76) - 0.154) / 0.154 < 0.05
    assert renormalized_el(0.165, 1e6) == pytest.approx(0.165, rel=1e-6)
    with pytest.raises(ValueError):
        renormalized_el(1.0, 0.5)


def test_dual_hamiltonian_hermitian(bands_a):
    h = build_dual_hamiltonian(bands_a, 0.165, 0.31, interband="numeric")
    assert np.abs(h.entries - h.entries.conj().T).max() < 1e-12 * np.abs(h.entries).max()


def test_edge_population_warning(bands_a):
    # a flux offset near m_max parks the fluxon parabola against the edge
    with pytest.warns(RuntimeWarning, match="edge population"):
        build_dual_hamiltonian(bands_a, 0.165, 4.8, m_max=5, interband="none")
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        build_dual_hamiltonian(bands_a, 0.165, 0.0, m_max=12, interband="none")
