"""Heavy-fluxonium toolkit: exact spectra, phase-slip duals, fits, coherence."""

from .params import CircuitParams, DualParams, NoiseParams, ResonatorParams
from .operators import HermitianOperator, eigen_spectrum
from .fluxonium import (
    SpectrumTable,
    build_fluxonium_hamiltonian,
    convergence_check,
    flux_sweep,
    matrix_element,
)
from .bloch import (
    BandSet,
    band_fourier,
    bloch_bands,
    build_dual_hamiltonian,
    build_two_amplitude_hamiltonian,
    dual_spectrum,
    interband_omega,
    renormalized_el,
)
from .dressed import (
    build_joint_hamiltonian,
    coupling_for_shift,
    dispersive_shift,
    labeled_transitions,
)
from .wkb import wkb_delta_2pi, wkb_delta_4pi, wkb_gaps, wkb_validity
from .coherence import (
    CoherenceBudget,
    coherence_budget,
    flux_noise_fit,
    gamma12_dielectric,
    gamma_phi_flux_first,
    gamma_phi_flux_second,
    gamma_phi_thermal,
    nth_from_gamma,
    nth_from_teff,
    qcap_from_t1,
    quality_factor,
    qutrit_dephasing,
    t1_dielectric,
    teff_from_nth,
)
from .fitting import (
    FitProblem,
    FitResult,
    TransitionPoint,
    cost,
    fit,
    residual_report,
    synthesize_points,
)

__version__ = "0.1.0"

__all__ = [
    "CircuitParams", "DualParams", "NoiseParams", "ResonatorParams",
    "HermitianOperator", "eigen_spectrum",
    "SpectrumTable", "build_fluxonium_hamiltonian", "matrix_element",
    "flux_sweep", "convergence_check",
    "BandSet", "bloch_bands", "band_fourier", "interband_omega",
    "build_dual_hamiltonian", "build_two_amplitude_hamiltonian",
    "dual_spectrum", "renormalized_el",
    "build_joint_hamiltonian", "dispersive_shift", "coupling_for_shift",
    "labeled_transitions",
    "wkb_delta_2pi", "wkb_delta_4pi", "wkb_gaps", "wkb_validity",
    "CoherenceBudget", "t1_dielectric", "qcap_from_t1",
    "gamma_phi_flux_first", "gamma_phi_flux_second", "gamma_phi_thermal",
    "nth_from_gamma", "teff_from_nth", "nth_from_teff", "quality_factor",
    "gamma12_dielectric", "qutrit_dephasing", "flux_noise_fit",
    "coherence_budget",
    "TransitionPoint", "FitProblem", "FitResult", "cost", "fit",
    "residual_report", "synthesize_points",
    "__version__",
]
