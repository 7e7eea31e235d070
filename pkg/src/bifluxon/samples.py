"""Reference device parameters and shipped reconstruction fixtures.

Two characterized devices, A and B, with their fitted circuit energies,
dual-model amplitudes, resonator properties and measured coherence
figures.  The couplings g are not part of the published tables; they are
fixed here by inverting the dispersive shift (see
dressed.coupling_for_shift) and frozen to keep fixtures reproducible.

The transition-point fixtures under data/ are reconstructions: they are
forward-modeled from these parameter sets at figure-like flux values,
not raw measurement data.
"""

import json
from importlib import resources

from .fitting import TransitionPoint
from .params import CircuitParams, DualParams, NoiseParams, ResonatorParams

SAMPLE_A = CircuitParams(e_j=6.01, e_c=1.59, e_l=0.165, phi_ext=0.0)
SAMPLE_B = CircuitParams(e_j=5.76, e_c=1.62, e_l=0.162, phi_ext=0.0)

# g frozen from coupling_for_shift against the tabulated chi01
RESONATOR_A = ResonatorParams(f_r=6.908, g=0.069556, kappa=6.5e-3, n_photons=6)
RESONATOR_B = ResonatorParams(f_r=6.890, g=0.108629, kappa=5.4e-3, n_photons=6)

DUAL_A = DualParams(e_s1=0.153, e_s2=0.01298, e_l_star=0.157)
DUAL_B = DualParams(e_s1=0.176, e_s2=0.017, e_l_star=0.154)

NOISE_A = NoiseParams(
    q_cap_ref=6.0e4, f_ref=6.0, epsilon=0.2, t_eff=0.020,
    a_phi=(2e-6) ** 2, n_th=4e-4,
)
NOISE_B = NoiseParams(
    q_cap_ref=4.0e4, f_ref=6.0, epsilon=0.2, t_eff=0.020,
    a_phi=(3e-6) ** 2, n_th=9e-4,
)

# measured coherence figures (seconds, GHz, dimensionless)
MEASURED_A = {
    "t1": 177.3e-6,
    "t2_echo": 74.6e-6,
    "t1_half_flux": 182e-6,
    "t2_echo_half_flux": 88e-6,
    "chi01": 6.8e-3,
    "n01": 0.063,
    "q_cap": 6e4,
    "n_th": 4e-4,
    "sqrt_a_phi": 2e-6,
}
MEASURED_B = {
    "t1": 87.6e-6,
    "t2_echo": 45.7e-6,
    "chi01": 6.9e-3,
    "n01": 0.071,
    "q_cap": 4e4,
    "n_th": 9e-4,
    "sqrt_a_phi": 3e-6,
}


def _load_points(name: str) -> list:
    text = resources.files("bifluxon.data").joinpath(name).read_text()
    payload = json.loads(text)
    return [
        TransitionPoint(
            phi_ext=row["phi_ext"], i=row["i"], j=row["j"],
            f_ij=row["f_ij"], weight=row.get("weight", 1.0),
        )
        for row in payload["points"]
    ]


def fixture_points(sample: str, model: str) -> list:
    """Shipped reconstruction points, sample in {a, b}, model in {joint, dual2}."""
    sample = sample.lower()
    if sample not in ("a", "b"):
        raise ValueError(f"sample must be 'a' or 'b', got {sample!r}")
    if model not in ("joint", "dual2"):
        raise ValueError(f"model must be 'joint' or 'dual2', got {model!r}")
    return _load_points(f"points_sample_{sample}_{model}.json")


def fixture_path(name: str):
    """Filesystem path of a shipped data file (params, points or heatmap)."""
    return resources.files("bifluxon.data").joinpath(name)


__all__ = [
    "SAMPLE_A", "SAMPLE_B", "RESONATOR_A", "RESONATOR_B",
    "DUAL_A", "DUAL_B", "NOISE_A", "NOISE_B",
    "MEASURED_A", "MEASURED_B",
    "fixture_points", "fixture_path",
]
