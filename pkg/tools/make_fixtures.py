"""Regenerate the shipped data fixtures under src/bifluxon/data/.

The transition-point files are reconstructions forward-modeled from the
reference parameter sets (they are not raw measurement data), and the
heatmap is a synthetic two-tone map with Lorentzian ridges along the
joint-model lines.  Run from the repository root:

    python3 tools/make_fixtures.py
"""

import json
from pathlib import Path

import numpy as np

from bifluxon import dressed, fitting, samples
from bifluxon.formats import (
    Heatmap,
    ParamsFile,
    canonical_dumps,
    serialize_heatmap,
    serialize_params,
    serialize_points,
)

DATA = Path(__file__).resolve().parent.parent / "src" / "bifluxon" / "data"

JOINT_FLUXES = {
    (0, 1): [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5],
    (0, 2): [0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
    (0, 3): [0.0, 0.2, 0.4],
    (0, 4): [0.0, 0.15, 0.3],
}
DUAL_FLUXES = {
    (0, 1): [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5],
    (0, 2): [0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5],
}


def refit_couplings():
    """Recompute the resonator couplings behind the frozen samples values."""
    for name, cp, rp, chi in (
        ("A", samples.SAMPLE_A, samples.RESONATOR_A, samples.MEASURED_A["chi01"]),
        ("B", samples.SAMPLE_B, samples.RESONATOR_B, samples.MEASURED_B["chi01"]),
    ):
        g = dressed.coupling_for_shift(cp, rp, chi)
        print(f"sample {name}: g = {g:.6f} GHz (frozen {rp.g})")


def write_points(name: str, model: str, params: dict, flux_map: dict):
    points = []
    for (i, j), fluxes in flux_map.items():
        points += fitting.synthesize_points(model, params, fluxes, [(i, j)],
                                            sigma_mhz=0.0, seed=0)
    points.sort(key=lambda p: (p.phi_ext, p.i, p.j))
    (DATA / name).write_text(serialize_points(points))
    print(f"wrote {name} ({len(points)} points)")


def write_params():
    pf_a = ParamsFile(
        model="joint",
        energies={"e_j": samples.SAMPLE_A.e_j, "e_c": samples.SAMPLE_A.e_c,
                  "e_l": samples.SAMPLE_A.e_l},
        resonator=samples.RESONATOR_A,
        noise=samples.NOISE_A,
    )
    pf_b = ParamsFile(
        model="joint",
        energies={"e_j": samples.SAMPLE_B.e_j, "e_c": samples.SAMPLE_B.e_c,
                  "e_l": samples.SAMPLE_B.e_l},
        resonator=samples.RESONATOR_B,
        noise=samples.NOISE_B,
    )
    dual_a = ParamsFile(
        model="dual",
        energies={"e_s1": samples.DUAL_A.e_s1, "e_s2": samples.DUAL_A.e_s2,
                  "e_l_star": samples.DUAL_A.e_l_star},
    )
    dual_b = ParamsFile(
        model="dual",
        energies={"e_s1": samples.DUAL_B.e_s1, "e_s2": samples.DUAL_B.e_s2,
                  "e_l_star": samples.DUAL_B.e_l_star},
    )
    for name, pf in (("params_sample_a.json", pf_a), ("params_sample_b.json", pf_b),
                     ("params_sample_a_dual.json", dual_a),
                     ("params_sample_b_dual.json", dual_b)):
        (DATA / name).write_text(serialize_params(pf))
        print(f"wrote {name}")


def write_heatmap():
    """Synthetic two-tone map: Lorentzian ridges on the joint-model lines."""
    cp, rp = samples.SAMPLE_A, samples.RESONATOR_A
    flux = np.linspace(-0.5, 0.5, 81)
    freq = np.linspace(0.05, 7.4, 236)
    table = dressed.labeled_transitions(cp, rp, flux, k=6)
    width = 0.018  # GHz, ridge half width
    amps = {1: 1.0, 2: 0.55, 3: 0.6, 4: 0.8, 5: 0.35}
    mag = np.zeros((flux.size, freq.size))
    for j, amp in amps.items():
        line = table.levels[:, j]
        mag += amp / (1.0 + ((freq[None, :] - line[:, None]) / width) ** 2)
    rng = np.random.default_rng(2024)
    mag += 0.03 * rng.standard_normal(mag.shape)
    mag = np.round(mag, 4)
    hm = Heatmap(flux=flux, frequency=freq, magnitude=mag)
    (DATA / "heatmap_sample_a.json").write_text(serialize_heatmap(hm))
    print(f"wrote heatmap_sample_a.json ({flux.size} x {freq.size})")


def write_synthetic_studio_fixture():
    """Generator values and starting guess for the studio end-to-end flow."""
    gen = {"e_j": 6.01, "e_c": 1.59, "e_l": 0.165, "f_r": 6.908,
           "g": samples.RESONATOR_A.g}
    payload = {
        "schema_version": "1",
        "generator": gen,
        "init": {k: round(v * m, 6) for (k, v), m in
                 zip(gen.items(), (1.08, 0.93, 1.05, 1.001, 1.1))},
    }
    (DATA / "studio_fixture.json").write_text(canonical_dumps(payload))
    print("wrote studio_fixture.json")


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    refit_couplings()
    gen_a = {"e_j": samples.SAMPLE_A.e_j, "e_c": samples.SAMPLE_A.e_c,
             "e_l": samples.SAMPLE_A.e_l, "f_r": samples.RESONATOR_A.f_r,
             "g": samples.RESONATOR_A.g}
    gen_b = {"e_j": samples.SAMPLE_B.e_j, "e_c": samples.SAMPLE_B.e_c,
             "e_l": samples.SAMPLE_B.e_l, "f_r": samples.RESONATOR_B.f_r,
             "g": samples.RESONATOR_B.g}
    dual_a = {"e_s1": samples.DUAL_A.e_s1, "e_s2": samples.DUAL_A.e_s2,
              "e_l_star": samples.DUAL_A.e_l_star}
    dual_b = {"e_s1": samples.DUAL_B.e_s1, "e_s2": samples.DUAL_B.e_s2,
              "e_l_star": samples.DUAL_B.e_l_star}
    write_points("points_sample_a_joint.json", "joint", gen_a, JOINT_FLUXES)
    write_points("points_sample_b_joint.json", "joint", gen_b, JOINT_FLUXES)
    write_points("points_sample_a_dual2.json", "dual2", dual_a, DUAL_FLUXES)
    write_points("points_sample_b_dual2.json", "dual2", dual_b, DUAL_FLUXES)
    write_params()
    write_heatmap()
    write_synthetic_studio_fixture()


if __name__ == "__main__":
    main()
