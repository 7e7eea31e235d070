"""Command-line entry points.

Subcommands: spectrum, fit, wkb, bands, coherence, serve.  Inputs are the
JSON formats from the formats module.  Exit codes: 0 success, 2 malformed
input (one-line diagnostic on stderr), 3 fit did not converge (the result
file is still written).
"""

import argparse
import json
import os
import sys

import numpy as np

from . import bloch, coherence, dressed, fitting, fluxonium, wkb
from .formats import (
    FormatError,
    canonical_dumps,
    parse_params,
    parse_points,
    serialize_fit_result,
)

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_NOT_CONVERGED = 3


class CliError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _load_params(path: str):
    try:
        return parse_params(_read(path))
    except FormatError as exc:
        raise CliError(f"{path}: {exc}") from None


def _parse_flux_range(spec: str) -> np.ndarray:
    try:
        start, stop, count = spec.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise CliError(f"bad flux range {spec!r}, expected START:STOP:COUNT") from None
    if count < 1:
        raise CliError(f"flux range needs COUNT >= 1, got {count}")
    if count == 1:
        return np.array([start])
    return np.linspace(start, stop, count)


def _spectrum_table(pf, model: str, grid: np.ndarray, k: int):
    if model == "exact":
        return fluxonium.flux_sweep(pf.circuit_params(), grid, k=k)
    if model == "dual":
        return bloch.dual_spectrum(pf.dual_params(), grid, k=k)
    if model == "joint":
        if pf.resonator is None:
            raise CliError("joint spectrum needs a resonator block in the params file")
        return dressed.labeled_transitions(pf.circuit_params(), pf.resonator, grid, k=k)
    raise CliError(f"unknown model {model!r}")


def cmd_spectrum(args) -> int:
    pf = _load_params(args.params)
    if args.model in ("exact", "joint") and pf.model == "dual":
        raise CliError(f"{args.params} holds dual amplitudes, not circuit energies")
    if args.model == "dual" and pf.model != "dual":
        raise CliError(f"{args.params} holds circuit energies, not dual amplitudes")
    grid = _parse_flux_range(args.flux)
    if args.levels < 2:
        raise CliError("--levels must be at least 2")
    table = _spectrum_table(pf, args.model, grid, args.levels)
    lines = ["# flux_phi0 " + " ".join(f"f0{j}_ghz" for j in range(1, args.levels))]
    for p, phi in enumerate(table.flux_grid):
        freqs = " ".join(f"{table.levels[p, j]:.9g}" for j in range(1, args.levels))
        lines.append(f"{phi:.9g} {freqs}")
    _write_out(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _write_out(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _fit_init_from_params(pf, model: str) -> dict:
    if model == "joint":
        if pf.model == "dual":
            raise CliError("joint fit needs circuit energies in the init file")
        if pf.resonator is None:
            raise CliError("joint fit needs a resonator block in the init file")
        e = pf.energies
        return {"e_j": e["e_j"], "e_c": e["e_c"], "e_l": e["e_l"],
                "f_r": pf.resonator.f_r, "g": pf.resonator.g}
    if pf.model != "dual":
        raise CliError("dual fits need dual amplitudes in the init file")
    e = pf.energies
    init = {"e_s1": e["e_s1"], "e_l_star": e["e_l_star"]}
    if model == "dual2":
        init["e_s2"] = e["e_s2"]
    return init


def cmd_fit(args) -> int:
    try:
        points = parse_points(_read(args.points))
    except FormatError as exc:
        raise CliError(f"{args.points}: {exc}") from None
    pf = _load_params(args.init)
    init = _fit_init_from_params(pf, args.model)
    try:
        problem = fitting.FitProblem(points=tuple(points), init=init, model=args.model)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    result = fitting.fit(problem)
    _write_out(args.out, serialize_fit_result(result))
    report = fitting.residual_report(result, problem)
    print(f"model {args.model}: cost {result.cost:.6g} MHz^2 after "
          f"{result.iterations} iterations, converged={result.converged}")
    for name, value in result.params.items():
        print(f"  {name} = {value:.6f} GHz")
    print(f"  residual rms {report.rms_mhz:.3f} MHz, max {report.max_mhz:.3f} MHz, "
          f"{len(report.outliers)} outlier(s)")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_wkb(args) -> int:
    pf = _load_params(args.params)
    gaps = wkb.wkb_gaps(pf.circuit_params())
    v = gaps.validity
    print(f"delta_2pi = {gaps.delta_2pi * 1e3:.1f} MHz")
    print(f"delta_4pi = {gaps.delta_4pi * 1e3:.1f} MHz")
    print(f"validity: E_C/E_J = {v.ec_over_ej:.3f} "
          f"({'ok' if v.deep_well_ok else 'marginal'}), "
          f"gap/E_L = {v.gap_over_el:.3f}, E_L/omega_p = {v.el_over_omega_p:.3f} "
          f"({'ok' if v.gap_hierarchy_ok else 'marginal'})")
    return EXIT_OK


def cmd_bands(args) -> int:
    pf = _load_params(args.params)
    cp = pf.circuit_params()
    bands = bloch.band_fourier(bloch.bloch_bands(cp.e_j, cp.e_c))
    payload = {
        "schema_version": "1",
        "quasicharge": bands.quasicharge_grid.tolist(),
        "bands_ghz": bands.bands.tolist(),
        "fourier_ghz": {f"{s},{k}": v for (s, k), v in sorted(bands.fourier.items())},
    }
    _write_out(args.out, canonical_dumps(payload))
    for s in range(bands.s_max + 1):
        print(f"band {s}: center {bands.fourier[(s, 0)]:.4f} GHz, "
              f"width {bands.band_width(s) * 1e3:.1f} MHz")
    return EXIT_OK


def _load_noise(path: str):
    from .params import NoiseParams

    text = _read(path)
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: not valid JSON ({exc.msg})") from None
    block = payload.get("noise", payload) if isinstance(payload, dict) else None
    if not isinstance(block, dict):
        raise CliError(f"{path}: expected a noise object")
    block = {k: v for k, v in block.items() if k != "schema_version"}
    try:
        return NoiseParams(**block)
    except (TypeError, ValueError) as exc:
        raise CliError(f"{path}: {exc}") from None


def cmd_coherence(args) -> int:
    pf = _load_params(args.params)
    noise = _load_noise(args.noise)
    if pf.resonator is None:
        raise CliError("coherence budget needs a resonator block in the params file")
    grid = _parse_flux_range(args.flux)
    budget = coherence.coherence_budget(pf.circuit_params(), pf.resonator, noise, grid)
    rows = []
    for p, phi in enumerate(budget.flux_grid):
        if budget.t2[p] > 2.0 * budget.t1[p] * (1 + 1e-12):
            raise CliError(f"internal: t2 > 2 t1 at phi_ext={phi}")
        rows.append({
            "phi_ext": float(phi),
            "gamma_1_per_s": float(budget.gamma_1[p]),
            "gamma_phi_per_s": float(budget.gamma_phi[p]),
            "t1_s": float(budget.t1[p]),
            "t2_s": float(budget.t2[p]),
            "breakdown_per_s": {k: float(v[p]) for k, v in budget.breakdown.items()},
        })
    _write_out(args.out, canonical_dumps({"schema_version": "1", "rows": rows}))
    for row in rows:
        print(f"phi={row['phi_ext']:+.3f}: T1 = {row['t1_s'] * 1e6:8.1f} us, "
              f"T2 = {row['t2_s'] * 1e6:8.1f} us")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .server import serve

    serve(
        heatmap_path=args.data,
        points_path=args.points,
        params_path=args.params,
        port=args.port,
        ui_dir=args.ui,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bifluxon",
        description="Heavy-fluxonium spectra, dual models, fits and coherence budgets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="transition frequencies over flux")
    p.add_argument("--params", required=True)
    p.add_argument("--flux", required=True, help="START:STOP:COUNT in Phi0")
    p.add_argument("--levels", type=int, default=fluxonium.DEFAULT_LEVELS)
    p.add_argument("--model", choices=("exact", "dual", "joint"), default="exact")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("fit", help="fit model parameters to labeled points")
    p.add_argument("--points", required=True)
    p.add_argument("--init", required=True)
    p.add_argument("--model", choices=("joint", "dual2", "dual1"), default="joint")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("wkb", help="semiclassical gap formulas")
    p.add_argument("--params", required=True)
    p.set_defaults(func=cmd_wkb)

    p = sub.add_parser("bands", help="junction Bloch bands and slip amplitudes")
    p.add_argument("--params", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("coherence", help="decoherence budget over flux")
    p.add_argument("--params", required=True)
    p.add_argument("--noise", required=True)
    p.add_argument("--flux", required=True, help="START:STOP:COUNT in Phi0")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_coherence)

    p = sub.add_parser("serve", help="HTTP service for the fit studio")
    p.add_argument("--data", required=True, help="heatmap JSON file")
    p.add_argument("--points", required=True, help="working point-set JSON file")
    p.add_argument("--params", required=True, help="params JSON file")
    p.add_argument("--port", type=int,
                   default=int(os.environ.get("BIFLUXON_PORT", "8977")))
    p.add_argument("--ui", default=None, help="directory of built studio assets")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
