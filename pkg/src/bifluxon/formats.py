"""File formats: parameter sets, transition points, heatmaps, fit payloads.

Everything is JSON with an explicit schema_version of "1".  Serialization
is canonical (sorted keys, two-space indent, trailing newline) so that
parse -> serialize -> parse is the identity and serialized files are
byte-stable across runs.  All frequencies are GHz, flux is in Phi0.
"""

import json
from dataclasses import asdict, dataclass

import numpy as np

from .fitting import FitProblem, FitResult, TransitionPoint
from .params import CircuitParams, DualParams, NoiseParams, ResonatorParams

SCHEMA_VERSION = "1"

MODEL_KINDS = ("exact", "dual", "joint")


class FormatError(ValueError):
    """Malformed payload; the message names the offending field."""


def canonical_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _expect(cond: bool, field: str, message: str):
    if not cond:
        raise FormatError(f"{field}: {message}")


def _check_version(payload: dict):
    _expect(isinstance(payload, dict), "payload", "expected a JSON object")
    version = payload.get("schema_version")
    _expect(version == SCHEMA_VERSION, "schema_version",
            f"expected {SCHEMA_VERSION!r}, got {version!r}")


@dataclass(frozen=True)
class ParamsFile:
    """Named parameter blocks for one model kind.

    energies holds (e_j, e_c, e_l) for exact/joint kinds or
    (e_s1, e_s2, e_l_star) for the dual kind.  resonator and noise are
    optional blocks, serialized as explicit nulls when absent.
    """

    model: str
    energies: dict
    phi_ext: float = 0.0
    resonator: ResonatorParams = None
    noise: NoiseParams = None

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise FormatError(f"model: expected one of {MODEL_KINDS}, got {self.model!r}")
        needed = ("e_s1", "e_s2", "e_l_star") if self.model == "dual" \
            else ("e_j", "e_c", "e_l")
        for name in needed:
            _expect(name in self.energies, f"energies.{name}", "missing")
            _expect(
                isinstance(self.energies[name], (int, float))
                and self.energies[name] > 0,
                f"energies.{name}", "must be a positive number",
            )
        if self.model == "joint":
            _expect(self.resonator is not None, "resonator",
                    "required for the joint model")

    def circuit_params(self) -> CircuitParams:
        if self.model == "dual":
            raise FormatError("model: dual parameter files define no circuit energies")
        e = self.energies
        return CircuitParams(e["e_j"], e["e_c"], e["e_l"], self.phi_ext)

    def dual_params(self) -> DualParams:
        if self.model != "dual":
            raise FormatError("model: only dual parameter files define slip amplitudes")
        e = self.energies
        return DualParams(e["e_s1"], e["e_s2"], e["e_l_star"])

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "model": self.model,
            "energies": dict(self.energies),
            "phi_ext": self.phi_ext,
            "resonator": None if self.resonator is None else asdict(self.resonator),
            "noise": None if self.noise is None else asdict(self.noise),
        }


def serialize_params(pf: ParamsFile) -> str:
    return canonical_dumps(pf.to_dict())


def parse_params(text: str) -> ParamsFile:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"payload: not valid JSON ({exc.msg})") from None
    _check_version(payload)
    _expect("energies" in payload and isinstance(payload["energies"], dict),
            "energies", "missing or not an object")
    resonator = payload.get("resonator")
    noise = payload.get("noise")
    try:
        rp = None if resonator is None else ResonatorParams(**resonator)
        np_ = None if noise is None else NoiseParams(**noise)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"resonator/noise: {exc}") from None
    return ParamsFile(
        model=payload.get("model"),
        energies=payload["energies"],
        phi_ext=float(payload.get("phi_ext", 0.0)),
        resonator=rp,
        noise=np_,
    )


def serialize_points(points) -> str:
    rows = [
        {"phi_ext": p.phi_ext, "i": p.i, "j": p.j, "f_ij": p.f_ij,
         "weight": p.weight}
        for p in points
    ]
    return canonical_dumps({"schema_version": SCHEMA_VERSION, "points": rows})


def parse_points(text: str) -> list:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"payload: not valid JSON ({exc.msg})") from None
    _check_version(payload)
    rows = payload.get("points")
    _expect(isinstance(rows, list), "points", "missing or not a list")
    out = []
    for p, row in enumerate(rows):
        _expect(isinstance(row, dict), f"points[{p}]", "expected an object")
        for name in ("phi_ext", "i", "j", "f_ij"):
            _expect(name in row, f"points[{p}].{name}", "missing")
        try:
            out.append(TransitionPoint(
                phi_ext=float(row["phi_ext"]), i=int(row["i"]), j=int(row["j"]),
                f_ij=float(row["f_ij"]), weight=float(row.get("weight", 1.0)),
            ))
        except ValueError as exc:
            raise FormatError(f"points[{p}]: {exc}") from None
    return out


@dataclass(frozen=True)
class Heatmap:
    """Two-tone magnitude map: rows are flux, columns probe frequency."""

    flux: np.ndarray
    frequency: np.ndarray
    magnitude: np.ndarray

    def __post_init__(self):
        flux = np.asarray(self.flux, dtype=float)
        freq = np.asarray(self.frequency, dtype=float)
        mag = np.asarray(self.magnitude, dtype=float)
        _expect(flux.ndim == 1 and freq.ndim == 1, "axes", "must be one-dimensional")
        _expect(np.all(np.diff(flux) > 0), "flux", "must be strictly increasing")
        _expect(np.all(np.diff(freq) > 0), "frequency", "must be strictly increasing")
        _expect(mag.shape == (flux.size, freq.size), "magnitude",
                f"shape {mag.shape} does not match axes ({flux.size}, {freq.size})")
        object.__setattr__(self, "flux", flux)
        object.__setattr__(self, "frequency", freq)
        object.__setattr__(self, "magnitude", mag)


def serialize_heatmap(hm: Heatmap) -> str:
    return canonical_dumps({
        "schema_version": SCHEMA_VERSION,
        "flux": hm.flux.tolist(),
        "frequency": hm.frequency.tolist(),
        "magnitude": hm.magnitude.tolist(),
    })


def parse_heatmap(text: str) -> Heatmap:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"payload: not valid JSON ({exc.msg})") from None
    _check_version(payload)
    for name in ("flux", "frequency", "magnitude"):
        _expect(name in payload, name, "missing")
    try:
        return Heatmap(payload["flux"], payload["frequency"], payload["magnitude"])
    except FormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise FormatError(f"magnitude: {exc}") from None


def serialize_fit_problem(problem: FitProblem) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "model": problem.model,
        "init": dict(problem.init),
        "bounds": {k: list(v) for k, v in problem.bounds.items()},
        "points": json.loads(serialize_points(problem.points))["points"],
    }
    return canonical_dumps(payload)


def parse_fit_problem(text: str) -> FitProblem:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"payload: not valid JSON ({exc.msg})") from None
    _check_version(payload)
    model = payload.get("model")
    _expect(model in ("joint", "dual2", "dual1"), "model",
            f"expected joint, dual2 or dual1, got {model!r}")
    init = payload.get("init")
    _expect(isinstance(init, dict), "init", "missing or not an object")
    bounds = payload.get("bounds", {}) or {}
    _expect(isinstance(bounds, dict), "bounds", "must be an object")
    points = parse_points(canonical_dumps(
        {"schema_version": SCHEMA_VERSION, "points": payload.get("points", [])}
    ))
    try:
        return FitProblem(
            points=tuple(points),
            init={k: float(v) for k, v in init.items()},
            model=model,
            bounds={k: (float(v[0]), float(v[1])) for k, v in bounds.items()},
        )
    except ValueError as exc:
        raise FormatError(f"problem: {exc}") from None


def serialize_fit_result(result: FitResult) -> str:
    return canonical_dumps({
        "schema_version": SCHEMA_VERSION,
        "params": dict(result.params),
        "cost": result.cost,
        "residuals_mhz": np.asarray(result.residuals_mhz).tolist(),
        "iterations": result.iterations,
        "converged": result.converged,
    })


def parse_fit_result(text: str) -> FitResult:
    payload = json.loads(text)
    _check_version(payload)
    return FitResult(
        params=payload["params"],
        cost=payload["cost"],
        residuals_mhz=np.asarray(payload["residuals_mhz"], dtype=float),
        iterations=payload["iterations"],
        converged=payload["converged"],
    )


__all__ = [
    "SCHEMA_VERSION",
    "FormatError",
    "ParamsFile",
    "Heatmap",
    "canonical_dumps",
    "parse_params", "serialize_params",
    "parse_points", "serialize_points",
    "parse_heatmap", "serialize_heatmap",
    "parse_fit_problem", "serialize_fit_problem",
    "parse_fit_result", "serialize_fit_result",
]
