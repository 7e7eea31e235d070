"""Spectroscopy fitting: cost over labeled transition points, simplex fit.

A labeled point says "at external flux phi the transition between sorted
levels i and j sits at f_ij GHz".  The cost is the weighted sum of
squared residuals, in MHz^2, between those frequencies and eigenvalue
differences lambda_j - lambda_i of the chosen model Hamiltonian.  Level
indices refer to plain ascending eigenvalue order; no state tracking is
attempted across avoided crossings, so a mislabeled point shows up as an
outlier in the residual report rather than being silently relabeled.

Models: "joint" (exact circuit plus readout resonator, five parameters),
"dual2" (two-amplitude phase-slip model, three) and "dual1" (single
amplitude, two).  The minimization is Nelder-Mead in log-parameter space
with one restart from the best vertex, which copes with the kinks the
sorted-eigenvalue objective has at level crossings.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import dressed, fluxonium
from .params import CircuitParams, DualParams, ResonatorParams

MODEL_PARAMS = {
    "joint": ("e_j", "e_c", "e_l", "f_r", "g"),
    "dual2": ("e_s1", "e_s2", "e_l_star"),
    "dual1": ("e_s1", "e_l_star"),
}

DEFAULT_BOUND_SPREAD = 5.0  # default bounds are init / spread .. init * spread
OUT_OF_BOUNDS_COST = 1e12
FIT_DIM = 80  # oscillator basis for fit evaluations; levels good to ~1 kHz


@dataclass(frozen=True)
class TransitionPoint:
    """One labeled spectroscopy point."""

    phi_ext: float
    i: int
    j: int
    f_ij: float
    weight: float = 1.0

    def __post_init__(self):
        if not (self.j > self.i >= 0):
            raise ValueError(f"need j > i >= 0, got i={self.i}, j={self.j}")
        if self.f_ij <= 0.0:
            raise ValueError(f"f_ij must be positive, got {self.f_ij}")
        if self.weight <= 0.0:
            raise ValueError(f"weight must be positive, got {self.weight}")


@dataclass(frozen=True)
class FitProblem:
    """Point set, initial guess, bounds and model choice.

    init maps parameter names (per MODEL_PARAMS) to GHz values; bounds,
    when given, maps names to positive (lo, hi) ranges, defaulting to a
    factor-five window around the initial guess.  n_photons, dim_q and
    dim control the joint-model truncations.
    """

    points: tuple
    init: dict
    model: str = "joint"
    bounds: dict = field(default_factory=dict)
    n_photons: int = 6
    dim_q: int = dressed.DEFAULT_DIM_Q
    dim: int = FIT_DIM

    def __post_init__(self):
        if self.model not in MODEL_PARAMS:
            raise ValueError(f"model must be one of {sorted(MODEL_PARAMS)}")
        names = MODEL_PARAMS[self.model]
        missing = [n for n in names if n not in self.init]
        if missing:
            raise ValueError(f"init missing parameters {missing}")
        for name in names:
            if self.init[name] <= 0.0:
                raise ValueError(f"init[{name}] must be positive")
        pts = tuple(sorted(self.points, key=lambda p: (p.phi_ext, p.i, p.j)))
        if len(pts) < len(names):
            raise ValueError(
                f"{len(pts)} points cannot identify {len(names)} parameters"
            )
        object.__setattr__(self, "points", pts)

    @property
    def param_names(self) -> tuple:
        return MODEL_PARAMS[self.model]

    def vector(self, values: dict = None) -> np.ndarray:
        values = self.init if values is None else values
        return np.array([values[n] for n in self.param_names])

    def bound_arrays(self):
        names = self.param_names
        lo = np.empty(len(names))
        hi = np.empty(len(names))
        for p, name in enumerate(names):
            if name in self.bounds:
                lo[p], hi[p] = self.bounds[name]
            else:
                lo[p] = self.init[name] / DEFAULT_BOUND_SPREAD
                hi[p] = self.init[name] * DEFAULT_BOUND_SPREAD
        return lo, hi

    @property
    def max_level(self) -> int:
        return max(pt.j for pt in self.points)


@dataclass(frozen=True)
class FitResult:
    params: dict
    cost: float
    residuals_mhz: np.ndarray
    iterations: int
    converged: bool


def model_levels(
    model: str,
    values: dict,
    fluxes,
    k: int,
    *,
    n_photons: int = 6,
    dim_q: int = dressed.DEFAULT_DIM_Q,
    dim: int = FIT_DIM,
) -> dict:
    """Sorted model eigenvalues (k lowest, absolute) at each flux."""
    out = {}
    if model == "joint":
        cp = CircuitParams(values["e_j"], values["e_c"], values["e_l"])
        rp = ResonatorParams(
            f_r=values["f_r"], g=values["g"], kappa=1e-3, n_photons=n_photons
        )
        # the oscillator-basis pieces are flux independent; share them
        from scipy.linalg import eigh

        phi_m, cos_m = fluxonium._oscillator_basis(cp, dim)
        n_m = fluxonium.charge_matrix(cp, dim)
        w0 = cp.oscillator_frequency
        base = np.diag(w0 * (np.arange(dim) + 0.5)) - cp.e_j * cos_m
        for phi in fluxes:
            delta = 2.0 * np.pi * phi
            h_q = base + cp.e_l * delta * phi_m
            h_q += 0.5 * cp.e_l * delta**2 * np.eye(dim)
            vals, vecs = eigh(h_q, subset_by_index=(0, dim_q - 1))
            n_q = vecs.conj().T @ n_m @ vecs
            joint = dressed._assemble_joint(vals, n_q, rp)
            out[phi] = np.linalg.eigvalsh(joint.entries)[:k]
    elif model in ("dual2", "dual1"):
        dp = DualParams(values["e_s1"], values.get("e_s2", 0.0), values["e_l_star"])
        from .bloch import build_two_amplitude_hamiltonian

        for phi in fluxes:
            h = build_two_amplitude_hamiltonian(dp, phi)
            out[phi] = np.linalg.eigvalsh(h.entries)[:k]
    else:
        raise ValueError(f"unknown model {model!r}")
    return out


def _residuals_mhz(problem: FitProblem, vec: np.ndarray) -> np.ndarray:
    fluxes = sorted({pt.phi_ext for pt in problem.points})
    values = dict(zip(problem.param_names, vec))
    levels = model_levels(
        problem.model, values, fluxes, problem.max_level + 1,
        n_photons=problem.n_photons, dim_q=problem.dim_q, dim=problem.dim,
    )
    res = np.empty(len(problem.points))
    for p, pt in enumerate(problem.points):
        lam = levels[pt.phi_ext]
        res[p] = (lam[pt.j] - lam[pt.i] - pt.f_ij) * 1e3
    return res


def cost(problem: FitProblem, params=None) -> float:
    """Weighted sum of squared residuals in MHz^2."""
    vec = problem.vector(params) if isinstance(params, dict) or params is None \
        else np.asarray(params, dtype=float)
    if np.any(vec <= 0.0):
        raise ValueError("parameters must be positive")
    res = _residuals_mhz(problem, vec)
    weights = np.array([pt.weight for pt in problem.points])
    return float(np.sum(weights * res**2))


def fit(problem: FitProblem, *, maxiter: int = 2000) -> FitResult:
    """Minimize the cost with log-space Nelder-Mead plus one restart.

    Deterministic for identical inputs.  Non-convergence within the
    iteration budget returns the best point seen with converged=False.
    """
    lo, hi = problem.bound_arrays()
    x0 = np.log(problem.vector())
    weights = np.array([pt.weight for pt in problem.points])

    best = {"vec": problem.vector(), "cost": np.inf}

    def objective(logp):
        vec = np.exp(logp)
        if np.any(vec < lo) or np.any(vec > hi):
            worst = np.maximum(lo / np.maximum(vec, 1e-300),
                               vec / np.maximum(hi, 1e-300)).max()
            return OUT_OF_BOUNDS_COST * worst
        res = _residuals_mhz(problem, vec)
        c = float(np.sum(weights * res**2))
        if c < best["cost"]:
            best["cost"] = c
            best["vec"] = vec
        return c

    objective(x0)
    # first pass from the guess, then a restart from the best vertex with
    # a fresh simplex and a tolerance tied to the cost scale found there
    f0 = max(best["cost"], 1e-6)
    opts = dict(maxiter=maxiter // 2, fatol=max(1e-12, 1e-8 * f0),
                xatol=1e-9, adaptive=True)
    r1 = minimize(objective, x0, method="Nelder-Mead", options=opts)
    f1 = max(best["cost"], 1e-9)
    opts2 = dict(maxiter=maxiter // 2, fatol=max(1e-10, 1e-8 * f1),
                 xatol=1e-9, adaptive=True)
    r2 = minimize(objective, np.log(best["vec"]), method="Nelder-Mead", options=opts2)
    iterations = int(r1.nit + r2.nit)
    improvement = abs(r1.fun - r2.fun) / max(abs(r1.fun), 1e-300)
    converged = bool(r2.success or improvement < 1e-8)

    vec = best["vec"]
    res = _residuals_mhz(problem, vec)
    final_cost = float(np.sum(weights * res**2))
    return FitResult(
        params=dict(zip(problem.param_names, vec.tolist())),
        cost=final_cost,
        residuals_mhz=res,
        iterations=iterations,
        converged=converged,
    )


@dataclass(frozen=True)
class ResidualReport:
    """Per-point residual table with outlier flags.

    rows are (phi_ext, i, j, measured GHz, residual MHz); outliers carry
    the indices of points whose |residual| exceeds three times the RMS,
    the usual signature of a mislabeled transition.
    """

    rows: tuple
    rms_mhz: float
    max_mhz: float
    outliers: tuple

    def __str__(self):
        lines = [
            f"{'phi_ext':>8} {'i':>3} {'j':>3} {'f_meas (GHz)':>13} {'res (MHz)':>10}"
        ]
        for p, (phi, i, j, f, r) in enumerate(self.rows):
            mark = "  <- outlier" if p in self.outliers else ""
            lines.append(f"{phi:8.4f} {i:3d} {j:3d} {f:13.6f} {r:10.3f}{mark}")
        lines.append(f"rms = {self.rms_mhz:.3f} MHz, max = {self.max_mhz:.3f} MHz")
        return "\n".join(lines)


def residual_report(result: FitResult, problem: FitProblem) -> ResidualReport:
    res = _residuals_mhz(problem, problem.vector(result.params))
    rms = float(np.sqrt(np.mean(res**2)))
    # the 1e-6 MHz floor keeps numerically perfect fits from flagging dust
    threshold = max(3.0 * rms, 1e-6)
    outliers = tuple(int(p) for p in np.nonzero(np.abs(res) > threshold)[0])
    rows = tuple(
        (pt.phi_ext, pt.i, pt.j, pt.f_ij, float(res[p]))
        for p, pt in enumerate(problem.points)
    )
    return ResidualReport(
        rows=rows, rms_mhz=rms, max_mhz=float(np.abs(res).max()), outliers=outliers
    )


def synthesize_points(
    model: str,
    params: dict,
    fluxes,
    transitions,
    sigma_mhz: float = 0.0,
    seed: int = 0,
    *,
    n_photons: int = 6,
    dim_q: int = dressed.DEFAULT_DIM_Q,
    dim: int = FIT_DIM,
) -> list:
    """Forward-model transition points with reproducible Gaussian noise.

    transitions is a list of (i, j) sorted-level pairs evaluated at every
    flux in fluxes.  sigma_mhz adds independent noise per point; a fixed
    seed gives bit-identical output.
    """
    names = MODEL_PARAMS[model]
    values = {n: params[n] for n in names}
    fluxes = [float(phi) for phi in fluxes]
    k = max(j for _, j in transitions) + 1
    levels = model_levels(
        model, values, sorted(set(fluxes)), k,
        n_photons=n_photons, dim_q=dim_q, dim=dim,
    )
    rng = np.random.default_rng(seed)
    points = []
    for phi in fluxes:
        lam = levels[phi]
        for i, j in transitions:
            f = lam[j] - lam[i]
            if sigma_mhz > 0.0:
                f += rng.normal(0.0, sigma_mhz) * 1e-3
            points.append(TransitionPoint(phi_ext=phi, i=i, j=j, f_ij=float(f)))
    return points


__all__ = [
    "TransitionPoint",
    "FitProblem",
    "FitResult",
    "ResidualReport",
    "MODEL_PARAMS",
    "cost",
    "fit",
    "model_levels",
    "residual_report",
    "synthesize_points",
]
