"""Decoherence budget: dielectric loss, flux noise, photon shot noise.

This is the one module that leaves the GHz / h = 1 world.  Frequencies
are converted to angular rad/s and energies to joules right where the
rate formulas need them; everything returned is in SI (rates in 1/s,
times in s, temperatures in K).  The linewidth kappa and the dispersive
shift chi are interpreted as angular rates (2 pi times the GHz values)
inside the thermal-photon formula.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.constants as const

from . import fluxonium
from .params import CircuitParams, NoiseParams, ResonatorParams

LN2 = np.log(2.0)

SLOPE_STEP = 1e-4  # Phi0, central difference for d(omega01)/d(phi)
CURVATURE_STEP = 1e-3  # Phi0, central second difference


def _angular(f_ghz: float) -> float:
    """GHz -> rad/s."""
    return 2.0 * np.pi * f_ghz * 1e9


def q_cap_at(noise: NoiseParams, f_ghz: float) -> float:
    """Power-law dielectric quality factor at frequency f (GHz)."""
    return noise.q_cap_ref * (noise.f_ref / f_ghz) ** noise.epsilon


def _coth(x: float) -> float:
    return 1.0 / np.tanh(x)


def _dielectric_rate(
    e_c_ghz: float,
    noise: NoiseParams,
    f_ghz: float,
    phi_elem: float,
    zero_temperature: bool,
) -> float:
    """Symmetrized dielectric rate for one transition, in 1/s."""
    omega = _angular(f_ghz)
    e_c_joule = const.h * e_c_ghz * 1e9
    thermal = 1.0
    if not zero_temperature:
        x = const.hbar * omega / (2.0 * const.k * noise.t_eff)
        thermal = _coth(x)
    return (
        const.hbar
        * omega**2
        / (4.0 * e_c_joule * q_cap_at(noise, f_ghz))
        * thermal
        * phi_elem**2
    )


def t1_dielectric(
    cp: CircuitParams,
    noise: NoiseParams,
    f01: float,
    phi01: float,
    *,
    zero_temperature: bool = False,
) -> float:
    """Relaxation time from capacitive loss, in seconds.

    f01 in GHz and phi01 = |<0|phi|1>| come from the circuit spectrum.
    The coth factor counts both emission and absorption; pass
    zero_temperature=True for the T -> 0 limit where it is exactly 1.
    """
    if f01 <= 0.0 or phi01 <= 0.0:
        raise ValueError("f01 and phi01 must be positive")
    rate = _dielectric_rate(cp.e_c, noise, f01, phi01, zero_temperature)
    return 1.0 / rate


def qcap_from_t1(
    cp: CircuitParams,
    noise: NoiseParams,
    f01: float,
    phi01: float,
    t1_measured: float,
    *,
    zero_temperature: bool = False,
) -> float:
    """Reference quality factor that explains a measured T1, algebraically.

    The q_cap_ref field of noise is ignored; everything else (f_ref,
    epsilon, t_eff) participates.  A vanishing matrix element means the
    transition is protected and no finite Q reproduces the rate.
    """
    if phi01 <= 0.0:
        raise ValueError("phi01 = 0: protected transition, rate vanishes")
    if t1_measured <= 0.0:
        raise ValueError("t1_measured must be positive")
    unit = NoiseParams(
        q_cap_ref=1.0, f_ref=noise.f_ref, epsilon=noise.epsilon, t_eff=noise.t_eff
    )
    rate_at_unit_q = _dielectric_rate(cp.e_c, unit, f01, phi01, zero_temperature)
    return rate_at_unit_q * t1_measured


def gamma_phi_flux_first(a_phi: float, slope: float) -> float:
    """Gaussian echo dephasing rate from 1/f flux noise, first order.

    slope is |d(omega01)/d(phi_ext)| in rad/s per Phi0 and a_phi the
    noise power in Phi0^2.
    """
    return float(np.sqrt(a_phi * LN2) * abs(slope))


def gamma_phi_flux_second(a_phi: float, curvature: float) -> float:
    """Second-order 1/f flux dephasing at a sweet spot.

    curvature is |d^2(omega01)/d(phi_ext)^2| in rad/s per Phi0^2.
    """
    return float(0.5 * np.pi * a_phi * abs(curvature))


def transition_slope(
    cp: CircuitParams, flux: float, *, step: float = SLOPE_STEP,
    dim: int = fluxonium.DEFAULT_DIM, level: tuple = (0, 1),
) -> float:
    """d(omega_ij)/d(phi_ext) in rad/s per Phi0, central difference."""
    i, j = level
    f = _transition_freq
    return _angular(
        (f(cp, flux + step, i, j, dim) - f(cp, flux - step, i, j, dim)) / (2.0 * step)
    )


def transition_curvature(
    cp: CircuitParams, flux: float, *, step: float = CURVATURE_STEP,
    dim: int = fluxonium.DEFAULT_DIM, level: tuple = (0, 1),
) -> float:
    """d^2(omega_ij)/d(phi_ext)^2 in rad/s per Phi0^2."""
    i, j = level
    f = _transition_freq
    second = (
        f(cp, flux + step, i, j, dim)
        - 2.0 * f(cp, flux, i, j, dim)
        + f(cp, flux - step, i, j, dim)
    ) / step**2
    return _angular(second)


def _transition_freq(cp, flux, i, j, dim):
    vals = fluxonium._eigvals(cp.at_flux(flux), dim, j + 1)
    return vals[j] - vals[i]


def gamma_phi_thermal(n_th: float, kappa: float, chi01: float) -> float:
    """Dephasing from residual resonator photons, in 1/s.

    kappa and chi01 are given in GHz (kappa/2pi and chi/2pi conventions)
    and converted to angular rates inside.  Valid for n_th << 1.
    """
    if not (0.0 <= n_th < 1.0):
        raise ValueError(f"n_th must be in [0, 1), got {n_th}")
    kap = _angular(kappa)
    chi = _angular(abs(chi01))
    if chi == 0.0:
        return 0.0
    return n_th * kap * chi**2 / (kap**2 + chi**2)


def nth_from_gamma(gamma_phi: float, kappa: float, chi01: float) -> float:
    """Residual photon number explaining a thermal dephasing rate."""
    if gamma_phi < 0.0:
        raise ValueError("gamma_phi must be >= 0")
    kap = _angular(kappa)
    chi = _angular(abs(chi01))
    if chi == 0.0:
        raise ValueError("chi01 = 0: thermal photons cause no dephasing")
    return gamma_phi * (kap**2 + chi**2) / (kap * chi**2)


def teff_from_nth(n_th: float, f: float) -> float:
    """Bose-Einstein inversion: temperature in K from photon number at f GHz."""
    if n_th <= 0.0:
        raise ValueError("n_th must be positive for the inversion")
    return const.h * f * 1e9 / (const.k * np.log(1.0 + 1.0 / n_th))


def nth_from_teff(t_eff: float, f: float) -> float:
    """Bose-Einstein occupation at f GHz and temperature t_eff K."""
    if t_eff <= 0.0:
        raise ValueError("t_eff must be positive")
    x = const.h * f * 1e9 / (const.k * t_eff)
    return 1.0 / np.expm1(x)


def quality_factor(f01: float, t1: float) -> float:
    """Effective quality factor omega01 * T1 (f01 in GHz, t1 in s)."""
    return _angular(f01) * t1


def gamma12_dielectric(
    cp: CircuitParams, noise: NoiseParams, f12: float, phi12: float
) -> tuple:
    """(upward, downward) dielectric rates on the 1 <-> 2 transition.

    The symmetrized coth rate is split by detailed balance, up weighted
    by the Bose factor n(f12) and down by n(f12) + 1 at t_eff.
    """
    total = _dielectric_rate(cp.e_c, noise, f12, phi12, zero_temperature=False)
    n_bar = nth_from_teff(noise.t_eff, f12)
    # coth(h f / 2 k T) = 2 n + 1, so total splits exactly
    gamma_down = total * (n_bar + 1.0) / (2.0 * n_bar + 1.0)
    gamma_up = total * n_bar / (2.0 * n_bar + 1.0)
    return gamma_up, gamma_down


@dataclass(frozen=True)
class QutritTrajectory:
    """Three-level Ramsey decay: numeric Lindblad versus closed form.

    x holds 2 Re rho01 along t_grid from the numeric integration and
    x_analytic the closed form x(0) exp(-gamma_up t / 2).  rho is the
    full trajectory of density matrices, trace_error and min_eigenvalue
    the worst conservation defects along the way.
    """

    t_grid: np.ndarray
    x: np.ndarray
    x_analytic: np.ndarray
    rho: np.ndarray
    trace_error: float
    min_eigenvalue: float


def _lindblad_rhs(rho: np.ndarray, ops) -> np.ndarray:
    # rotating frame: [H, rho] dropped, dissipators only
    out = np.zeros_like(rho)
    for L, Ld, LdL in ops:
        out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def qutrit_dephasing(
    gamma_up_12: float,
    gamma_down_12: float,
    t_grid,
    *,
    trace_tol: float = 1e-9,
) -> QutritTrajectory:
    """Ramsey coherence of (|0> + |1>)/sqrt(2) with a hot 1 <-> 2 transition.

    Integrates the three-level Lindblad equations (jump operators
    sqrt(gamma_up)|2><1| and sqrt(gamma_down)|1><2|, rotating frame) with
    a fixed-step RK4, alongside the closed-form decay at gamma_up/2.
    Only the upward rate touches the coherence; the downward one moves
    population between 1 and 2 without dephasing the superposition.
    """
    if gamma_up_12 < 0.0 or gamma_down_12 < 0.0:
        raise ValueError("rates must be >= 0")
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t.size < 2 or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing with >= 2 points")

    ops = []
    for rate, (row, col) in ((gamma_up_12, (2, 1)), (gamma_down_12, (1, 2))):
        L = np.zeros((3, 3))
        L[row, col] = np.sqrt(rate)
        ops.append((L, L.T, L.T @ L))

    psi0 = np.array([1.0, 1.0, 0.0]) / np.sqrt(2.0)
    rho = np.outer(psi0, psi0).astype(float)

    # fixed-step RK4, substeps sized well below the fastest rate
    fastest = max(gamma_up_12, gamma_down_12, 1e-300)
    rhos = [rho.copy()]
    trace_err = 0.0
    min_eig = 1.0
    for p in range(t.size - 1):
        span = t[p + 1] - t[p]
        n_sub = max(1, int(np.ceil(span * fastest * 30.0)))
        dt = span / n_sub
        for _ in range(n_sub):
            k1 = _lindblad_rhs(rho, ops)
            k2 = _lindblad_rhs(rho + 0.5 * dt * k1, ops)
            k3 = _lindblad_rhs(rho + 0.5 * dt * k2, ops)
            k4 = _lindblad_rhs(rho + dt * k3, ops)
            rho = rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        trace_err = max(trace_err, abs(np.trace(rho) - 1.0))
        min_eig = min(min_eig, float(np.linalg.eigvalsh(rho).min()))
        rhos.append(rho.copy())
    if trace_err > trace_tol:
        raise RuntimeError(
            f"trace drift {trace_err:.2e} exceeds {trace_tol}: step size unstable"
        )

    rhos = np.array(rhos)
    x = 2.0 * rhos[:, 0, 1].real
    x_analytic = x[0] * np.exp(-0.5 * gamma_up_12 * t)
    return QutritTrajectory(
        t_grid=t,
        x=x,
        x_analytic=x_analytic,
        rho=rhos,
        trace_error=trace_err,
        min_eigenvalue=min_eig,
    )


def flux_noise_fit(t2_data, t1_data, model: CircuitParams, *,
                   dim: int = fluxonium.DEFAULT_DIM,
                   slope_floor: float = 1e7) -> tuple:
    """Flux-noise amplitude sqrt(A_phi) from echo times away from sweet spots.

    t2_data is a list of (phi_ext, T2_seconds, sigma_seconds) and t1_data
    a list of (phi_ext, T1_seconds).  The dephasing part of each point,
    Gamma_2 - Gamma_1/2, is regressed against the first-order slope of
    the model spectrum; the fit is a one-parameter weighted least squares
    and returns (sqrt_a_phi in Phi0, residuals in 1/s).  Points whose
    slope is numerically zero (sweet spots) carry no information; if all
    points are like that the amplitude is unidentifiable.
    """
    t2_data = list(t2_data)
    if len(t2_data) < 3:
        raise ValueError("need at least 3 echo points")
    t1_map = {round(phi, 9): t1 for phi, t1 in t1_data}
    xs, ys, ws = [], [], []
    for phi, t2, sigma in t2_data:
        key = round(phi, 9)
        if key not in t1_map:
            raise ValueError(f"no T1 point at phi_ext={phi}")
        gamma_phi = 1.0 / t2 - 0.5 / t1_map[key]
        slope = abs(transition_slope(model, phi, dim=dim))
        if slope < slope_floor:
            continue
        sigma_rate = sigma / t2**2  # propagate sigma(T2) to the rate
        xs.append(np.sqrt(LN2) * slope)
        ys.append(gamma_phi)
        ws.append(1.0 / max(sigma_rate, 1e-12) ** 2)
    if not xs:
        raise ValueError("all points sit at sweet spots: amplitude unidentifiable")
    xs, ys, ws = map(np.asarray, (xs, ys, ws))
    sqrt_a = float(np.sum(ws * xs * ys) / np.sum(ws * xs**2))
    residuals = ys - sqrt_a * xs
    return sqrt_a, residuals


@dataclass(frozen=True)
class CoherenceBudget:
    """Predicted rates per flux point with per-mechanism breakdown.

    gamma_1 and gamma_phi are totals in 1/s; the breakdown dict maps
    mechanism names to arrays over the grid.  t2 is 1/(gamma_1/2 +
    gamma_phi), so t2 <= 2 t1 holds by construction and is verified.
    """

    flux_grid: np.ndarray
    gamma_1: np.ndarray
    gamma_phi: np.ndarray
    breakdown: dict = field(default_factory=dict)

    @property
    def t1(self) -> np.ndarray:
        return 1.0 / self.gamma_1

    @property
    def t2(self) -> np.ndarray:
        return 1.0 / (0.5 * self.gamma_1 + self.gamma_phi)

    def __post_init__(self):
        if np.any(self.gamma_1 < 0.0) or np.any(self.gamma_phi < 0.0):
            raise ValueError("rates must be >= 0")
        if np.any(self.t2 > 2.0 * self.t1 * (1.0 + 1e-12)):
            raise ValueError("t2 <= 2 t1 violated")


def coherence_budget(
    cp: CircuitParams,
    rp: ResonatorParams,
    noise: NoiseParams,
    flux_grid,
    *,
    dim: int = fluxonium.DEFAULT_DIM,
    include_qutrit: bool = True,
) -> CoherenceBudget:
    """Assemble the full budget over a flux grid.

    Mechanisms: dielectric T1, first- and second-order 1/f flux
    dephasing, thermal-photon dephasing (chi recomputed per flux point),
    and the hot 1 <-> 2 qutrit channel.  Failures carry the mechanism
    and flux point in the message.
    """
    grid = np.atleast_1d(np.asarray(flux_grid, dtype=float))
    n = grid.size
    breakdown = {
        "dielectric": np.zeros(n),
        "flux_first_order": np.zeros(n),
        "flux_second_order": np.zeros(n),
        "thermal_photon": np.zeros(n),
        "qutrit": np.zeros(n),
    }
    for p, phi in enumerate(grid):
        pt = cp.at_flux(phi)
        sweep = fluxonium.flux_sweep(
            pt, [phi], k=3, dim=dim, elements=(("phi", 0, 1), ("phi", 1, 2))
        )
        f01 = float(sweep.levels[0, 1])
        f12 = float(sweep.levels[0, 2] - sweep.levels[0, 1])
        phi01 = float(sweep.elements[("phi", 0, 1)][0])
        phi12 = float(sweep.elements[("phi", 1, 2)][0])
        try:
            breakdown["dielectric"][p] = 1.0 / t1_dielectric(pt, noise, f01, phi01)
        except Exception as exc:
            raise RuntimeError(f"dielectric rate failed at phi_ext={phi}") from exc
        try:
            slope = transition_slope(pt, phi, dim=dim)
            curv = transition_curvature(pt, phi, dim=dim)
            breakdown["flux_first_order"][p] = gamma_phi_flux_first(noise.a_phi, slope)
            breakdown["flux_second_order"][p] = gamma_phi_flux_second(noise.a_phi, curv)
        except Exception as exc:
            raise RuntimeError(f"flux-noise rate failed at phi_ext={phi}") from exc
        if noise.n_th > 0.0:
            try:
                from .dressed import dispersive_shift

                chi = dispersive_shift(pt, rp, (0, 1))
                breakdown["thermal_photon"][p] = gamma_phi_thermal(
                    noise.n_th, rp.kappa, chi
                )
            except Exception as exc:
                raise RuntimeError(
                    f"thermal-photon rate failed at phi_ext={phi}"
                ) from exc
        if include_qutrit:
            try:
                up, _ = gamma12_dielectric(pt, noise, f12, phi12)
                breakdown["qutrit"][p] = 0.5 * up
            except Exception as exc:
                raise RuntimeError(f"qutrit rate failed at phi_ext={phi}") from exc
    gamma_1 = breakdown["dielectric"].copy()
    gamma_phi = (
        breakdown["flux_first_order"]
        + breakdown["flux_second_order"]
        + breakdown["thermal_photon"]
        + breakdown["qutrit"]
    )
    return CoherenceBudget(
        flux_grid=grid, gamma_1=gamma_1, gamma_phi=gamma_phi, breakdown=breakdown
    )


__all__ = [
    "CoherenceBudget",
    "QutritTrajectory",
    "t1_dielectric",
    "qcap_from_t1",
    "q_cap_at",
    "gamma_phi_flux_first",
    "gamma_phi_flux_second",
    "gamma_phi_thermal",
    "nth_from_gamma",
    "teff_from_nth",
    "nth_from_teff",
    "quality_factor",
    "gamma12_dielectric",
    "qutrit_dephasing",
    "flux_noise_fit",
    "coherence_budget",
    "transition_slope",
    "transition_curvature",
]
