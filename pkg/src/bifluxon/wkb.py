"""Semiclassical phase-slip gap formulas and their validity checks.

The single-slip gap (splitting of the lowest doublet at half-integer
flux) and the double-slip gap (splitting of the m = +-1 fluxons at
integer flux) in the deep-well regime:

    D_2pi = 4 w_p (2 E_J / (pi^2 E_C))^(1/4)
            * exp(-sqrt(8 E_J / E_C) + 14 zeta(3) E_L / w_p)

    D_4pi = D_2pi^2 / (4 pi^2 E_L) * (8 sqrt(8 E_J / E_C))^(2 E_L pi^2 / w_p)

with w_p = sqrt(8 E_J E_C).  All inputs and outputs in GHz, h = 1.
"""

from dataclasses import dataclass

import numpy as np

from .params import CircuitParams

ZETA3 = 1.202056903160  # Riemann zeta(3), hard-coded to 12 digits

VALIDITY_RATIO_MAX = 0.5


@dataclass(frozen=True)
class WkbValidity:
    """Smallness ratios behind the semiclassical gap formulas.

    Each ratio should be well below one; the pass flags use 0.5 as an
    advisory threshold.  Working devices can sit at the margin and the
    formulas still land close, so failures are informative, not fatal.
    """

    ec_over_ej: float
    gap_over_el: float
    el_over_omega_p: float

    @property
    def deep_well_ok(self) -> bool:
        return self.ec_over_ej < VALIDITY_RATIO_MAX

    @property
    def gap_hierarchy_ok(self) -> bool:
        return (
            self.gap_over_el < VALIDITY_RATIO_MAX
            and self.el_over_omega_p < VALIDITY_RATIO_MAX
        )

    @property
    def all_ok(self) -> bool:
        return self.deep_well_ok and self.gap_hierarchy_ok


@dataclass(frozen=True)
class WkbGaps:
    delta_2pi: float
    delta_4pi: float
    validity: WkbValidity


def wkb_delta_2pi(cp: CircuitParams) -> float:
    """Single phase-slip amplitude in GHz."""
    wp = cp.plasma_frequency
    prefactor = 4.0 * wp * (2.0 * cp.e_j / (np.pi**2 * cp.e_c)) ** 0.25
    exponent = -np.sqrt(8.0 * cp.e_j / cp.e_c) + 14.0 * ZETA3 * cp.e_l / wp
    return float(prefactor * np.exp(exponent))


def wkb_delta_4pi(cp: CircuitParams) -> float:
    """Double phase-slip amplitude in GHz, built on wkb_delta_2pi."""
    d2 = wkb_delta_2pi(cp)
    wp = cp.plasma_frequency
    base = 8.0 * np.sqrt(8.0 * cp.e_j / cp.e_c)
    power = 2.0 * cp.e_l * np.pi**2 / wp
    return float(d2**2 / (4.0 * np.pi**2 * cp.e_l) * base**power)


def wkb_validity(cp: CircuitParams) -> WkbValidity:
    """Smallness ratios E_C/E_J, max(gap)/E_L and E_L/w_p."""
    gap = max(wkb_delta_2pi(cp), wkb_delta_4pi(cp))
    return WkbValidity(
        ec_over_ej=cp.e_c / cp.e_j,
        gap_over_el=gap / cp.e_l,
        el_over_omega_p=cp.e_l / cp.plasma_frequency,
    )


def wkb_gaps(cp: CircuitParams) -> WkbGaps:
    """Both gaps plus the validity record."""
    return WkbGaps(
        delta_2pi=wkb_delta_2pi(cp),
        delta_4pi=wkb_delta_4pi(cp),
        validity=wkb_validity(cp),
    )


__all__ = ["WkbGaps", "WkbValidity", "wkb_delta_2pi", "wkb_delta_4pi",
           "wkb_validity", "wkb_gaps", "ZETA3"]
