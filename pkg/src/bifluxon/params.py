"""Parameter containers shared across the package.

Unit conventions (used everywhere unless a function says otherwise):
all energies and frequencies are in GHz with h = 1, external flux is in
units of the flux quantum Phi0.  Conversions to angular frequencies and
SI units happen only inside the coherence-rate formulas.
"""

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class CircuitParams:
    """Energies of the inductively shunted junction circuit.

    e_j, e_c, e_l : Josephson, charging and inductive energies in GHz.
    phi_ext       : external flux through the loop in Phi0 units.
    """

    e_j: float
    e_c: float
    e_l: float
    phi_ext: float = 0.0

    def __post_init__(self):
        if not (self.e_j >= 0.0):
            raise ValueError(f"e_j must be >= 0, got {self.e_j}")
        for name in ("e_c", "e_l"):
            value = getattr(self, name)
            if not (value > 0.0) or not np.isfinite(value):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if not np.isfinite(self.phi_ext):
            raise ValueError(f"phi_ext must be finite, got {self.phi_ext}")

    @property
    def plasma_frequency(self) -> float:
        """Junction plasma frequency sqrt(8 E_J E_C) in GHz."""
        return float(np.sqrt(8.0 * self.e_j * self.e_c))

    @property
    def oscillator_frequency(self) -> float:
        """Frequency sqrt(8 E_L E_C) of the bare LC mode in GHz."""
        return float(np.sqrt(8.0 * self.e_l * self.e_c))

    @property
    def phi_zpf(self) -> float:
        """Zero-point phase spread (2 E_C / E_L)^(1/4) of the LC mode."""
        return float((2.0 * self.e_c / self.e_l) ** 0.25)

    def at_flux(self, phi_ext: float) -> "CircuitParams":
        return replace(self, phi_ext=float(phi_ext))


@dataclass(frozen=True)
class ResonatorParams:
    """Readout resonator coupled capacitively to the circuit.

    f_r       : bare resonator frequency in GHz.
    g         : charge-coupling strength in GHz.
    kappa     : resonator linewidth kappa/2pi in GHz.
    n_photons : photon-number truncation of the resonator Hilbert space.
    """

    f_r: float
    g: float
    kappa: float
    n_photons: int = 6

    def __post_init__(self):
        if self.f_r <= 0.0:
            raise ValueError(f"f_r must be positive, got {self.f_r}")
        if self.g < 0.0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if self.kappa <= 0.0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.n_photons < 2:
            raise ValueError(f"n_photons must be >= 2, got {self.n_photons}")


@dataclass(frozen=True)
class DualParams:
    """Phase-slip amplitudes of the two-amplitude dual circuit model.

    e_s1     : single phase-slip amplitude in GHz; equals the half-flux
               splitting of the lowest doublet.
    e_s2     : double phase-slip amplitude in GHz; dominates the zero-flux
               splitting between the first and second excited states.
    e_l_star : renormalized inductive energy in GHz, playing the role of
               the kinetic energy of the fluxon-number variable.
    m_max    : fluxon basis runs over m = -m_max .. m_max.
    s_max    : highest Bloch band kept in band-resolved constructions.
    """

    e_s1: float
    e_s2: float
    e_l_star: float
    m_max: int = 12
    s_max: int = 2

    def __post_init__(self):
        if self.e_s1 <= 0.0:
            raise ValueError(f"e_s1 must be positive, got {self.e_s1}")
        if self.e_s2 < 0.0:
            raise ValueError(f"e_s2 must be >= 0, got {self.e_s2}")
        if self.e_l_star <= 0.0:
            raise ValueError(f"e_l_star must be positive, got {self.e_l_star}")
        if self.m_max < 5:
            raise ValueError(f"m_max must be >= 5, got {self.m_max}")
        if self.s_max < 0:
            raise ValueError(f"s_max must be >= 0, got {self.s_max}")


@dataclass(frozen=True)
class NoiseParams:
    """Noise channel amplitudes entering the decoherence budget.

    q_cap_ref : dielectric quality factor at the reference frequency.
    f_ref     : reference frequency for Q_cap in GHz.
    epsilon   : power-law exponent of Q_cap(omega).
    t_eff     : bath temperature in K (dielectric channel).
    a_phi     : 1/f flux-noise power amplitude in Phi0^2.
    n_th      : mean residual photon number in the readout resonator.
    """

    q_cap_ref: float
    f_ref: float = 6.0
    epsilon: float = 0.2
    t_eff: float = 0.020
    a_phi: float = 0.0
    n_th: float = 0.0

    def __post_init__(self):
        if self.q_cap_ref <= 0.0:
            raise ValueError(f"q_cap_ref must be positive, got {self.q_cap_ref}")
        if self.f_ref <= 0.0:
            raise ValueError(f"f_ref must be positive, got {self.f_ref}")
        if self.t_eff <= 0.0:
            raise ValueError(f"t_eff must be positive, got {self.t_eff}")
        if self.a_phi < 0.0:
            raise ValueError(f"a_phi must be >= 0, got {self.a_phi}")
        if not (0.0 <= self.n_th < 1.0):
            raise ValueError(f"n_th must be in [0, 1), got {self.n_th}")
