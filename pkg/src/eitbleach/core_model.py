"""Physical parameters and unit conversions for a Lambda-type absorber.

All quantities are SI. Rates and Rabi frequencies are angular (rad/s);
intensities are W/m^2. Rabi frequencies are real and non-negative, field
phases are not tracked.

Level labels follow the usual Lambda convention: ``a`` and ``c`` are the two
ground (metastable) states, ``b`` is the shared excited state. The signal
drives a-b, the pump drives c-b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import constants

HBAR = constants.hbar
C_LIGHT = constants.c
EPS0 = constants.epsilon_0


class DomainError(ValueError):
    """Raised when an input lies outside the domain of a formula."""


@dataclass(frozen=True)
class AtomParams:
    """Decay and dephasing rates of a single Lambda atom.

    ``gamma_sp`` is the spontaneous rate into *each* ground state, so the
    excited state empties at ``2 * gamma_sp``. ``gamma_total`` is the total
    decoherence rate ``gamma_deph + 2 * gamma_sp``.
    """

    gamma_sp: float
    gamma_deph: float = 0.0
    gamma_total: float = field(init=False)

    def __post_init__(self):
        if self.gamma_sp < 0 or self.gamma_deph < 0:
            raise DomainError("decay and dephasing rates must be non-negative")
        object.__setattr__(self, "gamma_total", self.gamma_deph + 2.0 * self.gamma_sp)


@dataclass(frozen=True)
class DriveParams:
    """Rabi frequencies and detunings of the signal/pump pair."""

    omega_s: float
    omega_p: float
    delta_one: float = 0.0
    delta_two: float = 0.0

    def __post_init__(self):
        if self.omega_s < 0 or self.omega_p < 0:
            raise DomainError("Rabi frequencies are real and non-negative")

    def replace(self, **changes) -> "DriveParams":
        kw = dict(omega_s=self.omega_s, omega_p=self.omega_p,
                  delta_one=self.delta_one, delta_two=self.delta_two)
        kw.update(changes)
        return DriveParams(**kw)


@dataclass(frozen=True)
class MediumParams:
    """Ensemble and host-material quantities.

    ``dipole_bc`` defaults to ``dipole_ab`` (equal-dipole mode) and
    ``omega_trans_p`` to ``omega_trans_s``.
    """

    density: float
    dipole_ab: float
    eps_r: float
    bulk_index: float
    omega_trans_s: float
    dipole_bc: float | None = None
    omega_trans_p: float | None = None

    def __post_init__(self):
        if self.dipole_bc is None:
            object.__setattr__(self, "dipole_bc", self.dipole_ab)
        if self.omega_trans_p is None:
            object.__setattr__(self, "omega_trans_p", self.omega_trans_s)
        if self.density < 0:
            raise DomainError("density must be non-negative")
        for name in ("dipole_ab", "dipole_bc", "eps_r", "bulk_index",
                     "omega_trans_s", "omega_trans_p"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be strictly positive")

    @property
    def equal_dipoles(self) -> bool:
        return self.dipole_ab == self.dipole_bc

    @classmethod
    def from_wavelength(cls, density, dipole, eps_r, bulk_index, wavelength, **kw):
        return cls(density=density, dipole_ab=dipole, eps_r=eps_r,
                   bulk_index=bulk_index,
                   omega_trans_s=2.0 * math.pi * C_LIGHT / wavelength, **kw)


@dataclass(frozen=True)
class IntensityScales:
    """Characteristic intensities of the equal-dipole three-state absorber."""

    i_sat3: float
    i_sat2: float
    i_coh: float
    i_pump: float
    zeta: float


def compute_zeta(medium: MediumParams, dipole: float | None = None) -> float:
    """Intensity per squared Rabi frequency, ``hbar^2 c eps0 eps_r / (2 d^2)``."""
    d = medium.dipole_ab if dipole is None else dipole
    if not d > 0:
        raise DomainError("dipole moment must be positive")
    return HBAR**2 * C_LIGHT * EPS0 * medium.eps_r / (2.0 * d**2)


def compute_xi(medium: MediumParams) -> float:
    """Medium constant ``2 N d_ab^2 w_s / (hbar eps_r eps0 n c)`` in 1/(m s).

    A zero density gives ``0`` (transparent medium).
    """
    return (2.0 * medium.density * medium.dipole_ab**2 * medium.omega_trans_s
            / (HBAR * medium.eps_r * EPS0 * medium.bulk_index * C_LIGHT))


def susceptibility_prefactor(medium: MediumParams, dipole: float | None = None) -> float:
    """``2 N d^2 / (hbar eps_r eps0)`` [1/s]; multiplies ``rho_ab / Omega_s``."""
    d = medium.dipole_ab if dipole is None else dipole
    return 2.0 * medium.density * d**2 / (HBAR * medium.eps_r * EPS0)


def small_signal_alpha(atom: AtomParams, xi: float) -> float:
    """Linear three-state absorption coefficient ``alpha_0 = 2 xi / Gamma'``."""
    if atom.gamma_total <= 0:
        raise DomainError("total decoherence rate must be positive")
    return 2.0 * xi / atom.gamma_total


def dipole_from_decay(gamma_sp: float, omega_trans: float, eps_r: float, eta: float) -> float:
    """Transition dipole from its radiative rate.

    ``d^2 = 3 pi hbar eps0 eps_r c^3 Gamma / (omega^3 eta)`` with ``eta`` the
    host refractive index.
    """
    if min(gamma_sp, omega_trans, eps_r, eta) <= 0:
        raise DomainError("all inputs must be positive")
    d2 = 3.0 * math.pi * HBAR * EPS0 * eps_r * C_LIGHT**3 * gamma_sp / (omega_trans**3 * eta)
    return math.sqrt(d2)


def rabi_to_intensity(omega, zeta: float):
    return zeta * omega * omega


def intensity_to_rabi(intensity, zeta: float):
    return (intensity / zeta) ** 0.5


def compute_intensity_scales(atom: AtomParams, drive: DriveParams,
                             medium: MediumParams) -> IntensityScales:
    zeta = compute_zeta(medium)
    g, gt = atom.gamma_sp, atom.gamma_total
    return IntensityScales(
        i_sat3=zeta * g * gt / 12.0,
        i_sat2=zeta * g * g / 8.0,
        i_coh=zeta * atom.gamma_deph * gt,
        i_pump=rabi_to_intensity(drive.omega_p, zeta),
        zeta=zeta,
    )


def scales_from_ratios(i_sat: float = 1.0, i_coh: float = 1.0, i_pump: float = 1.0,
                       zeta: float = 1.0) -> IntensityScales:
    """Build scales directly from intensities (dimensionless studies).

    ``i_sat2`` is left as ``nan``: the two-state scale is not implied by the
    three-state ones without the individual rates.
    """
    return IntensityScales(i_sat3=i_sat, i_sat2=math.nan, i_coh=i_coh,
                           i_pump=i_pump, zeta=zeta)
