"""Closed-form optical response of the three-state absorber.

Rate-form functions take ``(atom, drive, xi)``; intensity-form functions take
intensities together with :class:`~eitbleach.core_model.IntensityScales` and
the small-signal coefficient ``alpha0``. All expressions are the two-photon
resonance (``Delta = delta = 0``) values unless noted.

Approximate formulas refuse inputs outside their stated validity regime
instead of extrapolating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core_model import (C_LIGHT, AtomParams, DomainError, DriveParams,
                         IntensityScales, MediumParams, compute_xi,
                         small_signal_alpha, susceptibility_prefactor)


@dataclass(frozen=True)
class PeakAnalysis:
    delta_plus: float
    delta_minus: float
    aux_A: float
    merged: bool
    radicand: float


@dataclass(frozen=True)
class GroupVelocityResult:
    v_g: float
    dchi_ddetuning: float


# --- absorption coefficients -------------------------------------------------

def alpha_two_state(atom: AtomParams, drive: DriveParams, xi: float) -> float:
    """Resonant two-level coefficient ``(2 xi/Gamma) / (1 + 8 Omega_s^2/Gamma^2)``."""
    g = atom.gamma_sp
    if g <= 0:
        raise DomainError("two-state absorption needs Gamma > 0")
    return (2.0 * xi / g) / (1.0 + 8.0 * drive.omega_s**2 / g**2)


def alpha_two_state_intensity(intensity, i_sat2: float, alpha0: float):
    return alpha0 / (1.0 + np.asarray(intensity) / i_sat2)


def alpha_signal(atom: AtomParams, drive: DriveParams, xi: float) -> float:
    """Resonant three-state signal coefficient in rate form.

    Zero dephasing gives exact transparency (the last denominator term
    diverges).
    """
    op, os_ = drive.omega_p, drive.omega_s
    g, gd, gt = atom.gamma_sp, atom.gamma_deph, atom.gamma_total
    if op <= 0:
        raise DomainError("alpha_signal needs a pump (Omega_p > 0); "
                          "use alpha_two_state for the bare two-level line")
    if g <= 0:
        raise DomainError("alpha_signal needs Gamma > 0")
    if gd == 0:
        return 0.0
    denom = (1.0 + os_**2 / op**2 + 12.0 * os_**2 / (g * gt)
             + (op**2 + os_**2) ** 2 / (op**2 * gd * gt))
    return (2.0 * xi / gt) / denom


def _signal_denominator(i, ip, scales: IntensityScales):
    i_sat, i_coh = scales.i_sat3, scales.i_coh
    # a denormal ip overflows 1/ip to inf, which correctly sends the coefficient to 0
    with np.errstate(over="ignore"):
        return (1.0 + i * (1.0 / ip + 1.0 / i_sat + 2.0 / i_coh)
                + ip / i_coh + i * i / (ip * i_coh))


def alpha_signal_intensity(intensity, scales: IntensityScales, alpha0: float,
                           i_pump=None):
    """Equal-dipole intensity form of the signal coefficient.

    ``i_pump`` overrides ``scales.i_pump`` (used when the pump varies along
    the medium). Vectorised over ``intensity`` and ``i_pump``.
    """
    ip = np.asarray(scales.i_pump if i_pump is None else i_pump, dtype=float)
    i = np.asarray(intensity, dtype=float)
    if np.any(ip <= 0):
        raise DomainError("signal coefficient needs I_p > 0")
    if scales.i_coh == 0:
        out = np.zeros(np.broadcast(i, ip).shape)
    else:
        out = alpha0 / _signal_denominator(i, ip, scales)
    return out if out.ndim else float(out)


def alpha_pump(intensity, scales: IntensityScales, alpha0: float, i_pump=None):
    """Pump coefficient: the signal form with signal and pump intensities swapped."""
    ip = np.asarray(scales.i_pump if i_pump is None else i_pump, dtype=float)
    i = np.asarray(intensity, dtype=float)
    if np.any(i <= 0):
        raise DomainError("pump coefficient needs a signal intensity I > 0")
    if scales.i_coh == 0:
        out = np.zeros(np.broadcast(i, ip).shape)
    else:
        out = alpha0 / _signal_denominator(ip, i, scales)
    return out if out.ndim else float(out)


def alpha_pump_rates(atom: AtomParams, drive: DriveParams, xi: float) -> float:
    """Rate form of the pump coefficient (signal and pump Rabi frequencies swapped)."""
    if drive.omega_s <= 0:
        raise DomainError("pump coefficient needs Omega_s > 0")
    return alpha_signal(atom, drive.replace(omega_s=drive.omega_p, omega_p=drive.omega_s), xi)


def alpha_signal_equal_fields(intensity, scales: IntensityScales, alpha0: float):
    """Reference model for equal signal and pump intensities, as printed.

    ``alpha0 / (1 + 3 I/I_sat + I/I_coh)``. Note that setting ``I_p = I`` in
    :func:`alpha_signal_intensity` gives a different denominator
    (``2 + I/I_sat + 4 I/I_coh``); both are kept.
    """
    i = np.asarray(intensity, dtype=float)
    inv_coh = 0.0 if math.isinf(scales.i_coh) else 1.0 / scales.i_coh
    inv_sat = 0.0 if math.isinf(scales.i_sat3) else 1.0 / scales.i_sat3
    out = alpha0 / (1.0 + 3.0 * i * inv_sat + i * inv_coh)
    return out if out.ndim else float(out)


# --- spectral features -------------------------------------------------------

def peak_positions(atom: AtomParams, drive: DriveParams) -> PeakAnalysis:
    """Autler-Townes peak detunings with dephasing.

    When the radicand is negative the two peaks have merged into a single
    line at zero detuning and both positions are reported as 0.
    """
    op, os_ = drive.omega_p, drive.omega_s
    g, gd, gt = atom.gamma_sp, atom.gamma_deph, atom.gamma_total
    if op <= 0:
        raise DomainError("peak positions need Omega_p > 0")
    aux = math.sqrt(gd * gt + op**2 + os_**2)
    rad = aux * (op * (5.0 * gd + 2.0 * g) / gt + os_**2 / op) - 4.0 * gd * aux**2 / gt
    if rad < 0:
        return PeakAnalysis(0.0, 0.0, aux, True, rad)
    d = math.sqrt(rad)
    return PeakAnalysis(d, -d, aux, False, rad)


def peak_positions_no_dephasing(drive: DriveParams) -> float:
    """``(Omega_p^2 + Omega_s^2)^(3/4) / sqrt(Omega_p)``, the gamma = 0 peak detuning."""
    op, os_ = drive.omega_p, drive.omega_s
    if op <= 0:
        raise DomainError("peak positions need Omega_p > 0")
    return (op**2 + os_**2) ** 0.75 / math.sqrt(op)


Regime = Literal["three_state_small_gamma", "two_state", "dephasing_dominated"]


def bandwidth(atom: AtomParams, drive: DriveParams, regime: Regime = "three_state_small_gamma") -> float:
    """Usable spectral width [rad/s] in one of three regimes.

    ``three_state_small_gamma`` is the first-order expansion in the dephasing
    and is refused when ``gamma > min(Gamma, Omega_p, Omega_s)``.
    """
    g, gd = atom.gamma_sp, atom.gamma_deph
    op, os_ = drive.omega_p, drive.omega_s
    if regime == "two_state":
        return g * math.sqrt(1.0 + 8.0 * os_**2 / g**2)
    if regime == "dephasing_dominated":
        return atom.gamma_total
    if regime == "three_state_small_gamma":
        if gd > min(g, op, os_):
            raise DomainError("small-dephasing bandwidth requires gamma << Gamma, Omega_p, Omega_s")
        s2 = op**2 + os_**2
        corr = gd * (g**2 + 2.0 * op * (op - math.sqrt(s2))) / (2.0 * g * s2)
        return peak_positions_no_dephasing(drive) * (1.0 + corr)
    raise ValueError(f"unknown regime {regime!r}")


def dephasing_dominated_lineshape(delta, atom: AtomParams):
    """Normalised single-peak line ``1 / (1 + 4 delta^2 / Gamma'^2)``."""
    d = np.asarray(delta, dtype=float)
    return 1.0 / (1.0 + 4.0 * d**2 / atom.gamma_total**2)


def quadratic_threshold(scales: IntensityScales) -> tuple[float, float]:
    """Onset intensities of the ``I^-2`` regime.

    Returns ``(I_q, I_simple)``: the full threshold
    ``(I_p I_coh + I_sat I_coh + 2 I_p I_sat) / I_sat`` and the cruder
    ``I_coh + 2 I_p``.
    """
    ip, ic, isat = scales.i_pump, scales.i_coh, scales.i_sat3
    if math.isinf(isat):
        full = ic + 2.0 * ip
    else:
        full = (ip * ic + isat * ic + 2.0 * ip * isat) / isat
    return full, ic + 2.0 * ip


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


# --- group velocities --------------------------------------------------------

def _rate_intensities(atom: AtomParams, drive: DriveParams):
    # intensities divided by zeta (equal dipoles)
    return drive.omega_s**2, drive.omega_p**2, atom.gamma_deph * atom.gamma_total


def dchi_ddelta_signal(atom: AtomParams, drive: DriveParams, prefactor: float) -> float:
    """``d Re[chi_ab] / d delta`` at ``Delta = delta = 0`` (equal dipoles).

    ``prefactor`` is ``2 N d^2 / (hbar eps0 eps_r)``.
    """
    i, ip, ic = _rate_intensities(atom, drive)
    gt, gd = atom.gamma_total, atom.gamma_deph
    if gd == 0:
        raise DomainError("signal dispersion slope needs gamma > 0")
    ratio = alpha_signal(atom, drive, 1.0) / small_signal_alpha(atom, 1.0)
    bracket = 4.0 * (ic + i) / gt**2 - (ip + i) / (gd * gt)
    return prefactor * ratio * bracket / (ic + i + ip)


def dchi_ddelta_pump(atom: AtomParams, drive: DriveParams, prefactor: float) -> float:
    """``d Re[chi_bc] / d Delta`` at ``Delta = delta = 0`` (equal dipoles).

    Non-negative for all valid inputs.
    """
    i, ip, ic = _rate_intensities(atom, drive)
    gt = atom.gamma_total
    ratio = alpha_pump_rates(atom, drive, 1.0) / small_signal_alpha(atom, 1.0)
    return prefactor * ratio * 4.0 * (ic + 2.0 * ip) / gt**2 / (ic + i + ip)


def _require_equal_dipoles(medium: MediumParams):
    if not medium.equal_dipoles:
        raise DomainError("closed-form group velocities assume equal dipole moments")


def group_velocity_signal(atom: AtomParams, drive: DriveParams, medium: MediumParams) -> GroupVelocityResult:
    """Signal group velocity ``c / (n + (omega_s/2) dRe[chi]/d delta)``.

    The formula is evaluated as written; where the dispersion slope is
    negative (weak dephasing) the result exceeds ``c/n``.
    """
    _require_equal_dipoles(medium)
    deriv = dchi_ddelta_signal(atom, drive, susceptibility_prefactor(medium))
    return GroupVelocityResult(
        v_g=C_LIGHT / (medium.bulk_index + 0.5 * medium.omega_trans_s * deriv),
        dchi_ddetuning=deriv)


def group_velocity_pump(atom: AtomParams, drive: DriveParams, medium: MediumParams) -> GroupVelocityResult:
    _require_equal_dipoles(medium)
    deriv = dchi_ddelta_pump(atom, drive, susceptibility_prefactor(medium))
    return GroupVelocityResult(
        v_g=C_LIGHT / (medium.bulk_index + 0.5 * medium.omega_trans_p * deriv),
        dchi_ddetuning=deriv)


def group_velocity_decoherence_limit(atom: AtomParams, medium: MediumParams) -> float:
    """Printed weak-field limit ``c / (n + 2 N d^2 omega_s / (hbar eps0 eps_r Gamma'^2))``."""
    excess = susceptibility_prefactor(medium) * medium.omega_trans_s / atom.gamma_total**2
    return C_LIGHT / (medium.bulk_index + excess)


def group_velocity_small_dephasing(atom: AtomParams, drive: DriveParams, medium: MediumParams) -> float:
    """Printed small-dephasing limit of the signal group velocity."""
    i, ip, _ = _rate_intensities(atom, drive)
    if i <= 0 or ip <= 0:
        raise DomainError("small-dephasing group velocity needs both fields on")
    excess = (susceptibility_prefactor(medium) * medium.omega_trans_s / drive.omega_s**2
              / (2.0 + ip / i + i / ip))
    return C_LIGHT / (medium.bulk_index + excess)


def inverse_group_velocity_signal(omega_s, atom: AtomParams, omega_p: float,
                                  xi: float, bulk_index: float):
    """Vectorised ``1/v_g`` of the signal as a function of its Rabi frequency.

    Uses ``(omega_s/2) * 2 N d^2/(hbar eps0 eps_r) = xi n c / 2`` so only the
    medium constant and the bulk index are needed.
    """
    os2 = np.asarray(omega_s, dtype=float) ** 2
    ip = omega_p**2
    gt, gd = atom.gamma_total, atom.gamma_deph
    ic = gd * gt
    if gd == 0:
        raise DomainError("signal dispersion slope needs gamma > 0")
    ratio = alpha_signal_rates_vec(os2, atom, omega_p, 1.0) * gt / 2.0
    bracket = 4.0 * (ic + os2) / gt**2 - (ip + os2) / (gd * gt)
    slope_over_pref = ratio * bracket / (ic + os2 + ip)
    return bulk_index * (1.0 + 0.5 * xi * C_LIGHT * slope_over_pref) / C_LIGHT


def alpha_signal_rates_vec(omega_s_sq, atom: AtomParams, omega_p: float, xi: float):
    """Vectorised rate-form signal coefficient as a function of ``Omega_s^2``."""
    os2 = np.asarray(omega_s_sq, dtype=float)
    g, gd, gt = atom.gamma_sp, atom.gamma_deph, atom.gamma_total
    op2 = omega_p**2
    if gd == 0:
        return np.zeros_like(os2)
    denom = 1.0 + os2 / op2 + 12.0 * os2 / (g * gt) + (op2 + os2) ** 2 / (op2 * gd * gt)
    return (2.0 * xi / gt) / denom


# --- penetration depth and dark state ----------------------------------------

DepthRegime = Literal["linear", "pump_bleached", "coherent", "saturated", "quadratic"]


def penetration_depth(scales: IntensityScales, i0: float, xi: float, atom: AtomParams,
                      regime: DepthRegime = "linear") -> float:
    """Order-of-magnitude penetration depth of the signal [m]."""
    a0 = small_signal_alpha(atom, xi)
    if regime == "linear":
        return 1.0 / a0
    if regime == "pump_bleached":
        return i0 / (a0 * scales.i_pump)
    if regime == "coherent":
        return i0 / (a0 * scales.i_coh)
    if regime == "saturated":
        return i0 / (a0 * scales.i_sat3)
    if regime == "quadratic":
        return i0**2 / (a0 * scales.i_pump * scales.i_coh)
    raise ValueError(f"unknown regime {regime!r}")


def dark_state(drive: DriveParams) -> tuple[float, float]:
    """Amplitudes ``(c_a, c_c)`` of the state decoupled from ``|b>`` at delta = 0."""
    norm = math.hypot(drive.omega_s, drive.omega_p)
    if norm == 0:
        raise DomainError("dark state undefined with both fields off")
    return drive.omega_p / norm, -drive.omega_s / norm


def alpha_signal_from_medium(atom: AtomParams, drive: DriveParams, medium: MediumParams) -> float:
    return alpha_signal(atom, drive, compute_xi(medium))
