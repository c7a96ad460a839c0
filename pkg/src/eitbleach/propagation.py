"""Beer-Lambert propagation through an optically thick three-state medium.

Ground truth is direct adaptive integration of ``dI/dz = -alpha(I) I``. The
integration variable is ``ln I`` so that relative accuracy is kept through
many e-folds of attenuation.

Two closed-form transfer laws are provided next to the integrator: the one
printed in the source analysis (``*_printed``) and one obtained by separating
variables in the same ODE (``*_rederived``). They differ by a factor 1/2 on
the quadratic term and, for the transmittance, by the ``1 + I_p/I_coh``
factor on the logarithm.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import bisect

from .analytic import alpha_pump, alpha_signal_intensity
from .core_model import IntensityScales

Arrangement = Literal["uniform_pump", "copropagating"]


class PropagationError(RuntimeError):
    """The ODE solver did not reach the requested tolerance."""


@dataclass(frozen=True)
class PropagationConfig:
    length_l: float
    i0: float
    ip0: float
    arrangement: Arrangement = "uniform_pump"
    rtol: float = 1e-9
    atol: float = 1e-12
    n_samples: int = 401

    def __post_init__(self):
        if not self.length_l > 0:
            raise ValueError("length_l must be positive")
        if self.i0 < 0 or self.ip0 < 0:
            raise ValueError("input intensities must be non-negative")
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("tolerances must be positive")
        if self.arrangement not in ("uniform_pump", "copropagating"):
            raise ValueError(f"unknown arrangement {self.arrangement!r}")
        if self.n_samples < 2:
            raise ValueError("need at least two samples")


@dataclass
class PropagationProfile:
    z: np.ndarray
    intensity: np.ndarray
    pump: np.ndarray
    alpha_s: np.ndarray
    alpha_p: np.ndarray
    transmittance: float
    t0: float
    pump_transmittance: float = 1.0
    stats: dict = field(default_factory=dict)

    def samples(self):
        return list(zip(self.z, self.intensity, self.pump, self.alpha_s, self.alpha_p))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["z", "I", "I_p", "alpha_s", "alpha_p"])
        for row in self.samples():
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "z": self.z.tolist(), "I": self.intensity.tolist(), "I_p": self.pump.tolist(),
            "alpha_s": self.alpha_s.tolist(), "alpha_p": self.alpha_p.tolist(),
            "transmittance": self.transmittance, "t0": self.t0,
            "pump_transmittance": self.pump_transmittance,
        }, indent=1)

    def decay_length(self, fraction: float = math.exp(-1)) -> float:
        """Depth at which ``I/I0`` first falls to ``fraction`` (linear interpolation)."""
        rel = self.intensity / self.intensity[0]
        below = np.nonzero(rel <= fraction)[0]
        if below.size == 0:
            return math.inf
        k = below[0]
        if k == 0:
            return 0.0
        z0, z1, r0, r1 = self.z[k - 1], self.z[k], rel[k - 1], rel[k]
        return float(z0 + (fraction - r0) * (z1 - z0) / (r1 - r0))


def _coefficients(intensity, pump, scales, alpha0):
    """(alpha_s, alpha_p) along a profile; NaN where the intensity a form needs has underflowed to 0."""
    i, ip = np.broadcast_arrays(np.asarray(intensity, float), np.asarray(pump, float))
    a_s, a_p = np.full(i.shape, np.nan), np.full(i.shape, np.nan)
    ok = ip > 0
    a_s[ok] = alpha_signal_intensity(i[ok], scales, alpha0, i_pump=ip[ok])
    ok = (i > 0) & (ip > 0)
    a_p[ok] = alpha_pump(i[ok], scales, alpha0, i_pump=ip[ok])
    return a_s, a_p


def _solve(rhs, y0, config: PropagationConfig):
    z = np.linspace(0.0, config.length_l, config.n_samples)
    sol = solve_ivp(rhs, (0.0, config.length_l), y0, method="DOP853",
                    t_eval=z, rtol=config.rtol, atol=config.atol)
    if sol.status != 0:
        raise PropagationError(
            f"integration failed at z={float(np.ravel(sol.t)[-1]) if np.size(sol.t) else 0.0:g}: {sol.message} "
            f"(nfev={sol.nfev}, rtol={config.rtol}, atol={config.atol})")
    return sol


def integrate_uniform(config: PropagationConfig, scales: IntensityScales,
                      alpha0: float) -> PropagationProfile:
    """Signal propagation with a pump held constant along the medium."""
    ip = scales.i_pump if config.ip0 == 0 else config.ip0
    t0 = math.exp(-alpha0 * config.length_l)
    z = np.linspace(0.0, config.length_l, config.n_samples)
    if config.i0 == 0:
        zeros = np.zeros_like(z)
        a = alpha_signal_intensity(0.0, scales, alpha0, i_pump=ip)
        return PropagationProfile(z, zeros, np.full_like(z, ip), np.full_like(z, a),
                                  np.full_like(z, np.nan), t0, t0)

    def rhs(_z, y):
        return [-alpha_signal_intensity(math.exp(y[0]), scales, alpha0, i_pump=ip)]

    sol = _solve(rhs, [math.log(config.i0)], config)
    intensity = np.exp(sol.y[0])
    a_s, a_p = _coefficients(intensity, ip, scales, alpha0)
    return PropagationProfile(
        z=sol.t, intensity=intensity, pump=np.full_like(sol.t, ip), alpha_s=a_s, alpha_p=a_p,
        transmittance=float(intensity[-1] / config.i0), t0=t0,
        stats={"nfev": int(sol.nfev)})


def integrate_copropagating(config: PropagationConfig, scales: IntensityScales,
                            alpha0: float) -> PropagationProfile:
    """Signal and pump attenuated together, assuming equal group velocities."""
    if config.ip0 <= 0 or config.i0 <= 0:
        raise ValueError("copropagating arrangement needs both inputs positive")
    t0 = math.exp(-alpha0 * config.length_l)

    def rhs(_z, y):
        i, ip = math.exp(y[0]), math.exp(y[1])
        # the pump coefficient is the signal one with the roles swapped
        return [-alpha_signal_intensity(i, scales, alpha0, i_pump=ip),
                -alpha_signal_intensity(ip, scales, alpha0, i_pump=i)]

    sol = _solve(rhs, [math.log(config.i0), math.log(config.ip0)], config)
    intensity, pump = np.exp(sol.y[0]), np.exp(sol.y[1])
    a_s, a_p = _coefficients(intensity, pump, scales, alpha0)
    return PropagationProfile(
        z=sol.t, intensity=intensity, pump=pump, alpha_s=a_s, alpha_p=a_p,
        transmittance=float(intensity[-1] / config.i0), t0=t0,
        pump_transmittance=float(pump[-1] / config.ip0),
        stats={"nfev": int(sol.nfev)})


def propagate(config: PropagationConfig, scales: IntensityScales, alpha0: float) -> PropagationProfile:
    if config.arrangement == "copropagating":
        return integrate_copropagating(config, scales, alpha0)
    return integrate_uniform(config, scales, alpha0)


# --- transfer laws -----------------------------------------------------------

def _k(scales: IntensityScales, ip: float) -> float:
    return 1.0 / ip + 1.0 / scales.i_sat3 + 2.0 / scales.i_coh


def transfer_law_residual(z: float, i_candidate: float, i0: float, scales: IntensityScales,
                          alpha0: float, i_pump: float | None = None) -> float:
    """Printed transfer law as ``alpha0 z - RHS``; vanishes on the printed solution."""
    ip = scales.i_pump if i_pump is None else i_pump
    ic = scales.i_coh
    rhs = ((1.0 + ip / ic) * math.log(i0 / i_candidate)
           + (i0**2 - i_candidate**2) / (ip * ic)
           + (i0 - i_candidate) * _k(scales, ip))
    return alpha0 * z - rhs


def transfer_law_residual_rederived(z: float, i_candidate: float, i0: float,
                                    scales: IntensityScales, alpha0: float,
                                    i_pump: float | None = None) -> float:
    """Exact separation-of-variables solution of the uniform-pump ODE, ``alpha0 z - RHS``."""
    ip = scales.i_pump if i_pump is None else i_pump
    ic = scales.i_coh
    rhs = ((1.0 + ip / ic) * math.log(i0 / i_candidate)
           + (i0**2 - i_candidate**2) / (2.0 * ip * ic)
           + (i0 - i_candidate) * _k(scales, ip))
    return alpha0 * z - rhs


def _polished_root(f, df, lo, hi, xtol):
    x = bisect(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=400)
    d = df(x)
    if d != 0:
        y = x - f(x) / d
        if lo <= y <= hi and abs(f(y)) <= abs(f(x)):
            x = y
    return x


def solve_transfer_law(z: float, i0: float, scales: IntensityScales, alpha0: float,
                       rederived: bool = True, i_pump: float | None = None) -> float:
    """Intensity at depth ``z`` from the implicit transfer law (bisection + Newton)."""
    if z == 0 or i0 == 0:
        return i0
    ip = scales.i_pump if i_pump is None else i_pump
    res = transfer_law_residual_rederived if rederived else transfer_law_residual
    q = 1.0 if rederived else 2.0

    def f(x):
        return res(z, x, i0, scales, alpha0, ip)

    def df(x):
        return (1.0 + ip / scales.i_coh) / x + q * x / (ip * scales.i_coh) + _k(scales, ip)

    lo = i0 * math.exp(-alpha0 * z) * 0.5
    return _polished_root(f, df, lo, i0, xtol=1e-16 * i0)


def transmittance_printed_residual(t: float, t0: float, i0: float, scales: IntensityScales,
                                   i_pump: float | None = None) -> float:
    ip = scales.i_pump if i_pump is None else i_pump
    return (math.log(t0 / t) + i0 * (1.0 - t) * _k(scales, ip)
            + (1.0 - t * t) * i0**2 / (ip * scales.i_coh))


def transmittance_rederived_residual(t: float, t0: float, i0: float, scales: IntensityScales,
                                     i_pump: float | None = None) -> float:
    ip = scales.i_pump if i_pump is None else i_pump
    return (math.log(t0) + (1.0 + ip / scales.i_coh) * math.log(1.0 / t)
            + i0 * (1.0 - t) * _k(scales, ip)
            + (1.0 - t * t) * i0**2 / (2.0 * ip * scales.i_coh))


def transmittance_uniform(t0: float, i0: float, scales: IntensityScales,
                          rederived: bool = False, i_pump: float | None = None) -> float:
    """Uniform-pump transmittance from an implicit law, root in ``[T0, 1]``.

    ``rederived=False`` solves the printed equation, which tends to ``T0`` as
    ``I0 -> 0``; the rederived law tends to ``T0 ** (1/(1 + I_p/I_coh))``.
    """
    if not 0 < t0 < 1:
        raise ValueError("T0 must lie in (0, 1)")
    ip = scales.i_pump if i_pump is None else i_pump
    if scales.i_coh == 0:
        return 1.0
    res = transmittance_rederived_residual if rederived else transmittance_printed_residual
    logc = (1.0 + ip / scales.i_coh) if rederived else 1.0
    q = 1.0 if rederived else 2.0

    def f(t):
        return res(t, t0, i0, scales, ip)

    def df(t):
        return -logc / t - i0 * _k(scales, ip) - q * t * i0**2 / (ip * scales.i_coh)

    if f(1.0) >= 0:
        return 1.0
    if f(t0) <= 0:
        raise ValueError("no sign change of the transmittance law on [T0, 1]")
    return _polished_root(f, df, t0, 1.0, xtol=1e-14)


def transmittance_ode(t0: float, i0: float, scales: IntensityScales, alpha0: float = 1.0,
                      arrangement: Arrangement = "uniform_pump", ip0: float | None = None,
                      rtol: float = 1e-10) -> float:
    """Transmittance of a medium with small-signal transmission ``T0`` by direct integration."""
    length = -math.log(t0) / alpha0
    ip = scales.i_pump if ip0 is None else ip0
    cfg = PropagationConfig(length_l=length, i0=i0, ip0=ip, arrangement=arrangement,
                            rtol=rtol, atol=1e-14, n_samples=2)
    return propagate(cfg, scales, alpha0).transmittance


def two_state_transmittance(t0: float, i0: float, i_sat2: float) -> float:
    """Saturable two-level absorber: ``ln(T0/T) + (I0/I_sat)(1 - T) = 0``."""
    if not 0 < t0 < 1:
        raise ValueError("T0 must lie in (0, 1)")
    s = i0 / i_sat2

    def f(t):
        return math.log(t0 / t) + s * (1.0 - t)

    if f(1.0) >= 0:
        return 1.0
    return _polished_root(f, lambda t: -1.0 / t - s, t0, 1.0, xtol=1e-14)


# --- regime taxonomy ---------------------------------------------------------

DecayRegime = Literal["exponential", "linear", "sqrt", "transition"]


def classify_decay_regime(intensity: float, scales: IntensityScales, margin: float = 3.0) -> DecayRegime:
    """Which approximate decay law applies at intensity ``I``.

    ``exponential`` below the smallest intensity scale, ``sqrt`` above the
    quadratic threshold, ``linear`` in between. Within a factor ``margin`` of
    either boundary the answer is ``transition``.
    """
    i_bar = min(scales.i_pump, scales.i_sat3, scales.i_coh)
    i_quad = (scales.i_pump * scales.i_coh + scales.i_sat3 * scales.i_coh
              + 2.0 * scales.i_pump * scales.i_sat3) / scales.i_sat3
    for boundary in (i_bar, i_quad):
        if boundary / margin < intensity < boundary * margin:
            return "transition"
    if intensity <= i_bar:
        return "exponential"
    if intensity >= i_quad:
        return "sqrt"
    return "linear"
