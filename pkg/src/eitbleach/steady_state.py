"""Exact steady state of the Lambda (and two-level) master equation.

The density matrix is vectorised row-major (``rho.reshape(-1)``), so that
``vec(A rho B) = kron(A, B.T) @ vec(rho)``. The steady state is obtained from
a dense linear solve in which one row of the Liouvillian is replaced by the
trace constraint; this is the numerical oracle for the closed forms in
:mod:`eitbleach.analytic`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np

from .core_model import (C_LIGHT, AtomParams, DriveParams, MediumParams,
                         susceptibility_prefactor)

Levels = Literal["two", "three"]

# level indices in the three-state basis
A, B, C = 0, 1, 2

#: relative singular-value threshold for a degenerate kernel
KERNEL_RTOL = 1e-12
#: linear-response probe, as a fraction of max(Gamma, Omega_p)
PROBE_FRACTION = 1e-6
#: iterative-refinement passes after the initial solve
REFINE_STEPS = 3


class NoUniqueSteadyState(RuntimeError):
    """The Liouvillian kernel is not one-dimensional."""


@dataclass(frozen=True)
class DensityMatrix:
    rho: np.ndarray

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def __getitem__(self, idx):
        return self.rho[idx]

    def populations(self) -> np.ndarray:
        return self.rho.diagonal().real.copy()

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def trace_error(self) -> float:
        return float(abs(np.trace(self.rho) - 1.0))

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.rho + self.rho.conj().T)
        return float(np.linalg.eigvalsh(h).min())


@dataclass(frozen=True)
class Liouvillian:
    matrix: np.ndarray
    atom: AtomParams
    drive: DriveParams
    levels: str

    @property
    def dim(self) -> int:
        return int(round(math.sqrt(self.matrix.shape[0])))

    def trace_row(self) -> np.ndarray:
        """``vec(1)^T L``; identically zero for a trace-preserving generator."""
        return np.eye(self.dim).reshape(-1) @ self.matrix


@dataclass(frozen=True)
class OpticalResponse:
    chi: complex
    alpha: float
    refr_index: float


def _proj(i: int, j: int, dim: int) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


def _hamiltonian(drive: DriveParams, levels: str) -> np.ndarray:
    if levels == "three":
        h = np.zeros((3, 3), dtype=complex)
        h[B, B] = drive.delta_one
        h[A, A] = drive.delta_two
        h[A, B] = h[B, A] = drive.omega_s
        h[C, B] = h[B, C] = drive.omega_p
        return h
    if levels == "two":
        # H = delta sigma_bb + (Omega_s sigma_ab + h.c.) in the {a, b} basis
        h = np.zeros((2, 2), dtype=complex)
        h[1, 1] = drive.delta_two
        h[0, 1] = h[1, 0] = drive.omega_s
        return h
    raise ValueError(f"levels must be 'two' or 'three', got {levels!r}")


def _dissipator(op: np.ndarray, rate: float) -> np.ndarray:
    ident = np.eye(op.shape[0])
    opd = op.conj().T
    n = opd @ op
    return rate * (np.kron(op, opd.T) - 0.5 * np.kron(n, ident) - 0.5 * np.kron(ident, n.T))


def build_liouvillian(atom: AtomParams, drive: DriveParams, levels: Levels = "three") -> Liouvillian:
    """Generator of ``d rho/dt`` for the driven Lambda or two-level atom.

    Three levels: two spontaneous channels b->a and b->c at rate ``Gamma``
    each, plus ground-state dephasing through ``L[sigma_aa - sigma_cc]`` at
    rate ``gamma``. Two levels: the single channel b->a at rate ``Gamma``.
    """
    h = _hamiltonian(drive, levels)
    dim = h.shape[0]
    ident = np.eye(dim)
    mat = -1j * (np.kron(h, ident) - np.kron(ident, h.T))
    if levels == "three":
        mat += _dissipator(_proj(A, B, 3), atom.gamma_sp)
        mat += _dissipator(_proj(C, B, 3), atom.gamma_sp)
        mat += _dissipator(_proj(A, A, 3) - _proj(C, C, 3), atom.gamma_deph)
    else:
        mat += _dissipator(_proj(0, 1, 2), atom.gamma_sp)
    return Liouvillian(matrix=mat, atom=atom, drive=drive, levels=levels)


def solve_steady_state(liou: Liouvillian) -> DensityMatrix:
    mat = liou.matrix
    dim = liou.dim
    scale = np.max(np.abs(mat))
    if scale == 0:
        raise NoUniqueSteadyState("Liouvillian vanishes identically")
    m = mat / scale
    sv = np.linalg.svd(m, compute_uv=False)
    if np.count_nonzero(sv <= KERNEL_RTOL * sv[0]) > 1:
        raise NoUniqueSteadyState(
            f"kernel dimension {np.count_nonzero(sv <= KERNEL_RTOL * sv[0])}; "
            f"smallest singular values {sv[-3:]}")
    m = m.copy()
    m[0, :] = np.eye(dim).reshape(-1)
    rhs = np.zeros(dim * dim, dtype=complex)
    rhs[0] = 1.0
    x = np.linalg.solve(m, rhs)
    # refine with residuals in extended precision: weak-pump, strong-signal states
    # carry coherences many decades below the populations
    m_ext = m.astype(np.clongdouble)
    for _ in range(REFINE_STEPS):
        resid = rhs - m_ext @ x.astype(np.clongdouble)
        x = x + np.linalg.solve(m, resid.astype(complex))
    return DensityMatrix(x.reshape(dim, dim))


def steady_state(atom: AtomParams, drive: DriveParams, levels: Levels = "three") -> DensityMatrix:
    return solve_steady_state(build_liouvillian(atom, drive, levels))


def probe_rabi(atom: AtomParams, drive: DriveParams) -> float:
    return PROBE_FRACTION * max(atom.gamma_sp, drive.omega_p)


def numeric_response(atom: AtomParams, drive: DriveParams, medium: MediumParams,
                     levels: Levels = "three", probe: float | None = None) -> OpticalResponse:
    """Susceptibility and absorption of the signal from the exact steady state.

    For ``omega_s == 0`` the signal is replaced by a weak probe (``probe`` or
    ``PROBE_FRACTION * max(Gamma, Omega_p)``), giving the linear response.
    The index used in the absorption coefficient is
    ``bulk_index * sqrt(1 + Re chi)``, equal to the bulk index at resonance.
    """
    if drive.omega_s == 0.0:
        drive = drive.replace(omega_s=probe if probe is not None else probe_rabi(atom, drive))
    rho = steady_state(atom, drive, levels)
    rho_ab = rho[0, 1]
    chi = susceptibility_prefactor(medium) * rho_ab / drive.omega_s
    if drive.delta_one == 0.0 and drive.delta_two == 0.0:
        refr = medium.bulk_index
    else:
        refr = medium.bulk_index * math.sqrt(max(1.0 + chi.real, 0.0))
    alpha = medium.omega_trans_s / (refr * C_LIGHT) * chi.imag
    return OpticalResponse(chi=complex(chi), alpha=float(alpha), refr_index=float(refr))


@dataclass(frozen=True)
class AbsorptionSpectrum:
    delta: np.ndarray
    chi: np.ndarray
    alpha: np.ndarray
    refr_index: np.ndarray

    def __len__(self):
        return len(self.delta)

    def __iter__(self) -> Iterator[tuple[float, OpticalResponse]]:
        for d, x, a, n in zip(self.delta, self.chi, self.alpha, self.refr_index):
            yield float(d), OpticalResponse(complex(x), float(a), float(n))

    def argmax(self, positive: bool = True) -> float:
        """Detuning of the absorption maximum (restricted to delta > 0 by default)."""
        mask = self.delta > 0 if positive else np.ones_like(self.delta, dtype=bool)
        return float(self.delta[mask][np.argmax(self.alpha[mask])])


def absorption_spectrum(atom: AtomParams, drive: DriveParams, medium: MediumParams,
                        delta_grid, levels: Levels = "three") -> AbsorptionSpectrum:
    """Sweep the two-photon detuning with the one-photon detuning held fixed."""
    deltas = np.asarray(delta_grid, dtype=float)
    if not np.all(np.isfinite(deltas)):
        raise ValueError("detuning grid must be finite")
    out = [numeric_response(atom, drive.replace(delta_two=float(d)), medium, levels)
           for d in deltas]
    return AbsorptionSpectrum(
        delta=deltas,
        chi=np.array([r.chi for r in out]),
        alpha=np.array([r.alpha for r in out]),
        refr_index=np.array([r.refr_index for r in out]),
    )


def normalized_absorption(atom: AtomParams, drive: DriveParams, levels: Levels = "three",
                          probe: float | None = None) -> float:
    """``alpha / xi = Im(rho_ab) / Omega_s`` [s], medium-independent.

    Uses the bulk index (no dispersive correction), so it is exact at resonance.
    """
    if drive.omega_s == 0.0:
        drive = drive.replace(omega_s=probe if probe is not None else probe_rabi(atom, drive))
    rho = steady_state(atom, drive, levels)
    return float(rho[0, 1].imag / drive.omega_s)
