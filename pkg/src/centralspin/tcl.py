"""Time-local master equation of the central spin.

With ``G`` the lab-frame propagator, the reduced state obeys

    d rho/dt = -(i/2) S(t) [P1, rho] + gamma(t) (s- rho s+ - {P1, rho}/2),

with ``S = -2 Im(G'/G)``, ``gamma = -2 Re(G'/G)`` and ``P1 = s+ s- = |1><1|``.
Density matrices are stored in the ordered basis ``(|1>, |0>)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import exponential_chi
from .propagator import to_lab_frame

MASK_THRESHOLD = 1e-8
# the direct integrator stops once the rate makes one RK4 step this stiff
STIFFNESS_LIMIT = 0.5


@dataclass(frozen=True, eq=False)
class TclCoefficients:
    times: np.ndarray
    S: np.ndarray
    gamma: np.ndarray
    valid_mask: np.ndarray
    S_rot: np.ndarray  # shift without the Overhauser part, -2 Im(g_tilde'/g_tilde)

    @property
    def dt(self):
        return self.times[1] - self.times[0]


class QubitState:
    """Validated 2x2 density matrix in the ``(|1>, |0>)`` basis."""

    def __init__(self, rho, atol=1e-12):
        rho = np.array(rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError("rho must be 2x2")
        if np.abs(rho - rho.conj().T).max() > atol:
            raise ValueError("rho is not Hermitian")
        if abs(np.trace(rho) - 1) > atol:
            raise ValueError("rho must have unit trace")
        if np.linalg.eigvalsh(rho).min() < -1e-9:
            raise ValueError("rho is not positive semidefinite")
        self.rho = rho

    @classmethod
    def from_populations(cls, rho11, rho10=0.0):
        return cls([[rho11, rho10], [np.conj(rho10), 1 - rho11]])

    @classmethod
    def pure(cls, amp1, amp0):
        psi = np.array([amp1, amp0], dtype=complex)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def excited(cls):
        return cls.from_populations(1.0)

    @property
    def rho11(self):
        return self.rho[0, 0].real

    @property
    def rho10(self):
        return self.rho[0, 1]

    def __repr__(self):
        return f"QubitState(rho11={self.rho11:.6g}, rho10={self.rho10:.6g})"


@dataclass(frozen=True, eq=False)
class QubitTrajectory:
    """Density matrices ``rho[k]`` at ``times[k]``.

    ``stop_reason`` is None for a complete run. A direct integration that
    hits a masked or too-stiff node stops there and keeps only the prefix.
    """

    times: np.ndarray
    rho: np.ndarray
    stop_reason: str | None = None

    def __len__(self):
        return len(self.times)

    @property
    def rho11(self):
        return self.rho[:, 0, 0].real

    @property
    def rho00(self):
        return self.rho[:, 1, 1].real

    @property
    def rho10(self):
        return self.rho[:, 0, 1]


def coefficients(series):
    """Shift ``S(t)`` and rate ``gamma(t)`` from a propagator series."""
    g = series.g_tilde
    valid = np.abs(g) >= MASK_THRESHOLD
    ratio = np.full(g.shape, np.nan + 0j)
    np.divide(series.dg_tilde, g, out=ratio, where=valid)
    gamma = -2 * ratio.real
    S_rot = -2 * ratio.imag
    S = S_rot - 2 * series.h
    return TclCoefficients(series.times, S, gamma, valid, S_rot)


def analytic_gamma_exponential(Gamma, gamma0, t):
    """Closed-form decay rate for the Lorentzian kernel; NaN at poles."""
    t = np.asarray(t, dtype=float)
    chi = exponential_chi(Gamma, gamma0)
    if abs(chi) < 1e-8:
        out = 2 * Gamma**2 * t / (1 + Gamma * t)
        return float(out) if out.ndim == 0 else out
    # sinh(x)/(chi cosh(x) + sinh(x)) with x = gamma0 chi t/2, divided through by e^x
    e = np.exp(-gamma0 * chi * t)
    num = 2 * Gamma * (1 - e)
    den = chi * (1 + e) + (1 - e)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = np.where(np.abs(den) < 1e-12, np.nan, num / np.where(den == 0, 1, den))
    finite = np.isfinite(val)
    if np.any(np.abs(val.imag[finite]) > 1e-10 * np.maximum(1, np.abs(val.real[finite]))):
        raise ArithmeticError("decay rate acquired an imaginary part")
    out = val.real
    return float(out) if out.ndim == 0 else out


def evolve_exact(rho0, series):
    """Apply the exact dynamical map ``rho(0) -> rho(t)``."""
    G = to_lab_frame(series)
    r = rho0.rho
    rho = np.empty((len(G), 2, 2), dtype=complex)
    rho[:, 0, 0] = np.abs(G) ** 2 * r[0, 0].real
    rho[:, 0, 1] = G * r[0, 1]
    rho[:, 1, 0] = np.conj(rho[:, 0, 1])
    rho[:, 1, 1] = 1 - rho[:, 0, 0]
    return QubitTrajectory(series.times.copy(), rho)


def _rhs(rho, S, gamma):
    p1 = np.array([[1, 0], [0, 0]], dtype=complex)
    lower = np.array([[0, 0], [1, 0]], dtype=complex)
    comm = p1 @ rho - rho @ p1
    anti = p1 @ rho + rho @ p1
    return -0.5j * S * comm + gamma * (lower @ rho @ lower.T - 0.5 * anti)


def _midpoints(x):
    """Cubic (4-point Lagrange) values halfway between consecutive samples."""
    n = len(x)
    if n < 4:
        return 0.5 * (x[:-1] + x[1:])
    mid = np.empty(n - 1)
    mid[1:-1] = (-x[:-3] + 9 * x[1:-2] + 9 * x[2:-1] - x[3:]) / 16
    mid[0] = (5 * x[0] + 15 * x[1] - 5 * x[2] + x[3]) / 16
    mid[-1] = (5 * x[-1] + 15 * x[-2] - 5 * x[-3] + x[-4]) / 16
    return mid


def evolve_tcl_direct(rho0, coeffs, grid=None):
    """RK4 integration of the master equation with tabulated coefficients.

    Coefficients between grid nodes come from local cubic interpolation.
    Integration stops at the first masked node, or where
    ``dt * max(|gamma|, |S_rot|)`` exceeds ``STIFFNESS_LIMIT`` (the rate
    diverges next to a zero of the propagator).
    """
    times = coeffs.times if grid is None else grid.times
    dt = times[1] - times[0]
    usable = coeffs.valid_mask & (
        dt * np.maximum(np.abs(coeffs.gamma), np.abs(coeffs.S_rot)) <= STIFFNESS_LIMIT
    )
    end = len(times) if usable.all() else int(np.argmin(usable))
    reason = None
    if end < len(times):
        reason = "masked" if not coeffs.valid_mask[end] else "stiff"
    if end == 0:
        return QubitTrajectory(times[:0], np.empty((0, 2, 2), complex), reason)

    S = coeffs.S[:end]
    gamma = coeffs.gamma[:end]
    S_mid = _midpoints(S) if end > 1 else S[:0]
    g_mid = _midpoints(gamma) if end > 1 else gamma[:0]

    rho = np.empty((end, 2, 2), dtype=complex)
    rho[0] = rho0.rho
    for k in range(end - 1):
        r = rho[k]
        k1 = _rhs(r, S[k], gamma[k])
        k2 = _rhs(r + 0.5 * dt * k1, S_mid[k], g_mid[k])
        k3 = _rhs(r + 0.5 * dt * k2, S_mid[k], g_mid[k])
        k4 = _rhs(r + dt * k3, S[k + 1], gamma[k + 1])
        rho[k + 1] = r + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return QubitTrajectory(times[:end].copy(), rho, reason)


def state_fidelity(psi0, rho):
    """``sqrt(<psi0|rho|psi0>)`` for a normalized pure state."""
    psi = np.asarray(psi0, dtype=complex)
    if abs(np.vdot(psi, psi).real - 1) > 1e-12:
        raise ValueError("psi0 must be normalized")
    rho = rho.rho if isinstance(rho, QubitState) else np.asarray(rho)
    overlap = np.einsum("i,...ij,j->...", psi.conj(), rho, psi).real
    out = np.sqrt(np.maximum(overlap, 0.0))
    return float(out) if out.ndim == 0 else out
