"""Propagator of the excited-state amplitude.

``solve_volterra`` integrates

    dG/dt = -int_0^t g(t, s) G(s) ds,   G(0) = 1

on a uniform grid with a trapezoidal history sum and a Heun-type
predictor-corrector step (second order). ``analytic_exponential`` and
``analytic_box`` are the closed forms for the Lorentzian and box baths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .control import PulseSequence, TwoTimeKernel, phase_integral
from .kernels import Exponential, exponential_chi, box_delta

FIDELITY_SLACK = 1e-6
INSTABILITY_THRESHOLD = 1e-3
# relative size below which the tail of a decaying kernel is dropped
MEMORY_CUTOFF = 1e-17


class SolverError(RuntimeError):
    """Non-finite values or a runaway solution in the Volterra solver."""


@dataclass(frozen=True)
class TimeGrid:
    t_max: float
    n_steps: int

    def __post_init__(self):
        if self.n_steps < 2:
            raise ValueError("n_steps must be >= 2")
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise ValueError("t_max must be positive and finite")

    @property
    def dt(self):
        return self.t_max / self.n_steps

    @property
    def times(self):
        return np.arange(self.n_steps + 1) * self.dt

    def __len__(self):
        return self.n_steps + 1


@dataclass(frozen=True, eq=False)
class PropagatorSeries:
    """``g_tilde`` and its time derivative sampled on ``grid``.

    ``h`` is the Overhauser shift relating the rotating-frame propagator to the
    lab-frame one, ``G = g_tilde * exp(i h t)``.
    """

    grid: TimeGrid
    g_tilde: np.ndarray
    dg_tilde: np.ndarray
    h: float = 0.0

    @property
    def times(self):
        return self.grid.times


def _as_two_time(kernel):
    if isinstance(kernel, TwoTimeKernel):
        return kernel
    return TwoTimeKernel(kernel, PulseSequence.off())


def _memory_length(f):
    """Number of lags that matter, for kernels that decay to nothing."""
    mag = np.abs(f)
    peak = mag.max(initial=0.0)
    if peak == 0.0:
        return 0
    significant = np.nonzero(mag > MEMORY_CUTOFF * peak)[0]
    return int(significant[-1]) + 1


def solve_volterra(kernel, grid, h=None):
    """Solve the memory-kernel equation for a (possibly controlled) kernel.

    ``kernel`` is a stationary kernel spec or a :class:`TwoTimeKernel`. The
    control phase factorises, ``exp(-i(R(t)-R(s))) = exp(-iR(t)) exp(iR(s))``,
    so each history sum is one dot product against the phase-weighted past.
    """
    k = _as_two_time(kernel)
    if h is None:
        h = k.base.overhauser_shift()
    n = grid.n_steps
    dt = grid.dt
    t = grid.times

    f = np.asarray(k.base.evaluate(t), dtype=complex)
    if not np.all(np.isfinite(f)):
        bad = int(np.nonzero(~np.isfinite(f))[0][0])
        raise SolverError(f"kernel is not finite at node {bad} (t={t[bad]})")
    f0 = f[0]
    mem = _memory_length(f)
    f_rev = f[::-1].copy()  # f_rev[n - m] == f[m]

    controlled = not k.stationary
    if controlled:
        phase = np.asarray(phase_integral(k.pulses, t), dtype=float)
        up = np.exp(1j * phase)
        down = np.conj(up)

    G = np.zeros(n + 1, dtype=complex)
    F = np.zeros(n + 1, dtype=complex)
    W = G if not controlled else np.zeros(n + 1, dtype=complex)
    G[0] = 1.0
    if controlled:
        W[0] = up[0]
    limit = 1.0 + INSTABILITY_THRESHOLD

    for m in range(1, n + 1):
        # trapezoidal history at t_m, every term except the unknown endpoint
        lo = max(1, m - mem + 1)
        hist = np.dot(f_rev[n - m + lo:n], W[lo:m]) if lo < m else 0j
        if m < mem:
            hist += 0.5 * f[m] * W[0]
        if controlled:
            hist *= down[m]
        hist *= dt

        g_pred = G[m - 1] + dt * F[m - 1]
        f_pred = -(hist + 0.5 * dt * f0 * g_pred)
        G[m] = G[m - 1] + 0.5 * dt * (F[m - 1] + f_pred)
        F[m] = -(hist + 0.5 * dt * f0 * G[m])
        if controlled:
            W[m] = up[m] * G[m]

        if not (np.isfinite(G[m]) and np.isfinite(F[m])):
            raise SolverError(f"non-finite propagator at node {m} (t={t[m]})")
        if abs(G[m]) > limit:
            raise SolverError(
                f"|G| = {abs(G[m]):.6g} exceeds 1 + {INSTABILITY_THRESHOLD:g} at node {m} "
                f"(t={t[m]}); refine the grid"
            )

    return PropagatorSeries(grid, G, F, float(h))


def analytic_exponential(Gamma, gamma0, grid, h=0.0):
    """Closed form for the Lorentzian kernel ``(Gamma gamma0/2) exp(-gamma0 |tau|)``.

    Written with growing/decaying exponentials instead of cosh/sinh so that
    large ``gamma0 t`` does not overflow.
    """
    Exponential(Gamma, gamma0)  # validates
    chi = exponential_chi(Gamma, gamma0)
    t = grid.times
    a = 0.5 * gamma0
    if abs(chi) < 1e-8:
        decay = np.exp(-a * t)
        g = decay * (1.0 + a * t)
        dg = -Gamma * a * t * decay
    else:
        b = a * chi
        slow = np.exp((b - a) * t)
        fast = np.exp(-(b + a) * t)
        g = 0.5 * (slow + fast) + (0.5 / chi) * (slow - fast)
        dg = -Gamma / chi * 0.5 * (slow - fast)
    return PropagatorSeries(grid, g.astype(complex), dg.astype(complex), float(h))


def analytic_box(Omega, Acal, N, grid, h=None):
    """Closed form for the box bath; revivals at ``Delta t = 2 n pi``."""
    delta = box_delta(Omega, Acal, N)
    if h is None:
        h = 0.5 * Acal
    t = grid.times
    if delta == 0.0:
        return PropagatorSeries(
            grid, np.ones_like(t, dtype=complex), np.zeros_like(t, dtype=complex), float(h)
        )
    # envelope form of the two-exponential solution; exact at t = 0
    carrier = np.exp(0.5j * Omega * t)
    c, s = np.cos(0.5 * delta * t), np.sin(0.5 * delta * t)
    g = carrier * (c - 1j * (Omega / delta) * s)
    dg = -carrier * s * (Acal**2 / N) / (2 * delta)
    return PropagatorSeries(grid, g, dg, float(h))


def fidelity(series):
    """``F(t) = |G(t)|`` for the excited initial state."""
    return np.abs(series.g_tilde)


def to_lab_frame(series):
    """Restore the Overhauser phase: ``G = g_tilde * exp(i h t)``."""
    return series.g_tilde * np.exp(1j * series.h * series.times)
