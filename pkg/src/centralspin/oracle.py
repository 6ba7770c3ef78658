"""Brute-force reference: explicit finite bath in the single-exciton block.

For couplings ``A_k`` and bath frequencies ``w_k`` the amplitudes obey

    c0' = i h c0 - i sum_k (A_k/2) exp(i d_k t) c_k
    ck' = -i (A_k/2) exp(-i d_k t) c0,       d_k = omega0 - w_k + A_k/2

with ``h = sum_k A_k/2``, ``c0(0) = 1`` and ``c_k(0) = 0``. We integrate the
equivalent autonomous system for ``a = c0 exp(-i h t)`` and
``b_k = c_k exp(i (d_k - h) t)``, whose generator only contains the slow
detunings ``d_k - h``; norms are unchanged by the substitution.

Control adds ``+i(r/2) c0`` and ``-i(r/2) c_k``, which multiplies the memory
kernel by ``exp(-i int_s^t r)``. The reported rotating-frame propagator
also removes the resulting ``exp(iR/2)`` phase from ``c0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .control import PulseSequence, pulse_amplitude, phase_integral

NORM_ABORT = 1e-6
STEP_LIMIT = 0.1


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class BathRealization:
    A: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        A = np.atleast_1d(np.asarray(self.A, dtype=float))
        w = np.atleast_1d(np.asarray(self.w, dtype=float))
        if A.ndim != 1 or A.shape != w.shape or A.size < 1:
            raise ValueError("A and w must be equal-length 1-D sequences")
        if not (np.isfinite(A).all() and np.isfinite(w).all()):
            raise ValueError("bath parameters must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "w", w)

    @property
    def N(self):
        return self.A.size

    @classmethod
    def box(cls, Acal, N, omega=0.0):
        return cls(np.full(N, Acal / N), np.full(N, float(omega)))


@dataclass(frozen=True, eq=False)
class AmplitudeTrajectory:
    times: np.ndarray
    c0: np.ndarray
    g_tilde: np.ndarray
    norm: np.ndarray
    h: float
    dg_tilde: np.ndarray
    ck: np.ndarray | None = None


def sample_bath(N, muA, nuA, w_mean=0.0, w_spread=0.0, seed=0):
    """Gaussian couplings and bath frequencies, reproducible from ``seed``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if nuA < 0 or w_spread < 0:
        raise ValueError("spreads must be nonnegative")
    rng = np.random.default_rng(seed)
    A = rng.normal(muA, nuA, size=N) if nuA > 0 else np.full(N, float(muA))
    w = rng.normal(w_mean, w_spread, size=N) if w_spread > 0 else np.full(N, float(w_mean))
    return BathRealization(A, w)


def overhauser_shift(bath):
    return 0.5 * float(np.sum(bath.A))


def pulse_edges(pulses, t_max):
    """Sorted switching times of the control field in ``[0, t_max]``."""
    if pulses.mode == "off":
        return np.empty(0)
    periods = np.arange(int(np.ceil(t_max / pulses.tau)) + 1) * pulses.tau
    edges = np.unique(np.concatenate((periods, periods + pulses.kappa)))
    return edges[edges <= t_max]


def evolve_amplitudes(bath, omega0, grid, pulses=None, store_modes=False):
    """RK4 integration of the amplitude equations on ``grid``."""
    pulses = pulses or PulseSequence.off()
    h = overhauser_shift(bath)
    half = 0.5 * bath.A
    detune = omega0 - bath.w + half - h
    t = grid.times
    dt = grid.dt

    edges = pulse_edges(pulses, grid.t_max)
    r_max = np.abs(pulse_amplitude(pulses, edges)).max(initial=0.0) if edges.size else 0.0
    # bound on the generator's spectral radius
    scale = np.abs(detune).max() + r_max + np.sqrt(np.sum(half**2))
    if dt * scale >= STEP_LIMIT:
        raise OracleError(
            f"step too coarse: dt*rate = {dt * scale:.3g} >= {STEP_LIMIT}; increase n_steps"
        )

    def rhs(a, b, r):
        da = 0.5j * r * a - 1j * np.dot(half, b)
        db = 1j * (detune - 0.5 * r) * b - 1j * half * a
        return da, db

    def rk4(a, b, r, step):
        a1, b1 = rhs(a, b, r)
        a2, b2 = rhs(a + 0.5 * step * a1, b + 0.5 * step * b1, r)
        a3, b3 = rhs(a + 0.5 * step * a2, b + 0.5 * step * b2, r)
        a4, b4 = rhs(a + step * a3, b + step * b3, r)
        return (a + step / 6 * (a1 + 2 * a2 + 2 * a3 + a4),
                b + step / 6 * (b1 + 2 * b2 + 2 * b3 + b4))

    n = grid.n_steps
    a_out = np.empty(n + 1, dtype=complex)
    coupling = np.zeros(n + 1, dtype=complex)  # sum_k (A_k/2) b_k
    norm = np.empty(n + 1)
    b_out = np.empty((n + 1, bath.N), dtype=complex) if store_modes else None
    a = 1.0 + 0j
    b = np.zeros(bath.N, dtype=complex)
    a_out[0] = a
    norm[0] = 1.0
    if store_modes:
        b_out[0] = b
    # pulse edges strictly inside each step split it; r is constant on every piece
    cuts = np.searchsorted(edges, t, side="right")
    for k in range(n):
        inner = edges[cuts[k]:cuts[k + 1]]
        inner = inner[inner < t[k + 1]]
        points = np.concatenate(([t[k]], inner, [t[k + 1]])) if inner.size else (t[k], t[k + 1])
        for lo, hi in zip(points[:-1], points[1:]):
            if hi > lo:
                a, b = rk4(a, b, pulse_amplitude(pulses, 0.5 * (lo + hi)), hi - lo)
        a_out[k + 1] = a
        coupling[k + 1] = np.dot(half, b)
        norm[k + 1] = abs(a) ** 2 + np.vdot(b, b).real
        if store_modes:
            b_out[k + 1] = b
        if abs(norm[k + 1] - 1.0) > NORM_ABORT:
            raise OracleError(f"norm drift {norm[k + 1] - 1:.3g} at node {k + 1}; step too coarse")

    R = np.asarray(phase_integral(pulses, t))
    c0 = a_out * np.exp(1j * h * t)
    g_tilde = a_out * np.exp(-0.5j * R)
    # the control term cancels against the frame phase, leaving the bath coupling
    dg_tilde = -1j * coupling * np.exp(-0.5j * R)
    ck = None
    if store_modes:
        ck = b_out * np.exp(-1j * np.outer(t, detune))
    return AmplitudeTrajectory(t, c0, g_tilde, norm, h, dg_tilde, ck)


def compare_reduced(traj, series):
    """Max and RMS of ``|c0 exp(-iht) - g_tilde|`` over the common grid."""
    if len(traj.times) != len(series.times) or not np.allclose(
        traj.times, series.times, rtol=0, atol=1e-12 * series.times[-1]
    ):
        raise ValueError("trajectory and series are on different grids")
    diff = np.abs(traj.g_tilde - series.g_tilde)
    return {"max_abs": float(diff.max()), "rms": float(np.sqrt(np.mean(diff**2)))}
