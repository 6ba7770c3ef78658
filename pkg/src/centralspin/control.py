"""Leakage-elimination control field and the modulated two-time kernel.

The control enters the reduced problem only through its accumulated phase
``R(t) = int_0^t r(s) ds``: a stationary kernel ``f(t - s)`` becomes
``g(t, s) = f(t - s) exp(-i (R(t) - R(s)))``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .kernels import eval_kernel

MODES = ("off", "constant", "random")


@lru_cache(maxsize=64)
def _random_weights(seed, size):
    out = np.random.default_rng(seed).random(size)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class PulseSequence:
    """Equidistant rectangular pulses.

    In period ``n`` the field is ``u_n * Psi / kappa`` on ``[n tau, n tau + kappa)``
    and zero otherwise, so each period accumulates phase ``u_n * Psi``.
    ``u_n = 1`` in constant mode; in random mode ``u_n`` is uniform on [0, 1),
    drawn once per period from ``seed``.
    """

    mode: str = "off"
    tau: float = 1.0
    kappa: float = 1.0
    Psi: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown pulse mode {self.mode!r}; expected one of {MODES}")
        if self.mode != "off":
            if not (0 < self.kappa <= self.tau):
                raise ValueError("need 0 < kappa <= tau")
            if self.Psi < 0:
                raise ValueError("Psi must be >= 0")
            if not np.isfinite([self.tau, self.kappa, self.Psi]).all():
                raise ValueError("pulse parameters must be finite")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")

    @classmethod
    def off(cls):
        return cls()

    @classmethod
    def constant_rate(cls, rate, period=1.0):
        """Continuous field ``r(t) = rate`` (duty window fills the period)."""
        return cls(mode="constant", tau=period, kappa=period, Psi=rate * period)

    def weights(self, n_periods):
        """Per-period amplitude factors ``u_0 .. u_{n-1}``.

        numpy's generators emit doubles sequentially, so a prefix of the
        stream never depends on how many periods were requested; draws are
        cached per seed in power-of-two blocks.
        """
        n_periods = max(int(n_periods), 0)
        if self.mode == "random":
            size = 1 << max(n_periods - 1, 0).bit_length()
            return _random_weights(int(self.seed), size)[:n_periods]
        return np.ones(n_periods)

    def _split(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("time must be nonnegative")
        n = np.floor(t / self.tau).astype(np.int64)
        offset = t - n * self.tau
        # guard against floor landing one period low through rounding
        over = offset >= self.tau
        n = np.where(over, n + 1, n)
        offset = np.where(over, offset - self.tau, np.maximum(offset, 0.0))
        return t, n, offset


def pulse_amplitude(seq, t):
    """Field strength ``r(t)``; vectorised over ``t``."""
    t_arr = np.asarray(t, dtype=float)
    if seq.mode == "off":
        if np.any(t_arr < 0):
            raise ValueError("time must be nonnegative")
        out = np.zeros_like(t_arr)
    else:
        t_arr, n, offset = seq._split(t_arr)
        u = seq.weights(int(n.max(initial=0)) + 1)
        out = np.where(offset < seq.kappa, u[n] * seq.Psi / seq.kappa, 0.0)
    return float(out) if out.ndim == 0 else out


def phase_integral(seq, t):
    """Accumulated control phase ``int_0^t r(s) ds`` in closed form."""
    t_arr = np.asarray(t, dtype=float)
    if seq.mode == "off":
        if np.any(t_arr < 0):
            raise ValueError("time must be nonnegative")
        out = np.zeros_like(t_arr)
    else:
        t_arr, n, offset = seq._split(t_arr)
        u = seq.weights(int(n.max(initial=0)) + 1)
        completed = np.concatenate(([0.0], np.cumsum(u * seq.Psi)))
        partial = u[n] * (seq.Psi / seq.kappa) * np.minimum(offset, seq.kappa)
        out = completed[n] + partial
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TwoTimeKernel:
    """Stationary kernel ``base`` modulated by the phase of ``pulses``."""

    base: object
    pulses: PulseSequence = field(default_factory=PulseSequence)

    @property
    def stationary(self):
        return self.pulses.mode == "off"


def eval_controlled(k, t, s):
    """``g(t, s) = f(t - s) exp(-i (R(t) - R(s)))`` for ``0 <= s <= t``."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or np.any(s > t):
        raise ValueError("need 0 <= s <= t")
    f = eval_kernel(k.base, t - s)
    phase = phase_integral(k.pulses, t) - phase_integral(k.pulses, s)
    out = f * np.exp(-1j * np.asarray(phase))
    return complex(out) if np.ndim(out) == 0 else out
