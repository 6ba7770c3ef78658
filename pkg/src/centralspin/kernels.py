"""Bath memory kernels for the polarized central-spin problem.

Every kernel is a stationary correlation function ``f(tau)`` of the time lag
``tau = t - s >= 0`` expressed in the frame that removes the Overhauser phase.
Kernels are immutable and evaluate vectorised over numpy arrays.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np


class KernelRangeError(ValueError):
    """Raised when a tabulated kernel is evaluated outside its table."""


def _check_finite(**params):
    for name, value in params.items():
        if not np.all(np.isfinite(value)):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class Exponential:
    """Lorentzian bath: ``f(tau) = (Gamma*gamma0/2) exp(-gamma0*tau)``."""

    Gamma: float
    gamma0: float
    kind = "exponential"

    def __post_init__(self):
        _check_finite(Gamma=self.Gamma, gamma0=self.gamma0)
        if self.Gamma <= 0 or self.gamma0 <= 0:
            raise ValueError("Gamma and gamma0 must be positive")

    def evaluate(self, tau):
        tau = np.asarray(tau, dtype=float)
        return (0.5 * self.Gamma * self.gamma0) * np.exp(-self.gamma0 * np.abs(tau)) + 0j

    def overhauser_shift(self):
        return 0.0


@dataclass(frozen=True)
class Box:
    """Homogeneous bath ``A_k = Acal/N``: ``f(tau) = Acal^2/(4N) exp(i Omega tau)``."""

    Acal: float
    N: int
    Omega: float
    kind = "box"

    def __post_init__(self):
        _check_finite(Acal=self.Acal, Omega=self.Omega)
        if self.N < 1:
            raise ValueError("N must be >= 1")

    def evaluate(self, tau):
        tau = np.asarray(tau, dtype=float)
        return (self.Acal**2 / (4.0 * self.N)) * np.exp(1j * self.Omega * tau)

    def overhauser_shift(self):
        return 0.5 * self.Acal

    @property
    def delta(self):
        return box_delta(self.Omega, self.Acal, self.N)


@dataclass(frozen=True)
class GaussianBath:
    """Gaussian-distributed couplings, effective kernel

    ``f(tau) = Acal/(2 sqrt(N)) exp(-nu^2 tau^2 / 2 + i (Acal/2) tau)``.

    The prefactor is kept exactly as published even though it carries one
    power of frequency fewer than a correlation function should.
    """

    Acal: float
    N: int
    nu: float
    kind = "gaussian"

    def __post_init__(self):
        _check_finite(Acal=self.Acal, nu=self.nu)
        if self.Acal == 0:
            raise ValueError("Acal must be nonzero")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.nu < 0:
            raise ValueError("nu must be >= 0")

    def evaluate(self, tau):
        tau = np.asarray(tau, dtype=float)
        amp = self.Acal / (2.0 * math.sqrt(self.N))
        return amp * np.exp(-0.5 * self.nu**2 * tau**2 + 0.5j * self.Acal * tau)

    def overhauser_shift(self):
        return 0.5 * self.Acal


@dataclass(frozen=True)
class Tabulated:
    """Kernel sampled at ``k*dt``; linear interpolation between samples."""

    dt: float
    values: tuple = field(repr=False)
    kind = "tabulated"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError("values must be a nonempty 1-D sequence")
        _check_finite(dt=self.dt, values=vals)
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        object.__setattr__(self, "values", tuple(complex(v) for v in vals))

    @classmethod
    def zeros(cls, t_max, n=2):
        return cls(dt=t_max / (n - 1), values=(0j,) * n)

    @property
    def t_max(self):
        return self.dt * (len(self.values) - 1)

    def evaluate(self, tau):
        tau = np.asarray(tau, dtype=float)
        vals = np.asarray(self.values)
        x = tau / self.dt
        top = len(vals) - 1
        # allow rounding slack at the table end, nothing beyond
        if np.any(x < -1e-9) or np.any(x > top * (1 + 1e-12) + 1e-9):
            raise KernelRangeError(
                f"lag outside tabulated range [0, {self.t_max}]"
            )
        x = np.clip(x, 0, top)
        i = np.minimum(np.floor(x).astype(int), max(top - 1, 0))
        w = x - i
        if top == 0:
            return np.broadcast_to(vals[0], tau.shape).astype(complex)
        return (1 - w) * vals[i] + w * vals[i + 1]

    def overhauser_shift(self):
        return 0.0


KernelSpec = Union[Exponential, Box, GaussianBath, Tabulated]

KERNEL_TYPES = {cls.kind: cls for cls in (Exponential, Box, GaussianBath, Tabulated)}


def eval_kernel(spec, dt):
    """Evaluate ``spec`` at lag ``dt >= 0`` (scalar or array)."""
    if np.any(np.asarray(dt) < 0):
        raise ValueError("kernel lag must be nonnegative")
    out = spec.evaluate(dt)
    if np.ndim(out) == 0:
        return complex(out)
    return out


def box_detuning(omega0, omega, Acal, N):
    """Detuning of the box model, ``omega0 - omega - (Acal/2)(1 - 1/N)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    out = omega0 - omega - 0.5 * Acal * (1.0 - 1.0 / N)
    _check_finite(Omega=out)
    return out


def box_delta(Omega, Acal, N):
    """Revival frequency ``sqrt(Omega^2 + Acal^2/N)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return math.hypot(Omega, Acal / math.sqrt(N))


def exponential_chi(Gamma, gamma0):
    """Principal square root of ``1 - 2 Gamma/gamma0``, always complex."""
    if Gamma <= 0 or gamma0 <= 0:
        raise ValueError("Gamma and gamma0 must be positive")
    return cmath.sqrt(complex(1.0 - 2.0 * Gamma / gamma0))
