"""Data behind the three published figures, as plain arrays."""
from __future__ import annotations

import numpy as np

from .control import PulseSequence, TwoTimeKernel
from .kernels import Exponential, GaussianBath
from .propagator import TimeGrid, analytic_exponential, fidelity, solve_volterra

# Fig. 1: Lorentzian bath, analytic, over (gamma0/Gamma, Gamma t)
FIG1_RATIOS = np.arange(1, 51) / 10.0
FIG1_T_MAX = 20.0
FIG1_STEPS = 2000

# Fig. 2: Gaussian effective kernel, mu = 1
FIG2_SIZES = (10**4, 10**5, 10**6)
FIG2_ACAL = 100.0
FIG2_NU = 0.5
FIG2_T_MAX = 10.0
FIG2_STEPS = 10000

# Fig. 3: random rectangular pulses, Gamma = 1
FIG3_RATIOS = (0.2, 1.0, 5.0)
FIG3_T_MAX = 5.0
FIG3_STEPS = 5000
FIG3_STRIDE = 10  # output every 10th node, i.e. on the Fig. 1 time spacing
FIG3_SEED = 2016


def fig3_pulses(seed=FIG3_SEED):
    return PulseSequence(mode="random", tau=0.02, kappa=0.01, Psi=0.2, seed=seed)


def fig1_surface(ratios=FIG1_RATIOS, t_max=FIG1_T_MAX, n_steps=FIG1_STEPS):
    """Fidelity ``F[i, k]`` for ``gamma0 = ratios[i]`` at ``Gamma t = times[k]``."""
    grid = TimeGrid(t_max, n_steps)
    F = np.array([fidelity(analytic_exponential(1.0, r, grid)) for r in ratios])
    return np.asarray(ratios, dtype=float), grid.times, F


def fig2_curves(sizes=FIG2_SIZES, Acal=FIG2_ACAL, nu=FIG2_NU, t_max=FIG2_T_MAX, n_steps=FIG2_STEPS):
    grid = TimeGrid(t_max, n_steps)
    F = np.array([fidelity(solve_volterra(GaussianBath(Acal, N, nu), grid)) for N in sizes])
    return tuple(sizes), grid.times, F


def controlled_fidelity(gamma0, pulses, t_max=FIG3_T_MAX, n_steps=FIG3_STEPS):
    grid = TimeGrid(t_max, n_steps)
    return grid.times, fidelity(solve_volterra(TwoTimeKernel(Exponential(1.0, gamma0), pulses), grid))


def fig3_curves(ratios=FIG3_RATIOS, seed=FIG3_SEED, t_max=FIG3_T_MAX, n_steps=FIG3_STEPS,
                stride=FIG3_STRIDE):
    """Free (analytic) and controlled (numerical) fidelity on a common output grid.

    Returns ``(ratios, times, free, controlled)`` with arrays of shape
    ``(len(ratios), len(times))``.
    """
    pulses = fig3_pulses(seed)
    grid = TimeGrid(t_max, n_steps)
    out_grid = TimeGrid(t_max, n_steps // stride)
    free, ctl = [], []
    for r in ratios:
        free.append(fidelity(analytic_exponential(1.0, r, out_grid)))
        ctl.append(controlled_fidelity(r, pulses, t_max, n_steps)[1][::stride])
    return tuple(ratios), grid.times[::stride], np.array(free), np.array(ctl)


def control_gain(gamma0, pulses, t_max=FIG3_T_MAX, n_steps=FIG3_STEPS):
    """Time-averaged fidelity gain of ``pulses`` over free evolution.

    Both curves come from the same solver on the same grid so that
    discretisation error cancels in the difference.
    """
    grid = TimeGrid(t_max, n_steps)
    free = fidelity(solve_volterra(Exponential(1.0, gamma0), grid))
    ctl = fidelity(solve_volterra(TwoTimeKernel(Exponential(1.0, gamma0), pulses), grid))
    return float(np.mean(ctl) - np.mean(free))
