import numpy as np
import pytest
from scipy.integrate import solve_ivp

from centralspin.control import PulseSequence, pulse_amplitude


def exponential_ode_oracle(Gamma, gamma0, times, pulses=None, rtol=1e-11, atol=1e-13):
    """Propagator for the Lorentzian kernel via its exact ODE embedding.

    With ``y(t) = int_0^t f(t-s) exp(-i(R(t)-R(s))) G(s) ds`` and
    ``f = (Gamma gamma0/2) exp(-gamma0 tau)`` one has ``G' = -y`` and
    ``y' = (Gamma gamma0/2) G - (gamma0 + i r(t)) y``. Independent of the
    Volterra quadrature; pulse edges are integrated piecewise.
    """
    pulses = pulses or PulseSequence.off()
    c = 0.5 * Gamma * gamma0
    t_max = times[-1]
    if pulses.mode == "off":
        breaks = np.array([0.0, t_max])
    else:
        periods = np.arange(int(np.ceil(t_max / pulses.tau)) + 1) * pulses.tau
        breaks = np.unique(np.concatenate(([0.0, t_max], periods, periods + pulses.kappa)))
        breaks = breaks[breaks <= t_max]

    def rhs(t, z, r):
        G, y = z
        return [-y, c * G - (gamma0 + 1j * r) * y]

    out = np.empty(len(times), dtype=complex)
    z = np.array([1.0 + 0j, 0j])
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        r = pulse_amplitude(pulses, 0.5 * (lo + hi))
        mask = (times >= lo) & (times < hi)
        t_eval = np.append(times[mask], hi)
        sol = solve_ivp(rhs, (lo, hi), z, method="DOP853", rtol=rtol, atol=atol,
                        t_eval=t_eval, args=(r,))
        out[mask] = sol.y[0, :-1]
        z = sol.y[:, -1]
    out[times == t_max] = z[0]
    return out


@pytest.fixture
def ode_oracle():
    return exponential_ode_oracle
