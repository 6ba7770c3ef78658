"""Exact reduced dynamics of a central spin-1/2 in a fully polarized spin bath."""

from .control import PulseSequence, TwoTimeKernel, eval_controlled, phase_integral, pulse_amplitude
from .kernels import (
    Box, Exponential, GaussianBath, KernelRangeError, Tabulated,
    box_delta, box_detuning, eval_kernel, exponential_chi,
)
from .oracle import (
    AmplitudeTrajectory, BathRealization, compare_reduced, evolve_amplitudes,
    overhauser_shift, sample_bath,
)
from .propagator import (
    PropagatorSeries, SolverError, TimeGrid, analytic_box, analytic_exponential,
    fidelity, solve_volterra, to_lab_frame,
)
from .tcl import (
    QubitState, QubitTrajectory, TclCoefficients, analytic_gamma_exponential,
    coefficients, evolve_exact, evolve_tcl_direct, state_fidelity,
)

__version__ = "0.1.0"
