"""Holonomic quantum gates on quantum-dot excitons.

Selection rules, gate Hamiltonians, dark-space holonomies and time-domain
simulations, with a CLI that writes CSV data for each figure.
"""

__version__ = "0.1.0"

from . import core, dynamics, hamiltonians, holonomy, selection
from .core import HermitianOperator, StateVector, eigensystem, matrix_exponential
from .dynamics import (
    AdiabaticSchedule,
    SimulationTrace,
    adiabaticity_scan,
    dynamical_phase_report,
    integrate,
    run_gate,
    two_photon_validation,
)
from .holonomy import (
    ParameterLoop,
    alpha_integral,
    analytic_dark_states,
    curvature,
    dark_frame,
    holonomy_path_ordered,
    holonomy_stokes,
)
from .selection import allowed_transitions, bandwidth_feasibility, dipole_amplitude, excitation_ratios
