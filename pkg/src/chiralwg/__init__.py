"""Entanglement dynamics of two qubits chirally coupled to a 1-D waveguide.

Two engines compute the Wootters concurrence of the pair after one qubit is
excited: ``markovian`` integrates the reduced master equation (and evaluates
its closed forms), ``scattering`` propagates the exact single-excitation
dynamics by spectral quadrature over scattering eigenstates, capturing
retardation that the master equation misses.  ``experiments`` sweeps either
engine over parameter grids and ``cli`` exposes everything as a command-line
tool.
"""

__version__ = "0.1.0"

from .core import (DerivedRates, NumericalError, QubitParams, SystemConfig,
                   ValidationError, beta_factor, config_from_targets,
                   couplings_from_targets, directionality, validate)
from .markovian import (ConcurrenceTrace, ReducedState, ReducedTrajectory,
                        cmax_analytic, cmax_numeric, concurrence,
                        concurrence_analytic, evolve, master_rhs)
from .scattering import (AmplitudeTrace, OverlapMatrix, QuadratureSpec,
                         ScatteringEigenstate, localized_state_exists,
                         overlap_matrix, propagate, solve_eigenstate,
                         transmission_spectrum)
from .experiments import (SweepResult, SweepSpec, compare_engines, preset_spec,
                          run_sweep)

__all__ = [
    "__version__",
    "AmplitudeTrace", "ConcurrenceTrace", "DerivedRates", "NumericalError",
    "OverlapMatrix", "QuadratureSpec", "QubitParams", "ReducedState",
    "ReducedTrajectory", "ScatteringEigenstate", "SweepResult", "SweepSpec",
    "SystemConfig", "ValidationError",
    "beta_factor", "cmax_analytic", "cmax_numeric", "compare_engines",
    "concurrence", "concurrence_analytic", "config_from_targets",
    "couplings_from_targets", "directionality", "evolve",
    "localized_state_exists", "master_rhs", "overlap_matrix", "preset_spec",
    "propagate", "run_sweep", "solve_eigenstate", "transmission_spectrum",
    "validate",
]
