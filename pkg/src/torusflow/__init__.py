"""Pseudo-spectral 2D incompressible Navier-Stokes in vorticity form with
stiffly-accurate IMEX Runge-Kutta time stepping and adaptive step control."""

from .adaptive import (ControllerConfig, ControllerState, Decision, StallError,
                       Strategy, ats_formula, clamp_final, decide)
from .manufactured import (FREQ_A, FREQ_B, MULTI_PULSE_BREAKS, ManufacturedCase,
                           PulseSchedule, PulseSolution, UnknownCase, example1,
                           example2, example3, get_case, j2, mixed_error)
from .orderconds import ConditionResult, certify, check_order
from .solver import (NonFiniteState, Problem, RunResult, SingularStage,
                     SolverState, StepRecord, ierk_step, run_adaptive, run_fixed)
from .spectral import (Field, GridSpec, NonZeroMean, VectorField, convection,
                       deriv_x, deriv_y, enstrophy, h1_seminorm, inner,
                       l2_norm, laplacian, random_mean_free, solve_poisson,
                       to_physical, to_spectral, velocity)
from .tableaux import (DegenerateParameter, DifferenceMatrices, StabilityReport,
                       Tableau, UnknownTableau, difference_matrices, ierk23,
                       ierk35, ierk47, imex_euler, in_pd_range, make_tableau,
                       stability_report, validate)

__version__ = "0.1.0"
