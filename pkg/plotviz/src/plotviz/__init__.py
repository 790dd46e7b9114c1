"""Figure rendering for torusflow CSV outputs."""

from .jobs import EmptyInput, PlotJob, SchemaError, read_convergence, read_trajectory
from .overlay import CASE_PARAMS, PulseAmplitude, amplitude_for, j2
from .plots import plot

__version__ = "0.1.0"
