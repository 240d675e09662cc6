"""Molmer-Sorensen gate simulation with geometric-phase and entanglement diagnostics."""
from . import analysis, dynamics, gp, model, ops
from .analysis import (
    calibrate_gamma,
    delta_gp,
    entanglement_loss,
    is_x_state,
    negativity,
    slope_series,
)
from .dynamics import (
    ChannelKind,
    NoiseChannel,
    TimeGrid,
    Trajectory,
    observable_series,
    propagate_lindblad,
    propagate_schrodinger,
)
from .gp import GPTrace, gp_mixed, gp_pure, gp_subsystem, unwrap
from .model import MSParams, Regime

__version__ = "0.1.0"
