"""Null-space precoding under imperfect CSI: perturbation bounds and link simulation."""

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    LinkBudget,
    capacity_bounds,
    ber_upper_bound,
    extended_sin_theta_bound,
    singular_shift,
    wedin_bound,
)
from .channels import PathLossParams, PerturbationSpec, RicianParams, draw_perturbation, draw_rician_channel
from .config import ScenarioConfig, parse_config
from .linalg import SubspaceBasis, canonical_angles, projector, svd
from .linksim import reference_ber, run_open_loop_baseline, run_sweep, run_trial
from .precoder import extract_null_space, spillover_power
from .streams import make_stream

__all__ = [
    "LinkBudget", "capacity_bounds", "ber_upper_bound", "extended_sin_theta_bound",
    "singular_shift", "wedin_bound", "PathLossParams", "PerturbationSpec", "RicianParams",
    "draw_perturbation", "draw_rician_channel", "ScenarioConfig", "parse_config",
    "SubspaceBasis", "canonical_angles", "projector", "svd", "reference_ber",
    "run_open_loop_baseline", "run_sweep", "run_trial", "extract_null_space",
    "spillover_power", "make_stream",
]
