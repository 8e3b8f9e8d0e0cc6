"""Simulation toolkit for Markov reaction networks.

One model representation drives exact stochastic simulation (SSA), the
deterministic fluid ODE, the diffusion approximation, jump diffusion with
boundary re-injection, and a hybrid switching jump diffusion that keeps
low-copy components discrete.  A 1D finite-volume solver computes transient
laws of the boundary-jump processes directly.
"""

__version__ = "0.1.0"

from .builtins import BUILTIN_NAMES, builtin
from .kinetics import (
    EventPartition,
    HybridState,
    boundary_map_B,
    density_f,
    drift,
    initial_state,
    intensity,
    jump_intensity,
    partition_static,
    split_dynamic,
)
from .model import (
    ExprRate,
    MassAction,
    Model,
    ModelError,
    PInvariant,
    Reaction,
    Species,
    change_vector,
    derive_bounds,
    detect_p_invariants,
    validate_model,
)
from .expr import EvalError, evaluate as evaluate_rate_expr, parse_expr as parse_rate_expr
from .parser import ParseError, load_model, parse_bounds_file, parse_model, serialize_model
from .rng import Stream
from .simulate import (
    Ensemble,
    SimConfig,
    Trajectory,
    choose_dt,
    clamp_and_repair,
    hsjd_step,
    run_ensemble,
    simulate_hode,
    simulate_hsjd,
    simulate_jd,
    simulate_ode,
    simulate_sde,
    simulate_ssa,
    write_ensemble_csv,
)
from .stats import Pmf, ensemble_mean, ks_distance, pmf_at_time

__all__ = [
    "BUILTIN_NAMES",
    "builtin",
    "EventPartition",
    "HybridState",
    "boundary_map_B",
    "density_f",
    "drift",
    "initial_state",
    "intensity",
    "jump_intensity",
    "partition_static",
    "split_dynamic",
    "ExprRate",
    "MassAction",
    "Model",
    "ModelError",
    "PInvariant",
    "Reaction",
    "Species",
    "change_vector",
    "derive_bounds",
    "detect_p_invariants",
    "validate_model",
    "EvalError",
    "evaluate_rate_expr",
    "parse_rate_expr",
    "ParseError",
    "load_model",
    "parse_bounds_file",
    "parse_model",
    "serialize_model",
    "Stream",
    "Ensemble",
    "SimConfig",
    "Trajectory",
    "choose_dt",
    "clamp_and_repair",
    "hsjd_step",
    "run_ensemble",
    "simulate_hode",
    "simulate_hsjd",
    "simulate_jd",
    "simulate_ode",
    "simulate_sde",
    "simulate_ssa",
    "write_ensemble_csv",
    "Pmf",
    "ensemble_mean",
    "ks_distance",
    "pmf_at_time",
    "__version__",
]
