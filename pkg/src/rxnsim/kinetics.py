"""Intensities, density-dependent rates, drift, boundary sets and partitions.

Two rate views of the same reaction:

* ``intensity`` -- the exact CTMC intensity q at an unscaled count vector;
  mass action follows mu * N**(1-sum I) * prod binom(m_i, I_i).
* ``density_f`` -- the density-dependent rate f with q ~= N*f: the mass-action
  limit form y**I / I! on fluid inputs (exact binomials on discrete inputs,
  divided by N per discrete input unit), intensity/N for expression rates.

States mix real densities (fluid components, count/N) with integer counts
(discrete components).  All functions are pure in (model, state) and safe for
concurrent use.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels, expr as _expr
from .model import FLUID, MassAction, Model, ModelError, change_vector


@dataclass
class HybridState:
    """Partially scaled state: fluid densities, discrete counts, model time."""

    fluid: np.ndarray
    discrete: np.ndarray
    time: float = 0.0

    def copy(self) -> "HybridState":
        return HybridState(self.fluid.copy(), self.discrete.copy(), self.time)


@dataclass(frozen=True)
class EventPartition:
    """Static split of reactions into diffusion-approximated and jump events."""

    fluid_events: tuple[int, ...]
    discrete_events: tuple[int, ...]


def initial_state(model: Model) -> HybridState:
    """Hybrid state at t=0 from the model's initial counts."""
    counts = np.asarray(model.init_counts, dtype=np.float64)
    return counts_to_state(model, counts, 0.0)


def state_to_counts(model: Model, state: HybridState) -> np.ndarray:
    """Unscale a hybrid state into one float vector of raw counts."""
    x = np.empty(len(model.species), dtype=np.float64)
    for k, i in enumerate(model.fluid_indices):
        x[i] = state.fluid[k] * model.scale
    for k, i in enumerate(model.discrete_indices):
        x[i] = state.discrete[k]
    return x


def counts_to_state(model: Model, counts: np.ndarray, time: float = 0.0) -> HybridState:
    fl = np.array([counts[i] / model.scale for i in model.fluid_indices], dtype=np.float64)
    di = np.array([counts[i] for i in model.discrete_indices], dtype=np.float64)
    return HybridState(fl, di, time)


def _compile_expr(tree: _expr.Node, species: dict[str, int], params: dict[str, float], ops, args) -> None:
    """Flatten an expression tree to stack bytecode (appends to ops/args)."""
    if isinstance(tree, _expr.Num):
        ops.append(_kernels.OP_CONST)
        args.append(tree.value)
    elif isinstance(tree, _expr.Name):
        if tree.ident == "N":
            ops.append(_kernels.OP_N)
            args.append(0.0)
        elif tree.ident in species:
            ops.append(_kernels.OP_SPECIES)
            args.append(float(species[tree.ident]))
        elif tree.ident in params:
            ops.append(_kernels.OP_CONST)
            args.append(params[tree.ident])
        else:
            raise ModelError(f"unknown identifier {tree.ident!r} in rate expression")
    elif isinstance(tree, _expr.Unary):
        _compile_expr(tree.operand, species, params, ops, args)
        ops.append(_kernels.OP_NEG)
        args.append(0.0)
    elif isinstance(tree, _expr.Binary):
        _compile_expr(tree.left, species, params, ops, args)
        _compile_expr(tree.right, species, params, ops, args)
        ops.append({"+": _kernels.OP_ADD, "-": _kernels.OP_SUB, "*": _kernels.OP_MUL,
                    "/": _kernels.OP_DIV, "^": _kernels.OP_POW}[tree.op])
        args.append(0.0)
    else:
        _compile_expr(tree.args[0], species, params, ops, args)
        _compile_expr(tree.args[1], species, params, ops, args)
        ops.append(_kernels.OP_MAX if tree.func == "max" else _kernels.OP_MIN)
        args.append(0.0)


@lru_cache(maxsize=64)
def compile_model(model: Model, all_fluid: bool = False) -> _kernels.CompiledModel:
    """Flatten a validated model into the kernel array bundle.

    With `all_fluid` every species is treated as continuous (the ODE/SDE/pure
    jump-diffusion view used when no hybrid split is wanted).
    """
    if not model.validated:
        raise ModelError("model must be validated before compilation")
    n_s = len(model.species)
    n_r = len(model.reactions)
    species_idx = {sp.name: i for i, sp in enumerate(model.species)}
    params = model.params_dict
    kind_fluid = np.array(
        [True if all_fluid else sp.kind == FLUID for sp in model.species], dtype=np.bool_
    )
    inp = np.zeros((n_r, n_s), dtype=np.int64)
    chg = np.zeros((n_r, n_s), dtype=np.int64)
    is_ma = np.zeros(n_r, dtype=np.bool_)
    ma_pref = np.zeros(n_r, dtype=np.float64)
    rate_dep = np.zeros((n_r, n_s), dtype=np.bool_)
    ops: list[int] = []
    args: list[float] = []
    starts = np.zeros(n_r + 1, dtype=np.int64)
    for r, rx in enumerate(model.reactions):
        inp[r] = rx.inputs
        chg[r] = change_vector(rx)
        if isinstance(rx.rate, MassAction):
            is_ma[r] = True
            order = sum(rx.inputs)
            ma_pref[r] = rx.rate.constant * float(model.scale) ** (1 - order)
            rate_dep[r] = inp[r] > 0
        else:
            used = _expr.names(rx.rate.tree)
            for name, i in species_idx.items():
                rate_dep[r, i] = name in used
            _compile_expr(rx.rate.tree, species_idx, params, ops, args)
        starts[r + 1] = len(ops)
    lower = np.array([sp.lower_bound if sp.lower_bound is not None else 0 for sp in model.species], dtype=np.float64)
    upper = np.array(
        [np.inf if sp.upper_bound is None else sp.upper_bound for sp in model.species], dtype=np.float64
    )
    n_k = len(model.invariants)
    inv_w = np.zeros((n_k, n_s), dtype=np.float64)
    inv_tot = np.zeros(n_k, dtype=np.float64)
    for k, inv in enumerate(model.invariants):
        inv_w[k] = inv.weights
        inv_tot[k] = inv.total
    return _kernels.CompiledModel(
        n=float(model.scale),
        kind_fluid=kind_fluid,
        inp=inp,
        chg=chg,
        lower=lower,
        upper=upper,
        is_ma=is_ma,
        ma_pref=ma_pref,
        code_op=np.array(ops, dtype=np.int64),
        code_arg=np.array(args, dtype=np.float64),
        code_start=starts,
        rate_dep=rate_dep,
        inv_w=inv_w,
        inv_tot=inv_tot,
    )


class RateEvalError(ValueError):
    """An expression rate failed to evaluate at the current state."""


def _as_counts(model: Model, state) -> np.ndarray:
    if isinstance(state, HybridState):
        return state_to_counts(model, state)
    return np.asarray(state, dtype=np.float64)


def intensity(model: Model, counts, reaction: int) -> float:
    """Exact CTMC intensity at an unscaled count vector."""
    cm = compile_model(model)
    v = _kernels.reaction_intensity(cm, np.asarray(counts, dtype=np.float64), reaction, True)
    if np.isnan(v):
        raise RateEvalError(f"rate of reaction {model.reactions[reaction].name!r} failed to evaluate")
    return float(v)


def density_f(model: Model, y, reaction: int, all_fluid: bool = False) -> float:
    """Density-dependent rate f(y, l) at a mixed density/count vector.

    `y` carries densities on fluid components and raw counts on discrete
    ones (full vector in species order).  With `all_fluid` every component is
    read as a density (the fully fluid view of Definitions 1-2).
    """
    cm = compile_model(model, all_fluid=all_fluid)
    y = np.asarray(y, dtype=np.float64)
    x = np.where(cm.kind_fluid, y * model.scale, y)
    v = _kernels.reaction_lambda(cm, x, reaction)
    if np.isnan(v):
        raise RateEvalError(f"rate of reaction {model.reactions[reaction].name!r} failed to evaluate")
    return float(v) / model.scale


def drift(model: Model, state: HybridState, active=None) -> np.ndarray:
    """Fluid drift F_j = sum_l l_j f(state, l) over the active reactions.

    Returned in density units, one entry per fluid species (model order).
    `active` defaults to every fluid event of the static partition.
    """
    cm = compile_model(model)
    if active is None:
        active = partition_static(model).fluid_events
    x = state_to_counts(model, state)
    fl = model.fluid_indices
    out = np.zeros(len(fl), dtype=np.float64)
    for r in active:
        lam = _kernels.reaction_lambda(cm, x, r)
        if np.isnan(lam):
            raise RateEvalError(f"rate of reaction {model.reactions[r].name!r} failed to evaluate")
        f = lam / model.scale
        for j, i in enumerate(fl):
            out[j] += cm.chg[r, i] * f
    return out


def boundary_map_B(model: Model, state: HybridState) -> frozenset[int]:
    """Indices (species order) of fluid components sitting exactly on a bound."""
    cm = compile_model(model)
    x = state_to_counts(model, state)
    hit = set()
    for i in model.fluid_indices:
        if x[i] <= cm.lower[i] or x[i] >= cm.upper[i]:
            hit.add(i)
    return frozenset(hit)


def partition_static(model: Model, mode: str | None = None) -> EventPartition:
    """Split reactions into C^F (diffusion) and C^D (jumps).

    Every reaction changing a discrete component is a jump event; in strict
    mode, reactions whose rate structurally depends on a discrete component
    are jump events as well.
    """
    mode = mode or model.partition_mode
    if mode not in ("relaxed", "strict"):
        raise ModelError(f"unknown partition mode {mode!r}")
    cm = compile_model(model)
    disc = []
    fluid = []
    dset = set(model.discrete_indices)
    for r in range(len(model.reactions)):
        is_disc = any(cm.chg[r, i] != 0 for i in dset)
        if not is_disc and mode == "strict":
            is_disc = any(cm.rate_dep[r, i] for i in dset)
        (disc if is_disc else fluid).append(r)
    return EventPartition(tuple(fluid), tuple(disc))


def discrete_event_mask(model: Model, partition: EventPartition) -> np.ndarray:
    mask = np.zeros(len(model.reactions), dtype=np.bool_)
    mask[list(partition.discrete_events)] = True
    return mask


def split_dynamic(model: Model, partition: EventPartition, state: HybridState) -> tuple[frozenset[int], frozenset[int]]:
    """Dynamic split of C^F into interior diffusion events and boundary jumps.

    A fluid event is a boundary jump when it changes an extremal fluid
    component or its rate structurally depends on one.
    """
    cm = compile_model(model)
    onb = boundary_map_B(model, state)
    boundary = set()
    for r in partition.fluid_events:
        for i in onb:
            if cm.chg[r, i] != 0 or cm.rate_dep[r, i]:
                boundary.add(r)
                break
    interior = frozenset(set(partition.fluid_events) - boundary)
    return interior, frozenset(boundary)


def jump_intensity(model: Model, state: HybridState, reaction: int) -> float:
    """Jump intensity of the partially scaled chain: the exact CTMC intensity
    at the unscaled pre-jump state (discrete inputs gate enabledness)."""
    cm = compile_model(model)
    x = state_to_counts(model, state)
    v = _kernels.reaction_intensity(cm, x, reaction, False)
    if np.isnan(v):
        raise RateEvalError(f"rate of reaction {model.reactions[reaction].name!r} failed to evaluate")
    return float(v)
