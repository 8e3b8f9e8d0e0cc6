"""The solution regimes over one model: SSA, ODE, SDE, jump diffusion, HSJD.

Method map (one Euler-scheme core drives everything but SSA):

* ``ssa``  -- exact first-reaction CTMC simulation.
* ``ode``  -- deterministic Euler on the density ODE, every species fluid.
* ``sde``  -- Euler-Maruyama diffusion, every species fluid, no boundary
  jumps; on hitting a bound either clamp-and-continue (default) or stop.
* ``jd``   -- diffusion plus boundary re-injection jumps, every species fluid.
* ``hsde`` -- hybrid switching jump diffusion: fluid/discrete split from the
  model, boundary re-injection on fluid bounds, discrete events as jumps.
* ``hode`` -- piecewise deterministic (switched ODE) degeneration of hsde:
  noise off, no boundary jumps, discrete events keep firing stochastically.

Trajectories are recorded on a fixed time grid and stored as unscaled counts;
run k draws from an independent stream keyed by (seed, k), so ensembles are
reproducible bit-for-bit regardless of worker count or execution order.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numba
import numpy as np

from . import _kernels
from .kinetics import (
    EventPartition,
    HybridState,
    compile_model,
    counts_to_state,
    discrete_event_mask,
    partition_static,
    state_to_counts,
)
from .model import Model
from .rng import Stream

METHODS = ("ssa", "ode", "sde", "jd", "hsde", "hode")
_ALL_FLUID_METHODS = ("ode", "sde", "jd")

_FLAG_NAMES = {
    _kernels.FLAG_COMPLETED: "completed",
    _kernels.FLAG_ABSORBED: "absorbed",
    _kernels.FLAG_BOUNDARY_STOP: "sde_boundary_stop",
}


class SimulationError(RuntimeError):
    """Numerical failure (rate evaluation blew up) during simulation."""


class ConfigError(ValueError):
    """Inconsistent simulation configuration."""


@dataclass(frozen=True)
class SimConfig:
    method: str
    step_max: float
    t_max: float
    runs: int = 1
    seed: int = 0
    record_interval: float | None = None  # defaults to t_max (endpoints only)
    adaptive_dt: bool = True
    partition: str | None = None  # override of the model's partition mode
    zero_noise: bool = False  # force the Brownian terms off (N -> infinity)
    sde_boundary: str = "clamp"  # "clamp" | "stop"
    workers: int | None = None

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        if not self.step_max > 0:
            raise ConfigError("step_max must be positive")
        if not self.t_max > 0:
            raise ConfigError("t_max must be positive")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        rec = self.record_interval
        if rec is not None and rec < self.step_max:
            raise ConfigError("record_interval must be >= step_max")
        if self.sde_boundary not in ("clamp", "stop"):
            raise ConfigError(f"unknown sde_boundary policy {self.sde_boundary!r}")
        if self.method == "ode" and self.runs != 1:
            raise ConfigError("ODE is deterministic, runs must be 1")


@dataclass
class Trajectory:
    """One recorded run: times plus unscaled state rows (species order)."""

    times: np.ndarray
    states: np.ndarray
    run_index: int = 0
    terminal_flag: str = "completed"
    end_time: float | None = None  # absorption time for SSA runs
    repair_failures: int = 0

    def samples(self, model: Model):
        """Iterate (time, HybridState) pairs."""
        for i, t in enumerate(self.times):
            yield float(t), counts_to_state(model, self.states[i], float(t))


@dataclass
class Ensemble:
    """A seeded collection of runs sharing one recording grid."""

    model: Model
    config: SimConfig
    times: np.ndarray  # [n_times]
    states: np.ndarray  # [runs, n_times, n_species], unscaled counts
    flags: np.ndarray  # [runs] kernel terminal flags
    end_times: np.ndarray  # [runs]
    repair_failures: np.ndarray  # [runs]

    @property
    def runs(self) -> int:
        return self.states.shape[0]

    @property
    def species_names(self) -> tuple[str, ...]:
        return self.model.species_names

    def trajectory(self, k: int) -> Trajectory:
        return Trajectory(
            times=self.times,
            states=self.states[k],
            run_index=k,
            terminal_flag=_FLAG_NAMES.get(int(self.flags[k]), "completed"),
            end_time=float(self.end_times[k]),
            repair_failures=int(self.repair_failures[k]),
        )

    @property
    def trajectories(self) -> list[Trajectory]:
        return [self.trajectory(k) for k in range(self.runs)]

    def species_values(self, species: str, t_index: int) -> np.ndarray:
        """Unscaled values of one species across runs at one grid index."""
        return self.states[:, t_index, self.model.species_index(species)]


def recording_grid(config: SimConfig) -> np.ndarray:
    """Strictly increasing times 0, dt, 2*dt, ..., t_max."""
    rec = config.record_interval if config.record_interval is not None else config.t_max
    n = int(np.floor(config.t_max / rec + 1e-9))
    grid = [i * rec for i in range(n + 1)]
    if grid[-1] < config.t_max - 1e-12 * config.t_max:
        grid.append(config.t_max)
    else:
        grid[-1] = config.t_max
    return np.asarray(grid, dtype=np.float64)


def _method_setup(model: Model, config: SimConfig):
    """Resolve (compiled model, discrete mask, noise scale, boundary flag)."""
    method = config.method
    all_fluid = method in _ALL_FLUID_METHODS
    cm = compile_model(model, all_fluid=all_fluid)
    if all_fluid:
        disc_mask = np.zeros(len(model.reactions), dtype=np.bool_)
    else:
        part = partition_static(model, config.partition)
        disc_mask = discrete_event_mask(model, part)
    noise = 0.0 if (method in ("ode", "hode") or config.zero_noise) else 1.0
    boundary_on = method in ("jd", "hsde")
    stop_at_bound = method == "sde" and config.sde_boundary == "stop"
    return cm, disc_mask, noise, boundary_on, stop_at_bound


def run_ensemble(model: Model, config: SimConfig) -> Ensemble:
    """Simulate `config.runs` independent trajectories.

    Trajectory k uses the stream keyed by (seed, k); the result is identical
    for any worker count.
    """
    config.validate()
    if not model.validated:
        raise ConfigError("model must be validated")
    grid = recording_grid(config)
    n_s = len(model.species)
    runs = config.runs
    out = np.empty((runs, grid.shape[0], n_s), dtype=np.float64)
    flags = np.zeros(runs, dtype=np.int64)
    end_times = np.zeros(runs, dtype=np.float64)
    nfails = np.zeros(runs, dtype=np.int64)
    x0 = np.asarray(model.init_counts, dtype=np.float64)
    if config.workers is not None:
        numba.set_num_threads(max(1, min(config.workers, numba.config.NUMBA_NUM_THREADS)))
    else:  # thread count is process-global; undo any earlier --workers cap
        numba.set_num_threads(numba.config.NUMBA_NUM_THREADS)
    seed = config.seed & ((1 << 64) - 1)
    if config.method == "ssa":
        _kernels.ssa_ensemble(compile_model(model), x0, grid, out, flags, end_times, seed, 0)
    else:
        cm, disc_mask, noise, boundary_on, stop = _method_setup(model, config)
        _kernels.hybrid_ensemble(
            cm, disc_mask, x0, grid, out, flags, nfails, seed, 0,
            config.step_max, noise, boundary_on, config.adaptive_dt, stop,
        )
        end_times[:] = grid[-1]
    if np.any(flags == _kernels.FLAG_ERROR):
        bad = int(np.nonzero(flags == _kernels.FLAG_ERROR)[0][0])
        raise SimulationError(f"rate evaluation failed in run {bad}")
    return Ensemble(model, config, grid, out, flags, end_times, nfails)


def _single(model: Model, config: SimConfig, method: str) -> Trajectory:
    cfg = replace(config, method=method, runs=1)
    return run_ensemble(model, cfg).trajectory(0)


def simulate_ssa(model: Model, config: SimConfig) -> Trajectory:
    """Exact CTMC path via the first-reaction method."""
    return _single(model, config, "ssa")


def simulate_ode(model: Model, config: SimConfig) -> Trajectory:
    """Deterministic Euler path of the density ODE (all species fluid)."""
    return _single(model, config, "ode")


def simulate_sde(model: Model, config: SimConfig) -> Trajectory:
    """Euler-Maruyama diffusion path (all species fluid, no boundary jumps)."""
    return _single(model, config, "sde")


def simulate_jd(model: Model, config: SimConfig) -> Trajectory:
    """Jump diffusion with boundary re-injection (all species fluid)."""
    return _single(model, config, "jd")


def simulate_hsjd(model: Model, config: SimConfig) -> Trajectory:
    """Hybrid switching jump diffusion path (fluid/discrete split from model)."""
    return _single(model, config, "hsde")


def simulate_hode(model: Model, config: SimConfig) -> Trajectory:
    """Piecewise deterministic path: switched ODE plus discrete jumps."""
    return _single(model, config, "hode")


def choose_dt(model: Model, partition: EventPartition, state: HybridState, step_max: float,
              adaptive: bool = True) -> float:
    """Adaptive Euler step: min(step_max, 1 / (100 * max drift term)).

    The drift bound is max |l_j * f(state, l)| over interior fluid events and
    fluid components; with no active terms (or adaptive off) it is step_max.
    """
    if not adaptive:
        return step_max
    from .kinetics import split_dynamic  # local import to avoid cycle at module load

    cm = compile_model(model)
    interior, _ = split_dynamic(model, partition, state)
    x = state_to_counts(model, state)
    maxterm = 0.0
    for r in interior:
        lam = _kernels.reaction_lambda(cm, x, r)
        if np.isnan(lam):
            raise SimulationError(f"rate of reaction {model.reactions[r].name!r} failed to evaluate")
        if lam <= 0.0:
            continue
        for i in model.fluid_indices:
            c = abs(int(cm.chg[r, i]))
            if c:
                maxterm = max(maxterm, c * lam / model.scale)
    if maxterm <= 0.0:
        return step_max
    return min(step_max, 1.0 / (100.0 * maxterm))


def clamp_and_repair(model: Model, state: HybridState) -> HybridState:
    """Clamp fluid components onto bounds and rebalance declared invariants."""
    cm = compile_model(model)
    x = state_to_counts(model, state)
    clamped = np.empty(len(model.species), dtype=np.bool_)
    _kernels.clamp_repair(cm, x, clamped)
    return counts_to_state(model, x, state.time)


def hsjd_step(model: Model, partition: EventPartition, state: HybridState, step_max: float,
              rng: Stream, noise_scale: float = 1.0, boundary_on: bool = True,
              adaptive: bool = True) -> tuple[HybridState, float]:
    """One hybrid Euler step; returns (new state, elapsed time).

    Mirrors the ensemble kernel exactly (same draws from the same stream).
    """
    cm = compile_model(model)
    disc_mask = discrete_event_mask(model, partition)
    x = state_to_counts(model, state)
    n_r = len(model.reactions)
    lam_j = np.empty(n_r, dtype=np.float64)
    lam_d = np.empty(n_r, dtype=np.float64)
    jmask = np.empty(n_r, dtype=np.bool_)
    clamped = np.empty(len(model.species), dtype=np.bool_)
    h, _fired, _rep, err = _kernels.hybrid_step(
        cm, disc_mask, x, np.inf, step_max, noise_scale, boundary_on, adaptive,
        rng.state, lam_j, lam_d, jmask, clamped,
    )
    if err:
        raise SimulationError("rate evaluation failed during the step")
    return counts_to_state(model, x, state.time + h), float(h)


def _fmt(v: float) -> str:
    return repr(int(v)) if float(v).is_integer() and abs(v) < 1e15 else repr(float(v))


def write_ensemble_csv(ensemble: Ensemble, path: str) -> None:
    """`run,time,<species...>` rows, fluid components reported unscaled."""
    names = ensemble.model.species_names
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("run,time," + ",".join(names) + "\n")
        for k in range(ensemble.runs):
            for ti, t in enumerate(ensemble.times):
                row = ensemble.states[k, ti]
                fh.write(f"{k},{_fmt(float(t))}," + ",".join(_fmt(float(v)) for v in row) + "\n")


@dataclass
class CsvEnsemble:
    """Trajectory data re-loaded from CSV; duck-compatible with stats functions."""

    species_names: tuple[str, ...]
    times: np.ndarray
    states: np.ndarray


def load_ensemble_csv(path: str) -> CsvEnsemble:
    names, times, states = read_ensemble_csv(path)
    return CsvEnsemble(names, times, states)


def read_ensemble_csv(path: str) -> tuple[tuple[str, ...], np.ndarray, np.ndarray]:
    """Read a trajectory CSV back as (species names, times, states[runs, T, n_s])."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header[:2] != ["run", "time"]:
            raise ValueError(f"{path}: not a trajectory CSV")
        names = tuple(header[2:])
        runs: dict[int, list[tuple[float, list[float]]]] = {}
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            k = int(parts[0])
            runs.setdefault(k, []).append((float(parts[1]), [float(v) for v in parts[2:]]))
    if not runs:
        raise ValueError(f"{path}: no samples")
    keys = sorted(runs)
    times = np.asarray([t for t, _ in runs[keys[0]]], dtype=np.float64)
    states = np.empty((len(keys), times.shape[0], len(names)), dtype=np.float64)
    for row, k in enumerate(keys):
        samples = runs[k]
        if len(samples) != times.shape[0]:
            raise ValueError(f"{path}: run {k} does not share the recording grid")
        for ti, (_, vals) in enumerate(samples):
            states[row, ti] = vals
    return names, times, states
