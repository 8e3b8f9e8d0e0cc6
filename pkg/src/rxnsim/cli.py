"""Batch command-line front end.

Subcommands: ``simulate``, ``fokker-planck``, ``stats``, ``models``.  Exit
codes: 0 success, 2 model parse error, 3 invalid flags/arguments, 4 numerical
failure.  ``simulate`` also accepts the legacy positional form

    rxnsim simulate model.rxn OUT TYPE STEP RUNS TMAX [-B bounds]

with TYPE one of ODE, HODE, SDE, HSDE, SIM (case-insensitive; SIM = ssa).
Every simulation writes a JSON manifest next to the CSV with all effective
parameters, so a run can be reproduced from the manifest alone.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import __version__, builtins as _builtins
from .fokker_planck import FPError, fp_solve, fp_solve_switched, write_grid_csv, write_masses_csv
from .model import ModelError, apply_bound_overrides
from .parser import ParseError, load_model, parse_bounds_file, serialize_model
from .simulate import (
    ConfigError,
    SimConfig,
    SimulationError,
    load_ensemble_csv,
    run_ensemble,
    write_ensemble_csv,
)
from .stats import pmf_at_time, write_pmf_csv, write_stats_csv

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_USAGE = 3
EXIT_NUMERIC = 4

_TYPE_ALIASES = {"sim": "ssa", "ssa": "ssa", "ode": "ode", "sde": "sde", "jd": "jd",
                 "hsde": "hsde", "hode": "hode"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we reserve 2 for parse errors
        raise _UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="rxnsim", description="Reaction-network simulation toolkit")
    p.add_argument("--version", action="version", version=f"rxnsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate a model file")
    sim.add_argument("model", help="model file (.rxn)")
    sim.add_argument("legacy", nargs="*", help="legacy positional form: OUT TYPE STEP RUNS TMAX")
    sim.add_argument("--method", choices=sorted(_TYPE_ALIASES), help="solution method")
    sim.add_argument("--step", type=float, help="maximum Euler step")
    sim.add_argument("--runs", type=int, default=None, help="number of runs (default 1)")
    sim.add_argument("--tmax", type=float, help="final time")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", help="trajectory CSV path (default <model>_<method>.csv)")
    sim.add_argument("-B", "--bounds", help="per-species bounds override file")
    sim.add_argument("--partition", choices=["strict", "relaxed"], default=None)
    sim.add_argument("--record", type=float, default=None, help="recording interval")
    sim.add_argument("--workers", type=int, default=None)
    sim.add_argument("--no-adaptive", action="store_true", help="disable the adaptive Euler step")
    sim.add_argument("--zero-noise", action="store_true", help="switch the Brownian terms off")
    sim.add_argument("--sde-boundary", choices=["clamp", "stop"], default="clamp")

    fp = sub.add_parser("fokker-planck", help="finite-volume transient solve")
    fp.add_argument("model", choices=["crazy-clock", "crazy-clock-switch"])
    fp.add_argument("--cells", type=int, default=1000)
    fp.add_argument("--dt", type=float, default=None, help="PDE time step (default: CFL bound)")
    fp.add_argument("--tmax", type=float, required=True)
    fp.add_argument("--times", default=None, help="comma-separated output times (default: tmax)")
    fp.add_argument("--out", required=True, help="output prefix (writes _grid.csv and _masses.csv)")
    fp.add_argument("--lam1", type=float, default=3.0)
    fp.add_argument("--lam2", type=float, default=None, help="default 6000 (plain) / 3000 (switch)")
    fp.add_argument("--lam3", type=float, default=500.0)
    fp.add_argument("--swidth", type=float, default=50.0)
    fp.add_argument("--scale", type=int, default=1000)

    st = sub.add_parser("stats", help="post-process a trajectory CSV")
    st.add_argument("traj", help="trajectory CSV from `simulate`")
    st.add_argument("--at", type=float, required=True, help="grid time for the distribution")
    st.add_argument("--species", required=True)
    st.add_argument("--atoms", default="0", help="comma-separated boundary atoms (default 0)")
    st.add_argument("--bins", type=float, default=25.0, help="histogram bin width")
    st.add_argument("--out", required=True, help="output prefix (writes _mean.csv and _pmf.csv)")

    mo = sub.add_parser("models", help="list or emit built-in models")
    g = mo.add_mutually_exclusive_group(required=True)
    g.add_argument("--list", action="store_true")
    g.add_argument("--emit", metavar="NAME")
    mo.add_argument("--out", default=None, help="output path (default <name>.rxn)")
    return p


def _cmd_simulate(args) -> int:
    if args.legacy:
        if len(args.legacy) != 5:
            raise _UsageError("legacy form needs OUT TYPE STEP RUNS TMAX")
        out, typ, step, runs, tmax = args.legacy
        if typ.lower() not in _TYPE_ALIASES:
            raise _UsageError(f"unknown method {typ!r}")
        args.out = args.out or out
        args.method = args.method or _TYPE_ALIASES[typ.lower()]
        args.step = args.step if args.step is not None else float(step)
        args.runs = args.runs if args.runs is not None else int(runs)
        args.tmax = args.tmax if args.tmax is not None else float(tmax)
    if args.method is None or args.step is None or args.tmax is None:
        raise _UsageError("--method, --step and --tmax are required")
    method = _TYPE_ALIASES[args.method.lower()]
    runs = args.runs if args.runs is not None else 1
    model = load_model(args.model)
    bounds_text = None
    if args.bounds:
        with open(args.bounds, encoding="utf-8") as fh:
            bounds_text = fh.read()
        model = apply_bound_overrides(model, parse_bounds_file(bounds_text))
    record = args.record if args.record is not None else max(args.step, args.tmax / 200.0)
    config = SimConfig(
        method=method,
        step_max=args.step,
        t_max=args.tmax,
        runs=runs,
        seed=args.seed,
        record_interval=record,
        adaptive_dt=not args.no_adaptive,
        partition=args.partition,
        zero_noise=args.zero_noise,
        sde_boundary=args.sde_boundary,
        workers=args.workers,
    )
    config.validate()
    out = args.out or f"{model.name}_{method}.csv"
    t0 = time.time()
    ens = run_ensemble(model, config)
    wall = time.time() - t0
    write_ensemble_csv(ens, out)
    manifest = {
        "tool": f"rxnsim {__version__}",
        "model_path": args.model,
        "model_sha256": hashlib.sha256(serialize_model(model).encode()).hexdigest(),
        "method": method,
        "step_max": args.step,
        "t_max": args.tmax,
        "runs": runs,
        "seed": args.seed,
        "record_interval": record,
        "adaptive_dt": not args.no_adaptive,
        "partition": args.partition or model.partition_mode,
        "zero_noise": args.zero_noise,
        "sde_boundary": args.sde_boundary,
        "workers": args.workers,
        "bounds_override": bounds_text,
        "out_csv": out,
        "wall_time_s": wall,
    }
    with open(out + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out} ({runs} runs, {wall:.2f}s)")
    return EXIT_OK


def _cmd_fokker_planck(args) -> int:
    times = [float(x) for x in args.times.split(",")] if args.times else None
    if args.cells < args.scale:
        print(
            f"warning: {args.cells} cells are coarser than the re-injection offset 1/N={1 / args.scale:g}",
            file=sys.stderr,
        )
    if args.model == "crazy-clock":
        lam2 = args.lam2 if args.lam2 is not None else 6000.0
        grids = fp_solve(lam1=args.lam1, lam2=lam2, n=args.scale, cells=args.cells,
                         dt=args.dt, t_end=args.tmax, out_times=times)
    else:
        lam2 = args.lam2 if args.lam2 is not None else 3000.0
        grids = fp_solve_switched(lam1=args.lam1, lam2=lam2, lam3=args.lam3,
                                  s_width=args.swidth, n=args.scale, cells=args.cells,
                                  dt=args.dt, t_end=args.tmax, out_times=times)
    write_grid_csv(grids, args.out + "_grid.csv")
    write_masses_csv(grids, args.out + "_masses.csv")
    print(f"wrote {args.out}_grid.csv and {args.out}_masses.csv ({len(grids)} snapshots)")
    return EXIT_OK


def _cmd_stats(args) -> int:
    ens = load_ensemble_csv(args.traj)
    atoms = tuple(float(x) for x in args.atoms.split(",")) if args.atoms else ()
    try:
        pmf = pmf_at_time(ens, args.species, args.at, args.bins, atoms)
    except (KeyError, ValueError) as e:
        raise _UsageError(str(e)) from None
    write_stats_csv(ens, [args.species], args.out + "_mean.csv")
    write_pmf_csv(pmf, args.out + "_pmf.csv")
    print(f"wrote {args.out}_mean.csv and {args.out}_pmf.csv")
    return EXIT_OK


def _cmd_models(args) -> int:
    if args.list:
        for name in _builtins.BUILTIN_NAMES:
            print(name)
        return EXIT_OK
    try:
        model = _builtins.builtin(args.emit)
    except KeyError as e:
        raise _UsageError(str(e)) from None
    out = args.out or f"{args.emit}.rxn"
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(serialize_model(model))
    print(f"wrote {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "fokker-planck":
            return _cmd_fokker_planck(args)
        if args.command == "stats":
            return _cmd_stats(args)
        return _cmd_models(args)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ModelError) as e:
        print(f"model error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FPError, SimulationError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
