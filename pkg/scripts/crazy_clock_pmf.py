#!/usr/bin/env python3
"""Distribution of the clock level: exact chain vs hybrid simulation vs PDE.

Reproduces the probability-mass comparison for the autocatalytic clock at two
time points, writing one CSV per method under out/.  Increase --runs for
smoother Monte-Carlo histograms.
"""
import argparse
import pathlib

from rxnsim.builtins import crazy_clock
from rxnsim.fokker_planck import fp_solve, write_grid_csv, write_masses_csv
from rxnsim.simulate import SimConfig, run_ensemble
from rxnsim.stats import pmf_at_time, write_pmf_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--cells", type=int, default=4000)
    ap.add_argument("--out", default="out")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(exist_ok=True)

    model = crazy_clock()
    times = [0.0012, 0.0016]
    for method, step in (("ssa", 2e-6), ("hsde", 2e-6)):
        cfg = SimConfig(method=method, step_max=step, t_max=0.0016, runs=args.runs,
                        seed=args.seed, record_interval=0.0004)
        ens = run_ensemble(model, cfg)
        for u in times:
            pmf = pmf_at_time(ens, "A", u, bin_width=25.0, boundary_atoms=(0.0, 1000.0))
            write_pmf_csv(pmf, out / f"clock_{method}_pmf_{u}.csv")
        print(f"{method}: mean(A) at 0.0016 = {ens.states[:, -1, 0].mean():.1f}")

    grids = fp_solve(cells=args.cells, t_end=0.0016, out_times=times)
    write_grid_csv(grids, out / "clock_fp_grid.csv")
    write_masses_csv(grids, out / "clock_fp_masses.csv")
    for g in grids:
        mean = (g.density[0] * g.x).sum() * g.dx + g.mass_upper.sum()
        print(f"fp: mean(A) at {g.time:g} = {mean * 1000:.1f}, "
              f"pi0={g.mass_lower.sum():.4f}, pi1={g.mass_upper.sum():.4f}")


if __name__ == "__main__":
    main()
