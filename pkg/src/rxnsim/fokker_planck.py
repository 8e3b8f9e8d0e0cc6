"""1D finite-volume solver for the clock jump diffusion and its switched variant.

The density pi(u, x) on (0, 1) evolves under

    d pi/du = d/dx( f(x) pi ) + d2/dx2( f(x) pi / (2N) ) + source,

with boundary masses at both ends: the lower end is absorbing (f(0) = 0),
the upper end holds mass pi_1 that leaks back into the interior through a
Dirac source at 1 - 1/N with rate N*f(1)*pi_1.  Fluxes are upwinded for the
(leftward) drift and centred for diffusion; ghost values impose pi(1-) = 0
and vanishing (f pi / 2N) at the lower edge.  The switched variant couples
two copies through the mode switch rate c(x), with a single combined
absorbing mass at 0 (the mode split at extinction is not tracked).

Everything is expressed on the normalized domain (0, 1); CSV output reports
cell centers in x and per-mode densities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class FPError(RuntimeError):
    """Stability failure (mass loss or density blow-up) during the solve."""


@dataclass
class FPGrid:
    """Cell densities plus boundary masses for each mode at one time."""

    time: float
    x: np.ndarray  # cell centers, shape [M]
    dx: float
    density: np.ndarray  # [modes, M]
    mass_lower: np.ndarray  # [modes]; combined mass lives in mode 0 when switched
    mass_upper: np.ndarray  # [modes]

    @property
    def modes(self) -> int:
        return self.density.shape[0]


def fp_mass_accounting(grid: FPGrid) -> dict:
    """Lower/upper/interior/total mass decomposition of one grid snapshot."""
    interior = float(grid.density.sum() * grid.dx)
    lower = float(grid.mass_lower.sum())
    upper = float(grid.mass_upper.sum())
    return {
        "mass_lower": lower,
        "mass_upper": upper,
        "interior": interior,
        "total": lower + upper + interior,
    }


def _cfl_dt(f_max: float, dx: float, n: int) -> float:
    # diffusion: dt <= dx^2 * N / f; advection: dt <= dx / f
    return 0.4 * min(dx * dx * n / f_max, dx / f_max)


def _check(grid: FPGrid, floored: float):
    total = fp_mass_accounting(grid)["total"]
    if not np.isfinite(total) or abs(total - 1.0) > 1e-6:
        raise FPError(f"mass conservation lost at u={grid.time:.6g}: total={total!r}")
    if floored > 1e-9:
        raise FPError(f"negative density beyond tolerance at u={grid.time:.6g}: floored {floored:.3e}")


def _fv_step(dens, f_face, f_cell, n, dx, dt):
    """One explicit finite-volume step of d pi/du = d/dx(f pi) + d2/dx2(f pi/2N).

    Returns (new density, flux into lower mass, flux into upper mass), all
    already multiplied by dt.  `f_face` holds f at the M+1 cell faces,
    `f_cell` at centers.  Ghost values: (f pi/2N) = 0 beyond the lower face,
    pi = 0 beyond the upper face.
    """
    m = dens.shape[0]
    dpi = f_cell * dens / (2.0 * n)  # diffusion potential at centers
    # rightward flux at interior faces 1..M-1: upwind advection (drift is -f,
    # mass moves left, so the face takes from the right cell) plus centred diffusion
    flux = np.empty(m + 1)
    flux[1:m] = -f_face[1:m] * dens[1:] - (dpi[1:] - dpi[:-1]) / dx
    # lower face: advective part vanishes (f(0)=0), diffusion against ghost 0
    flux[0] = -dpi[0] / dx
    # upper face: pi(1-) = 0 kills advection; diffusion against ghost 0
    flux[m] = dpi[m - 1] / dx
    new = dens + dt * (flux[:-1] - flux[1:]) / dx
    into_lower = -flux[0] * dt  # leftward flux absorbed at 0
    into_upper = flux[m] * dt
    return new, into_lower, into_upper


def _f_clock(x, lam1, lam2):
    return lam1 * x + lam2 * x * (1.0 - x)


def fp_solve(lam1: float = 3.0, lam2: float = 6000.0, n: int = 1000, cells: int = 1000,
             dt: float | None = None, t_end: float = 0.0016,
             out_times: list[float] | None = None) -> list[FPGrid]:
    """Solve the single-mode clock jump diffusion from pi_1(0) = 1.

    Returns one FPGrid per requested output time (default: just t_end).
    """
    return _solve(lam1, lam2, None, None, n, cells, dt, t_end, out_times, switched=False)


def fp_solve_switched(lam1: float = 3.0, lam2: float = 3000.0, lam3: float = 500.0,
                      s_width: float = 50.0, n: int = 1000, cells: int = 1000,
                      dt: float | None = None, t_end: float = 0.003,
                      out_times: list[float] | None = None) -> list[FPGrid]:
    """Two-mode switched variant: mode 1 runs at lam2/2, mode 2 at lam2.

    The switch intensity c(x) = max(0, lam3*(N*x - (N - S))/S) moves interior
    density and upper-boundary mass from mode 1 to mode 2.
    """
    return _solve(lam1, lam2, lam3, s_width, n, cells, dt, t_end, out_times, switched=True)


def _solve(lam1, lam2, lam3, s_width, n, cells, dt, t_end, out_times, switched) -> list[FPGrid]:
    if cells < 100:
        raise FPError("at least 100 cells are required")
    m = cells
    dx = 1.0 / m
    x = (np.arange(m) + 0.5) * dx
    faces = np.arange(m + 1) * dx
    if switched:
        f_cells = np.stack([_f_clock(x, lam1, lam2 / 2.0), _f_clock(x, lam1, lam2)])
        f_faces = np.stack([_f_clock(faces, lam1, lam2 / 2.0), _f_clock(faces, lam1, lam2)])
        c_x = np.maximum(0.0, lam3 * (n * x - (n - s_width)) / s_width)
        c_at_1 = max(0.0, lam3)
        modes = 2
    else:
        f_cells = np.stack([_f_clock(x, lam1, lam2)])
        f_faces = np.stack([_f_clock(faces, lam1, lam2)])
        c_x = None
        c_at_1 = 0.0
        modes = 1
    f_at_1 = _f_clock(1.0, lam1, lam2)  # = lam1 in both modes
    f_max = float(f_cells.max())
    auto_dt = _cfl_dt(f_max, dx, n)
    if dt is None:
        dt = auto_dt
    elif dt > auto_dt / 0.4:
        raise FPError(f"dt={dt:g} violates the stability bound {auto_dt / 0.4:g}")
    # cell receiving the Dirac re-injection at 1 - 1/N
    inj = min(m - 1, int((1.0 - 1.0 / n) / dx))

    dens = np.zeros((modes, m))
    mass_upper = np.zeros(modes)
    mass_upper[0] = 1.0
    mass_lower = np.zeros(modes)

    out_times = sorted(out_times) if out_times else [t_end]
    if abs(out_times[-1] - t_end) > 1e-12:
        out_times = [t for t in out_times if t < t_end] + [t_end]
    results: list[FPGrid] = []
    next_out = 0
    t = 0.0
    steps = 0
    if out_times[0] <= 0.0:
        results.append(FPGrid(0.0, x.copy(), dx, dens.copy(), mass_lower.copy(), mass_upper.copy()))
        next_out = 1
    while t < t_end - 1e-15:
        h = min(dt, t_end - t, out_times[next_out] - t if next_out < len(out_times) else dt)
        if h <= 0:
            h = dt
        new = np.empty_like(dens)
        floored = 0.0
        for mo in range(modes):
            nd, into_lower, into_upper = _fv_step(dens[mo], f_faces[mo], f_cells[mo], n, dx, h)
            out_of_upper = n * f_at_1 * mass_upper[mo] * h
            nd[inj] += out_of_upper / dx
            mass_upper[mo] += into_upper - out_of_upper
            mass_lower[0] += into_lower  # combined absorbing mass at 0
            new[mo] = nd
        if switched:
            move = c_x * dens[0] * h
            new[0] -= move
            new[1] += move
            move_upper = c_at_1 * mass_upper[0] * h
            mass_upper[0] -= move_upper
            mass_upper[1] += move_upper
        neg = new < 0.0
        if np.any(neg):
            floored = float(-(new[neg]).sum() * dx)
            new[neg] = 0.0
            mass_lower[0] += floored  # keep the budget closed; aborts if large
        dens = new
        t += h
        steps += 1
        grid = FPGrid(t, x, dx, dens, mass_lower, mass_upper)
        if steps % 200 == 0 or floored > 0.0:
            _check(grid, floored)
        while next_out < len(out_times) and t >= out_times[next_out] - 1e-15:
            snap = FPGrid(t, x.copy(), dx, dens.copy(), mass_lower.copy(), mass_upper.copy())
            _check(snap, floored)
            results.append(snap)
            next_out += 1
    return results


def fp_cdf(grid: FPGrid, values: np.ndarray, n: int) -> np.ndarray:
    """CDF of the unscaled level at the given unscaled values (all modes pooled).

    Atoms at 0 and N are included; interior density is integrated piecewise
    over the cells (linear within a cell).
    """
    dens = grid.density.sum(axis=0)
    cell_mass = dens * grid.dx
    cum = np.concatenate([[0.0], np.cumsum(cell_mass)])
    lower = float(grid.mass_lower.sum())
    upper = float(grid.mass_upper.sum())
    out = np.empty(len(values))
    edges = np.arange(len(dens) + 1) * grid.dx
    for i, v in enumerate(np.asarray(values, dtype=np.float64)):
        xv = v / n
        if xv < 0.0:
            out[i] = 0.0
            continue
        acc = lower
        if xv >= 1.0:
            acc += cum[-1]
            if xv >= 1.0:
                acc += upper
            out[i] = acc
            continue
        k = min(len(dens) - 1, int(xv / grid.dx))
        acc += cum[k] + dens[k] * (xv - edges[k])
        out[i] = acc
    return out


def write_grid_csv(grids: list[FPGrid], path: str) -> None:
    """`time,mode,x,density` rows for every snapshot."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("time,mode,x,density\n")
        for g in grids:
            for mo in range(g.modes):
                for xi, d in zip(g.x, g.density[mo]):
                    fh.write(f"{float(g.time)!r},{mo + 1},{float(xi)!r},{float(d)!r}\n")


def write_masses_csv(grids: list[FPGrid], path: str) -> None:
    """`time,mode,mass_lower,mass_upper,interior` rows per snapshot and mode."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("time,mode,mass_lower,mass_upper,interior\n")
        for g in grids:
            for mo in range(g.modes):
                interior = float(g.density[mo].sum() * g.dx)
                fh.write(
                    f"{float(g.time)!r},{mo + 1},{float(g.mass_lower[mo])!r},"
                    f"{float(g.mass_upper[mo])!r},{interior!r}\n"
                )
