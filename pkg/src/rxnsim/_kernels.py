"""Numba kernels: rate evaluation, exact SSA and the hybrid Euler stepper.

All kernels work on a flat `CompiledModel` array bundle and on state vectors
of UNSCALED counts (fluid entries are real-valued, discrete entries integral).
Conversions to the partially scaled (density) picture happen in the Python
layer; in counts space the fluid drift/noise channel weight is
``lam = N * f(y, l)`` so an Euler step reads
``x += l*lam*h + l*sqrt(lam*h)*xi``.

Expression failures (division by zero, non-finite results) surface as NaN and
abort the affected run with an error flag.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from numba import njit, prange

from . import _rng

# rate-expression opcodes
OP_CONST = 0
OP_SPECIES = 1
OP_N = 2
OP_ADD = 3
OP_SUB = 4
OP_MUL = 5
OP_DIV = 6
OP_POW = 7
OP_NEG = 8
OP_MAX = 9
OP_MIN = 10

# trajectory terminal flags
FLAG_COMPLETED = 0
FLAG_ABSORBED = 1
FLAG_BOUNDARY_STOP = 2
FLAG_ERROR = -1


class CompiledModel(NamedTuple):
    n: float  # scale N
    kind_fluid: np.ndarray  # bool[n_s]
    inp: np.ndarray  # int64[n_r, n_s]
    chg: np.ndarray  # int64[n_r, n_s]
    lower: np.ndarray  # f8[n_s], unscaled counts
    upper: np.ndarray  # f8[n_s], +inf when unbounded
    is_ma: np.ndarray  # bool[n_r]
    ma_pref: np.ndarray  # f8[n_r], mu * N**(1 - sum I)
    code_op: np.ndarray  # i8[:], expression bytecode
    code_arg: np.ndarray  # f8[:]
    code_start: np.ndarray  # i8[n_r + 1]
    rate_dep: np.ndarray  # bool[n_r, n_s], structural rate dependence
    inv_w: np.ndarray  # f8[n_k, n_s]
    inv_tot: np.ndarray  # f8[n_k]


@njit(cache=True)
def eval_expr(code_op, code_arg, lo, hi, x, n_scale):
    """Run expression bytecode; NaN signals an evaluation failure."""
    stack = np.empty(32, np.float64)
    sp = 0
    for k in range(lo, hi):
        op = code_op[k]
        if op == OP_CONST:
            stack[sp] = code_arg[k]
            sp += 1
        elif op == OP_SPECIES:
            stack[sp] = x[np.int64(code_arg[k])]
            sp += 1
        elif op == OP_N:
            stack[sp] = n_scale
            sp += 1
        elif op == OP_NEG:
            stack[sp - 1] = -stack[sp - 1]
        else:
            b = stack[sp - 1]
            a = stack[sp - 2]
            sp -= 1
            if op == OP_ADD:
                stack[sp - 1] = a + b
            elif op == OP_SUB:
                stack[sp - 1] = a - b
            elif op == OP_MUL:
                stack[sp - 1] = a * b
            elif op == OP_DIV:
                if b == 0.0:
                    return np.nan
                stack[sp - 1] = a / b
            elif op == OP_POW:
                stack[sp - 1] = a**b
            elif op == OP_MAX:
                stack[sp - 1] = max(a, b)
            else:
                stack[sp - 1] = min(a, b)
    v = stack[0]
    if not np.isfinite(v):
        return np.nan
    return v


@njit(cache=True)
def reaction_intensity(cm, x, r, integer_enabling):
    """Exact CTMC intensity of reaction r at unscaled state x.

    Mass action: mu * N**(1-sum I) * prod binom(x_i, I_i); expressions are
    evaluated directly, gated on discrete input availability (all inputs when
    `integer_enabling`, for integer-state SSA semantics).  Negative values
    clamp to zero.
    """
    n_s = x.shape[0]
    if cm.is_ma[r]:
        v = cm.ma_pref[r]
        for s in range(n_s):
            m = cm.inp[r, s]
            if m > 0:
                for k in range(m):
                    v *= (x[s] - k) / (k + 1)
        return v if v > 0.0 else 0.0
    for s in range(n_s):
        m = cm.inp[r, s]
        if m > 0 and (integer_enabling or not cm.kind_fluid[s]) and x[s] < m:
            return 0.0
    v = eval_expr(cm.code_op, cm.code_arg, cm.code_start[r], cm.code_start[r + 1], x, cm.n)
    if np.isnan(v):
        return np.nan
    return v if v > 0.0 else 0.0


@njit(cache=True)
def reaction_lambda(cm, x, r):
    """Drift/diffusion channel weight lam = N * f(state, l) in counts space.

    Mass action uses the density-limit form x**I / I! on fluid inputs and
    exact binomials on discrete inputs; expression rates use the exact
    intensity (f = intensity / N).
    """
    n_s = x.shape[0]
    if cm.is_ma[r]:
        v = cm.ma_pref[r]
        for s in range(n_s):
            m = cm.inp[r, s]
            if m > 0:
                if cm.kind_fluid[s]:
                    for k in range(m):
                        v *= x[s] / (k + 1)
                else:
                    if x[s] < m:
                        return 0.0
                    for k in range(m):
                        v *= (x[s] - k) / (k + 1)
        return v if v > 0.0 else 0.0
    return reaction_intensity(cm, x, r, False)


@njit(cache=True)
def clamp_repair(cm, x, clamped):
    """Clamp fluid components onto bounds, then rebalance violated invariants.

    The invariant defect is redistributed proportionally over non-clamped
    fluid participants; discrete components are never altered.  Returns 1 if
    some invariant could not be repaired (all participants clamped).
    """
    n_s = x.shape[0]
    for s in range(n_s):
        clamped[s] = False
        if cm.kind_fluid[s]:
            if x[s] < cm.lower[s]:
                x[s] = cm.lower[s]
                clamped[s] = True
            elif x[s] > cm.upper[s]:
                x[s] = cm.upper[s]
                clamped[s] = True
    failed = 0
    n_k = cm.inv_w.shape[0]
    for k in range(n_k):
        cur = 0.0
        for s in range(n_s):
            cur += cm.inv_w[k, s] * x[s]
        defect = cm.inv_tot[k] - cur
        if abs(defect) / cm.n <= 1e-12:
            continue
        ssum = 0.0
        n_adj = 0
        for s in range(n_s):
            if cm.inv_w[k, s] > 0.0 and cm.kind_fluid[s] and not clamped[s]:
                ssum += cm.inv_w[k, s] * x[s]
                n_adj += 1
        if n_adj == 0:
            failed = 1
            continue
        if ssum > 0.0:
            scale = (ssum + defect) / ssum
            if scale < 0.0:
                scale = 0.0
            for s in range(n_s):
                if cm.inv_w[k, s] > 0.0 and cm.kind_fluid[s] and not clamped[s]:
                    x[s] *= scale
        else:
            for s in range(n_s):
                if cm.inv_w[k, s] > 0.0 and cm.kind_fluid[s] and not clamped[s]:
                    x[s] += defect / (cm.inv_w[k, s] * n_adj)
        for s in range(n_s):  # repair may push a participant onto a bound
            if cm.inv_w[k, s] > 0.0 and cm.kind_fluid[s] and not clamped[s]:
                if x[s] < cm.lower[s]:
                    x[s] = cm.lower[s]
                elif x[s] > cm.upper[s]:
                    x[s] = cm.upper[s]
    return failed


@njit(cache=True)
def hybrid_step(cm, disc_mask, x, rem, step_max, noise_scale, boundary_on, adaptive, s, lam_j, lam_d, jmask, clamped):
    """One Euler step of the hybrid jump-diffusion from the pre-step state x.

    Returns (h, fired_reaction_or_-1, repair_failed, error_flag).  `rem` caps
    the step so trajectories land exactly on recording times.
    """
    n_r, n_s = cm.inp.shape
    # dynamic split: jump set = static discrete events + fluid events touching
    # a fluid component sitting on one of its bounds
    nu = 0.0
    for r in range(n_r):
        j = disc_mask[r]
        if not j and boundary_on:
            for sp in range(n_s):
                if cm.kind_fluid[sp] and (x[sp] <= cm.lower[sp] or x[sp] >= cm.upper[sp]):
                    if cm.chg[r, sp] != 0 or cm.rate_dep[r, sp]:
                        j = True
                        break
        jmask[r] = j
        if j:
            v = reaction_intensity(cm, x, r, False)
            if np.isnan(v):
                return 0.0, -1, 0, 1
            lam_j[r] = v
            nu += v
        else:
            lam_j[r] = 0.0

    # interior channel weights and the adaptive-step drift bound
    maxterm = 0.0
    for r in range(n_r):
        if jmask[r]:
            lam_d[r] = 0.0
            continue
        v = reaction_lambda(cm, x, r)
        if np.isnan(v):
            return 0.0, -1, 0, 1
        lam_d[r] = v
        if adaptive and v > 0.0:
            for sp in range(n_s):
                c = cm.chg[r, sp]
                if c != 0 and cm.kind_fluid[sp]:
                    term = abs(c) * v / cm.n
                    if term > maxterm:
                        maxterm = term
    dt = step_max
    if adaptive and maxterm > 0.0:
        dt = min(step_max, 1.0 / (100.0 * maxterm))

    r_exp = np.inf
    if nu > 0.0:
        r_exp = _rng.next_exponential(s) / nu
    h_det = dt if dt < rem else rem
    fire = r_exp <= h_det
    h = r_exp if fire else h_det

    # fluid Euler update from the pre-step channel weights
    sqh = math.sqrt(h)
    for r in range(n_r):
        lam = lam_d[r]
        if lam > 0.0:
            amp = lam * h
            if noise_scale > 0.0:
                amp += noise_scale * math.sqrt(lam) * sqh * _rng.next_normal(s)
            for sp in range(n_s):
                c = cm.chg[r, sp]
                if c != 0 and cm.kind_fluid[sp]:
                    x[sp] += c * amp
    fired = -1
    if fire:
        u = _rng.next_uniform(s) * nu
        acc = 0.0
        for r in range(n_r):
            if jmask[r] and lam_j[r] > 0.0:
                acc += lam_j[r]
                fired = r
                if u <= acc:
                    break
        if fired >= 0:
            for sp in range(n_s):
                x[sp] += cm.chg[fired, sp]
    rep = clamp_repair(cm, x, clamped)
    return h, fired, rep, 0


@njit(cache=True)
def hybrid_run(cm, disc_mask, x0, grid, out, step_max, noise_scale, boundary_on, adaptive, stop_at_bound, s):
    """Simulate one hybrid trajectory over the recording grid.

    Returns (terminal_flag, repair_failure_count).
    """
    n_r, n_s = cm.inp.shape
    x = x0.copy()
    lam_j = np.empty(n_r, np.float64)
    lam_d = np.empty(n_r, np.float64)
    jmask = np.empty(n_r, np.bool_)
    clamped = np.empty(n_s, np.bool_)
    for sp in range(n_s):
        out[0, sp] = x[sp]
    t = grid[0]
    nfail = 0
    for gi in range(1, grid.shape[0]):
        tg = grid[gi]
        while t < tg:
            rem = tg - t
            h, fired, rep, err = hybrid_step(
                cm, disc_mask, x, rem, step_max, noise_scale, boundary_on, adaptive, s, lam_j, lam_d, jmask, clamped
            )
            if err != 0:
                return FLAG_ERROR, nfail
            nfail += rep
            t = tg if h >= rem else t + h
            if stop_at_bound:
                for sp in range(n_s):
                    if cm.kind_fluid[sp] and (x[sp] <= cm.lower[sp] or x[sp] >= cm.upper[sp]):
                        for gj in range(gi, grid.shape[0]):
                            for sq in range(n_s):
                                out[gj, sq] = x[sq]
                        return FLAG_BOUNDARY_STOP, nfail
        for sp in range(n_s):
            out[gi, sp] = x[sp]
    return FLAG_COMPLETED, nfail


@njit(cache=True)
def ssa_run(cm, x0, grid, out, s):
    """Exact first-reaction CTMC path recorded on the grid.

    Returns (terminal_flag, end_time): end_time is the absorption time when
    every channel's intensity vanishes, else the time of the last event.
    """
    n_r, n_s = cm.inp.shape
    x = x0.copy()
    for sp in range(n_s):
        out[0, sp] = x[sp]
    t = grid[0]
    gi = 1
    n_grid = grid.shape[0]
    while gi < n_grid:
        best = np.inf
        kbest = -1
        for r in range(n_r):
            v = reaction_intensity(cm, x, r, True)
            if np.isnan(v):
                return FLAG_ERROR, t
            if v > 0.0:
                d = _rng.next_exponential(s) / v
                if d < best:
                    best = d
                    kbest = r
        if kbest < 0:
            for gj in range(gi, n_grid):
                for sp in range(n_s):
                    out[gj, sp] = x[sp]
            return FLAG_ABSORBED, t
        te = t + best
        while gi < n_grid and grid[gi] < te:
            for sp in range(n_s):
                out[gi, sp] = x[sp]
            gi += 1
        if gi >= n_grid:
            return FLAG_COMPLETED, t
        for sp in range(n_s):
            x[sp] += cm.chg[kbest, sp]
        t = te
    return FLAG_COMPLETED, t


@njit(cache=True, parallel=True)
def ssa_ensemble(cm, x0, grid, out, flags, end_times, seed, run0):
    for k in prange(out.shape[0]):
        s = _rng.stream_init(seed, run0 + k)
        f, et = ssa_run(cm, x0, grid, out[k], s)
        flags[k] = f
        end_times[k] = et


@njit(cache=True, parallel=True)
def hybrid_ensemble(
    cm, disc_mask, x0, grid, out, flags, nfails, seed, run0, step_max, noise_scale, boundary_on, adaptive, stop_at_bound
):
    for k in prange(out.shape[0]):
        s = _rng.stream_init(seed, run0 + k)
        f, nf = hybrid_run(cm, disc_mask, x0, grid, out[k], step_max, noise_scale, boundary_on, adaptive, stop_at_bound, s)
        flags[k] = f
        nfails[k] = nf
