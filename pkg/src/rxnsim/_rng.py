"""Deterministic per-run random streams (numba-compiled xoshiro256++).

Each trajectory owns a stream keyed by (seed, run_index) through splitmix64,
so results are bit-identical for a given key no matter how runs are scheduled
across workers.  All simulation kernels and the Python-level Stream wrapper
draw through these primitives.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_RUNKEY = U64(0x632BE59BD9B4E019)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
    return z ^ (z >> U64(31))


@njit(cache=True)
def stream_init(seed, run):
    """xoshiro256++ state for stream (seed, run)."""
    s = np.empty(4, dtype=np.uint64)
    sm = U64(seed) ^ (U64(run) * _GOLDEN + _RUNKEY)
    for i in range(4):
        sm = sm + _GOLDEN
        s[i] = _mix64(sm)
    if s[0] == U64(0) and s[1] == U64(0) and s[2] == U64(0) and s[3] == U64(0):
        s[0] = _GOLDEN
    return s


@njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << U64(k)) | (x >> U64(64 - k))


@njit(cache=True, inline="always")
def next_u64(s):
    result = _rotl(s[0] + s[3], 23) + s[0]
    t = s[1] << U64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


@njit(cache=True, inline="always")
def next_uniform(s):
    """Uniform double in (0, 1]."""
    return ((next_u64(s) >> U64(11)) + U64(1)) * _INV53


@njit(cache=True, inline="always")
def next_exponential(s):
    """Standard exponential via inversion."""
    return -math.log(next_uniform(s))


@njit(cache=True, inline="always")
def next_normal(s):
    """Standard normal (Box-Muller, cosine branch)."""
    u1 = next_uniform(s)
    u2 = next_uniform(s)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
