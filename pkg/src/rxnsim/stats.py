"""Ensemble post-processing: mean curves, mixed atom/histogram distributions, KS.

All statistics work on unscaled species values.  Distributions are stored as
explicit boundary atoms (exact clamped values, e.g. extinction at 0) plus a
fixed-width histogram of the remaining mass; this replaces kernel density
estimation on purpose, keeping every number deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ATOM_TOL = 1e-9  # fluid states are clamped exactly; guards round-off only


@dataclass
class Pmf:
    """Atoms plus histogram bins; probabilities sum to one."""

    atoms: list[tuple[float, float]]  # (value, probability)
    bin_edges: np.ndarray  # [n_bins + 1]
    bin_probs: np.ndarray  # [n_bins]

    @property
    def total(self) -> float:
        return float(sum(p for _, p in self.atoms) + self.bin_probs.sum())

    def cdf(self, values) -> np.ndarray:
        """Right-continuous CDF at the given values."""
        values = np.atleast_1d(np.asarray(values, dtype=np.float64))
        out = np.zeros(len(values))
        for v, p in self.atoms:
            out += p * (values >= v - ATOM_TOL)
        if len(self.bin_probs):
            cum = np.concatenate([[0.0], np.cumsum(self.bin_probs)])
            w = self.bin_edges[1:] - self.bin_edges[:-1]
            for i, v in enumerate(values):
                k = np.searchsorted(self.bin_edges, v, side="right") - 1
                if k < 0:
                    continue
                if k >= len(self.bin_probs):
                    out[i] += cum[-1]
                else:  # linear within the bin
                    out[i] += cum[k] + self.bin_probs[k] * (v - self.bin_edges[k]) / w[k]
        return out


def _time_index(times: np.ndarray, t: float) -> int:
    i = int(np.argmin(np.abs(times - t)))
    if abs(times[i] - t) > 1e-9 * max(1.0, abs(t)):
        raise ValueError(f"time {t} is not on the recording grid")
    return i


def _species_index(ensemble, species: str) -> int:
    names = list(ensemble.species_names)
    if species not in names:
        raise KeyError(f"unknown species {species!r}; have {', '.join(names)}")
    return names.index(species)


def ensemble_mean(ensemble, species: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pointwise mean and standard error of one species across runs.

    Returns (times, mean, stderr), all on the recording grid.  Works on any
    object exposing `times`, `states` and `species_names` (a simulated
    Ensemble or a CSV re-load).
    """
    si = _species_index(ensemble, species)
    vals = ensemble.states[:, :, si]
    mean = vals.mean(axis=0)
    n = vals.shape[0]
    stderr = vals.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros_like(mean)
    return ensemble.times, mean, stderr


def pmf_at_time(ensemble, species: str, t: float, bin_width: float,
                boundary_atoms: tuple[float, ...] = (0.0,)) -> Pmf:
    """Empirical distribution at time t: listed atoms plus a histogram.

    Values within ATOM_TOL of a listed atom accumulate into that atom; the
    remainder is histogrammed with the given bin width on edges aligned to
    multiples of the width.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    ti = _time_index(ensemble.times, t)
    vals = np.sort(ensemble.states[:, ti, _species_index(ensemble, species)])
    n = len(vals)
    atoms = []
    keep = np.ones(n, dtype=bool)
    for av in boundary_atoms:
        hit = np.abs(vals - av) <= ATOM_TOL
        if hit.any():
            atoms.append((float(av), float(hit.sum()) / n))
            keep &= ~hit
    rest = vals[keep]
    if len(rest):
        lo = np.floor(rest.min() / bin_width) * bin_width
        hi = np.ceil(rest.max() / bin_width) * bin_width
        if hi <= lo:
            hi = lo + bin_width
        nbins = int(round((hi - lo) / bin_width))
        counts, edges = np.histogram(rest, bins=nbins, range=(lo, hi))
        probs = counts / n
    else:
        edges = np.array([0.0, bin_width])
        probs = np.zeros(1)
    return Pmf(atoms, edges, probs)


def ks_distance(sample_a, sample_b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic, atoms included."""
    a = np.sort(np.asarray(sample_a, dtype=np.float64))
    b = np.sort(np.asarray(sample_b, dtype=np.float64))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("samples must be non-empty")
    xs = np.concatenate([a, b])
    fa = np.searchsorted(a, xs, side="right") / len(a)
    fb = np.searchsorted(b, xs, side="right") / len(b)
    return float(np.abs(fa - fb).max())


def _fmt(v: float) -> str:
    return repr(int(v)) if float(v).is_integer() and abs(v) < 1e15 else repr(float(v))


def write_stats_csv(ensemble, species_list, path: str) -> None:
    """`time,species,mean,stderr` rows over the recording grid."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("time,species,mean,stderr\n")
        for sp in species_list:
            times, mean, se = ensemble_mean(ensemble, sp)
            for t, m, s in zip(times, mean, se):
                fh.write(f"{_fmt(float(t))},{sp},{_fmt(float(m))},{_fmt(float(s))}\n")


def write_pmf_csv(pmf: Pmf, path: str) -> None:
    """`kind,lo,hi,prob` rows: one `atom` row per atom, `bin` rows after."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("kind,lo,hi,prob\n")
        for v, p in pmf.atoms:
            fh.write(f"atom,{_fmt(v)},{_fmt(v)},{_fmt(p)}\n")
        for k, p in enumerate(pmf.bin_probs):
            fh.write(f"bin,{_fmt(float(pmf.bin_edges[k]))},{_fmt(float(pmf.bin_edges[k + 1]))},{_fmt(float(p))}\n")
