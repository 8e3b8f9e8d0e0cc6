"""Reaction-network data model: species, reactions, conservation invariants, bounds.

Counts are stored unscaled (raw molecule numbers); all density scaling by the
model scale N happens in the kinetics layer.  A validated ``Model`` is
immutable and safe to share across concurrent workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import expr as _expr

FLUID = "fluid"
DISCRETE = "discrete"

# Farkas enumeration guardrail; the target models have <= 16 species.
_MAX_INVARIANT_CANDIDATES = 4096


class ModelError(ValueError):
    """Raised when a model fails structural validation."""


@dataclass(frozen=True)
class Species:
    name: str
    kind: str = FLUID
    init_count: int = 0
    lower_bound: int | None = None  # unscaled counts; None = unspecified (defaults to 0)
    upper_bound: int | None = None  # None = unbounded or derived from invariants


@dataclass(frozen=True)
class MassAction:
    """Stochastic mass-action law with rate constant mu (optionally a named parameter)."""

    constant: float
    param: str | None = None


@dataclass(frozen=True)
class ExprRate:
    """Arbitrary intensity expression over raw counts, N and parameters."""

    tree: _expr.Node


RateLaw = MassAction | ExprRate


@dataclass(frozen=True)
class Reaction:
    name: str
    inputs: tuple[int, ...]  # multiplicity per species, model order
    outputs: tuple[int, ...]
    rate: RateLaw


@dataclass(frozen=True)
class PInvariant:
    """Non-negative integer weights conserved by every reaction; total = w . init."""

    weights: tuple[int, ...]
    total: int


@dataclass(frozen=True)
class Model:
    name: str
    species: tuple[Species, ...]
    reactions: tuple[Reaction, ...]
    scale: int
    params: tuple[tuple[str, float], ...] = ()
    invariants: tuple[PInvariant, ...] = ()
    partition_mode: str = "relaxed"  # "relaxed" | "strict"
    validated: bool = False

    @property
    def species_names(self) -> tuple[str, ...]:
        return tuple(sp.name for sp in self.species)

    def species_index(self, name: str) -> int:
        try:
            return self.species_names.index(name)
        except ValueError:
            raise ModelError(f"unknown species {name!r}") from None

    def reaction_index(self, name: str) -> int:
        for i, r in enumerate(self.reactions):
            if r.name == name:
                return i
        raise ModelError(f"unknown reaction {name!r}")

    @property
    def params_dict(self) -> dict[str, float]:
        return dict(self.params)

    @property
    def fluid_indices(self) -> tuple[int, ...]:
        return tuple(i for i, sp in enumerate(self.species) if sp.kind == FLUID)

    @property
    def discrete_indices(self) -> tuple[int, ...]:
        return tuple(i for i, sp in enumerate(self.species) if sp.kind == DISCRETE)

    @property
    def init_counts(self) -> tuple[int, ...]:
        return tuple(sp.init_count for sp in self.species)

    @property
    def unbounded_fluid(self) -> tuple[str, ...]:
        """Fluid species with no finite upper bound (boundary machinery guards only 0)."""
        return tuple(sp.name for sp in self.species if sp.kind == FLUID and sp.upper_bound is None)


def change_vector(reaction: Reaction) -> tuple[int, ...]:
    """Net state change l = O_t - I_t of one reaction."""
    return tuple(o - i for i, o in zip(reaction.inputs, reaction.outputs))


def _support(weights) -> tuple[int, ...]:
    return tuple(i for i, w in enumerate(weights) if w != 0)


def _gcd_all(vec: list[int]) -> int:
    g = 0
    for v in vec:
        g = math.gcd(g, abs(v))
    return g


def detect_p_invariants(model: Model) -> list[PInvariant]:
    """Minimal-support non-negative integer kernel of the stoichiometric matrix.

    Farkas-style column elimination; deterministic output, ordered
    lexicographically by support then weights.
    """
    n_s = len(model.species)
    changes = [change_vector(r) for r in model.reactions]
    # candidate = (weights over species, residual w . l per reaction)
    cands: list[tuple[list[int], list[int]]] = []
    for s in range(n_s):
        w = [0] * n_s
        w[s] = 1
        cands.append((w, [c[s] for c in changes]))
    for j in range(len(changes)):
        zeros = [c for c in cands if c[1][j] == 0]
        pos = [c for c in cands if c[1][j] > 0]
        neg = [c for c in cands if c[1][j] < 0]
        new = zeros
        for wp, rp in pos:
            for wn, rn in neg:
                a, b = rp[j], -rn[j]
                g = math.gcd(a, b)
                ca, cb = b // g, a // g
                w = [ca * x + cb * y for x, y in zip(wp, wn)]
                r = [ca * x + cb * y for x, y in zip(rp, rn)]
                gw = _gcd_all(w)
                if gw > 1:  # r = w . L, so gw divides r as well
                    w = [x // gw for x in w]
                    r = [x // gw for x in r]
                new.append((w, r))
        # prune exact duplicates and strict-superset supports (Colom/Silva style)
        kept: list[tuple[list[int], list[int]]] = []
        seen_rows: set[tuple[int, ...]] = set()
        supports = [set(_support(w)) for w, _ in new]
        for i, (w, r) in enumerate(new):
            row = tuple(w) + tuple(r)
            if row in seen_rows:
                continue
            if any(k != i and supports[k] < supports[i] for k in range(len(new))):
                continue
            seen_rows.add(row)
            kept.append((w, r))
        cands = kept
        if len(cands) > _MAX_INVARIANT_CANDIDATES:
            raise ModelError("invariant enumeration exceeded the supported model size")
    inits = model.init_counts
    seen = set()
    result = []
    for w, _ in cands:
        tw = tuple(w)
        if not any(tw) or tw in seen:
            continue
        seen.add(tw)
        result.append(tw)
    result.sort(key=lambda w: (_support(w), w))
    return [PInvariant(w, sum(x * i for x, i in zip(w, inits))) for w in result]


def derive_bounds(model: Model) -> list[tuple[int, int | None]]:
    """Per-species [lower, upper]: 0 and invariant-implied caps, user bounds win."""
    out = []
    for s, sp in enumerate(model.species):
        lo = sp.lower_bound if sp.lower_bound is not None else 0
        hi = sp.upper_bound
        if hi is None:
            for inv in model.invariants:
                if inv.weights[s] > 0:
                    cap = inv.total // inv.weights[s]
                    hi = cap if hi is None else min(hi, cap)
        out.append((lo, hi))
    return out


def _check_rate_law(model: Model, r: Reaction) -> None:
    if isinstance(r.rate, MassAction):
        if not r.rate.constant > 0:
            raise ModelError(f"reaction {r.name!r}: mass-action constant must be > 0")
        if r.rate.param is not None and r.rate.param not in dict(model.params):
            raise ModelError(f"reaction {r.name!r}: unknown parameter {r.rate.param!r}")
    else:
        known = set(model.species_names) | set(dict(model.params))
        for ident in _expr.names(r.rate.tree):
            if ident != "N" and ident not in known:
                raise ModelError(f"reaction {r.name!r}: unknown identifier {ident!r} in rate")


def validate_model(model: Model) -> Model:
    """Validate structure, detect invariants if undeclared, and fix bounds.

    Returns a new validated Model; raises ModelError on any violation.
    """
    names = [sp.name for sp in model.species]
    if len(set(names)) != len(names):
        dup = sorted({n for n in names if names.count(n) > 1})
        raise ModelError(f"duplicate species: {', '.join(dup)}")
    if model.scale < 1:
        raise ModelError("scale N must be a positive integer")
    if model.partition_mode not in ("relaxed", "strict"):
        raise ModelError(f"unknown partition mode {model.partition_mode!r}")
    n_s = len(model.species)
    for r in model.reactions:
        if len(r.inputs) != n_s or len(r.outputs) != n_s:
            raise ModelError(f"reaction {r.name!r}: stoichiometry length mismatch")
        if any(v < 0 for v in r.inputs) or any(v < 0 for v in r.outputs):
            raise ModelError(f"reaction {r.name!r}: negative stoichiometry")
        if all(o == i for i, o in zip(r.inputs, r.outputs)):
            raise ModelError(f"reaction {r.name!r}: null change vector")
        _check_rate_law(model, r)
    rnames = [r.name for r in model.reactions]
    if len(set(rnames)) != len(rnames):
        raise ModelError("duplicate reaction names")

    invariants = tuple(model.invariants) or tuple(detect_p_invariants(model))
    inits = model.init_counts
    for inv in invariants:
        if any(w < 0 for w in inv.weights):
            raise ModelError("invariant weights must be non-negative")
        for r in model.reactions:
            if sum(w * l for w, l in zip(inv.weights, change_vector(r))) != 0:
                raise ModelError(f"invariant {inv.weights} violated by reaction {r.name!r}")
        if inv.total != sum(w * i for w, i in zip(inv.weights, inits)):
            raise ModelError(f"invariant {inv.weights}: total does not match the initial state")

    bounded = replace(model, invariants=invariants)
    new_species = []
    for sp, (lo, hi) in zip(model.species, derive_bounds(bounded)):
        if sp.kind not in (FLUID, DISCRETE):
            raise ModelError(f"species {sp.name!r}: unknown kind {sp.kind!r}")
        if sp.kind == FLUID and lo is None:
            raise ModelError(f"fluid species {sp.name!r} has no finite lower bound")
        if hi is not None and lo > hi:
            raise ModelError(f"species {sp.name!r}: lower bound exceeds upper bound")
        if sp.init_count < lo or (hi is not None and sp.init_count > hi):
            raise ModelError(f"species {sp.name!r}: initial count outside [{lo}, {hi}]")
        new_species.append(replace(sp, lower_bound=lo, upper_bound=hi))

    return replace(model, species=tuple(new_species), invariants=invariants, validated=True)


def apply_bound_overrides(model: Model, overrides: dict[str, tuple[int, int | None]]) -> Model:
    """Re-validate with user bounds replacing the derived ones."""
    for name in overrides:
        model.species_index(name)
    new_species = tuple(
        replace(sp, lower_bound=overrides[sp.name][0], upper_bound=overrides[sp.name][1])
        if sp.name in overrides
        else sp
        for sp in model.species
    )
    return validate_model(replace(model, species=new_species, validated=False))
