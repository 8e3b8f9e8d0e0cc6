"""Python wrapper over the per-run deterministic streams used by the kernels."""
from __future__ import annotations

from . import _rng

_MASK64 = (1 << 64) - 1


class Stream:
    """Deterministic random stream keyed by (seed, run_index).

    Draws are bit-identical to the ones the simulation kernels make, so a
    single hybrid step driven from Python reproduces the kernel exactly.
    """

    def __init__(self, seed: int, run_index: int = 0):
        self.seed = seed
        self.run_index = run_index
        self.state = _rng.stream_init(seed & _MASK64, run_index & _MASK64)

    def uniform(self) -> float:
        """Uniform draw in (0, 1]."""
        return float(_rng.next_uniform(self.state))

    def exponential(self, rate: float = 1.0) -> float:
        return float(_rng.next_exponential(self.state)) / rate

    def normal(self) -> float:
        return float(_rng.next_normal(self.state))
