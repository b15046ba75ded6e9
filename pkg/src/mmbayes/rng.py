"""Deterministic random streams.

Every sampler in this package draws from an :class:`RngState`, which wraps
numpy's Philox counter-based bit generator. Seeds are always caller-supplied;
nothing in the library reads ambient entropy. A state is single-owner: never
share one across threads. Parallel work derives independent child streams with
:meth:`RngState.split`, which spawns them from the root ``SeedSequence`` (the
documented splitting rule), so a root seed fixes every stream in a run.
"""

from __future__ import annotations

import numpy as np

__all__ = ["RngState"]


class RngState:
    """Mutable random stream owned by a single consumer.

    Identical seeds produce identical draw sequences across runs and
    platforms (for a fixed numpy version).
    """

    def __init__(self, seed: int, _seq: np.random.SeedSequence | None = None):
        if _seq is None:
            _seq = np.random.SeedSequence(seed)
        self.seed = seed
        self._seq = _seq
        self.generator = np.random.Generator(np.random.Philox(_seq))

    def split(self, n: int) -> list["RngState"]:
        """Derive ``n`` independent child streams; the parent stays usable."""
        return [RngState(self.seed, _seq=child) for child in self._seq.spawn(n)]

    def uniform(self, size=None):
        """Standard uniform draw(s) on [0, 1)."""
        return self.generator.random(size)

    def normal(self, size=None):
        """Standard normal draw(s)."""
        return self.generator.standard_normal(size)

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed})"
