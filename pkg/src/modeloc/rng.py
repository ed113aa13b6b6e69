"""Deterministic random-number streams.

All stochastic code in this package draws from an :class:`RngStream`, a
small value object wrapping numpy's ``SeedSequence`` spawning mechanism.
A stream is identified by ``(seed, path)`` where ``path`` is a tuple of
integers.  Two streams with the same identity always yield identical
draws, no matter which thread or process consumes them or in what
order, which is what makes benchmark runs reproducible across worker
counts.

Child streams are derived with :meth:`RngStream.child`, never by
sharing a generator object between tasks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """Identity of an independent random stream.

    Parameters
    ----------
    seed : int
        Root seed, non-negative.
    path : tuple of int
        Spawn path relative to the root.  ``()`` is the root stream.
    """

    seed: int
    path: tuple = field(default=())

    def __post_init__(self):
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    def child(self, *steps: int) -> "RngStream":
        """Return the sub-stream addressed by appending ``steps`` to the path."""
        return RngStream(self.seed, self.path + tuple(int(s) for s in steps))

    def generator(self) -> np.random.Generator:
        """Create a fresh generator positioned at the start of this stream."""
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=self.path))


def as_stream(random_state) -> RngStream:
    """Coerce ``random_state`` (int, RngStream or None) to an RngStream."""
    if isinstance(random_state, RngStream):
        return random_state
    if random_state is None:
        return RngStream(0)
    return RngStream(int(random_state))
