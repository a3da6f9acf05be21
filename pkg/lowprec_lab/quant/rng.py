"""
Counter-based random streams.

A stream is the triple (seed, stream_id, counter); every draw is a pure
function of it, so results never depend on thread scheduling or on the order
in which independent consumers run.
"""

from dataclasses import dataclass, replace

import numpy as np

_U64_LIMIT = 1 << 64


@dataclass(frozen=True)
class RngStream:
    """
    Immutable handle on a Philox counter-mode stream.

    Usage:
        stream = RngStream(seed=7).derive(component, worker, t)
        noise = stream.generator().standard_normal(shape)
    """
    seed: int
    stream_id: int = 0
    counter: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not 0 <= value < _U64_LIMIT:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {value}")
        if self.counter < 0:
            raise ValueError(f"counter must be non-negative, got {self.counter}")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at this stream's counter."""
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key, counter=self.counter))

    def advance(self, steps: int = 1) -> "RngStream":
        """Copy with the counter moved forward by `steps` Philox blocks."""
        return replace(self, counter=self.counter + steps)

    def derive(self, *parts: int) -> "RngStream":
        """
        Child stream for a tuple of non-negative integers.

        The child id mixes this stream's id with `parts` through SeedSequence,
        so (component, worker, iteration) triples give unrelated streams.
        """
        entropy = [self.stream_id, *[int(p) for p in parts]]
        child_id = np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0]
        return RngStream(seed=self.seed, stream_id=int(child_id), counter=0)


def component_stream(seed: int, component: int, worker: int, t: int) -> RngStream:
    """Stream used for quantising one component at one (worker, iteration)."""
    return RngStream(seed=seed).derive(component, worker, t)
