"""Deterministic random generation and test traces.

The generator is splitmix64: state advances by the 64-bit golden-gamma
constant and each output is the mixed state (xor-shift multiply with the
Stafford mix13 constants). Draw values are therefore bit-identical across
platforms, which the bug-deduplication hashes rely on.

A TestTrace records one entry per logical draw made while generating a
single test: the row index for each input selection, the resulting value
of each randInt, and the raw 64-bit word behind each noise cell. Episode
playouts use their own generator and never touch the trace.
"""

from __future__ import annotations

from .errors import RangeError

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# ordered list of logical draws; 64-bit ints (negatives allowed for randInt)
TestTrace = list


class Splitmix64:
    """Seedable deterministic 64-bit generator."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], consuming exactly one 64-bit draw."""
        if lo > hi:
            raise RangeError(f"empty range [{lo}, {hi}]")
        return lo + self.next_u64() % (hi - lo + 1)

    def uniform01(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (2.0 ** -53)


class ConstantRng:
    """Degenerate generator returning one fixed word; used to force duplicate traces."""

    def __init__(self, value: int):
        self._value = value & MASK64

    def next_u64(self) -> int:
        return self._value

    def randint(self, lo: int, hi: int) -> int:
        if lo > hi:
            raise RangeError(f"empty range [{lo}, {hi}]")
        return lo + self.next_u64() % (hi - lo + 1)

    def uniform01(self) -> float:
        return (self.next_u64() >> 11) * (2.0 ** -53)


class TraceRng:
    """Test-generation draws; every logical draw appends one trace entry."""

    def __init__(self, rng, trace: TestTrace | None = None):
        self.rng = rng
        self.trace: TestTrace = trace if trace is not None else []

    def draw_index(self, n: int) -> int:
        index = self.rng.randint(0, n - 1)
        self.trace.append(index)
        return index

    def draw_randint(self, lo: int, hi: int) -> int:
        value = self.rng.randint(lo, hi)
        self.trace.append(value)
        return value

    def draw_noise_u64(self) -> int:
        word = self.rng.next_u64()
        self.trace.append(word)
        return word


class ReplayTraceRng:
    """Replays a recorded trace section instead of drawing fresh randomness."""

    def __init__(self, entries):
        self._entries = list(entries)
        self._pos = 0

    def _pop(self) -> int:
        if self._pos >= len(self._entries):
            raise RangeError("replay trace exhausted")
        value = self._entries[self._pos]
        self._pos += 1
        return value

    def draw_index(self, n: int) -> int:
        index = self._pop()
        if not 0 <= index < n:
            raise RangeError(f"replayed index {index} out of range for source of {n}")
        return index

    def draw_randint(self, lo: int, hi: int) -> int:
        if lo > hi:
            raise RangeError(f"empty range [{lo}, {hi}]")
        value = self._pop()
        if not lo <= value <= hi:
            raise RangeError(f"replayed value {value} outside [{lo}, {hi}]")
        return value

    def draw_noise_u64(self) -> int:
        return self._pop()
