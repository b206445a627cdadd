"""Seedable splitmix64 stream used everywhere randomness is needed.

Both the compiled and the pure-Python kernels step the same generator, so a
chain driven by either kernel consumes an identical random stream and produces
bit-identical output.  Seeds for independent components (chains, bridges,
candidate fits) are derived from one master seed so that every run is
replayable from a single recorded integer.
"""

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# 2**-53; multiplying a 53-bit integer by this gives a double in [0, 1).
UNIT_SCALE = 1.0 / 9007199254740992.0


def splitmix64(state):
    """Advance one step: returns (new_state, output)."""
    state = (state + _GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    z = z ^ (z >> 31)
    return state, z


def unit(value):
    """Map a 64-bit output to a double in [0, 1)."""
    return (value >> 11) * UNIT_SCALE


def derive_seeds(master, count, salt=0):
    """Derive `count` independent 64-bit seeds from a master seed.

    The same (master, salt, index) always yields the same seed, which is what
    makes recorded runs replayable.
    """
    state = (int(master) ^ (salt * _GAMMA)) & MASK64
    out = []
    for _ in range(count):
        state, z = splitmix64(state)
        out.append(z)
    return out


class SplitMix:
    """Tiny stateful wrapper for driver-side draws (initial graphs etc.)."""

    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next_uint(self):
        self.state, z = splitmix64(self.state)
        return z

    def next_unit(self):
        return unit(self.next_uint())

    def next_below(self, k):
        """Uniform integer in [0, k)."""
        v = int(self.next_unit() * k)
        return k - 1 if v >= k else v
