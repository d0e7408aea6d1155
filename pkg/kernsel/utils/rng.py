"""
Deterministic seed derivation and uniform streams.

Replication ``i`` of a run with master seed ``m`` draws from
``numpy.random.Generator(PCG64(derive_seed(m, i)))``. ``derive_seed`` is the
SplitMix64 finalizer applied to the state ``m + (i + 1) * GOLDEN_GAMMA``:

    z = (m + (i + 1) * 0x9E3779B97F4A7C15)           mod 2**64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9         mod 2**64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB         mod 2**64
    z =  z ^ (z >> 31)

GOLDEN_GAMMA is odd, so the states are distinct for i < 2**64, and every step
of the finalizer is a bijection on 64-bit words; the derived seeds are
therefore distinct for distinct replication indices.
"""
import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_MULT_1 = 0xBF58476D1CE4E5B9
MIX_MULT_2 = 0x94D049BB133111EB

# Generator.random() returns multiples of 2**-53 in [0, 1 - 2**-53]; only an
# exact zero needs replacing to stay strictly inside (0, 1).
_ZERO_REPLACEMENT = 2.0 ** -54


def splitmix64(state: int) -> int:
    """Apply the SplitMix64 output finalizer to a 64-bit state."""
    z = state & MASK64
    z = ((z ^ (z >> 30)) * MIX_MULT_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_MULT_2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, replication_index: int) -> int:
    """
    Derive the 64-bit seed of one replication.

    Args:
        master_seed: Run-level seed (any integer, reduced modulo 2**64)
        replication_index: Zero-based replication index

    Returns:
        A 64-bit unsigned integer seed
    """
    if replication_index < 0:
        raise ValueError("replication_index must be non-negative")
    state = (int(master_seed) + (int(replication_index) + 1) * GOLDEN_GAMMA) & MASK64
    return splitmix64(state)


def uniform_stream(seed: int, size: int) -> np.ndarray:
    """
    Draw ``size`` uniforms strictly inside (0, 1) from a PCG64 stream.

    Args:
        seed: 64-bit seed, typically from derive_seed
        size: Number of draws

    Returns:
        Array of uniforms suitable for inverse-CDF sampling
    """
    generator = np.random.Generator(np.random.PCG64(int(seed) & MASK64))
    values = generator.random(int(size))
    values[values == 0.0] = _ZERO_REPLACEMENT
    return values
