"""Deterministic seed derivation shared by sampling, baselining and generation."""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


def mix64(x: int) -> int:
    """SplitMix64 finalizer: a 64-bit avalanche mix of an integer."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def derive_seed(master_seed: int, *indices: int) -> int:
    """Split a master seed into an independent child seed.

    Each index is XOR-folded through mix64 in turn, so
    derive_seed(master, i) == mix64(master XOR i), and children for
    different index tuples are uncorrelated and reproducible.
    """
    seed = master_seed & _MASK64
    for i in indices:
        seed = mix64(seed ^ (i & _MASK64))
    return seed


def fnv1a64(data: str) -> int:
    """FNV-1a hash of a string's UTF-8 bytes."""
    h = 0xCBF29CE484222325
    for b in data.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & _MASK64
    return h


def record_uniform(seed: int, record_id: str) -> float:
    """Uniform in [0, 1) keyed by (seed, record id).

    Keying on the id rather than the record's position makes sampling
    policies stable under re-ordering of the input.
    """
    x = mix64(seed ^ fnv1a64(record_id))
    return (x >> 11) * (1.0 / 9007199254740992.0)
