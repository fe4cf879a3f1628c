"""Deterministic derivation of per-unit random generators.

Every randomized routine in this package derives its generator from a master
seed plus structural indices (stage, grid point, trial number, ...) instead of
sharing one generator.  This makes results independent of scheduling and
iteration order: trial 17 sees the same stream whether it runs first, last, or
on another worker process.

The derivation is a splitmix64 avalanche chain.  splitmix64 is the standard
64-bit finalizer (Steele-Lea-Flood increment, two xor-multiply rounds); folding
each index through it gives a well-mixed 64-bit stream key.  The chain is
order-sensitive, so mix(a, b) != mix(b, a), and length-sensitive, so
mix(a) != mix(a, 0).
"""

from __future__ import annotations

import random

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One splitmix64 step: add the golden-gamma increment, then avalanche."""
    z = (x + _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix(*parts: int) -> int:
    """Fold integers into one 64-bit key. Order and arity both matter."""
    acc = splitmix64(len(parts))
    for p in parts:
        acc = splitmix64(acc ^ (p & _MASK64))
    return acc


def make_rng(*parts: int) -> random.Random:
    """A stdlib generator keyed by mix(*parts)."""
    return random.Random(mix(*parts))
