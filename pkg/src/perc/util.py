"""Small shared helpers: canonical pair keys, base-10 logs, seed derivation.

Every probability-like quantity in this package is kept in log space with
base 10, so the worked numbers in docstrings and tests read directly as
decimal exponents.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

NEG_INF = float("-inf")


def canonical_pair(a: str, b: str) -> tuple[str, str]:
    """Order an unordered record pair as (min id, max id)."""
    if a == b:
        raise ValueError(f"pair ({a!r}, {b!r}) is a self-loop, records must differ")
    return (a, b) if a < b else (b, a)


def log10_or_neg_inf(x: float) -> float:
    """log10 that maps 0 to -inf instead of raising."""
    if x < 0.0:
        raise ValueError(f"expected a probability in [0, 1], got {x}")
    if x == 0.0:
        return NEG_INF
    return math.log10(x)


def log10_clamped(x: float, floor: float) -> float:
    """log10 with values below ``floor`` clamped up to it first.

    Used wherever a zero-probability component would otherwise drive a
    log-space score to -inf and drown every other term.
    """
    return math.log10(max(x, floor))


def stable_hash(*parts) -> int:
    """Deterministic non-negative 63-bit hash of the given parts.

    Unlike built-in ``hash`` this does not vary across processes, so seeds
    derived from it are reproducible run to run.
    """
    digest = hashlib.sha256(repr(parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def derive_seed(seed: int, *parts) -> int:
    """Fold extra context (round index, block members, tags) into a seed."""
    return stable_hash(int(seed), *parts)


def make_rng(seed: int) -> np.random.Generator:
    """Generator for a derived seed; one construction point for the package."""
    return np.random.Generator(np.random.PCG64(int(seed) & (2**64 - 1)))
