"""Deterministic random stream derivation.

Every random draw in the package comes from a generator derived as
``stream(master_seed, domain, index...)``.  Distinct key paths give
independent streams, and a draw depends only on its own key, never on
execution order or worker count.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

# Domain tags keeping unrelated draws on disjoint streams.
DOMAIN_NULL = 0       # null-table replications
DOMAIN_ALT = 1        # alternative-hypothesis replications
DOMAIN_TIEBREAK = 2   # tie-breaking shuffles in rank transforms
DOMAIN_TRUNCATE = 3   # row selection when truncating to a multiple of 6
DOMAIN_PAIR = 4       # per-pair seeds in dependence screening
DOMAIN_SAMPLER = 5    # direct sampler calls


def _seed_sequence(master_seed: int, key: tuple[int, ...]) -> np.random.SeedSequence:
    if master_seed < 0 or any(k < 0 for k in key):
        raise DomainError("seeds and stream ids must be non-negative integers")
    return np.random.SeedSequence(master_seed, spawn_key=key)


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Generator for the sub-stream at ``key`` under ``master_seed``."""
    return np.random.default_rng(_seed_sequence(master_seed, key))


def derive_seed(master_seed: int, *key: int) -> int:
    """A 64-bit integer seed deterministically derived from a key path."""
    ss = _seed_sequence(master_seed, key)
    return int(ss.generate_state(2, np.uint32).view(np.uint64)[0])
