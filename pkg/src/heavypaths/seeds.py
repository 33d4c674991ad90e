"""Seed-domain bookkeeping for reproducible, stream-separated sampling.

Every stochastic ingredient of an experiment draws from its own Philox
stream, derived from ``(seed, domain, stream_index)`` through a
``SeedSequence`` spawn key.  Domains are disjoint by construction, so e.g.
reshuffling innovation streams can never alter a coefficient draw, and
independent replications can run in any order (or on any number of
workers) without changing a single bit of output.
"""
from __future__ import annotations

import numpy as np

# Disjoint seed domains.  Never reuse a number.
DOMAIN_INNOVATIONS = 0
DOMAIN_COEFFICIENTS = 1
DOMAIN_LIMIT = 2
DOMAIN_PERTURBATION = 3
DOMAIN_CONTROL = 4


def rng_for(seed: int, domain: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for one (domain, stream) slot of an experiment."""
    ss = np.random.SeedSequence(seed, spawn_key=(domain, stream))
    return np.random.Generator(np.random.Philox(ss))
