"""Deterministic derivation of independent random streams.

Every randomized operation in this package takes an explicit seed and
derives its generators through `derive_rng`, a thin wrapper over
numpy's SeedSequence. Mixing (base_seed, stream label, indices...)
into the entropy pool gives streams that are independent of execution
order and worker count, so replicated experiments are reproducible
under any scheduling.
"""

import numpy as np

# Stream labels; distinct small ints keep derived streams disjoint.
STREAM_SAMPLE = 1      # drawing a sample set from a distribution
STREAM_SUBSETS = 2     # quantile-estimation subset draws
STREAM_BOOTSTRAP = 3   # bootstrap resampling
STREAM_ESTIMATOR = 4   # per-replicate estimator randomness in experiments


def _normalize(field):
    # SeedSequence entropy words must be non-negative ints
    v = int(field)
    return v & 0xFFFFFFFFFFFFFFFF


def derive_rng(base_seed, *fields):
    """Return a Generator seeded from (base_seed, *fields).

    Different field tuples give statistically independent streams; the
    same tuple always gives the same stream.
    """
    entropy = [_normalize(base_seed)] + [_normalize(f) for f in fields]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(base_seed, *fields):
    """Collapse (base_seed, *fields) into a single 64-bit seed."""
    entropy = [_normalize(base_seed)] + [_normalize(f) for f in fields]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])
