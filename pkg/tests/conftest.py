import numpy as np
import pytest

from curlowrank.harness import lowrank_gaussian


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def rank_k(m, n, k, rng, kappa=None):
    """Exactly-rank-k Gaussian-factor test matrix."""
    return lowrank_gaussian(m, n, k, rng, kappa)


def orthonormal(n, k, rng):
    """Random n-by-k matrix with orthonormal columns."""
    q, _ = np.linalg.qr(rng.standard_normal((n, k)))
    return q
