import numpy as np
import pytest


def random_spd(rng, n, eps=1e-3):
    """A = B B^T + eps I with B Gaussian: well-conditioned SPD test matrix."""
    b = rng.standard_normal((n, n))
    return b @ b.T + eps * np.eye(n)


def random_symmetric(rng, n, scale=1.0):
    b = rng.standard_normal((n, n))
    return scale * 0.5 * (b + b.T)


def random_invertible(rng, n, max_cond=1e6):
    """Gaussian matrix, rejected while the condition number exceeds max_cond."""
    while True:
        g = rng.standard_normal((n, n))
        if np.linalg.cond(g) <= max_cond:
            return g


def random_rotation(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
